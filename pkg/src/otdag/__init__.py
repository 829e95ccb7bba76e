"""Two-phase nonparametric DAG learning via first- and second-order HSIC.

The optimal phase trains a Gumbel-softmax selector over pairwise HSIC
values to propose an undirected skeleton; the tuning phase deletes,
adds, and orients edges by comparing first-order against second-order
(summed-variable) HSIC, and returns a DAG.
"""

from .hsic import HsicCache, hsic
from .kernels import KernelSpec, center, gram, median_heuristic
from .metrics import MetricsReport, aupr, confusion, report, shd, sid
from .optimal import GumbelConfig, extract_skeleton, train
from .pipeline import LearnResult, learn_dag, run_benchmark
from .synthdata import SemModel, TrueGraph, generate, random_dag, simulate
from .tuning import TuneResult, tune

__all__ = [
    "GumbelConfig",
    "HsicCache",
    "KernelSpec",
    "LearnResult",
    "MetricsReport",
    "SemModel",
    "TrueGraph",
    "TuneResult",
    "aupr",
    "center",
    "confusion",
    "extract_skeleton",
    "generate",
    "gram",
    "hsic",
    "learn_dag",
    "median_heuristic",
    "random_dag",
    "report",
    "run_benchmark",
    "shd",
    "sid",
    "simulate",
    "train",
    "tune",
]

__version__ = "0.1.0"
