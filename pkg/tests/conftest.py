from pathlib import Path

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def unit_linear_four_node(seed: int, n: int = 1000) -> np.ndarray:
    """Unit-coefficient linear-Gaussian data on the four_node fixture graph.

    Edges 1->3, 2->0, 2->3, 3->0; node 0 depends on 2 both directly and
    through 3, which is what makes the pair (0, 2) hard for first-order
    scores alone.
    """
    rng = np.random.default_rng(seed)
    x = np.zeros((n, 4))
    x[:, 1] = rng.normal(size=n)
    x[:, 2] = rng.normal(size=n)
    x[:, 3] = x[:, 1] + x[:, 2] + rng.normal(size=n)
    x[:, 0] = x[:, 2] + x[:, 3] + rng.normal(size=n)
    return x
