import numpy as np
import pytest

from otdag.synthdata import (
    ABS,
    ABS_TANH_MIX,
    LINEAR,
    MECHANISMS,
    MLP,
    SIGMOID_MIX,
    TANH,
    SemModel,
    generate,
    is_acyclic,
    random_dag,
    sample_weight,
    simulate,
    topological_order,
)


class TestRandomDag:
    def test_two_nodes_one_edge_is_forced(self):
        for seed in range(10):
            assert random_dag(2, 1, seed).num_edges == 1

    def test_zero_edges(self):
        assert random_dag(5, 0, 0).num_edges == 0

    def test_mean_edge_count(self):
        counts = [random_dag(10, 40, seed).num_edges for seed in range(1000)]
        assert abs(np.mean(counts) - 40) < 0.05 * 40

    @pytest.mark.parametrize("seed", range(20))
    def test_always_acyclic(self, seed):
        g = random_dag(8, 20, seed)
        assert is_acyclic(g.adjacency)
        assert np.all(np.diag(g.adjacency) == 0)

    def test_topo_order_is_consistent(self):
        g = random_dag(7, 12, 3)
        position = {int(v): idx for idx, v in enumerate(g.topo_order)}
        for parent, child in g.edges():
            assert position[parent] < position[child]

    def test_rejects_out_of_range_edge_count(self):
        with pytest.raises(ValueError):
            random_dag(4, 7, 0)

    def test_deterministic(self):
        a = random_dag(6, 9, 42)
        b = random_dag(6, 9, 42)
        assert np.array_equal(a.adjacency, b.adjacency)
        assert np.array_equal(a.topo_order, b.topo_order)


class TestSampleWeight:
    def test_support_sign_and_mean(self):
        rng = np.random.default_rng(0)
        draws = np.array([sample_weight(rng) for _ in range(10_000)])
        assert np.all((np.abs(draws) >= 0.5) & (np.abs(draws) <= 2.0))
        assert abs((draws > 0).mean() - 0.5) < 0.03
        assert abs(np.abs(draws).mean() - 1.25) < 0.03 * 1.25


class TestGenerate:
    def test_edgeless_graph_is_pure_noise(self):
        g = random_dag(4, 0, 0)
        sample = simulate(g, SemModel(kind=LINEAR), 50, 1)
        assert np.array_equal(sample.data, sample.noise)

    def test_abs_residual_replays_noise(self):
        g = random_dag(2, 1, 5)
        sample = simulate(g, SemModel(kind=ABS), 100, 9)
        (parent, child) = g.edges()[0]
        alpha = sample.weights[child]["alpha"][0]
        residual = sample.data[:, child] - alpha * np.abs(sample.data[:, parent])
        assert np.allclose(residual, sample.noise[:, child], atol=1e-12)

    def test_linear_residual_replays_noise(self):
        g = random_dag(3, 3, 11)
        sample = simulate(g, SemModel(kind=LINEAR), 60, 2)
        for child in range(3):
            parents = g.parents(child)
            if not parents:
                continue
            alpha = np.array(sample.weights[child]["alpha"])
            residual = sample.data[:, child] - sample.data[:, parents] @ alpha
            assert np.allclose(residual, sample.noise[:, child], atol=1e-12)

    def test_tanh_children_stay_within_one_of_noise(self):
        g = random_dag(5, 8, 2)
        sample = simulate(g, SemModel(kind=TANH), 200, 3)
        for child in range(5):
            if g.parents(child):
                assert np.all(np.abs(sample.data[:, child] - sample.noise[:, child]) <= 1.0)

    def test_sigmoid_mix_children_are_bounded_by_beta(self):
        g = random_dag(5, 8, 4)
        sample = simulate(g, SemModel(kind=SIGMOID_MIX), 200, 5)
        for child in range(5):
            if g.parents(child):
                beta = sample.weights[child]["beta"]
                assert abs(beta) <= 2.0
                assert np.all(np.abs(sample.data[:, child]) <= abs(beta))

    def test_mlp_weight_shapes(self):
        g = random_dag(4, 5, 7)
        sample = simulate(g, SemModel(kind=MLP, hidden_width=6), 30, 8)
        for child in range(4):
            a = len(g.parents(child))
            if a:
                w = sample.weights[child]
                assert np.array(w["w1"]).shape == (a, 6)
                assert np.array(w["w2"]).shape == (6,)

    @pytest.mark.parametrize("kind", MECHANISMS)
    def test_deterministic_per_mechanism(self, kind):
        g = random_dag(5, 7, 1)
        model = SemModel(kind=kind, hidden_width=4)
        assert np.array_equal(generate(g, model, 40, 6), generate(g, model, 40, 6))

    def test_mix_assignments_recorded_per_node(self):
        g = random_dag(6, 9, 2)
        sample = simulate(g, SemModel(kind=ABS_TANH_MIX), 20, 3)
        assert len(sample.mechanisms) == 6
        assert set(sample.mechanisms) <= {"abs", "tanh"}

    def test_noise_std_scales_roots(self):
        g = random_dag(3, 0, 0)
        wide = simulate(g, SemModel(kind=LINEAR, noise_std=3.0), 4000, 7)
        assert abs(wide.data.std() - 3.0) < 0.15

    def test_metadata_is_json_ready(self):
        import json

        g = random_dag(3, 3, 1)
        sample = simulate(g, SemModel(kind=ABS_TANH_MIX), 10, 2)
        payload = json.dumps(sample.metadata())
        assert "mechanisms" in payload

    def test_rejects_bad_model(self):
        with pytest.raises(ValueError):
            SemModel(kind="cubic")
        with pytest.raises(ValueError):
            SemModel(noise_std=0.0)


class TestTopologicalOrder:
    def test_orders_parents_first(self):
        g = random_dag(6, 10, 3)
        order = topological_order(g.adjacency)
        position = {int(v): idx for idx, v in enumerate(order)}
        for parent, child in g.edges():
            assert position[parent] < position[child]

    def test_raises_on_cycle(self):
        adj = np.array([[0, 1], [1, 0]], dtype=np.int8)
        with pytest.raises(ValueError):
            topological_order(adj)
