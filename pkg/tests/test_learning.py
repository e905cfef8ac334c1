import numpy as np
import pytest

from graphvar import FormatError, is_acyclic
from graphvar.graphs import graph_from_state_vector
from graphvar.learning import (
    Dataset,
    LearnerSpec,
    bic_score,
    bootstrap,
    hc_bic,
    mi_skeleton,
    mutual_information,
    select_algorithm,
    select_tuning,
)


def chain_data(n_rows, flip, seed):
    """Binary chain x1 -> x2 -> x3 with the given flip noise."""
    rng = np.random.default_rng(seed)
    x1 = rng.integers(0, 2, n_rows)
    x2 = np.where(rng.random(n_rows) < flip, 1 - x1, x1)
    x3 = np.where(rng.random(n_rows) < flip, 1 - x2, x2)
    rows = np.stack([x1, x2, x3], axis=1).astype(str)
    return Dataset.from_rows(["x1", "x2", "x3"], rows.tolist())


def independent_data(n_rows, n_cols, seed):
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, 2, (n_rows, n_cols)).astype(str)
    return Dataset.from_rows([f"c{i}" for i in range(n_cols)], rows.tolist())


def noise_learner(data, rng):
    """Fair-coin edge stub; the maximum-entropy reference as a 'learner'."""
    k = data.n_cols * (data.n_cols - 1) // 2
    states = (rng.random(k) < 0.5).astype(np.int8)
    return graph_from_state_vector(data.n_cols, states, directed=False)


class TestDataset:
    def test_from_rows_and_levels(self):
        d = Dataset.from_rows(["a", "b"], [["x", "1"], ["y", "0"], ["x", "0"]])
        assert d.n_rows == 3 and d.n_cols == 2
        assert d.levels == (("x", "y"), ("0", "1"))
        assert d.cardinalities() == (2, 2)

    def test_missing_value_rejected(self):
        with pytest.raises(FormatError):
            Dataset.from_rows(["a", "b"], [["x", ""]])
        with pytest.raises(FormatError):
            Dataset.from_rows(["a", "b"], [["x", None]])

    def test_ragged_rows_rejected(self):
        with pytest.raises(FormatError):
            Dataset.from_rows(["a", "b"], [["x", "y"], ["x"]])

    def test_single_column_rejected(self):
        with pytest.raises(FormatError):
            Dataset.from_rows(["a"], [["x"]])

    def test_empty_rejected(self):
        with pytest.raises(FormatError):
            Dataset.from_rows(["a", "b"], [])

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\nx,0\ny,1\n")
        d = Dataset.from_csv(path)
        assert d.columns == ("a", "b")
        assert d.n_rows == 2

    def test_resample_deterministic(self):
        d = independent_data(50, 3, 0)
        a = d.resample(np.random.default_rng(7))
        b = d.resample(np.random.default_rng(7))
        assert np.array_equal(a.codes, b.codes)
        assert a.levels == d.levels


class TestMutualInformation:
    def test_copy_column_has_full_information(self):
        rng = np.random.default_rng(1)
        rows = [[str(v), str(v)] for v in rng.integers(0, 2, 2000)]
        d = Dataset.from_rows(["u", "v"], rows)
        assert mutual_information(d, 0, 1) == pytest.approx(np.log(2), abs=0.01)

    def test_independent_columns_near_zero(self):
        d = independent_data(10_000, 2, 2)
        assert mutual_information(d, 0, 1) < 0.001

    def test_constant_column_zero(self):
        d = Dataset.from_rows(["a", "b"], [["k", str(v)] for v in (0, 1, 0, 1)])
        assert mutual_information(d, 0, 1) == 0.0


class TestMiSkeleton:
    def test_independent_data_yields_empty_graph(self):
        g = mi_skeleton(independent_data(10_000, 3, 3), 0.01)
        assert g.edges == frozenset()

    def test_copy_pair_yields_edge(self):
        rng = np.random.default_rng(4)
        rows = [[str(v), str(v)] for v in rng.integers(0, 2, 500)]
        g = mi_skeleton(Dataset.from_rows(["u", "v"], rows), 0.01)
        assert g.edges == frozenset({(0, 1)})

    def test_infinite_threshold_yields_empty_graph(self):
        g = mi_skeleton(chain_data(500, 0.1, 5), float("inf"))
        assert g.edges == frozenset()

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError):
            mi_skeleton(independent_data(10, 2, 0), -1.0)


class TestHillClimbing:
    def test_independent_data_yields_empty_dag(self):
        g = hc_bic(independent_data(10_000, 3, 6))
        assert g.edges == frozenset()

    def test_chain_skeleton_recovered(self):
        g = hc_bic(chain_data(10_000, 0.1, 0))
        undirected = {(min(i, j), max(i, j)) for (i, j) in g.edges}
        assert undirected == {(0, 1), (1, 2)}
        assert is_acyclic(g)

    def test_copy_pair_gets_an_arc(self):
        rng = np.random.default_rng(8)
        rows = [[str(v), str(v)] for v in rng.integers(0, 2, 500)]
        g = hc_bic(Dataset.from_rows(["u", "v"], rows))
        assert g.edges in ({frozenset({(0, 1)})}, {frozenset({(1, 0)})}) or len(g.edges) == 1

    def test_trace_is_strictly_increasing(self):
        g, trace = hc_bic(chain_data(5000, 0.1, 1), return_trace=True)
        assert len(trace) >= 2
        assert all(b > a for a, b in zip(trace, trace[1:]))

    def test_score_beats_empty_graph(self):
        d = chain_data(5000, 0.1, 2)
        from graphvar.graphs import directed_graph
        empty = directed_graph(3, [])
        assert bic_score(d, hc_bic(d)) > bic_score(d, empty)

    def test_deterministic_given_seed(self):
        d = chain_data(800, 0.3, 3)
        a = hc_bic(d, restarts=3, seed=11)
        b = hc_bic(d, restarts=3, seed=11)
        assert a == b

    def test_outputs_always_acyclic(self):
        rng = np.random.default_rng(13)
        for trial in range(10):
            rows = rng.integers(0, 3, (200, 4)).astype(str)
            d = Dataset.from_rows(["a", "b", "c", "d"], rows.tolist())
            g = hc_bic(d, restarts=2, seed=trial)
            assert is_acyclic(g)

    def test_parameter_validation(self):
        d = independent_data(20, 2, 0)
        with pytest.raises(ValueError):
            hc_bic(d, max_iter=0)
        with pytest.raises(ValueError):
            hc_bic(d, restarts=0)


class TestBootstrap:
    def test_single_replicate_is_minimum_entropy(self):
        run = bootstrap(independent_data(500, 3, 0),
                        LearnerSpec(kind="mi_skeleton", threshold=0.01), 1, seed=0)
        assert run.report.normalized == (0.0, 0.0, 0.0)

    def test_stable_structure_has_low_variability(self):
        run = bootstrap(chain_data(5000, 0.1, 1),
                        LearnerSpec(kind="mi_skeleton", threshold=0.01), 50, seed=1)
        assert run.report.normalized[0] < 0.05
        assert run.family == "bernoulli"

    def test_noise_learner_is_near_maximum_entropy(self):
        run = bootstrap(independent_data(100, 3, 2), noise_learner, 400, seed=9)
        assert run.report.normalized[0] > 0.9

    def test_dag_learner_produces_trinomial_run(self):
        run = bootstrap(chain_data(1000, 0.1, 3),
                        LearnerSpec(kind="hc_bic", max_iter=50), 20, seed=4)
        assert run.family == "trinomial"
        assert len(run.graphs) == 20
        assert all(g.directed for g in run.graphs)

    def test_deterministic(self):
        spec = LearnerSpec(kind="mi_skeleton", threshold=0.02)
        d = chain_data(300, 0.3, 5)
        a = bootstrap(d, spec, 25, seed=6)
        b = bootstrap(d, spec, 25, seed=6)
        assert a.graphs == b.graphs
        assert a.report.normalized == b.report.normalized

    def test_learner_failures_propagate(self):
        def broken(data, rng):
            raise RuntimeError("learner exploded")
        with pytest.raises(RuntimeError, match="exploded"):
            bootstrap(independent_data(50, 2, 0), broken, 3, seed=0)

    def test_replicate_count_validated(self):
        with pytest.raises(ValueError):
            bootstrap(independent_data(50, 2, 0), noise_learner, 0, seed=0)


class TestSelection:
    def _runs(self, values, family="bernoulli"):
        cooked = []
        d = independent_data(200, 3, 7)
        spec = LearnerSpec(kind="mi_skeleton", threshold=0.01)
        base = bootstrap(d, spec, 5, seed=0)
        for v in values:
            report = base.report.__class__(
                family=family, k=base.report.k, var_t=v, var_g=0.0, var_f=0.0,
                target_description="test", normalized=(v, v, v),
                bounds_used=base.report.bounds_used, k_reduced=base.report.k_reduced,
            )
            cooked.append(base.__class__(
                replicates=5, seed=0, learner=f"learner-{v}", family=family,
                graphs=base.graphs, summary=base.summary, spectral=base.spectral,
                report=report,
            ))
        return cooked

    def test_argmin_selection(self):
        runs = self._runs([0.5, 0.2])
        result = select_algorithm(runs, "vt")
        assert result.index == 1
        assert result.learner == "learner-0.2"
        assert not result.tied

    def test_tie_goes_to_first_and_is_flagged(self):
        runs = self._runs([0.3, 0.3])
        result = select_algorithm(runs, "vt")
        assert result.index == 0
        assert result.tied

    def test_appending_a_worse_run_changes_nothing(self):
        runs = self._runs([0.4, 0.2])
        before = select_algorithm(runs, "vt")
        after = select_algorithm(self._runs([0.4, 0.2, 0.9]), "vt")
        assert (before.index, before.value) == (after.index, after.value)

    def test_mixed_families_rejected(self):
        runs = self._runs([0.5]) + self._runs([0.2], family="trinomial")
        with pytest.raises(ValueError):
            select_algorithm(runs, "vt")

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            select_algorithm([], "vt")


class TestTuning:
    def test_large_threshold_stabilises_noise(self):
        d = independent_data(120, 3, 12)
        result = select_tuning(d, "mi_skeleton", [0.0, 0.005, 0.05],
                               replicates=40, seed=4)
        assert result.tau_star == 0.05
        values = dict(result.curve)
        assert values[0.05] == 0.0
        assert values[0.005] > values[0.05]

    def test_degenerate_grid(self):
        d = independent_data(100, 3, 13)
        result = select_tuning(d, "mi_skeleton", [0.02], replicates=5, seed=0)
        assert result.tau_star == 0.02
        assert len(result.curve) == 1

    def test_curve_is_reported_for_chain_data(self):
        d = chain_data(400, 0.3, 14)
        result = select_tuning(d, "mi_skeleton", [0.0, 0.01, 0.1, 1.0],
                               replicates=20, seed=1)
        assert len(result.curve) == 4
        assert result.tau_star in {0.0, 0.01, 0.1, 1.0}
        assert result.curve[result.index][1] == min(v for _, v in result.curve)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            select_tuning(independent_data(50, 2, 0), "mi_skeleton", [], 5)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            select_tuning(independent_data(50, 2, 0), "hc_bic", [1], 5)

    def test_callable_factory(self):
        d = independent_data(150, 3, 15)
        result = select_tuning(
            d, lambda tau: LearnerSpec(kind="mi_skeleton", threshold=tau),
            [0.01, 0.5], replicates=10, seed=2)
        assert result.tau_star in {0.01, 0.5}


class TestConsistencyTrend:
    def test_variability_shrinks_with_sample_size(self):
        # stochastic acceptance: more data concentrates the posterior
        spec = LearnerSpec(kind="mi_skeleton", threshold=0.02)
        wins = 0
        for s in range(10):
            small = bootstrap(chain_data(200, 0.35, 100 + s), spec, 30, seed=s)
            big = bootstrap(chain_data(5000, 0.35, 100 + s), spec, 30, seed=s)
            wins += small.report.normalized[0] >= big.report.normalized[0]
        assert wins >= 8
