import numpy as np
import pytest

from graphvar import InfeasibleError, arc_state_vector, is_acyclic
from graphvar.census import census_dags, census_ugs, enumerate_dags, enumerate_dags_naive

from conftest import robinson_dag_count

KNOWN_DAG_COUNTS = {1: 1, 2: 3, 3: 25, 4: 543, 5: 29281, 6: 3781503, 7: 1138779265}


class TestCounts:
    def test_recurrence_oracle_matches_known_table(self):
        for n, count in KNOWN_DAG_COUNTS.items():
            assert robinson_dag_count(n) == count

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_census_count(self, n):
        assert census_dags(n).graph_count == KNOWN_DAG_COUNTS[n]

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_enumerator_agrees_with_census(self, n):
        assert sum(1 for _ in enumerate_dags(n)) == census_dags(n).graph_count

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_naive_filter_agrees(self, n):
        assert sum(1 for _ in enumerate_dags_naive(n)) == KNOWN_DAG_COUNTS[n]

    def test_enumerators_produce_identical_graph_sets(self):
        fast = {bytes(arc_state_vector(g)) for g in enumerate_dags(3)}
        naive = {bytes(arc_state_vector(g)) for g in enumerate_dags_naive(3)}
        assert fast == naive
        assert len(fast) == 25

    def test_enumerated_graphs_are_dags(self):
        for g in enumerate_dags(4):
            assert g.directed
            assert is_acyclic(g)

    def test_no_duplicates_at_n4(self):
        seen = [bytes(arc_state_vector(g)) for g in enumerate_dags(4)]
        assert len(seen) == len(set(seen)) == 543


class TestGuards:
    def test_refuses_seven_without_flag(self):
        with pytest.raises(InfeasibleError):
            census_dags(7)
        with pytest.raises(InfeasibleError):
            list(enumerate_dags(7))

    def test_refuses_beyond_seven_even_with_flag(self):
        with pytest.raises(InfeasibleError):
            census_dags(8, allow_huge=True)

    def test_ug_census_guard(self):
        with pytest.raises(InfeasibleError):
            census_ugs(8)

    def test_naive_guard(self):
        with pytest.raises(InfeasibleError):
            list(enumerate_dags_naive(5))


class TestAccumulatorInvariants:
    def test_integer_accounting(self, census3, census4):
        census3.validate()
        census4.validate()

    def test_reversal_symmetry_exact(self, census4, census5):
        # both directions of every arc appear equally often: exact integers
        for acc in (census4, census5):
            assert np.array_equal(acc.marginal_counts[:, 0], acc.marginal_counts[:, 2])

    def test_joint_symmetries_exact(self, census4):
        # reversing all arcs and swapping pair roles are count bijections
        joint = census4.pair_joint_counts
        for a in range(census4.k):
            for b in range(census4.k):
                table = joint[a, b]
                assert np.array_equal(table, table[::-1, ::-1])
                assert np.array_equal(table, joint[b, a].T)
                assert np.array_equal(table, table.T)

    def test_marginal_counts_match_pure_enumeration_n5(self, census5):
        marg = np.zeros((census5.k, 3), dtype=np.int64)
        for g in enumerate_dags(5):
            for e, s in enumerate(arc_state_vector(g)):
                marg[e, s + 1] += 1
        assert np.array_equal(census5.marginal_counts, marg)

    def test_census_accumulators_match_pure_enumeration(self):
        acc = census_dags(4)
        states = np.array([arc_state_vector(g) for g in enumerate_dags(4)])
        marg = np.zeros((acc.k, 3), dtype=np.int64)
        for s in (-1, 0, 1):
            marg[:, s + 1] = (states == s).sum(axis=0)
        assert np.array_equal(acc.marginal_counts, marg)
        for a in range(acc.k):
            for b in range(acc.k):
                expect = np.zeros((3, 3), dtype=np.int64)
                for sa in (-1, 0, 1):
                    for sb in (-1, 0, 1):
                        expect[sa + 1, sb + 1] = int(
                            ((states[:, a] == sa) & (states[:, b] == sb)).sum()
                        )
                assert np.array_equal(acc.pair_joint_counts[a, b], expect)

    def test_disjoint_pairs_uncorrelated_exactly(self, census4, census5):
        # evidence for the disjoint-arcs conjecture: exact zeros in the census
        from graphvar.measures import _pair_masks
        for acc in (census4, census5):
            sigma = acc.to_trinomial_summary().sigma
            _, disjoint = _pair_masks(acc.n)
            assert np.all(sigma[disjoint] == 0.0)

    def test_average_arc_count_recorded(self, census3, census4, census5):
        # exact values; the n^2/4 approximation is only asserted from n = 6 up
        assert census3.average_arc_count == pytest.approx(1.92)
        assert census4.average_arc_count == pytest.approx(2016 / 543)
        for acc, n in ((census3, 3), (census4, 4), (census5, 5)):
            assert 0.5 < acc.average_arc_count / (n * n / 4.0) < 1.05


class TestThreading:
    def test_thread_count_does_not_change_results(self):
        one = census_dags(5, threads=1)
        four = census_dags(5, threads=4)
        assert one.graph_count == four.graph_count
        assert np.array_equal(one.marginal_counts, four.marginal_counts)
        assert np.array_equal(one.pair_joint_counts, four.pair_joint_counts)


class TestUgCensus:
    def test_n3_edge_frequency_half(self):
        acc = census_ugs(3)
        assert acc.graph_count == 8
        assert np.all(acc.marginal_frequencies[:, 2] == 0.5)

    def test_n3_joint_quarter(self):
        acc = census_ugs(3)
        assert acc.pair_joint_counts[0, 1, 2, 2] / acc.graph_count == 0.25

    def test_n4_identity_covariance(self):
        summary = census_ugs(4).to_bernoulli_summary()
        assert np.array_equal(summary.sigma, 0.25 * np.eye(6))

    def test_accounting(self):
        census_ugs(4).validate()

    def test_no_bernoulli_view_of_dag_census(self, census3):
        with pytest.raises(ValueError):
            census3.to_bernoulli_summary()

    def test_trivial_n1(self):
        acc = census_ugs(1)
        assert acc.graph_count == 1 and acc.k == 0

    def test_n6_accounting_across_blocks(self):
        # 2^15 graphs span multiple accumulation blocks
        acc = census_ugs(6)
        acc.validate()
        assert np.all(acc.marginal_frequencies[:, 2] == 0.5)


class TestEdgeSizes:
    def test_single_node_summaries(self):
        t = census_dags(1).to_trinomial_summary()
        assert t.k == 0 and t.sigma.shape == (0, 0)
        b = census_ugs(1).to_bernoulli_summary()
        assert b.k == 0

    def test_huge_flag_path_streams(self):
        # the gated n=7 enumeration starts producing DAGs without running out
        stream = enumerate_dags(7, allow_huge=True)
        first = [next(stream) for _ in range(500)]
        assert all(is_acyclic(g) for g in first)
        assert len({bytes(arc_state_vector(g)) for g in first}) == 500
