"""Exhaustive enumeration of labeled DAGs and UGs with exact moment counts.

Counts are accumulated as 64-bit integers over the full enumeration and
turned into frequencies only when a summary is requested, so the reported
parameters are exact rationals rounded once.

Two independent DAG enumeration strategies are provided: the production
path extends pair slots recursively with incremental acyclicity pruning
(compiled kernel), and a naive filter over all 3^k state assignments is
retained for small n as a cross-check oracle.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .edgedist import BernoulliSummary, TrinomialSummary, bernoulli_from_counts, trinomial_from_counts
from .errors import InfeasibleError
from .graphs import EdgeIndexMap, directed_graph, graph_from_state_vector, is_acyclic

__all__ = [
    "CensusAccumulator",
    "census_dags",
    "census_ugs",
    "enumerate_dags",
    "enumerate_dags_naive",
]

MAX_EXACT_NODES = 6        # n = 7 only behind allow_huge (about 1.14e9 DAGs)
MAX_HUGE_NODES = 7
MAX_UG_NODES = 7           # 2^21 undirected graphs
NAIVE_MAX_NODES = 4        # 3^6 state assignments


@dataclass(frozen=True)
class CensusAccumulator:
    """Exact state counts over a full enumeration.

    marginal_counts[e, s] counts state s - 1 at pair e; pair_joint_counts
    holds the symmetric (k, k, 3, 3) tables whose diagonal blocks are the
    marginals on their own diagonal.
    """

    n: int
    k: int
    graph_count: int
    marginal_counts: np.ndarray
    pair_joint_counts: np.ndarray

    def validate(self):
        """Check the integer accounting identities; raises on violation."""
        if self.marginal_counts.sum() != self.graph_count * self.k:
            raise AssertionError("marginal counts do not total graph_count per pair")
        if not np.all(self.marginal_counts.sum(axis=1) == self.graph_count):
            raise AssertionError("a marginal triple does not sum to graph_count")
        for a in range(self.k):
            for b in range(self.k):
                table = self.pair_joint_counts[a, b]
                if table.sum() != self.graph_count:
                    raise AssertionError(f"joint table ({a},{b}) does not sum to graph_count")
                if not np.all(table.sum(axis=1) == self.marginal_counts[a]):
                    raise AssertionError(f"joint table ({a},{b}) rows disagree with marginals")
                if not np.all(table.sum(axis=0) == self.marginal_counts[b]):
                    raise AssertionError(f"joint table ({a},{b}) columns disagree with marginals")

    @property
    def marginal_frequencies(self) -> np.ndarray:
        return self.marginal_counts / self.graph_count

    @property
    def average_arc_count(self) -> float:
        present = self.marginal_counts[:, 0] + self.marginal_counts[:, 2]
        return float(present.sum() / self.graph_count)

    def to_trinomial_summary(self) -> TrinomialSummary:
        return trinomial_from_counts(
            self.marginal_counts, self.pair_joint_counts, self.graph_count, n=self.n,
        )

    def to_bernoulli_summary(self) -> BernoulliSummary:
        if np.any(self.marginal_counts[:, 0] != 0):
            raise ValueError("accumulator holds directed states; no Bernoulli view")
        return bernoulli_from_counts(
            self.marginal_counts[:, 2], self.pair_joint_counts[:, :, 2, 2],
            self.graph_count, n=self.n,
        )


def _check_dag_size(n, allow_huge):
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    if n > MAX_HUGE_NODES:
        raise InfeasibleError(f"DAG enumeration refused for n={n} (> {MAX_HUGE_NODES})")
    if n > MAX_EXACT_NODES and not allow_huge:
        raise InfeasibleError(
            f"n={n} enumerates about 1.14e9 DAGs; pass allow_huge to run it anyway"
        )


def enumerate_dags(n: int, allow_huge: bool = False):
    """Yield every labeled DAG on n nodes exactly once (pure-Python path)."""
    _check_dag_size(n, allow_huge)
    m = EdgeIndexMap.for_nodes(n)
    k = m.k
    pairs = m.pairs
    succ = [0] * n
    state = np.zeros(k, dtype=np.int8)

    def reaches(src, dst):
        seen = 0
        frontier = succ[src]
        target = 1 << dst
        while frontier:
            if frontier & target:
                return True
            seen |= frontier
            nxt = 0
            f = frontier
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                nxt |= succ[v]
            frontier = nxt & ~seen
        return False

    def extend(e):
        if e == k:
            yield graph_from_state_vector(n, state, directed=True, m=m)
            return
        i, j = pairs[e]
        state[e] = 0
        yield from extend(e + 1)
        if not reaches(j, i):
            state[e] = 1
            succ[i] |= 1 << j
            yield from extend(e + 1)
            succ[i] &= ~(1 << j)
        if not reaches(i, j):
            state[e] = -1
            succ[j] |= 1 << i
            yield from extend(e + 1)
            succ[j] &= ~(1 << i)
        state[e] = 0

    yield from extend(0)


def enumerate_dags_naive(n: int):
    """Filter all 3^k state assignments through the acyclicity check.

    Independent of the extension enumerator (different traversal, different
    cycle test); kept as a cross-check oracle for small n.
    """
    if n > NAIVE_MAX_NODES:
        raise InfeasibleError(f"naive enumeration only supported for n <= {NAIVE_MAX_NODES}")
    m = EdgeIndexMap.for_nodes(n)
    for assignment in itertools.product((0, 1, -1), repeat=m.k):
        g = graph_from_state_vector(n, np.array(assignment, dtype=np.int8), directed=True, m=m)
        if is_acyclic(g):
            yield g


def _valid_prefixes(m: EdgeIndexMap, depth: int):
    """All acyclic assignments of the first `depth` pair slots."""
    prefixes = []
    for assignment in itertools.product((0, 1, -1), repeat=depth):
        arcs = []
        for e, s in enumerate(assignment):
            i, j = m.pair(e)
            if s == 1:
                arcs.append((i, j))
            elif s == -1:
                arcs.append((j, i))
        if is_acyclic(directed_graph(m.n, arcs)):
            full = np.zeros(m.k, dtype=np.int8)
            full[:depth] = assignment
            prefixes.append(full)
    return prefixes


def _symmetrize(marg, joint, k):
    """Mirror the upper-triangle tables and place marginals on the diagonal."""
    for a in range(k):
        for b in range(a + 1, k):
            joint[b, a] = joint[a, b].T
        joint[a, a] = np.diag(marg[a])
    return joint


def census_dags(n: int, threads: int = 1, allow_huge: bool = False) -> CensusAccumulator:
    """Exact census of all labeled DAGs on n nodes."""
    _check_dag_size(n, allow_huge)
    m = EdgeIndexMap.for_nodes(n)
    k = m.k
    if k == 0:
        return CensusAccumulator(
            n=n, k=0, graph_count=1,
            marginal_counts=np.zeros((0, 3), dtype=np.int64),
            pair_joint_counts=np.zeros((0, 0, 3, 3), dtype=np.int64),
        )
    pair_i, pair_j = m.pair_arrays()
    threads = max(1, int(threads))
    if threads == 1:
        depth = 0
        prefixes = [np.zeros(k, dtype=np.int8)]
    else:
        depth = 1
        while 3 ** depth < 4 * threads and depth < min(k, 6):
            depth += 1
        prefixes = _valid_prefixes(m, depth)

    def run(prefix):
        marg = np.zeros((k, 3), dtype=np.int64)
        joint = np.zeros((k, k, 3, 3), dtype=np.int64)
        count = _kernels.census_dags_range(n, pair_i, pair_j, prefix, depth, marg, joint)
        return count, marg, joint

    total = 0
    marg = np.zeros((k, 3), dtype=np.int64)
    joint = np.zeros((k, k, 3, 3), dtype=np.int64)
    if threads == 1:
        results = map(run, prefixes)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, prefixes))
    for count, marg_part, joint_part in results:
        total += count
        marg += marg_part
        joint += joint_part
    _symmetrize(marg, joint, k)
    return CensusAccumulator(
        n=n, k=k, graph_count=int(total),
        marginal_counts=marg, pair_joint_counts=joint,
    )


def census_ugs(n: int) -> CensusAccumulator:
    """Exact census of all labeled undirected graphs on n nodes.

    Edge states live in {0, 1}; state -1 never occurs, so the accumulator
    shares its layout with the DAG census.
    """
    if n < 1:
        raise ValueError(f"vertex count must be >= 1, got {n}")
    if n > MAX_UG_NODES:
        raise InfeasibleError(f"UG census refused for n={n} (> {MAX_UG_NODES}): 2^k graphs")
    m = EdgeIndexMap.for_nodes(n)
    k = m.k
    if k == 0:
        return CensusAccumulator(
            n=n, k=0, graph_count=1,
            marginal_counts=np.zeros((0, 3), dtype=np.int64),
            pair_joint_counts=np.zeros((0, 0, 3, 3), dtype=np.int64),
        )
    total = 1 << k
    present = np.zeros(k, dtype=np.int64)
    ones = np.zeros((k, k), dtype=np.int64)
    block = 1 << 16
    bit_cols = np.arange(k, dtype=np.int64)
    for start in range(0, total, block):
        codes = np.arange(start, min(start + block, total), dtype=np.int64)
        states = ((codes[:, None] >> bit_cols) & 1).astype(np.float32)
        present += states.sum(axis=0).astype(np.int64)
        # float32 products are exact here: per-block counts stay below 2^24
        ones += np.rint(states.T @ states).astype(np.int64)
    marg = np.zeros((k, 3), dtype=np.int64)
    marg[:, 2] = present
    marg[:, 1] = total - present
    joint = np.zeros((k, k, 3, 3), dtype=np.int64)
    joint[:, :, 2, 2] = ones
    joint[:, :, 2, 1] = present[:, None] - ones
    joint[:, :, 1, 2] = present[None, :] - ones
    joint[:, :, 1, 1] = total - present[:, None] - present[None, :] + ones
    for e in range(k):
        joint[e, e] = np.diag(marg[e])
    return CensusAccumulator(
        n=n, k=k, graph_count=int(total),
        marginal_counts=marg, pair_joint_counts=joint,
    )
