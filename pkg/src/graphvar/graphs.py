"""Graph values, canonical pair indexing, and the JSONL interchange format.

Vertices are 0-based integers. An undirected edge is stored as the ordered
pair (i, j) with i < j; a directed arc (i, j) means i -> j. For every
unordered pair {i, j} with i < j the canonical sign convention is

    +1  i -> j        (forward)
    -1  j -> i        (reversed)
     0  no arc / no edge

so state vectors of distinct graphs over the same vertex set never collide.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import FormatError

__all__ = [
    "ArcState",
    "EdgeIndexMap",
    "Graph",
    "arc_state_vector",
    "directed_graph",
    "graph_from_state_vector",
    "is_acyclic",
    "read_jsonl",
    "reverse_all",
    "skeleton",
    "undirected_graph",
    "write_jsonl",
]


class ArcState(IntEnum):
    REVERSED = -1
    ABSENT = 0
    FORWARD = 1


@dataclass(frozen=True)
class EdgeIndexMap:
    """Bijection between unordered vertex pairs and indices 0..k-1.

    Pairs (i, j), i < j, are ordered lexicographically; k = n(n-1)/2.
    """

    n: int
    pairs: tuple

    @classmethod
    def for_nodes(cls, n: int) -> "EdgeIndexMap":
        if n < 1:
            raise ValueError(f"vertex count must be >= 1, got {n}")
        pairs = tuple((i, j) for i in range(n) for j in range(i + 1, n))
        return cls(n=n, pairs=pairs)

    @property
    def k(self) -> int:
        return len(self.pairs)

    def index(self, i: int, j: int) -> int:
        """Index of the unordered pair {i, j}."""
        if i == j:
            raise ValueError("self-pairs have no index")
        if i > j:
            i, j = j, i
        if i < 0 or j >= self.n:
            raise ValueError(f"pair ({i}, {j}) out of range for n={self.n}")
        # offset of block i plus position of j within it
        return i * self.n - (i * (i + 1)) // 2 + (j - i - 1)

    def pair(self, idx: int) -> tuple:
        return self.pairs[idx]

    def pair_arrays(self) -> tuple:
        """(i, j) int64 arrays aligned with pair indices; used by kernels."""
        if self.k == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        arr = np.asarray(self.pairs, dtype=np.int64)
        return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph; directed or undirected per the flag."""

    n: int
    directed: bool
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            if self.directed:
                if (j, i) in self.edges:
                    raise ValueError(f"both orientations of {{{i}, {j}}} present")
            elif i > j:
                raise ValueError(f"undirected edge {e} not stored with i < j")

    @property
    def arc_count(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        """Presence of the arc i -> j (directed) or the edge {i, j}."""
        if self.directed:
            return (i, j) in self.edges
        return (min(i, j), max(i, j)) in self.edges

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "directed": self.directed,
            "edges": sorted([list(e) for e in self.edges]),
        }

    @classmethod
    def from_record(cls, record: dict) -> "Graph":
        try:
            n = record["n"]
            directed = record["directed"]
            raw = record["edges"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"graph record missing field: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise FormatError(f"invalid vertex count {n!r}")
        if not isinstance(directed, bool):
            raise FormatError(f"invalid directed flag {directed!r}")
        edges = []
        for e in raw:
            if not (isinstance(e, (list, tuple)) and len(e) == 2):
                raise FormatError(f"invalid edge entry {e!r}")
            i, j = e
            if not (isinstance(i, int) and isinstance(j, int)):
                raise FormatError(f"non-integer edge entry {e!r}")
            edges.append((i, j))
        if len(set(edges)) != len(edges):
            raise FormatError("duplicate edges in record")
        try:
            if directed:
                return directed_graph(n, edges)
            return undirected_graph(n, edges)
        except ValueError as exc:
            raise FormatError(str(exc)) from None


def undirected_graph(n: int, edges) -> Graph:
    """Build an undirected graph; pairs are normalised to i < j."""
    norm = frozenset((min(i, j), max(i, j)) for (i, j) in edges)
    if len(norm) != len(set(tuple(e) for e in edges)):
        raise ValueError("duplicate undirected edges after normalisation")
    return Graph(n=n, directed=False, edges=norm)


def directed_graph(n: int, arcs) -> Graph:
    """Build a directed graph from (i, j) arcs meaning i -> j."""
    return Graph(n=n, directed=True, edges=frozenset(tuple(a) for a in arcs))


def is_acyclic(g: Graph) -> bool:
    """True iff the directed graph admits a topological order."""
    if not g.directed:
        raise ValueError("acyclicity is a directed-graph property")
    indeg = [0] * g.n
    succ = [[] for _ in range(g.n)]
    for (i, j) in g.edges:
        succ[i].append(j)
        indeg[j] += 1
    queue = [v for v in range(g.n) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == g.n


def reverse_all(g: Graph) -> Graph:
    """Flip the direction of every arc."""
    if not g.directed:
        raise ValueError("reverse_all requires a directed graph")
    return Graph(n=g.n, directed=True, edges=frozenset((j, i) for (i, j) in g.edges))


def skeleton(g: Graph) -> Graph:
    """Undirected graph linking {i, j} when either orientation is present."""
    if not g.directed:
        return g
    return undirected_graph(g.n, [(min(i, j), max(i, j)) for (i, j) in g.edges])


def arc_state_vector(g: Graph, m: EdgeIndexMap | None = None) -> np.ndarray:
    """Length-k int8 state vector of g under the canonical sign convention.

    Undirected graphs produce values in {0, 1} only.
    """
    if m is None:
        m = EdgeIndexMap.for_nodes(g.n)
    elif m.n != g.n:
        raise ValueError(f"index map is for n={m.n}, graph has n={g.n}")
    states = np.zeros(m.k, dtype=np.int8)
    for (i, j) in g.edges:
        if i < j:
            states[m.index(i, j)] = 1
        else:
            states[m.index(j, i)] = -1
    return states


def graph_from_state_vector(n: int, states, directed: bool, m: EdgeIndexMap | None = None) -> Graph:
    """Inverse of arc_state_vector."""
    if m is None:
        m = EdgeIndexMap.for_nodes(n)
    states = np.asarray(states)
    if states.shape != (m.k,):
        raise ValueError(f"expected {m.k} states, got shape {states.shape}")
    edges = []
    for idx in np.flatnonzero(states):
        i, j = m.pair(int(idx))
        s = int(states[idx])
        if s == 1:
            edges.append((i, j))
        elif s == -1 and directed:
            edges.append((j, i))
        else:
            raise ValueError(f"state {s} invalid at pair index {idx}")
    if directed:
        return directed_graph(n, edges)
    return undirected_graph(n, edges)


def write_jsonl(graphs, path) -> int:
    """Write one graph record per line; returns the record count."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for g in graphs:
            fh.write(json.dumps(g.to_record(), separators=(",", ":")))
            fh.write("\n")
            count += 1
    return count


def read_jsonl(path):
    """Stream graphs from a JSONL file; malformed lines raise FormatError."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            yield Graph.from_record(record)
