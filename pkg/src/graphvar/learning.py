"""Bootstrap resampling of learned structures and stability-based selection.

Structures learned from bootstrap resamples of a dataset induce an
empirical distribution on the pair set, and its covariance feeds the
variability measures. Two deliberately small learners exercise both graph
families: a mutual-information skeleton (undirected) and BIC hill climbing
(DAG). Learning quality is not the point; the stability machinery is.

Everything is deterministic given (dataset, learner, replicates, seed):
per-replicate generators derive from the master seed by replicate index.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .edgedist import fit_bernoulli, fit_trinomial
from .errors import FormatError
from .graphs import Graph, directed_graph, undirected_graph
from .measures import VariabilityReport, variability_report
from .spectral import FAMILY_BERNOULLI, FAMILY_TRINOMIAL, SpectralSummary, eigenvalues_symmetric

__all__ = [
    "BootstrapRun",
    "Dataset",
    "LearnerSpec",
    "SelectionResult",
    "TuningResult",
    "bic_score",
    "bootstrap",
    "hc_bic",
    "mi_skeleton",
    "mutual_information",
    "select_algorithm",
    "select_tuning",
]

_MIN_GAIN = 1e-9  # float guard on strict score improvement


@dataclass(frozen=True)
class Dataset:
    """Rectangular categorical data, integer-coded per column."""

    columns: tuple
    codes: np.ndarray            # (N, m) int64 level codes
    levels: tuple                # per column, tuple of category labels

    def __post_init__(self):
        if len(self.columns) < 2:
            raise FormatError("need at least two columns")
        if self.codes.ndim != 2 or self.codes.shape[1] != len(self.columns):
            raise FormatError("code matrix disagrees with column count")
        if self.codes.shape[0] < 1:
            raise FormatError("dataset has no rows")

    @property
    def n_rows(self) -> int:
        return self.codes.shape[0]

    @property
    def n_cols(self) -> int:
        return self.codes.shape[1]

    def cardinalities(self) -> tuple:
        return tuple(len(lv) for lv in self.levels)

    @classmethod
    def from_rows(cls, columns, rows) -> "Dataset":
        columns = tuple(columns)
        m = len(columns)
        table = []
        for r, row in enumerate(rows):
            row = list(row)
            if len(row) != m:
                raise FormatError(f"row {r} has {len(row)} cells, expected {m}")
            for cell in row:
                if cell is None or cell == "":
                    raise FormatError(f"missing value in row {r}")
            table.append([str(c) for c in row])
        if not table:
            raise FormatError("dataset has no rows")
        levels = tuple(tuple(sorted({row[c] for row in table})) for c in range(m))
        lookup = [{lab: i for i, lab in enumerate(lv)} for lv in levels]
        codes = np.array(
            [[lookup[c][row[c]] for c in range(m)] for row in table], dtype=np.int64,
        )
        codes.setflags(write=False)
        return cls(columns=columns, codes=codes, levels=levels)

    @classmethod
    def from_csv(cls, path) -> "Dataset":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise FormatError("empty CSV file") from None
            return cls.from_rows(header, reader)

    def resample(self, rng: np.random.Generator) -> "Dataset":
        """Bootstrap resample of the rows (with replacement)."""
        idx = rng.integers(0, self.n_rows, size=self.n_rows)
        codes = self.codes[idx]
        codes.setflags(write=False)
        return Dataset(columns=self.columns, codes=codes, levels=self.levels)


def mutual_information(d: Dataset, i: int, j: int) -> float:
    """Empirical mutual information between columns i and j, in nats."""
    li = len(d.levels[i])
    lj = len(d.levels[j])
    counts = np.bincount(d.codes[:, i] * lj + d.codes[:, j], minlength=li * lj)
    pxy = counts.reshape(li, lj) / d.n_rows
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    mask = pxy > 0
    return float((pxy[mask] * np.log(pxy[mask] / np.outer(px, py)[mask])).sum())


def mi_skeleton(d: Dataset, threshold: float) -> Graph:
    """Undirected graph keeping pairs whose mutual information exceeds the cutoff."""
    if threshold < 0:
        raise ValueError("threshold must be >= 0")
    m = d.n_cols
    edges = [
        (i, j)
        for i in range(m)
        for j in range(i + 1, m)
        if mutual_information(d, i, j) > threshold
    ]
    return undirected_graph(m, edges)


def _local_bic(d: Dataset, v: int, parents: tuple, cache: dict) -> float:
    """Multinomial log-likelihood of column v given its parents, BIC-penalised."""
    key = (v, parents)
    hit = cache.get(key)
    if hit is not None:
        return hit
    cards = d.cardinalities()
    rv = cards[v]
    q = 1
    config = np.zeros(d.n_rows, dtype=np.int64)
    for p in parents:
        config = config * cards[p] + d.codes[:, p]
        q *= cards[p]
    counts = np.bincount(config * rv + d.codes[:, v], minlength=q * rv).reshape(q, rv)
    row_totals = counts.sum(axis=1, keepdims=True)
    mask = counts > 0
    ll = float((counts[mask] * np.log(counts[mask] / np.broadcast_to(row_totals, counts.shape)[mask])).sum())
    score = ll - 0.5 * math.log(d.n_rows) * q * (rv - 1)
    cache[key] = score
    return score


def bic_score(d: Dataset, g: Graph) -> float:
    """BIC network score: sum of penalised local log-likelihoods."""
    if not g.directed:
        raise ValueError("BIC scoring needs a DAG")
    cache: dict = {}
    parents = _parents_of(g.edges, d.n_cols)
    return sum(_local_bic(d, v, parents[v], cache) for v in range(d.n_cols))


def _parents_of(arcs, m):
    parents = [[] for _ in range(m)]
    for (i, j) in arcs:
        parents[j].append(i)
    return [tuple(sorted(p)) for p in parents]


def _has_path(arcs_set, m, src, dst):
    """DFS over the arc set; used to keep hill-climbing moves acyclic."""
    stack = [src]
    seen = {src}
    succ = [[] for _ in range(m)]
    for (i, j) in arcs_set:
        succ[i].append(j)
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for w in succ[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _climb(d: Dataset, start_arcs, max_iter, cache):
    """Greedy add/delete/reverse ascent; returns (arcs, score, trace)."""
    m = d.n_cols
    arcs = set(start_arcs)
    parents = _parents_of(arcs, m)
    local = [_local_bic(d, v, parents[v], cache) for v in range(m)]
    score = sum(local)
    trace = [score]
    for _ in range(max_iter):
        best_delta = 0.0
        best_move = None
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                if (i, j) in arcs:
                    # delete i -> j
                    new_j = tuple(sorted(set(parents[j]) - {i}))
                    delta = _local_bic(d, j, new_j, cache) - local[j]
                    if delta > best_delta + _MIN_GAIN:
                        best_delta = delta
                        best_move = ("delete", i, j)
                    # reverse to j -> i
                    rest = arcs - {(i, j)}
                    if not _has_path(rest, m, i, j):
                        new_i = tuple(sorted(set(parents[i]) | {j}))
                        delta += _local_bic(d, i, new_i, cache) - local[i]
                        if delta > best_delta + _MIN_GAIN:
                            best_delta = delta
                            best_move = ("reverse", i, j)
                elif (j, i) not in arcs:
                    # add i -> j
                    if _has_path(arcs, m, j, i):
                        continue
                    new_j = tuple(sorted(set(parents[j]) | {i}))
                    delta = _local_bic(d, j, new_j, cache) - local[j]
                    if delta > best_delta + _MIN_GAIN:
                        best_delta = delta
                        best_move = ("add", i, j)
        if best_move is None:
            break
        kind, i, j = best_move
        if kind == "add":
            arcs.add((i, j))
        elif kind == "delete":
            arcs.discard((i, j))
        else:
            arcs.discard((i, j))
            arcs.add((j, i))
        parents = _parents_of(arcs, m)
        for v in (i, j):
            local[v] = _local_bic(d, v, parents[v], cache)
        score = sum(local)
        trace.append(score)
    return arcs, score, trace


def _random_start(m, rng):
    order = rng.permutation(m)
    arcs = []
    for a in range(m):
        for b in range(a + 1, m):
            if rng.random() < 0.25:
                arcs.append((int(order[a]), int(order[b])))
    return arcs


def hc_bic(d: Dataset, max_iter: int = 100, restarts: int = 1, seed: int = 0,
           return_trace: bool = False):
    """Greedy BIC hill climbing over add/delete/reverse single-arc moves.

    Restart 0 starts from the empty graph; further restarts start from
    random DAGs drawn with per-restart derived seeds. The best-scoring
    local optimum wins, ties going to the earliest restart. Every accepted
    move strictly increases the score (visible in the returned trace).
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    cache: dict = {}
    seeds = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for r in range(restarts):
        if r == 0:
            start = []
        else:
            start = _random_start(d.n_cols, np.random.default_rng(seeds[r]))
        arcs, score, trace = _climb(d, start, max_iter, cache)
        if best is None or score > best[1] + _MIN_GAIN:
            best = (arcs, score, trace)
    g = directed_graph(d.n_cols, best[0])
    if return_trace:
        return g, best[2]
    return g


@dataclass(frozen=True)
class LearnerSpec:
    """Configuration of a built-in learner."""

    kind: str                    # "mi_skeleton" or "hc_bic"
    threshold: float = 0.01      # mi_skeleton cutoff, nats
    max_iter: int = 100          # hc_bic
    restarts: int = 1

    def __post_init__(self):
        if self.kind not in ("mi_skeleton", "hc_bic"):
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")

    @property
    def produces(self) -> str:
        return "undirected" if self.kind == "mi_skeleton" else "dag"

    def describe(self) -> str:
        if self.kind == "mi_skeleton":
            return f"mi_skeleton(threshold={self.threshold!r})"
        return f"hc_bic(max_iter={self.max_iter}, restarts={self.restarts})"


@dataclass(frozen=True)
class BootstrapRun:
    """Learned structures over bootstrap resamples plus their variability."""

    replicates: int
    seed: int
    learner: str
    family: str
    graphs: tuple
    summary: object
    spectral: SpectralSummary
    report: VariabilityReport


def _invoke(learner, data, rng):
    if isinstance(learner, LearnerSpec):
        if learner.kind == "mi_skeleton":
            return mi_skeleton(data, learner.threshold)
        return hc_bic(data, max_iter=learner.max_iter, restarts=learner.restarts,
                      seed=int(rng.integers(0, 2 ** 63)))
    return learner(data, rng)


def bootstrap(d: Dataset, learner, replicates: int, seed: int = 0) -> BootstrapRun:
    """Learn a structure on each of R bootstrap resamples and summarise.

    learner is a LearnerSpec or any callable (dataset, rng) -> Graph.
    Learner failures propagate immediately.
    """
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(replicates)
    graphs = []
    for r in range(replicates):
        rng = np.random.default_rng(seeds[r])
        graphs.append(_invoke(learner, d.resample(rng), rng))
    directed = graphs[0].directed
    if any(g.directed != directed for g in graphs):
        raise ValueError("learner produced a mix of directed and undirected graphs")
    if directed:
        family = FAMILY_TRINOMIAL
        summary = fit_trinomial(graphs)
    else:
        family = FAMILY_BERNOULLI
        summary = fit_bernoulli(graphs)
    spectral = eigenvalues_symmetric(summary.sigma, family=family)
    report = variability_report(summary.sigma, family, n=d.n_cols)
    name = learner.describe() if isinstance(learner, LearnerSpec) else getattr(
        learner, "__name__", "custom")
    return BootstrapRun(
        replicates=replicates, seed=seed, learner=name, family=family,
        graphs=tuple(graphs), summary=summary, spectral=spectral, report=report,
    )


@dataclass(frozen=True)
class SelectionResult:
    index: int
    learner: str
    value: float
    tied: bool


def select_algorithm(runs, criterion: str = "vt") -> SelectionResult:
    """Pick the run minimising the normalised criterion; first run wins ties.

    Runs over different families are not comparable and are rejected.
    """
    runs = list(runs)
    if not runs:
        raise ValueError("need at least one run")
    family = runs[0].family
    if any(r.family != family for r in runs):
        raise ValueError("cannot compare runs across graph families")
    k = runs[0].report.k
    if any(r.report.k != k for r in runs):
        raise ValueError("runs cover different pair sets")
    values = [r.report.criterion(criterion) for r in runs]
    best = min(values)
    index = values.index(best)
    return SelectionResult(
        index=index, learner=runs[index].learner, value=best,
        tied=values.count(best) > 1,
    )


@dataclass(frozen=True)
class TuningResult:
    tau_star: float
    index: int
    curve: tuple                 # ((tau, criterion value), ...)
    runs: tuple


def select_tuning(d: Dataset, kind, grid, replicates: int, seed: int = 0,
                  criterion: str = "vt", **spec_kwargs) -> TuningResult:
    """Scan a tuning grid with a shared seed and pick the stabilising value.

    kind is "mi_skeleton" (tau = MI threshold) or a callable tau -> learner.
    The same seed drives every grid point, so tau is the only varying factor.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("tuning grid is empty")
    runs = []
    for tau in grid:
        if kind == "mi_skeleton":
            learner = LearnerSpec(kind="mi_skeleton", threshold=tau, **spec_kwargs)
        elif callable(kind):
            learner = kind(tau)
        else:
            raise ValueError(f"no tuning parameter defined for {kind!r}")
        runs.append(bootstrap(d, learner, replicates, seed=seed))
    values = [r.report.criterion(criterion) for r in runs]
    best = min(values)
    index = values.index(best)
    return TuningResult(
        tau_star=grid[index], index=index,
        curve=tuple(zip(grid, values)), runs=tuple(runs),
    )
