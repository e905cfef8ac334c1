"""Multivariate Bernoulli and Trinomial distributions induced on the pair set.

A collection of graphs over the same vertex set induces a distribution on
the k = n(n-1)/2 unordered vertex pairs: each pair carries a Bernoulli
state {0, 1} for undirected graphs or a Trinomial state {-1, 0, +1} for
DAGs. Summaries hold the estimated marginals, the pairwise joints, and the
covariance matrix

    Bernoulli:  sigma_ij = p_ij - p_i p_j
    Trinomial:  COV(T_i, T_j) = [p_ij(1,1)   - p_i(1)  p_j(1) ]
                              + [p_ij(-1,-1) - p_i(-1) p_j(-1)]
                              - [p_ij(-1,1)  - p_i(-1) p_j(1) ]
                              - [p_ij(1,-1)  - p_i(1)  p_j(-1)]

Raw accumulation mass is kept alongside the probabilities. Unweighted fits
accumulate exact integers (stored in float64, which is exact below 2^53),
so count-level identities such as the abs-transform/skeleton commutation
hold bit-for-bit, not just to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import EdgeIndexMap, arc_state_vector, is_acyclic

__all__ = [
    "BernoulliSummary",
    "TrinomialSummary",
    "abs_transform",
    "bernoulli_from_counts",
    "bernoulli_from_states",
    "fit_bernoulli",
    "fit_trinomial",
    "trinomial_from_counts",
    "trinomial_from_states",
    "variance_decomposition",
]

_STATE_VALUES = np.array([-1, 0, 1], dtype=np.int8)
_BOUND_SLACK = 1e-9
DENSE_JOINT_LIMIT = 2016  # largest k for which full 3x3 pair tables are stored (n <= 64)
_BLOCK = 4096
_PSD_CHECK_LIMIT = 512  # constructor-time eigenvalue guard is skipped beyond this


def _check_psd(sigma):
    # empirical covariances can dip below zero numerically; -1e-9 is the cut
    if 0 < sigma.shape[0] <= _PSD_CHECK_LIMIT:
        smallest = float(np.linalg.eigvalsh(sigma)[0])
        if smallest < -1e-9:
            raise ValueError(f"covariance not PSD within tolerance (min eigenvalue {smallest})")


def _freeze(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BernoulliSummary:
    """Moments of a multivariate Bernoulli edge distribution."""

    k: int
    p: np.ndarray                    # (k,) marginal success probabilities
    joint: np.ndarray                # (k, k) success joints, diagonal = p
    sigma: np.ndarray                # (k, k) covariance
    weight_total: float
    n: int | None = None
    presence_counts: np.ndarray | None = None   # (k,) accumulated success mass
    pair_counts: np.ndarray | None = None       # (k, k)

    def __post_init__(self):
        if self.p.shape != (self.k,) or self.joint.shape != (self.k, self.k):
            raise ValueError("inconsistent summary shapes")
        if self.k == 0:
            return
        if np.any(self.p < -_BOUND_SLACK) or np.any(self.p > 1 + _BOUND_SLACK):
            raise ValueError("marginal probabilities outside [0, 1]")
        lo = np.maximum(0.0, self.p[:, None] + self.p[None, :] - 1.0)
        hi = np.minimum(self.p[:, None], self.p[None, :])
        if np.any(self.joint < lo - _BOUND_SLACK) or np.any(self.joint > hi + _BOUND_SLACK):
            raise ValueError("pairwise joints violate Frechet bounds")
        if np.max(np.abs(self.sigma - self.sigma.T)) > 1e-12:
            raise ValueError("covariance not symmetric")
        if np.any(np.diag(self.sigma) > 0.25 + _BOUND_SLACK) or np.any(np.abs(self.sigma) > 0.25 + _BOUND_SLACK):
            raise ValueError("covariance outside Bernoulli bounds")
        _check_psd(self.sigma)

    @property
    def mean(self) -> np.ndarray:
        return self.p

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.sigma)


@dataclass(frozen=True)
class TrinomialSummary:
    """Moments of a multivariate Trinomial arc distribution."""

    k: int
    marginals: np.ndarray            # (k, 3) probabilities of states -1, 0, +1
    mean: np.ndarray                 # (k,) p(+1) - p(-1)
    sigma: np.ndarray                # (k, k) covariance
    weight_total: float
    pair_joints: np.ndarray | None   # (k, k, 3, 3) or None beyond the dense limit
    n: int | None = None
    marginal_counts: np.ndarray | None = None    # (k, 3) accumulated mass
    joint_counts: np.ndarray | None = None       # (k, k, 3, 3)
    abs_marginal_counts: np.ndarray | None = None  # (k,) mass of |state| = 1
    abs_pair_counts: np.ndarray | None = None      # (k, k)

    def __post_init__(self):
        if self.marginals.shape != (self.k, 3):
            raise ValueError("inconsistent summary shapes")
        if self.k == 0:
            return
        if np.any(self.marginals < -_BOUND_SLACK) or np.any(self.marginals > 1 + _BOUND_SLACK):
            raise ValueError("marginal probabilities outside [0, 1]")
        if np.max(np.abs(self.marginals.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("marginal triples do not sum to 1")
        if np.max(np.abs(self.sigma - self.sigma.T)) > 1e-12:
            raise ValueError("covariance not symmetric")
        if np.any(np.diag(self.sigma) > 1 + _BOUND_SLACK) or np.any(np.abs(self.sigma) > 1 + _BOUND_SLACK):
            raise ValueError("covariance outside Trinomial bounds")
        _check_psd(self.sigma)

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.sigma)


def _weights_for(count, weights):
    if weights is None:
        return np.ones(count, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (count,):
        raise ValueError(f"expected {count} weights, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if w.sum() <= 0:
        raise ValueError("weights sum to zero")
    return w


def bernoulli_from_counts(presence_counts, pair_counts, weight_total, n=None) -> BernoulliSummary:
    """Summary from accumulated success mass; probabilities are counts / total."""
    presence = np.asarray(presence_counts, dtype=np.float64)
    pairs = np.asarray(pair_counts, dtype=np.float64)
    k = presence.shape[0]
    total = float(weight_total)
    if total <= 0:
        raise ValueError("total weight must be positive")
    p = presence / total
    joint = pairs / total
    sigma = joint - np.outer(p, p)
    return BernoulliSummary(
        k=k, p=_freeze(p), joint=_freeze(joint), sigma=_freeze(sigma),
        weight_total=total, n=n,
        presence_counts=_freeze(presence), pair_counts=_freeze(pairs),
    )


def trinomial_from_counts(marginal_counts, joint_counts, weight_total, n=None,
                          abs_marginal_counts=None, abs_pair_counts=None,
                          mean_counts=None, outer_counts=None) -> TrinomialSummary:
    """Summary from accumulated state mass.

    joint_counts may be None (lean storage); then mean_counts (sum of states)
    and outer_counts (sum of state outer products) must be supplied together
    with the abs accumulators, and the covariance comes from moment matching
    instead of the pair tables.
    """
    marg = np.asarray(marginal_counts, dtype=np.float64)
    k = marg.shape[0]
    total = float(weight_total)
    if total <= 0:
        raise ValueError("total weight must be positive")
    marginals = marg / total
    p_minus = marginals[:, 0]
    p_plus = marginals[:, 2]
    mean = p_plus - p_minus

    if joint_counts is not None:
        jc = np.asarray(joint_counts, dtype=np.float64)
        tables = jc / total
        sigma = (
            (tables[:, :, 2, 2] - np.outer(p_plus, p_plus))
            + (tables[:, :, 0, 0] - np.outer(p_minus, p_minus))
            - (tables[:, :, 0, 2] - np.outer(p_minus, p_plus))
            - (tables[:, :, 2, 0] - np.outer(p_plus, p_minus))
        )
        sigma = (sigma + sigma.T) / 2.0
        if abs_marginal_counts is None:
            abs_marginal_counts = marg[:, 0] + marg[:, 2]
        if abs_pair_counts is None:
            abs_pair_counts = jc[:, :, 0, 0] + jc[:, :, 0, 2] + jc[:, :, 2, 0] + jc[:, :, 2, 2]
        pair_joints = _freeze(tables)
        joint_counts = _freeze(jc)
    else:
        if outer_counts is None or abs_marginal_counts is None or abs_pair_counts is None:
            raise ValueError("lean summaries need outer and abs accumulators")
        e2 = np.asarray(outer_counts, dtype=np.float64) / total
        sigma = e2 - np.outer(mean, mean)
        sigma = (sigma + sigma.T) / 2.0
        pair_joints = None

    return TrinomialSummary(
        k=k, marginals=_freeze(marginals), mean=_freeze(mean), sigma=_freeze(sigma),
        weight_total=total, pair_joints=pair_joints, n=n,
        marginal_counts=_freeze(marg), joint_counts=joint_counts,
        abs_marginal_counts=_freeze(np.asarray(abs_marginal_counts, dtype=np.float64)),
        abs_pair_counts=_freeze(np.asarray(abs_pair_counts, dtype=np.float64)),
    )


def bernoulli_from_states(states, weights=None, n=None) -> BernoulliSummary:
    """Fit from an (M, k) matrix of edge states in {0, 1}."""
    states = np.asarray(states)
    if states.ndim != 2 or states.shape[0] < 1:
        raise ValueError("need a non-empty (M, k) state matrix")
    if not np.isin(states, (0, 1)).all():
        raise ValueError("Bernoulli states must be 0 or 1")
    m, k = states.shape
    w = _weights_for(m, weights)
    presence = np.zeros(k, dtype=np.float64)
    pairs = np.zeros((k, k), dtype=np.float64)
    for start in range(0, m, _BLOCK):
        block = states[start:start + _BLOCK].astype(np.float64)
        wb = w[start:start + _BLOCK]
        presence += wb @ block
        pairs += (block * wb[:, None]).T @ block
    return bernoulli_from_counts(presence, pairs, w.sum(), n=n)


def trinomial_from_states(states, weights=None, n=None,
                          dense_joint_limit=DENSE_JOINT_LIMIT) -> TrinomialSummary:
    """Fit from an (M, k) matrix of arc states in {-1, 0, +1}.

    Beyond dense_joint_limit pairs only marginal, covariance, and abs
    accumulators are kept; the full 3x3 pair tables are dropped.
    """
    states = np.asarray(states)
    if states.ndim != 2 or states.shape[0] < 1:
        raise ValueError("need a non-empty (M, k) state matrix")
    if not np.isin(states, (-1, 0, 1)).all():
        raise ValueError("Trinomial states must be -1, 0, or +1")
    m, k = states.shape
    w = _weights_for(m, weights)
    dense = k <= dense_joint_limit

    marg = np.zeros((k, 3), dtype=np.float64)
    joint = np.zeros((k, k, 3, 3), dtype=np.float64) if dense else None
    outer = None if dense else np.zeros((k, k), dtype=np.float64)
    abs_pairs = None if dense else np.zeros((k, k), dtype=np.float64)
    for start in range(0, m, _BLOCK):
        block = states[start:start + _BLOCK]
        wb = w[start:start + _BLOCK]
        onehot = (block[:, :, None] == _STATE_VALUES).astype(np.float64)
        marg += np.einsum("b,bks->ks", wb, onehot)
        if dense:
            flat = onehot.reshape(block.shape[0], 3 * k)
            c = (flat * wb[:, None]).T @ flat
            joint += c.reshape(k, 3, k, 3).transpose(0, 2, 1, 3)
        else:
            fb = block.astype(np.float64)
            outer += (fb * wb[:, None]).T @ fb
            ab = np.abs(fb)
            abs_pairs += (ab * wb[:, None]).T @ ab
    if dense:
        return trinomial_from_counts(marg, joint, w.sum(), n=n)
    return trinomial_from_counts(
        marg, None, w.sum(), n=n,
        abs_marginal_counts=marg[:, 0] + marg[:, 2],
        abs_pair_counts=abs_pairs, outer_counts=outer,
    )


def _collect_states(graphs, m, directed, check):
    states = []
    map_ = m
    for g in graphs:
        if g.directed != directed:
            kind = "directed" if directed else "undirected"
            raise ValueError(f"expected {kind} graphs")
        if map_ is None:
            map_ = EdgeIndexMap.for_nodes(g.n)
        elif g.n != map_.n:
            raise ValueError(f"mixed vertex counts: {g.n} vs {map_.n}")
        if check is not None and not check(g):
            raise ValueError("directed input graph contains a cycle")
        states.append(arc_state_vector(g, map_))
    if not states:
        raise ValueError("empty graph stream")
    return np.asarray(states, dtype=np.int8), map_


def fit_bernoulli(graphs, m: EdgeIndexMap | None = None, weights=None) -> BernoulliSummary:
    """Empirical Bernoulli summary of a stream of undirected graphs."""
    states, map_ = _collect_states(graphs, m, directed=False, check=None)
    return bernoulli_from_states(states, weights=weights, n=map_.n)


def fit_trinomial(graphs, m: EdgeIndexMap | None = None, weights=None) -> TrinomialSummary:
    """Empirical Trinomial summary of a stream of DAGs; cyclic input is rejected."""
    states, map_ = _collect_states(graphs, m, directed=True, check=is_acyclic)
    return trinomial_from_states(states, weights=weights, n=map_.n)


def abs_transform(t: TrinomialSummary) -> BernoulliSummary:
    """Bernoulli summary of |T|: collapses the two arc directions into presence.

    Built from the accumulated counts, so on unweighted fits the result is
    bit-identical to refitting the skeletons.
    """
    return bernoulli_from_counts(
        t.abs_marginal_counts, t.abs_pair_counts, t.weight_total, n=t.n,
    )


def variance_decomposition(t: TrinomialSummary, pair_index: int | None = None):
    """Split VAR(T_i) into a presence part and a direction part.

    The presence part is VAR(|T_i|) = p*(1 - p*) with p* = p(+1) + p(-1);
    the direction part is 4 p(+1) p(-1). The two parts sum to VAR(T_i).
    """
    p_star = t.abs_marginal_counts / t.weight_total
    skeleton_part = p_star * (1.0 - p_star)
    direction_part = 4.0 * t.marginals[:, 2] * t.marginals[:, 0]
    if pair_index is None:
        return skeleton_part, direction_part
    return float(skeleton_part[pair_index]), float(direction_part[pair_index])
