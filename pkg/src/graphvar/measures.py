"""Structural-variability statistics and their maximum-entropy references.

Three scalar statistics summarise the spread of an edge-distribution
covariance matrix: the total variance (trace), the generalised variance
(determinant), and the squared Frobenius distance to a target matrix that
multiples the maximum-entropy covariance. Normalised versions map them to
[0, 1] so runs of different learning algorithms, tuning values, or priors
can be ranked on one scale.

Reference values for the uniform (maximum-entropy) case come either from
the exact census (n <= 6) or from the closed-form approximation: in a
uniform DAG each orientation of an arc has probability about
1/4 + 1/(4(n-1)), absence about 1/2 - 1/(2(n-1)), and the per-arc variance
about 1/2 + 1/(2(n-1)). Pairwise covariances in the uniform case are
bounded through Hoeffding's identity applied to the Farlie-Morgenstern-
Gumbel joint construction with |epsilon| <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .graphs import EdgeIndexMap
from .spectral import (
    FAMILY_BERNOULLI,
    FAMILY_TRINOMIAL,
    SpectralSummary,
    jacobi_eigenvalues,
)

__all__ = [
    "BuntineAnalytics",
    "ConjectureEvidence",
    "EvidenceRow",
    "FmgBound",
    "MaxEntReference",
    "VariabilityReport",
    "approx_maxent_marginals",
    "approx_maxent_variance",
    "buntine_prior_analytics",
    "conjecture_evidence",
    "fmg_covariance_bound",
    "fmg_limit_bounds",
    "frobenius_variability",
    "generalised_variance",
    "maxent_reference",
    "total_variance",
    "variability_report",
]

_CLAMP_SLACK = 1e-12
DEFAULT_GV_DROP = 1e-12


# ---------------------------------------------------------------------------
# raw statistics


def total_variance(x) -> float:
    """Trace of the covariance matrix (equals the eigenvalue sum)."""
    if isinstance(x, SpectralSummary):
        return float(x.eigenvalues.sum())
    sigma = np.asarray(x, dtype=np.float64)
    return float(np.trace(sigma))


def generalised_variance(x, drop_below: float | None = None,
                         shrink: float | None = None) -> float:
    """Determinant via the eigenvalue product, after an optional reduction.

    drop_below removes pairs whose variance falls below the threshold
    (never-varying edges make the raw determinant identically zero);
    shrink blends the matrix with (trace/k) I at the given intensity.
    With drop_below reducing to an empty matrix the result is 0: a
    distribution with no varying pair has no generalised variance.
    """
    if isinstance(x, SpectralSummary):
        if drop_below is not None or shrink is not None:
            raise ValueError("reductions need the covariance matrix, not its spectrum")
        return float(np.prod(x.eigenvalues))
    sigma = np.asarray(x, dtype=np.float64)
    if drop_below is not None:
        keep = np.flatnonzero(np.diag(sigma) >= drop_below)
        if keep.size == 0:
            return 0.0
        sigma = sigma[np.ix_(keep, keep)]
    if shrink is not None:
        if not 0.0 <= shrink <= 1.0:
            raise ValueError("shrinkage intensity must be in [0, 1]")
        k = sigma.shape[0]
        mu = np.trace(sigma) / k
        sigma = (1.0 - shrink) * sigma + shrink * mu * np.eye(k)
    if sigma.shape[0] == 0:
        return 0.0
    return float(np.prod(jacobi_eigenvalues(sigma)))


def _scalar_target(family: str, k: int, n: int | None, target_variance: float | None) -> float:
    """Diagonal value of the target matrix Psi = c I."""
    if family == FAMILY_BERNOULLI:
        return k / 4.0
    if family == FAMILY_TRINOMIAL:
        v = approx_maxent_variance(n) if target_variance is None else float(target_variance)
        return k * v
    raise ValueError(f"unknown family {family!r}")


def frobenius_variability(sigma, family: str, n: int | None = None,
                          target_variance: float | None = None,
                          target=None) -> float:
    """Squared Frobenius distance between the covariance and its target.

    The default target is c I with c = k/4 (Bernoulli) or c = k v where v
    is the maximum-entropy arc variance (Trinomial; approximated from n
    unless target_variance overrides it). An explicit target matrix wins
    over both.
    """
    if isinstance(sigma, SpectralSummary):
        if target is not None:
            raise ValueError("matrix targets need the covariance matrix, not its spectrum")
        c = _scalar_target(family, sigma.k, n, target_variance)
        return float(((sigma.eigenvalues - c) ** 2).sum())
    sigma = np.asarray(sigma, dtype=np.float64)
    k = sigma.shape[0]
    if target is not None:
        target = np.asarray(target, dtype=np.float64)
        if target.shape != sigma.shape:
            raise ValueError("target shape disagrees with covariance shape")
        return float(((sigma - target) ** 2).sum())
    c = _scalar_target(family, k, n, target_variance)
    return float(((sigma - c * np.eye(k)) ** 2).sum())


# ---------------------------------------------------------------------------
# normalisation


def _var_t_max(family, k):
    return k / 4.0 if family == FAMILY_BERNOULLI else float(k)


def _var_g_max(family, k):
    return 0.25 ** k if family == FAMILY_BERNOULLI else 1.0


def _var_f_bounds(family, k, c):
    """(min, max) of sum (lambda_i - c)^2 over the feasible eigenvalue set.

    The statistic is convex, so the maximum sits at a vertex (the origin,
    for c >= bound/2) and the minimum at the projection of c 1 onto the
    simplex face where the coordinate sum hits the family bound.
    """
    bound = k / 4.0 if family == FAMILY_BERNOULLI else float(k)
    f_min = k * (bound / k - c) ** 2
    f_max = k * c ** 2
    return f_min, f_max


def _clamp01(value, label):
    if value < -_CLAMP_SLACK or value > 1.0 + _CLAMP_SLACK:
        raise ValueError(f"normalised {label} = {value} outside [0, 1] beyond slack")
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class VariabilityReport:
    """Raw and normalised variability statistics with the bounds used."""

    family: str
    k: int
    var_t: float
    var_g: float
    var_f: float
    target_description: str
    normalized: tuple            # (vbar_t, vbar_g, vbar_f)
    bounds_used: dict
    k_reduced: int

    def criterion(self, name: str) -> float:
        idx = {"vt": 0, "vg": 1, "vf": 2}.get(name)
        if idx is None:
            raise ValueError(f"unknown criterion {name!r} (use vt, vg, or vf)")
        return self.normalized[idx]


def variability_report(sigma, family: str, n: int | None = None,
                       target_variance: float | None = None,
                       gv_drop_below: float | None = DEFAULT_GV_DROP) -> VariabilityReport:
    """Full variability report for a covariance matrix.

    The generalised variance defaults to dropping never-varying pairs
    (variance below 1e-12) before taking the determinant; pass
    gv_drop_below=None for the raw determinant.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    k = sigma.shape[0]
    var_t = total_variance(sigma)
    if gv_drop_below is None:
        k_reduced = k
    else:
        k_reduced = int((np.diag(sigma) >= gv_drop_below).sum())
    var_g = generalised_variance(sigma, drop_below=gv_drop_below)
    c = _scalar_target(family, k, n, target_variance)
    var_f = frobenius_variability(sigma, family, n=n, target_variance=target_variance)
    if family == FAMILY_BERNOULLI:
        target_description = f"(k/4) I with k={k}"
    else:
        v = c / k
        target_description = f"k v I with k={k}, v={v!r}"

    t_max = _var_t_max(family, k)
    g_max = _var_g_max(family, k_reduced) if k_reduced > 0 else _var_g_max(family, k)
    f_min, f_max = _var_f_bounds(family, k, c)
    vbar_t = _clamp01(var_t / t_max, "VAR_T")
    vbar_g = _clamp01(var_g / g_max, "VAR_G")
    vbar_f = _clamp01((f_max - var_f) / (f_max - f_min), "VAR_F")
    return VariabilityReport(
        family=family, k=k, var_t=var_t, var_g=var_g, var_f=var_f,
        target_description=target_description,
        normalized=(vbar_t, vbar_g, vbar_f),
        bounds_used={
            "var_t_max": t_max,
            "var_g_max": g_max,
            "var_f_min": f_min,
            "var_f_max": f_max,
        },
        k_reduced=k_reduced,
    )


# ---------------------------------------------------------------------------
# maximum-entropy references


def approx_maxent_marginals(n: int) -> tuple:
    """(p_reversed, p_absent, p_forward) for a uniform DAG on n nodes."""
    if n < 2:
        raise ValueError("need at least two nodes")
    c = 1.0 / (4.0 * (n - 1))
    p_arrow = 0.25 + c
    return (p_arrow, 1.0 - 2.0 * p_arrow, p_arrow)


def approx_maxent_variance(n: int | None) -> float:
    """Per-arc variance 2 p(forward) of a uniform DAG, approximately."""
    if n is None:
        raise ValueError("Trinomial targets need the node count n or an explicit variance")
    if n < 2:
        raise ValueError("need at least two nodes")
    return 0.5 + 1.0 / (2.0 * (n - 1))


@dataclass(frozen=True)
class MaxEntReference:
    """Marginals and covariance of the uniform distribution over structures."""

    n: int
    k: int
    family: str
    source: str                  # "exact" or "approximate"
    marginals: tuple             # (p_absent, p_present) or (p_rev, p_abs, p_fwd)
    sigma_ref: np.ndarray
    cov_bound: float
    cor_bound: float
    arc_variance: float


def maxent_reference(n: int, family: str, source: str = "approximate") -> MaxEntReference:
    if source not in ("exact", "approximate"):
        raise ValueError(f"unknown source {source!r}")
    if n < 2:
        raise ValueError("need at least two nodes")
    k = EdgeIndexMap.for_nodes(n).k
    if family == FAMILY_BERNOULLI:
        if source == "exact":
            # enumeration confirms the analytic iid-1/2 result with exact counts
            from .census import census_ugs
            if n > 6:
                raise InfeasibleError("exact reference needs the census (n <= 6)")
            summary = census_ugs(n).to_bernoulli_summary()
            sigma = np.array(summary.sigma)
        else:
            sigma = 0.25 * np.eye(k)
        sigma.setflags(write=False)
        return MaxEntReference(
            n=n, k=k, family=family, source=source,
            marginals=(0.5, 0.5), sigma_ref=sigma,
            cov_bound=0.0, cor_bound=0.0, arc_variance=0.25,
        )
    if family != FAMILY_TRINOMIAL:
        raise ValueError(f"unknown family {family!r}")
    if source == "exact":
        from .census import census_dags
        if n > 6:
            raise InfeasibleError("exact reference needs the census (n <= 6)")
        summary = census_dags(n).to_trinomial_summary()
        triple = summary.marginals[0]
        if not np.allclose(summary.marginals, triple[None, :], atol=0.0):
            raise AssertionError("census marginals are not pair-symmetric")
        sigma = np.array(summary.sigma)
        off = np.abs(sigma - np.diag(np.diag(sigma)))
        var = float(sigma[0, 0])
        cov_bound = float(off.max()) if k > 1 else 0.0
        return MaxEntReference(
            n=n, k=k, family=family, source=source,
            marginals=tuple(float(x) for x in triple), sigma_ref=summary.sigma,
            cov_bound=cov_bound, cor_bound=cov_bound / var if k > 1 else 0.0,
            arc_variance=var,
        )
    marginals = approx_maxent_marginals(n)
    v = approx_maxent_variance(n)
    bound = fmg_covariance_bound(n)
    sigma = v * np.eye(k)
    sigma.setflags(write=False)
    return MaxEntReference(
        n=n, k=k, family=family, source=source,
        marginals=marginals, sigma_ref=sigma,
        cov_bound=bound.cov_bound, cor_bound=bound.cor_bound, arc_variance=v,
    )


# ---------------------------------------------------------------------------
# covariance bounds for the uniform DAG case


@dataclass(frozen=True)
class FmgBound:
    """Hoeffding/FMG bound on |COV| and |COR| between two arcs, uniform case."""

    n: int
    cov_bound: float
    cor_bound: float
    cdf_at_minus_one: float      # P(A <= -1)
    cdf_at_zero: float           # P(A <= 0)
    epsilon_magnitude: float = 1.0

    def marginal_cdf(self, x: float) -> float:
        """Common distribution function of an arc state in the uniform case."""
        if x < -1.0:
            return 0.0
        if x < 0.0:
            return self.cdf_at_minus_one
        if x < 1.0:
            return self.cdf_at_zero
        return 1.0


def fmg_covariance_bound(n: int) -> FmgBound:
    """Covariance and correlation bounds for arcs of a uniform DAG on n nodes.

    The closed forms are cross-checked against the defining double sum of
    F(x) F(y) (1 - F(x)) (1 - F(y)) over the jump points {-1, 0}^2, which
    is the largest possible FMG deviation term under |epsilon| <= 1.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    c = 1.0 / (4.0 * (n - 1))
    f_m1 = 0.25 + c
    f_0 = 0.75 - c
    cov_closed = 4.0 * (0.75 - c) ** 2 * (0.25 + c) ** 2
    cor_closed = 2.0 * (0.75 - c) ** 2 * (0.25 + c)
    cov_sum = 0.0
    for fx in (f_m1, f_0):
        for fy in (f_m1, f_0):
            cov_sum += fx * fy * (1.0 - fx) * (1.0 - fy)
    if abs(cov_closed - cov_sum) > 1e-12:
        raise AssertionError(
            f"closed form {cov_closed!r} and double sum {cov_sum!r} disagree"
        )
    return FmgBound(
        n=n, cov_bound=cov_closed, cor_bound=cor_closed,
        cdf_at_minus_one=f_m1, cdf_at_zero=f_0,
    )


def fmg_limit_bounds() -> tuple:
    """Limits of the covariance and correlation bounds as n grows."""
    return (4.0 * 0.75 ** 2 * 0.25 ** 2, 2.0 * 0.75 ** 2 * 0.25)


# ---------------------------------------------------------------------------
# independent-arc (ordering) prior


@dataclass(frozen=True)
class BuntineAnalytics:
    n: int
    k: int
    beta: float
    arc_variance: float
    var_t: float
    var_g: float


def buntine_prior_analytics(n: int, beta: float) -> BuntineAnalytics:
    """Moments of the independent-arc prior with inclusion probability beta.

    Under a fixed topological ordering each of the k pairs carries the arc
    with probability beta, independently, so VAR(A) = beta - beta^2,
    VAR_T = k VAR(A), and VAR_G = VAR(A)^k.
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must be in [0, 1]")
    k = EdgeIndexMap.for_nodes(n).k
    v = beta - beta * beta
    return BuntineAnalytics(n=n, k=k, beta=beta, arc_variance=v,
                            var_t=k * v, var_g=v ** k)


# ---------------------------------------------------------------------------
# conjecture evidence


@dataclass(frozen=True)
class EvidenceRow:
    n: int
    source: str                  # "census" or "mcmc"
    support: int                 # graph count or sample count
    shared_max_abs_cov: float
    shared_max_abs_cor: float
    disjoint_max_abs_cov: float
    zero_fraction: float         # off-diagonal entries below tolerance
    disjoint_fraction: float     # structural share of vertex-disjoint pairs


@dataclass(frozen=True)
class ConjectureEvidence:
    """Observed covariance patterns across sizes; reported as evidence only."""

    rows: tuple
    cov_increasing: bool
    cor_increasing: bool
    bounded_by_fmg: bool
    limit_cov: float
    limit_cor: float


def _pair_masks(n):
    m = EdgeIndexMap.for_nodes(n)
    k = m.k
    shared = np.zeros((k, k), dtype=bool)
    for a in range(k):
        ia, ja = m.pair(a)
        for b in range(k):
            if a == b:
                continue
            ib, jb = m.pair(b)
            shared[a, b] = len({ia, ja} & {ib, jb}) > 0
    disjoint = ~shared
    np.fill_diagonal(disjoint, False)
    return shared, disjoint


def conjecture_evidence(n_values, mc_samples: int = 100_000, seed: int = 0,
                        zero_tol: float | None = None) -> ConjectureEvidence:
    """Tabulate arc-covariance patterns per size, census-exact where feasible.

    For n <= 6 the census provides exact values; beyond that the uniform
    sampler estimates them from mc_samples draws. The zero tolerance
    defaults to 1e-12 on census rows and to 3/sqrt(samples) on sampled
    rows (three standard errors of a covariance estimate near zero).
    """
    from .census import census_dags
    from .sampling import McmcConfig, sample_dag_states
    from .edgedist import trinomial_from_states

    rows = []
    for n in sorted(n_values):
        if n < 3:
            raise ValueError("pair covariances need at least three nodes")
        if n <= 6:
            summary = census_dags(n).to_trinomial_summary()
            source = "census"
            support = int(summary.weight_total)
            tol = 1e-12 if zero_tol is None else zero_tol
        else:
            states = sample_dag_states(McmcConfig(n=n, sample_count=mc_samples, seed=seed + n))
            summary = trinomial_from_states(states, n=n)
            source = "mcmc"
            support = mc_samples
            tol = 3.0 / np.sqrt(mc_samples) if zero_tol is None else zero_tol
        sigma = summary.sigma
        var = np.diag(sigma)
        cor = sigma / np.sqrt(np.outer(var, var))
        shared, disjoint = _pair_masks(n)
        offdiag = shared | disjoint
        rows.append(EvidenceRow(
            n=n, source=source, support=support,
            shared_max_abs_cov=float(np.abs(sigma[shared]).max()),
            shared_max_abs_cor=float(np.abs(cor[shared]).max()),
            disjoint_max_abs_cov=float(np.abs(sigma[disjoint]).max()) if disjoint.any() else 0.0,
            zero_fraction=float((np.abs(sigma[offdiag]) <= tol).mean()),
            disjoint_fraction=float(disjoint.sum() / offdiag.sum()),
        ))
    covs = [r.shared_max_abs_cov for r in rows]
    cors = [r.shared_max_abs_cor for r in rows]
    limit_cov, limit_cor = fmg_limit_bounds()
    bounded = all(
        r.shared_max_abs_cov < fmg_covariance_bound(r.n).cov_bound
        and r.shared_max_abs_cor < fmg_covariance_bound(r.n).cor_bound
        for r in rows
    )
    return ConjectureEvidence(
        rows=tuple(rows),
        cov_increasing=all(a < b for a, b in zip(covs, covs[1:])),
        cor_increasing=all(a < b for a, b in zip(cors, cors[1:])),
        bounded_by_fmg=bounded,
        limit_cov=limit_cov,
        limit_cor=limit_cor,
    )
