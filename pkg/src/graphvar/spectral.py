"""Symmetric eigendecomposition and the eigenvalue-simplex geometry.

Eigenvalues of an edge-distribution covariance matrix live in the convex
set bounded by the non-standard simplex: the coordinate sum is capped at
k/4 for Bernoulli families and at k for Trinomial families, and single
eigenvalues obey the same cap. Positions inside that set, measured against
the origin (single-graph case) and the equal-coordinate maximum-variance
point, visualise how concentrated a structure distribution is.

The solver is cyclic Jacobi with an absolute off-diagonal threshold of
1e-12 and at most 100 sweeps; eigenvectors are never formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SimplexPosition",
    "SpectralSummary",
    "eigenvalues_symmetric",
    "jacobi_eigenvalues",
    "simplex_position",
]

SYMMETRY_TOL = 1e-10
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100
_PSD_SLACK = -1e-9

FAMILY_BERNOULLI = "bernoulli"
FAMILY_TRINOMIAL = "trinomial"


def family_bound(family: str, k: int) -> float:
    if family == FAMILY_BERNOULLI:
        return k / 4.0
    if family == FAMILY_TRINOMIAL:
        return float(k)
    raise ValueError(f"unknown family {family!r}")


def jacobi_eigenvalues(a, tol: float = OFFDIAG_TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps rotate every (p, q) plane in row order until the largest
    off-diagonal magnitude falls below tol. Unsorted output.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k <= 1:
        return np.diag(a).copy()
    a = (a + a.T) / 2.0
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a))).max()
        if off <= tol:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if abs(apq) <= tol:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(tau * tau + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return np.diag(a).copy()


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalues of a covariance matrix, sorted descending."""

    k: int
    eigenvalues: np.ndarray
    trace: float
    family: str | None = None

    def __post_init__(self):
        lam = self.eigenvalues
        if lam.shape != (self.k,):
            raise ValueError("eigenvalue count disagrees with k")
        if lam.min(initial=0.0) < _PSD_SLACK:
            raise ValueError(f"matrix not PSD within tolerance (min eigenvalue {lam.min()})")
        tol = max(1e-10, 1e-12 * self.k * max(1.0, abs(self.trace)))
        if abs(lam.sum() - self.trace) > tol:
            raise ValueError("eigenvalue sum disagrees with trace")
        if self.family is not None:
            bound = family_bound(self.family, self.k)
            if lam.sum() > bound + 1e-9 or (self.k and lam.max() > bound + 1e-9):
                raise ValueError(f"eigenvalues exceed the {self.family} bound {bound}")

    @property
    def family_bound(self) -> float | None:
        return None if self.family is None else family_bound(self.family, self.k)

    @property
    def simplex_coordinate(self) -> float:
        return float(self.eigenvalues.sum())


def eigenvalues_symmetric(sigma, family: str | None = None) -> SpectralSummary:
    """Spectral summary of a symmetric covariance matrix."""
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {sigma.shape}")
    if sigma.size and np.abs(sigma - sigma.T).max() > SYMMETRY_TOL:
        raise ValueError("matrix is not symmetric to 1e-10")
    lam = jacobi_eigenvalues(sigma)
    order = np.argsort(-lam, kind="stable")
    lam = np.ascontiguousarray(lam[order])
    lam.setflags(write=False)
    return SpectralSummary(
        k=sigma.shape[0], eigenvalues=lam, trace=float(np.trace(sigma)), family=family,
    )


@dataclass(frozen=True)
class SimplexPosition:
    coordinate: float          # sum of eigenvalues
    distance_to_origin: float
    distance_to_maxent: float


def simplex_position(s: SpectralSummary, family: str | None = None,
                     maxent_variance: float | None = None) -> SimplexPosition:
    """Euclidean position of the eigenvalue vector inside the feasible set.

    The reference points are the origin (all mass on one graph) and the
    equal-coordinate point (v, ..., v): v = 1/4 for Bernoulli, and the
    per-arc maximum-entropy variance (caller-supplied) for Trinomial.
    """
    fam = family if family is not None else s.family
    if fam is None:
        raise ValueError("family required to locate the maximum-entropy point")
    if fam == FAMILY_BERNOULLI:
        v = 0.25 if maxent_variance is None else maxent_variance
    elif fam == FAMILY_TRINOMIAL:
        if maxent_variance is None:
            raise ValueError("Trinomial simplex position needs the maxent arc variance")
        v = maxent_variance
    else:
        raise ValueError(f"unknown family {fam!r}")
    lam = s.eigenvalues
    return SimplexPosition(
        coordinate=float(lam.sum()),
        distance_to_origin=float(np.linalg.norm(lam)),
        distance_to_maxent=float(np.linalg.norm(lam - v)),
    )
