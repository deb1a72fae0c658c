"""Numerical core of the relaxed alignment problem.

All operations work on a pair of kappa-scaled adjacency matrices ``(A, B)``,
a node-cost matrix ``D`` and a relaxed alignment ``P`` with entries in
``[0, 1]``. The relaxed objective is::

    f(P) = 0.5 * ||A P - P B||_F^2  +  mu * tr(P^T D)  +  lam * tr(P^T (J - P))

where ``J`` is the all-ones matrix. The last term is the permutation-inducing
regularizer: it vanishes exactly on permutation matrices and is positive on
every other doubly stochastic matrix. Row/column-sum feasibility is enforced
by a quadratic penalty with weight ``sigma``; the box constraint ``[0, 1]`` is
handled by projection in the optimizer, not here.

Everything in this module is a pure function of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assignment import Permutation
from .errors import EigensolverError


@dataclass(frozen=True)
class ScaledPair:
    """Kappa-scaled adjacency matrices of a padded graph pair."""

    a_scaled: np.ndarray
    b_scaled: np.ndarray

    def __post_init__(self) -> None:
        for name, m in (("a_scaled", self.a_scaled), ("b_scaled", self.b_scaled)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square, got shape {m.shape}")
            if not np.array_equal(m, m.T):
                raise ValueError(f"{name} must be symmetric")
        if self.a_scaled.shape != self.b_scaled.shape:
            raise ValueError(
                f"scaled pair shapes differ: {self.a_scaled.shape} vs {self.b_scaled.shape}"
            )

    @property
    def order(self) -> int:
        return self.a_scaled.shape[0]


def scale_pair(a: np.ndarray, b: np.ndarray, edge_cost_squared: float) -> ScaledPair:
    """Scale raw adjacency matrices by ``sqrt(edge_cost_squared)``."""
    kappa = math.sqrt(edge_cost_squared)
    return ScaledPair(a_scaled=kappa * np.asarray(a, dtype=np.float64),
                      b_scaled=kappa * np.asarray(b, dtype=np.float64))


@dataclass(frozen=True)
class ObjectiveParams:
    """Weights of the relaxed objective: node-cost weight ``mu``, regularizer
    weight ``lam``, penalty coefficient ``sigma``."""

    mu: float = 1.0
    lam: float = 0.0
    sigma: float = 0.0

    def __post_init__(self) -> None:
        for name, value in (("mu", self.mu), ("lam", self.lam), ("sigma", self.sigma)):
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")


def _check_shapes(sp: ScaledPair, d: np.ndarray, p: np.ndarray) -> None:
    n = sp.order
    if d.shape != (n, n) or p.shape != (n, n):
        raise ValueError(
            f"dimension mismatch: matrices {sp.a_scaled.shape}, D {d.shape}, P {p.shape}"
        )


def objective(sp: ScaledPair, d: np.ndarray, p: np.ndarray, params: ObjectiveParams) -> float:
    """Relaxed objective value (no feasibility penalty)."""
    _check_shapes(sp, d, p)
    r = sp.a_scaled @ p - p @ sp.b_scaled
    value = 0.5 * float(np.sum(r * r))
    value += params.mu * float(np.sum(p * d))
    value += params.lam * float(np.sum(p * (1.0 - p)))
    return value


def _feasibility_violation(p: np.ndarray) -> float:
    row = p.sum(axis=1) - 1.0
    col = p.sum(axis=0) - 1.0
    return float(np.sum(row * row) + np.sum(col * col))


def penalized_objective(
    sp: ScaledPair, d: np.ndarray, p: np.ndarray, params: ObjectiveParams
) -> float:
    """Objective plus ``sigma * (||P 1 - 1||^2 + ||P^T 1 - 1||^2)``."""
    value = objective(sp, d, p, params)
    if params.sigma != 0.0:
        value += params.sigma * _feasibility_violation(p)
    return value


def gradient(
    sp: ScaledPair, d: np.ndarray, p: np.ndarray, params: ObjectiveParams
) -> np.ndarray:
    """Analytic gradient of the penalized objective with respect to ``P``.

    Using symmetry of the scaled matrices, with ``R = A P - P B``::

        grad = A R - R B + mu * D + lam * (J - 2 P)
             + 2 * sigma * ((P 1 - 1) 1^T + 1 (P^T 1 - 1)^T)
    """
    _check_shapes(sp, d, p)
    a = sp.a_scaled
    b = sp.b_scaled
    r = a @ p - p @ b
    g = a @ r - r @ b
    if params.mu != 0.0:
        g += params.mu * d
    if params.lam != 0.0:
        g += params.lam * (1.0 - 2.0 * p)
    if params.sigma != 0.0:
        row = p.sum(axis=1) - 1.0
        col = p.sum(axis=0) - 1.0
        g += (2.0 * params.sigma) * (row[:, None] + col[None, :])
    return g


def quasi_perm_residual(p: np.ndarray) -> float:
    """``tr(P^T (J - P)) = sum p_ij (1 - p_ij)``.

    Zero exactly on permutation matrices; positive on every doubly stochastic
    matrix that is not a permutation.
    """
    p = np.asarray(p, dtype=np.float64)
    return float(np.sum(p * (1.0 - p)))


def relabel_transform(
    sp: ScaledPair, d: np.ndarray, h: Permutation
) -> tuple[ScaledPair, np.ndarray]:
    """Recenter the problem around a rounded permutation ``h``.

    Returns ``(H^T A H, B)`` and ``H^T D``: the orientation in which the
    objective at ``H^T P`` equals the original objective at ``P`` for every
    ``P`` (same ``mu``, ``lam``, ``sigma``). Applied with ``h`` equal to the
    last rounding, the incumbent alignment moves next to the identity, so the
    next round makes small corrections in a well-centered coordinate system.

    The transform is computed by exact index permutation, not matrix products.
    """
    n = sp.order
    if h.order != n:
        raise ValueError(f"permutation order {h.order} does not match matrices of order {n}")
    inv = np.array(h.inverse().mapping, dtype=np.int64)
    a2 = sp.a_scaled[np.ix_(inv, inv)]
    d2 = d[inv, :]
    return ScaledPair(a_scaled=a2, b_scaled=sp.b_scaled), d2


def jacobi_eigenvalues(
    m: np.ndarray, *, off_tol: float = 1e-10, max_sweeps: int = 100
) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop when the Frobenius norm of the off-diagonal part drops to
    ``off_tol``; exceeding ``max_sweeps`` raises :class:`EigensolverError`.
    Returns eigenvalues sorted ascending.
    """
    a = np.array(m, dtype=np.float64, copy=True)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    if n <= 1:
        return np.diag(a).copy()
    off_part = np.empty_like(a)
    for _ in range(max_sweeps):
        np.copyto(off_part, a)
        np.fill_diagonal(off_part, 0.0)
        off = math.sqrt(float(np.sum(off_part * off_part)))
        if off <= off_tol:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                if abs(apq) * 1e15 <= abs(a[p, p]) + abs(a[q, q]):
                    # rotation would be a numerical no-op; drop the entry
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(tau * tau + 1.0))
                else:
                    t = -1.0 / (-tau + math.sqrt(tau * tau + 1.0))
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
    raise EigensolverError(f"Jacobi sweeps did not converge within {max_sweeps} sweeps")


def convexity_lambda_bound(sp: ScaledPair) -> float:
    """Largest regularizer weight for which the relaxed objective stays convex.

    Equals ``min_{i,j} (ev_i(A) - ev_j(B))^2 / 2`` over the eigenvalues of the
    two scaled matrices. Diagnostic only: it is zero whenever the two spectra
    intersect, and the solver's schedule does not consult it.
    """
    ev_a = jacobi_eigenvalues(sp.a_scaled)
    ev_b = jacobi_eigenvalues(sp.b_scaled)
    if ev_a.size == 0:
        return 0.0
    diff = ev_a[:, None] - ev_b[None, :]
    return float(np.min(diff * diff) / 2.0)
