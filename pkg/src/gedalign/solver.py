"""Outer/inner optimization loop producing a GED upper bound and its mapping.

One solve runs rounds of projected Adam on the penalized relaxed objective.
Each round ends by rounding the relaxed alignment to a permutation (exact
assignment on the overlap), scoring the composed mapping with the exact edit
accounting, and recentering the problem around the rounding so the next round
restarts next to the identity. The regularizer weight grows by a fixed step
per round, the feasibility penalty by a growth factor up to a cap. The best
scored mapping over all rounds is reported; by construction it can only
overestimate the true distance.

A solve is strictly single-threaded and bit-for-bit deterministic.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .assignment import Permutation, round_to_permutation
from .costs import CostModel, build_cost_matrix
from .editpath import EditPath, extract_edit_path, ged_under_mapping
from .errors import DivergenceError
from .graphs import GraphPair, LabeledGraph, adjacency, pad_pair
from .kernel import (
    ObjectiveParams,
    ScaledPair,
    gradient,
    objective,
    penalized_objective,
    relabel_transform,
    scale_pair,
)

logger = logging.getLogger(__name__)

#: converged_reason values
PATIENCE_EXHAUSTED = "patience_exhausted"
LAMBDA_ROUNDS_EXHAUSTED = "lambda_rounds_exhausted"
DIVERGENCE_DETECTED = "divergence_detected"


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters; the defaults are the production setting.

    ``enable_regularizer=False`` keeps the regularizer weight at zero for the
    whole solve, so every round just rounds the feasibility-penalized relaxed
    solution. ``enable_inverse_relabel=False`` skips the per-round recentering
    and keeps optimizing in the original coordinates.
    """

    mu: float = 1.0
    alpha: float = 0.001
    lambda_step: float = 0.5
    lambda_max_rounds: int = 20
    patience: int = 3
    inner_tol: float = 1e-7
    inner_max_iters: int = 500
    sigma_init: float = 1.0
    sigma_growth: float = 10.0
    sigma_cap: float = 1e3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    enable_regularizer: bool = True
    enable_inverse_relabel: bool = True

    def __post_init__(self) -> None:
        positive = (
            ("alpha", self.alpha),
            ("lambda_step", self.lambda_step),
            ("inner_tol", self.inner_tol),
            ("sigma_init", self.sigma_init),
            ("sigma_growth", self.sigma_growth),
            ("sigma_cap", self.sigma_cap),
            ("adam_eps", self.adam_eps),
        )
        for name, value in positive:
            if not (value > 0) or not math.isfinite(value):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.lambda_max_rounds < 1:
            raise ValueError(f"lambda_max_rounds must be >= 1, got {self.lambda_max_rounds}")
        if self.inner_max_iters < 1:
            raise ValueError(f"inner_max_iters must be >= 1, got {self.inner_max_iters}")
        for name, beta in (("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)):
            if not (0.0 <= beta < 1.0):
                raise ValueError(f"{name} must be in [0, 1), got {beta}")


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int

    @staticmethod
    def initial(shape: tuple[int, ...]) -> AdamState:
        return AdamState(m=np.zeros(shape), v=np.zeros(shape), t=0)


def adam_step(
    p: np.ndarray,
    grad: np.ndarray,
    state: AdamState,
    alpha: float,
    betas: tuple[float, float],
    eps: float,
) -> tuple[np.ndarray, AdamState]:
    """One bias-corrected Adam update followed by projection onto ``[0, 1]``.

    Raises :class:`DivergenceError` on a non-finite gradient.
    """
    if not np.all(np.isfinite(grad)):
        raise DivergenceError("non-finite gradient")
    b1, b2 = betas
    t = state.t + 1
    m = b1 * state.m + (1.0 - b1) * grad
    v = b2 * state.v + (1.0 - b2) * grad * grad
    m_hat = m / (1.0 - b1**t)
    v_hat = v / (1.0 - b2**t)
    p_new = p - alpha * m_hat / (np.sqrt(v_hat) + eps)
    np.clip(p_new, 0.0, 1.0, out=p_new)
    return p_new, AdamState(m=m, v=v, t=t)


def inner_minimize(
    sp: ScaledPair,
    d: np.ndarray,
    p0: np.ndarray,
    params: ObjectiveParams,
    cfg: SolverConfig,
) -> tuple[np.ndarray, int]:
    """Run projected Adam from ``p0`` until the penalized objective stalls.

    Stops when the change between successive objective values drops below
    ``cfg.inner_tol`` or after ``cfg.inner_max_iters`` steps. Returns the best
    iterate seen (Adam is not monotone, so the last iterate may be worse than
    the start) and the number of steps taken.
    """
    p = np.asarray(p0, dtype=np.float64)
    state = AdamState.initial(p.shape)
    betas = (cfg.adam_beta1, cfg.adam_beta2)
    prev = penalized_objective(sp, d, p, params)
    if not math.isfinite(prev):
        raise DivergenceError("non-finite objective at the inner start")
    best_p = p
    best_value = prev
    steps = 0
    for step in range(1, cfg.inner_max_iters + 1):
        g = gradient(sp, d, p, params)
        p, state = adam_step(p, g, state, cfg.alpha, betas, cfg.adam_eps)
        current = penalized_objective(sp, d, p, params)
        steps = step
        if not math.isfinite(current):
            raise DivergenceError(f"non-finite objective at inner step {step}")
        if current < best_value:
            best_value = current
            best_p = p
        if abs(current - prev) < cfg.inner_tol:
            break
        prev = current
    return best_p, steps


@dataclass(frozen=True)
class RoundRecord:
    """Per-round trace entry."""

    round_index: int
    lam: float
    sigma: float
    inner_iterations: int
    candidate_ged: float
    objective_value: float


@dataclass(frozen=True)
class SolveReport:
    """Result of one solve: the distance bound, the mapping explaining it,
    its edit path, and the per-round trace."""

    estimated_ged: float
    permutation: Permutation
    edit_path: EditPath
    trace: tuple[RoundRecord, ...]
    converged_reason: str


def solve_pair(pair: GraphPair, cm: CostModel, cfg: SolverConfig | None = None) -> SolveReport:
    """Estimate the edit distance of a padded pair.

    The alignment starts at the identity with the regularizer off. Every
    round: minimize, round to a permutation, compose it onto the accumulated
    mapping, score the composition exactly, then (unless disabled) recenter
    the problem around the rounding and move the iterate next to the identity.
    The regularizer weight increases by ``lambda_step`` per round and the
    penalty coefficient by ``sigma_growth`` up to ``sigma_cap``. Stops when
    the best score has not improved for ``patience`` rounds, at the round cap,
    or on a non-finite objective.
    """
    if cfg is None:
        cfg = SolverConfig()
    n = pair.order
    sp = scale_pair(adjacency(pair.g1), adjacency(pair.g2), cm.edge_cost_squared)
    d = build_cost_matrix(pair, cm)
    p = np.eye(n, dtype=np.float64)
    # composition of the relabelings applied so far: maps the current
    # coordinate system back to the original node indices
    base = Permutation.identity(n)
    lam = 0.0
    sigma = cfg.sigma_init
    best_ged = math.inf
    best_mapping = base
    stall = 0
    trace: list[RoundRecord] = []
    reason = LAMBDA_ROUNDS_EXHAUSTED
    rounds = 0
    while True:
        rounds += 1
        params = ObjectiveParams(mu=cfg.mu, lam=lam, sigma=sigma)
        try:
            p, inner_iters = inner_minimize(sp, d, p, params, cfg)
        except DivergenceError:
            reason = DIVERGENCE_DETECTED
            if not math.isfinite(best_ged):
                best_ged = ged_under_mapping(pair, base, cm)
                best_mapping = base
            break
        rounding = round_to_permutation(p)
        candidate_mapping = base.then(rounding)
        candidate = ged_under_mapping(pair, candidate_mapping, cm)
        trace.append(
            RoundRecord(
                round_index=rounds,
                lam=lam,
                sigma=sigma,
                inner_iterations=inner_iters,
                candidate_ged=candidate,
                objective_value=objective(sp, d, p, params),
            )
        )
        logger.debug(
            "round %d: lam=%.3g sigma=%.3g inner=%d candidate=%.6g",
            rounds, lam, sigma, inner_iters, candidate,
        )
        if candidate < best_ged:
            best_ged = candidate
            best_mapping = candidate_mapping
            stall = 0
        else:
            stall += 1
        if stall >= cfg.patience:
            reason = PATIENCE_EXHAUSTED
            break
        if rounds >= cfg.lambda_max_rounds:
            reason = LAMBDA_ROUNDS_EXHAUSTED
            break
        if cfg.enable_inverse_relabel:
            sp, d = relabel_transform(sp, d, rounding)
            inv = np.array(rounding.inverse().mapping, dtype=np.int64)
            p = p[inv, :]
            base = candidate_mapping
        if cfg.enable_regularizer:
            lam += cfg.lambda_step
        sigma = min(sigma * cfg.sigma_growth, cfg.sigma_cap)
    path = extract_edit_path(pair, best_mapping, cm)
    return SolveReport(
        estimated_ged=best_ged,
        permutation=best_mapping,
        edit_path=path,
        trace=tuple(trace),
        converged_reason=reason,
    )


def estimate_ged(
    g1: LabeledGraph,
    g2: LabeledGraph,
    cm: CostModel,
    cfg: SolverConfig | None = None,
) -> SolveReport:
    """Pad two raw graphs to a common order and solve.

    The report's mapping runs over padded indices; mappings that touch a
    padding node encode deletions and insertions in the edit path.
    """
    return solve_pair(pad_pair(g1, g2), cm, cfg)
