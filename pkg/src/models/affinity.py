"""Multi-view affinity learning with low-rank and sparse self-representation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import linalg

from ..config import AdmmConfig
from ..errors import DivergenceError
from .entities import AffinityMatrix, FeatureView

logger = logging.getLogger(__name__)


def soft_threshold(M: np.ndarray, tau: float) -> np.ndarray:
    """Shrink every entry toward zero by ``tau``."""

    if tau < 0:
        raise ValueError("tau must be nonnegative")
    M = np.asarray(M, dtype=np.float64)
    return np.maximum(M - tau, 0.0) + np.minimum(M + tau, 0.0)


def svt(M: np.ndarray, tau: float) -> np.ndarray:
    """Singular value thresholding: U max(S - tau, 0) V^T."""

    if tau < 0:
        raise ValueError("tau must be nonnegative")
    M = np.asarray(M, dtype=np.float64)
    if not np.isfinite(M).all():
        raise np.linalg.LinAlgError("svt input contains non-finite values")
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return (U * np.maximum(s - tau, 0.0)) @ Vt


@dataclass
class AdmmState:
    """Per-view auxiliary and multiplier matrices of one multi-view run."""

    A: list[np.ndarray]
    C1: list[np.ndarray]
    C2: list[np.ndarray]
    C3: list[np.ndarray]
    lam1: list[np.ndarray]
    lam2: list[np.ndarray]
    lam3: list[np.ndarray]
    lam4: list[np.ndarray]
    mu: float
    iter: int = 0
    history: list[tuple[float, float, float, float]] = field(default_factory=list)

    @classmethod
    def zeros(cls, views: Sequence[FeatureView], mu0: float) -> "AdmmState":
        """All auxiliary and multiplier matrices start at zero."""

        n = _entity_count(views)
        square = [np.zeros((n, n)) for _ in views]
        return cls(
            A=[m.copy() for m in square],
            C1=[m.copy() for m in square],
            C2=[m.copy() for m in square],
            C3=[m.copy() for m in square],
            lam1=[np.zeros((view.dim, n)) for view in views],
            lam2=[m.copy() for m in square],
            lam3=[m.copy() for m in square],
            lam4=[m.copy() for m in square],
            mu=mu0,
        )

    def copy(self) -> "AdmmState":
        def clone(stack: list[np.ndarray]) -> list[np.ndarray]:
            return [m.copy() for m in stack]

        return AdmmState(
            A=clone(self.A),
            C1=clone(self.C1),
            C2=clone(self.C2),
            C3=clone(self.C3),
            lam1=clone(self.lam1),
            lam2=clone(self.lam2),
            lam3=clone(self.lam3),
            lam4=clone(self.lam4),
            mu=self.mu,
            iter=self.iter,
            history=list(self.history),
        )


def _entity_count(views: Sequence[FeatureView]) -> int:
    if not views:
        raise ValueError("at least one feature view is required")
    counts = {view.n for view in views}
    if len(counts) != 1:
        raise ValueError(f"feature views disagree on entity count: {sorted(counts)}")
    return counts.pop()


def factorize_views(views: Sequence[FeatureView]) -> list[tuple[np.ndarray, bool]]:
    """Cholesky factors of (Y^T Y + 3I) per view, reused across sweeps."""

    factors = []
    for view in views:
        gram = view.values.T @ view.values
        _check_finite(gram)
        factors.append(linalg.cho_factor(gram + 3.0 * np.eye(view.n)))
    return factors


def _check_finite(*matrices: np.ndarray) -> None:
    for matrix in matrices:
        if not np.isfinite(matrix).all():
            raise DivergenceError()


def _check_bounded(A: np.ndarray, bound: float, view: int, sweep: int) -> None:
    peak = float(np.max(np.abs(A)))
    if peak > bound:
        raise DivergenceError(f"divergence: |A| reached {peak:.3g} (view {view}, sweep {sweep})")


def admm_iterate(
    state: AdmmState,
    views: Sequence[FeatureView],
    config: AdmmConfig,
    factors: Sequence[tuple[np.ndarray, bool]] | None = None,
) -> tuple[AdmmState, bool, tuple[float, float, float, float]]:
    """Run one sweep over all views and return the new state, convergence flag and errors.

    Views update in order and in place, so view i sees the C2 of views < i from this
    sweep. C3 is pulled toward the mean C2 of the other views. err1..err3 measure
    |A - C1|, |A - C2| and |A - C3|; err4 is the change of A since the previous sweep.
    Each is the max over views. Raises DivergenceError once any |A| entry passes
    ``config.divergence_bound``.
    """

    n = _entity_count(views)
    if len(state.A) != len(views):
        raise ValueError("state and views disagree on view count")
    if factors is None:
        factors = factorize_views(views)
    new = state.copy()
    v = len(views)
    mu = new.mu
    previous_A = [a.copy() for a in state.A]

    for i, view in enumerate(views):
        Y = view.values
        if new.A[i].shape != (n, n):
            raise ValueError(f"state matrices for view {i} do not match {n} entities")
        others = [new.C2[j] for j in range(v) if j != i]
        c_mean = np.mean(others, axis=0) if others else np.zeros((n, n))
        gram = Y.T @ Y
        rhs = gram + new.C1[i] + new.C2[i] + new.C3[i]
        rhs += (Y.T @ new.lam1[i] - new.lam2[i] - new.lam3[i] - new.lam4[i]) / mu
        A = linalg.cho_solve(factors[i], rhs)
        _check_finite(A)
        _check_bounded(A, config.divergence_bound, i, new.iter)

        C1 = svt(A + new.lam3[i] / mu, config.beta1 / mu)
        C2 = soft_threshold(A + new.lam2[i] / mu, config.beta2 / mu)
        weight = 2.0 * config.lam * (v - 1)
        C3 = (weight * c_mean + mu * A + new.lam4[i]) / (weight + mu)

        new.lam1[i] = new.lam1[i] + mu * (Y - Y @ A)
        new.lam2[i] = new.lam2[i] + mu * (A - C2)
        new.lam3[i] = new.lam3[i] + mu * (A - C1)
        new.lam4[i] = new.lam4[i] + mu * (A - C3)
        _check_finite(A, C1, C2, C3, new.lam1[i])
        new.A[i], new.C1[i], new.C2[i], new.C3[i] = A, C1, C2, C3

    errors = (
        max(float(np.max(np.abs(new.A[i] - new.C1[i]))) for i in range(v)),
        max(float(np.max(np.abs(new.A[i] - new.C2[i]))) for i in range(v)),
        max(float(np.max(np.abs(new.A[i] - new.C3[i]))) for i in range(v)),
        max(float(np.max(np.abs(new.A[i] - previous_A[i]))) for i in range(v)),
    )
    new.mu = min(config.rho * mu, config.mu_max)
    new.iter += 1
    new.history.append(errors)
    converged = all(err < config.epsilon for err in errors)
    return new, converged, errors


def finalize_affinity(C2: Sequence[np.ndarray], kind: str) -> tuple[np.ndarray, bool]:
    """|C_avg| + |C_avg^T| scaled to [0, 1] by one global min and max.

    Returns the matrix and whether it was degenerate (all entries equal).
    """

    c_avg = np.mean(np.stack(C2), axis=0)
    raw = np.abs(c_avg) + np.abs(c_avg.T)
    low, high = float(raw.min()), float(raw.max())
    if high - low <= 0.0:
        logger.warning("%s affinity is constant (%.6g); returning zeros", kind, low)
        return np.zeros_like(raw), True
    return (raw - low) / (high - low), False


def run_multiview(
    views: Sequence[FeatureView],
    config: AdmmConfig | None = None,
    kind: str | None = None,
) -> AffinityMatrix:
    """Learn one affinity matrix from every view of an entity kind."""

    config = config or AdmmConfig()
    _entity_count(views)
    kind = kind or views[0].entity_kind
    factors = factorize_views(views)
    state = AdmmState.zeros(views, config.mu0)
    converged = False
    errors = (0.0, 0.0, 0.0, 0.0)
    while state.iter < config.max_iter:
        state, converged, errors = admm_iterate(state, views, config, factors)
        logger.debug("%s sweep %d errors %s mu %.3g", kind, state.iter, errors, state.mu)
        if converged:
            break

    values, degenerate = finalize_affinity(state.C2, kind)
    logger.info(
        "%s affinity: %d views, %d sweeps, converged=%s, max error %.3g",
        kind,
        len(views),
        state.iter,
        converged,
        max(errors),
    )
    return AffinityMatrix(
        values=values,
        kind=kind,
        iterations=state.iter,
        converged=converged,
        errors=errors,
        degenerate=degenerate,
    )
