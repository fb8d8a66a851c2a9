"""Tikhonov fitting and two-parameter quasi-optimality selection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

from .basis import DesignBasis, design_matrix
from .fraccore import PowerSeries

__all__ = [
    "RegularizationGrid",
    "FitResult",
    "SelectionError",
    "Selection",
    "tikhonov_solve",
    "fit_observation",
    "quasiopt_select",
]

RANK_RTOL = 1e-12


class SelectionError(RuntimeError):
    """Too few finite estimator values to apply the quasi-optimality rule."""


@dataclass(frozen=True)
class RegularizationGrid:
    """Two geometric sequences ``sigma_i = sigma_start * sigma_ratio**(i-1)``
    and ``tbar_j = tbar_start * tbar_ratio**(j-1)``."""

    sigma_start: float
    sigma_ratio: float
    sigma_count: int
    tbar_start: float
    tbar_ratio: float
    tbar_count: int

    def __post_init__(self):
        if self.sigma_start <= 0.0 or self.tbar_start <= 0.0:
            raise ValueError("grid starting values must be positive")
        for r in (self.sigma_ratio, self.tbar_ratio):
            if not 0.0 < r < 1.0:
                raise ValueError(f"grid ratios must lie in (0, 1), got {r}")
        if self.sigma_count < 2 or self.tbar_count < 2:
            raise ValueError("each grid needs at least two entries")

    @property
    def sigmas(self) -> np.ndarray:
        return self.sigma_start * self.sigma_ratio ** np.arange(self.sigma_count)

    @property
    def tbars(self) -> np.ndarray:
        return self.tbar_start * self.tbar_ratio ** np.arange(self.tbar_count)


@dataclass(frozen=True)
class FitResult:
    coefficients: np.ndarray
    residual_norm: float
    rank: int
    series: PowerSeries
    sigma: float = math.nan

    def __call__(self, t):
        return self.series(t)


def tikhonov_solve(E, H, y, sigma: float) -> tuple[np.ndarray, float, int]:
    """Minimise ``|E q - y|**2 + sigma q^T H q``.

    The problem is solved as the stacked least-squares system
    ``[E; sqrt(sigma) R] q = [y; 0]`` with ``R^T R = H``, by a singular value
    decomposition.  Working with the stacked matrix instead of the normal
    matrix ``E^T E + sigma H`` avoids squaring the condition number.
    Singular values below ``RANK_RTOL`` times the largest are discarded,
    which returns the minimum-norm minimiser when the system is rank
    deficient.

    Returns
    -------
    q, residual_norm, rank
    """
    E = np.asarray(E, dtype=float)
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(H)) and np.all(np.isfinite(y))):
        raise FloatingPointError("non-finite input to tikhonov_solve")
    if not (sigma > 0.0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be positive and finite, got {sigma!r}")
    w, V = linalg.eigh(0.5 * (H + H.T))
    R = np.sqrt(np.clip(w, 0.0, None))[:, None] * V.T
    A = np.vstack([E, math.sqrt(sigma) * R])
    b = np.concatenate([y, np.zeros(R.shape[0])])
    U, s, Vt = linalg.svd(A, full_matrices=False)
    keep = s > RANK_RTOL * s[0] if s.size and s[0] > 0.0 else np.zeros(s.shape, bool)
    q = Vt[keep].T @ ((U[:, keep].T @ b) / s[keep])
    return q, float(np.linalg.norm(E @ q - y)), int(keep.sum())


def fit_observation(basis: DesignBasis, times, values, sigma: float) -> FitResult:
    """Regularised fit of ``values`` sampled at ``times`` in the given basis."""
    E = design_matrix(basis, times)
    q, res, rank = tikhonov_solve(E, basis.gram, values, sigma)
    return FitResult(q, res, rank, basis.combine(q), float(sigma))


@dataclass(frozen=True)
class Selection:
    sigma_index: int
    tbar_index: int
    sigma: float
    tbar: float
    value: float
    trace: np.ndarray
    """Estimator values, shape ``(sigma_count, tbar_count)``; NaN where excluded."""


def _argmin_first(values: np.ndarray) -> int:
    # np.argmin returns the first minimiser; NaNs are masked out beforehand
    return int(np.argmin(values))


def quasiopt_select(
    grid: RegularizationGrid,
    estimator: Callable[[float, float], float] | None = None,
    *,
    values: np.ndarray | None = None,
) -> Selection:
    """Two-stage quasi-optimality choice of ``(sigma, tbar)``.

    For every ``tbar_j`` pick ``i_j`` minimising the jump
    ``|v(sigma_i, tbar_j) - v(sigma_{i-1}, tbar_j)|`` over ``i >= 2``; then pick
    ``j0`` minimising ``|v(sigma_{i_j}, tbar_j) - v(sigma_{i_{j-1}}, tbar_{j-1})|``
    over ``j >= 2``.  Ties go to the smallest index.  Non-finite values are
    excluded: a jump involving one is ignored, and a ``tbar`` column without
    any finite jump is skipped.

    Either an ``estimator(sigma, tbar)`` callable or a precomputed ``values``
    table (``sigma_count x tbar_count``) must be given.
    """
    sig, tb = grid.sigmas, grid.tbars
    if values is None:
        if estimator is None:
            raise TypeError("need an estimator or a table of values")
        values = np.array([[estimator(s, t) for t in tb] for s in sig], dtype=float)
    else:
        values = np.asarray(values, dtype=float)
        if values.shape != (sig.size, tb.size):
            raise ValueError(
                f"values has shape {values.shape}, expected {(sig.size, tb.size)}"
            )
    values = np.where(np.isfinite(values), values, np.nan)

    # stage 1: per-column sigma choice
    chosen_i: dict[int, int] = {}
    for j in range(tb.size):
        col = values[:, j]
        jumps = np.abs(np.diff(col))  # jumps[i-1] = |v_i - v_{i-1}|
        ok = np.isfinite(jumps)
        if not ok.any():
            continue
        jumps = np.where(ok, jumps, np.inf)
        chosen_i[j] = _argmin_first(jumps) + 1

    if len(chosen_i) < 2:
        raise SelectionError(
            f"quasi-optimality needs two usable tbar columns, found {len(chosen_i)}"
        )

    # stage 2: jumps between consecutive usable columns
    cols = sorted(chosen_i)
    best_j, best_jump = None, math.inf
    for prev, j in zip(cols, cols[1:]):
        jump = abs(values[chosen_i[j], j] - values[chosen_i[prev], prev])
        if jump < best_jump:
            best_j, best_jump = j, jump
    if best_j is None:
        raise SelectionError("no finite jump between consecutive tbar columns")
    i0 = chosen_i[best_j]
    return Selection(
        sigma_index=i0,
        tbar_index=best_j,
        sigma=float(sig[i0]),
        tbar=float(tb[best_j]),
        value=float(values[i0, best_j]),
        trace=values,
    )
