"""Recovery of the two fractional orders and an optional constant coefficient.

The three-step procedure:

1. Fit the observation with a Tikhonov-regularised series for each ``sigma``
   in a geometric grid and take ``ln|psi_fit(tbar) - psi0| / ln(tbar)``;
   ``(sigma, tbar)`` are chosen by the quasi-optimality rule.
2. With the leading order fixed, evaluate
   ``nu1 - log_lam |F(lam tbar) / F(tbar)|`` where ``F`` is built from the fit
   and the known model data.  Strategy 1 reuses the step-1 fit and
   parameters; strategy 2 refits with power exponents centred on the
   leading order and runs a second quasi-optimality search.
3. If the targeted coefficient is an unknown constant, divide ``F`` at
   ``t0`` by ``(omega_{nu1-nu2} * D^nu1 psi_fit)(t0)``.

Fractional derivatives and convolutions of the fitted series are exact.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .basis import DesignBasis
from .fraccore import (
    PowerSeries,
    caputo_product,
    caputo_series,
    kernel_convolve,
    rl_convolve,
    series_product,
)
from .model import FDOType, ModelSpec, Observation, Unknown
from .regularize import (
    FitResult,
    RegularizationGrid,
    Selection,
    SelectionError,
    fit_observation,
    quasiopt_select,
)

__all__ = [
    "ReconConfig",
    "Estimate",
    "DegenerateObservationError",
    "nu1_at",
    "cfun_delta",
    "ffun_delta",
    "nu2_at",
    "rho_at",
    "identify_pipeline",
    "refined_exponents",
]

log = logging.getLogger(__name__)

ORDER_MARGIN = 1e-3
PSI0_RTOL = 1e-8
ROUNDOFF = 64 * np.finfo(float).eps


class DegenerateObservationError(ArithmeticError):
    """The data make a recovery formula divide by zero."""


def _series(fit) -> PowerSeries:
    return fit.series if isinstance(fit, FitResult) else fit


def _eval(fn, t: float) -> float:
    return float(fn(t))


# ---------------------------------------------------------------- step 1


def nu1_at(fit, model: ModelSpec, tbar: float) -> float:
    """Leading-order estimate ``ln|psi(tbar) - psi0| / ln(tbar)``.

    For a type II operator the difference is
    ``rho_1(tbar) psi(tbar) / rho_1(0) - psi0``; dividing by ``rho_1(0) > 0``
    removes a constant that only vanishes from the ratio as ``tbar -> 0``.
    Returns ``nan`` when the difference is zero up to rounding.
    """
    if not 0.0 < tbar < 1.0:
        raise ValueError(f"tbar must lie in (0, 1), got {tbar}")
    psi = _series(fit)
    val = psi(tbar)
    if model.operator.fdo_type is FDOType.II:
        rho1 = model.operator.lead.signed_coefficient()
        diff = rho1(tbar) * val / rho1.value_at_zero() - model.psi0
    else:
        diff = val - model.psi0
    # a difference at rounding level carries no information about the order
    if not math.isfinite(diff) or abs(diff) <= ROUNDOFF * max(abs(val), abs(model.psi0)):
        return math.nan
    return math.log(abs(diff)) / math.log(tbar)


# ---------------------------------------------------------------- C and F


def _kernel_conv(model: ModelSpec, s: PowerSeries) -> Callable[[float], float] | PowerSeries:
    k = model.kernel
    if k is None or s.is_empty():
        return PowerSeries()
    if isinstance(k, PowerSeries):
        return kernel_convolve(k, s)

    def conv(t: float) -> float:
        if t == 0.0:
            return 0.0
        val, _ = integrate.quad(lambda tau: k(t - tau) * s(tau), 0.0, t, epsrel=1e-10, limit=200)
        return val

    return conv


class _TimeFunction:
    """Exact series part plus callables evaluated pointwise."""

    def __init__(self, series: PowerSeries, extras: tuple = (), scale=None):
        self.series = series
        self.extras = extras
        self.scale = scale  # optional pointwise divisor

    def __call__(self, t: float) -> float:
        val = float(self.series(t))
        for sign, fn in self.extras:
            val += sign * float(fn(t))
        if self.scale is not None:
            den = float(self.scale(t))
            if den == 0.0:
                raise ZeroDivisionError("targeted coefficient vanishes")
            val /= den
        return val


def _cfun(psi: PowerSeries, model: ModelSpec) -> _TimeFunction:
    series = model.a0 * psi - model.boundary
    extras = []
    for sign, part in (
        (1.0, _kernel_conv(model, series_product(model.b0, psi))),
        (-float(model.d), _kernel_conv(model, model.boundary) if model.d else PowerSeries()),
    ):
        if isinstance(part, PowerSeries):
            series = series + part * sign
        else:
            extras.append((sign, part))
    if isinstance(model.gbar, PowerSeries):
        series = series + model.gbar
    else:
        extras.append((1.0, model.gbar))
    return _TimeFunction(series, tuple(extras))


def cfun_delta(fit, model: ModelSpec, t: float) -> float:
    """``gbar - d (K * I) + a0 psi + K * (b0 psi) - I`` at ``t``."""
    return _cfun(_series(fit), model)(t)


def _term_action(psi: PowerSeries, fdo: FDOType, coef: PowerSeries, order: float) -> PowerSeries:
    if fdo is FDOType.I:
        return series_product(coef, caputo_series(psi, order))
    return caputo_product(coef, psi, order)


def _ffun(psi: PowerSeries, model: ModelSpec, nu1: float) -> _TimeFunction:
    op = model.operator
    c = _cfun(psi, model)
    series = c.series
    for k, term in enumerate(op.terms):
        if k == op.target:
            continue
        order = nu1 if term.order is Unknown.LEAD else term.order
        series = series - _term_action(psi, op.fdo_type, term.signed_coefficient(), order)
    scale = None
    if not op.rho_unknown and op.fdo_type is FDOType.I:
        scale = op.terms[op.target].signed_coefficient()
    return _TimeFunction(series, c.extras, scale)


def ffun_delta(fit, model: ModelSpec, nu1: float, t: float) -> float:
    """Auxiliary function whose small-time power reveals the targeted order.

    ``C - sum_{j != i*} rho_j D^nu_j psi`` (type I) or
    ``C - sum_{j != i*} D^nu_j (rho_j psi)`` (type II); for a type I operator
    with a known targeted coefficient the result is divided by it.
    """
    f = _ffun(_series(fit), model, nu1)
    try:
        return f(t)
    except ZeroDivisionError as exc:
        raise ValueError(f"targeted coefficient vanishes at t={t}") from exc


# ---------------------------------------------------------------- step 2/3


def _nu2_from(f: Callable[[float], float], nu1: float, tbar: float, lam: float) -> float:
    den = f(tbar)
    num = f(lam * tbar)
    if den == 0.0 or num == 0.0 or not (math.isfinite(den) and math.isfinite(num)):
        return math.nan
    return nu1 - math.log(abs(num / den)) / math.log(lam)


def nu2_at(fit, model: ModelSpec, nu1: float, tbar: float, lam: float = 0.5) -> float:
    """``nu1 - log_lam |F(lam tbar) / F(tbar)|``; ``nan`` on a zero value."""
    if not 0.0 < lam < 1.0:
        raise ValueError("lam must lie in (0, 1)")
    f = _ffun(_series(fit), model, nu1)
    try:
        return _nu2_from(f, nu1, tbar, lam)
    except ZeroDivisionError:
        return math.nan


def rho_at(fit, model: ModelSpec, nu1: float, nu2: float, t0: float) -> float:
    """Constant coefficient of the targeted term from the data at ``t0``.

    The value is reported in the operator's sign convention, i.e. for
    ``rho_1 D^nu1 - rho_2 D^nu2`` this returns ``rho_2``.
    """
    if not nu2 < nu1:
        raise ValueError(f"need nu2 < nu1, got nu2={nu2}, nu1={nu1}")
    op = model.operator
    if not op.rho_unknown:
        raise ValueError("the targeted coefficient is not declared unknown")
    psi = _series(fit)
    num = _ffun(psi, model, nu1)(t0)
    den = float(rl_convolve(nu1 - nu2, caputo_series(psi, nu1))(t0))
    if den == 0.0 or not math.isfinite(den):
        raise DegenerateObservationError(f"vanishing denominator at t0={t0}")
    return num / den / op.terms[op.target].sign


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class ReconConfig:
    """Settings of the identification pipeline.

    ``None`` grids and ``t0`` are derived from the observation: grids start at
    the second-to-last observation time, as does ``t0``.

    ``extrapolation_limit`` drops evaluation points ``tbar`` below
    ``extrapolation_limit * t_1`` from both grids (``t_1`` the first positive
    observation time).  Far below the data the fitted series follows its own
    smallest exponent, and the estimates settle on that exponent, which
    attracts the quasi-optimality rule.  ``None`` keeps the grids as given.
    """

    n_powers: int = 3
    size: int = 9
    betas: tuple[float, ...] | None = None
    weight_exponent: float = 0.99
    step1_grid: RegularizationGrid | None = None
    step2_grid: RegularizationGrid | None = None
    lam: float = 0.5
    t0: float | None = None
    strategy: str = "both"
    refine_halfwidth: float = 0.05
    extrapolation_limit: float | None = 0.5

    def __post_init__(self):
        if self.strategy not in ("first", "second", "both"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.size <= self.n_powers:
            raise ValueError("basis size must exceed the number of power elements")
        if self.betas is not None:
            object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
            if len(self.betas) != self.n_powers:
                raise ValueError("len(betas) must equal n_powers")
        if not 0.0 < self.lam < 1.0:
            raise ValueError("lam must lie in (0, 1)")
        if self.extrapolation_limit is not None and not self.extrapolation_limit > 0.0:
            raise ValueError("extrapolation_limit must be positive or None")

    def resolved(self, obs: Observation) -> ReconConfig:
        """Copy with every observation-dependent default filled in."""
        anchor = float(obs.times[-2])
        betas = self.betas or tuple(i / self.n_powers for i in range(1, self.n_powers + 1))
        g1 = self.step1_grid or RegularizationGrid(0.5, 0.5, 60, anchor, 0.5, 100)
        g2 = self.step2_grid or RegularizationGrid(1.0, 0.5, 60, anchor, 0.5, 10)
        if self.extrapolation_limit is not None:
            floor = self.extrapolation_limit * float(obs.times[1])
            g1, g2 = _truncate(g1, floor), _truncate(g2, floor)
        return ReconConfig(
            n_powers=self.n_powers,
            size=self.size,
            betas=betas,
            weight_exponent=self.weight_exponent,
            step1_grid=g1,
            step2_grid=g2,
            lam=self.lam,
            t0=anchor if self.t0 is None else self.t0,
            strategy=self.strategy,
            refine_halfwidth=self.refine_halfwidth,
            extrapolation_limit=self.extrapolation_limit,
        )


def _truncate(grid: RegularizationGrid, floor: float) -> RegularizationGrid:
    keep = int(np.count_nonzero(grid.tbars >= floor * (1.0 - 1e-12)))
    return dataclasses.replace(grid, tbar_count=max(keep, 2))


@dataclass
class Estimate:
    nu1: float
    nu_second: float
    rho: float | None
    sigma_bar: float
    tbar: float
    sigma_hat: float | None = None
    that: float | None = None
    nu_second_bar: float | None = None
    nu_second_hat: float | None = None
    status: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict, repr=False)

    @property
    def valid(self) -> bool:
        return all(v == "ok" for v in self.status.values())


def refined_exponents(nu1: float, n_powers: int, halfwidth: float) -> tuple[float, ...]:
    """Power exponents centred on ``nu1`` and clipped to ``[0.01, 0.99]``."""
    if n_powers == 1:
        offsets = [0.0]
    else:
        offsets = np.linspace(-halfwidth, halfwidth, n_powers)
    betas = sorted({round(min(max(nu1 + o, 0.01), 0.99), 15) for o in offsets})
    return tuple(betas)


def _clip_order(nu2: float, nu1: float) -> tuple[float, str]:
    if not math.isfinite(nu2):
        return nu2, "non-finite"
    if nu2 <= 0.0:
        return ORDER_MARGIN, "clipped"
    if nu2 >= nu1:
        return nu1 - ORDER_MARGIN, "clipped"
    return nu2, "ok"


def _fits(basis: DesignBasis, obs: Observation, sigmas) -> list[FitResult]:
    return [fit_observation(basis, obs.times, obs.values, s) for s in sigmas]


def identify_pipeline(obs: Observation, model: ModelSpec, config: ReconConfig | None = None) -> Estimate:
    """Run steps 1-3 on one observation."""
    cfg = (config or ReconConfig()).resolved(obs)
    if obs.times.size < cfg.size:
        raise ValueError(f"need at least {cfg.size} observations, got {obs.times.size}")
    # loose enough for data written with 10 significant digits
    if not math.isclose(obs.psi0, model.psi0, rel_tol=PSI0_RTOL, abs_tol=1e-15):
        raise ValueError("observation psi0 disagrees with the model")
    status: dict[str, str] = {}
    diag: dict = {"config": cfg}

    # step 1
    basis = DesignBasis(cfg.betas, cfg.size - cfg.n_powers, cfg.weight_exponent, obs.horizon)
    g1 = cfg.step1_grid
    fits = _fits(basis, obs, g1.sigmas)
    table = np.array([[nu1_at(f, model, t) for t in g1.tbars] for f in fits])
    sel1 = quasiopt_select(g1, values=table)
    nu1 = sel1.value
    fit1 = fits[sel1.sigma_index]
    status["step1"] = "ok" if 0.0 < nu1 < 1.0 else "out-of-range"
    diag["step1"] = sel1
    diag["fit_step1"] = fit1
    log.info("step 1: nu1=%.6g sigma=%.3g tbar=%.3g", nu1, sel1.sigma, sel1.tbar)

    est = Estimate(nu1=nu1, nu_second=math.nan, rho=None, sigma_bar=sel1.sigma, tbar=sel1.tbar)
    if status["step1"] != "ok":
        # later stages need a leading order in (0, 1)
        est.status, est.diagnostics = status, diag
        return est

    if cfg.strategy in ("first", "both"):
        raw = nu2_at(fit1, model, nu1, sel1.tbar, cfg.lam)
        est.nu_second_bar, status["strategy1"] = _clip_order(raw, nu1)
        diag["nu2_bar_raw"] = raw
        diag["strategy1_points"] = (cfg.lam * sel1.tbar, sel1.tbar)

    fit_for_rho = fit1
    if cfg.strategy in ("second", "both"):
        betas_hat = refined_exponents(nu1, cfg.n_powers, cfg.refine_halfwidth)
        basis2 = DesignBasis(betas_hat, cfg.size - len(betas_hat), cfg.weight_exponent, obs.horizon)
        g2 = cfg.step2_grid
        fits2 = _fits(basis2, obs, g2.sigmas)
        table2 = np.empty((g2.sigma_count, g2.tbar_count))
        for i, f in enumerate(fits2):
            ff = _ffun(f.series, model, nu1)
            for j, t in enumerate(g2.tbars):
                try:
                    table2[i, j] = _nu2_from(ff, nu1, t, cfg.lam)
                except ZeroDivisionError:
                    table2[i, j] = math.nan
        try:
            sel2 = quasiopt_select(g2, values=table2)
        except SelectionError as exc:
            status["strategy2"] = f"failed: {exc}"
        else:
            est.sigma_hat, est.that = sel2.sigma, sel2.tbar
            diag["nu2_hat_raw"] = sel2.value
            est.nu_second_hat, status["strategy2"] = _clip_order(sel2.value, nu1)
            fit_for_rho = fits2[sel2.sigma_index]
            diag["step2"] = sel2
            diag["betas_hat"] = betas_hat
            diag["fit_step2"] = fit_for_rho

    if est.nu_second_hat is not None:
        est.nu_second = est.nu_second_hat
    elif est.nu_second_bar is not None:
        est.nu_second = est.nu_second_bar

    if model.operator.rho_unknown and math.isfinite(est.nu_second):
        try:
            est.rho = rho_at(fit_for_rho, model, nu1, est.nu_second, cfg.t0)
            status["step3"] = "ok"
        except (ArithmeticError, ValueError) as exc:
            status["step3"] = f"failed: {exc}"
    est.status = status
    est.diagnostics = diag
    return est
