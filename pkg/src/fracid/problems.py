"""Benchmark problems with closed-form solutions, noise shapes and sampling.

Both benchmarks live on ``Omega = (0, 1)`` with homogeneous Neumann data,
``u_0(x) = x**2 (1 - x)**2`` and ``int_0^1 u_0 dx = 1/30``.

* :func:`example1_truth`: two-term type I operator
  ``D^nu u / 2 - D^(nu/2) u / 4`` with memory kernel ``1 + t``; exact
  solution ``u = x**2 (1-x)**2 (1 + t) + t**nu``.
* :func:`example2_truth`: three-term type II operator with coefficients
  ``1/2, -1/4, (1 + t**2)/4`` at orders ``nu, nu/2, nu/3`` and kernel
  ``t**-gamma``; exact solution ``u = x**2 (1-x)**2 (1 + 30 t**nu)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fraccore import PowerSeries, gamma_fn
from .model import (
    UNKNOWN_CONSTANT,
    UNKNOWN_LEAD,
    UNKNOWN_SECOND,
    FDOType,
    ModelSpec,
    Observation,
    OperatorSpec,
    Term,
)

__all__ = [
    "NoiseKind",
    "NoiseSpec",
    "noise_g",
    "default_times",
    "example1_truth",
    "example1_field",
    "example2_truth",
    "example2_field",
    "example1_direct_config",
    "sample_observation",
]

G = gamma_fn
PSI0 = 1.0 / 30.0


class NoiseKind(enum.Enum):
    FTN = "ftn"
    STN = "stn"
    TTN = "ttn"
    NONE = "none"


@dataclass(frozen=True)
class NoiseSpec:
    """Deterministic additive noise ``delta * G(t)``.

    Shapes: FTN ``t |ln t|``, STN ``t**nu1``, TTN ``t**nu1 |ln t|``.
    ``sign`` is ``"plus"``, ``"minus"`` or ``"alternating"`` (by sample index).
    """

    kind: NoiseKind = NoiseKind.NONE
    delta: float = 0.0
    nu1_for_shape: float = 0.5
    sign: str = "plus"

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.delta < 0.0:
            raise ValueError("noise level must be non-negative")
        if self.sign not in ("plus", "minus", "alternating"):
            raise ValueError(f"unknown sign policy {self.sign!r}")
        if self.kind in (NoiseKind.STN, NoiseKind.TTN) and not 0.0 < self.nu1_for_shape < 1.0:
            raise ValueError("nu1_for_shape must lie in (0, 1)")


def noise_g(spec: NoiseSpec, t: float, index: int = 1) -> float:
    """Noise shape at ``t`` in (0, 1), with the sign policy applied."""
    t = float(t)
    if not 0.0 < t < 1.0:
        raise ValueError(f"noise shapes are defined for t in (0, 1), got {t}")
    kind = spec.kind
    if kind is NoiseKind.NONE:
        return 0.0
    if kind is NoiseKind.FTN:
        g = t * abs(math.log(t))
    elif kind is NoiseKind.STN:
        g = t**spec.nu1_for_shape
    else:
        g = t**spec.nu1_for_shape * abs(math.log(t))
    if spec.sign == "minus" or (spec.sign == "alternating" and index % 2 == 0):
        g = -g
    return g


def default_times(tau: float = 1e-4, count: int = 21) -> np.ndarray:
    """``0, tau, 2 tau, ..., count * tau``."""
    return tau * np.arange(count + 1, dtype=float)


def sample_observation(psi_true, times, noise: NoiseSpec, psi0: float | None = None) -> Observation:
    """``psi(t_k) + delta G(t_k)`` for ``k >= 1``; the first value is ``psi0`` exactly."""
    times = np.asarray(times, dtype=float)
    if times[0] != 0.0:
        raise ValueError("sampling times must start at 0")
    if psi0 is None:
        psi0 = psi_true.value_at_zero() if isinstance(psi_true, PowerSeries) else float(psi_true(0.0))
    vals = np.empty_like(times)
    vals[0] = psi0
    for k in range(1, times.size):
        pert = 0.0
        if noise.kind is not NoiseKind.NONE and noise.delta > 0.0:
            pert = noise.delta * noise_g(noise, times[k], k)
        vals[k] = float(psi_true(times[k])) + pert
    return Observation(times, vals, psi0)


def _second_term(rho: float, order_unknown_coeff: bool, sign: float = 1.0) -> Term:
    coef = UNKNOWN_CONSTANT if order_unknown_coeff else PowerSeries.constant(rho)
    return Term(UNKNOWN_SECOND, coef, sign)


def example1_gbar(nu: float) -> PowerSeries:
    """Space integral of the source of the first benchmark, in closed form."""
    h = nu / 2.0
    g1 = PowerSeries(
        [
            (G(1 + nu) / 2.0, 0.0),
            (-G(1 + nu) / (4.0 * G(1 + h)), h),
            (1.0 / (60.0 * G(2 - nu)), 1.0 - nu),
            (-1.0 / (120.0 * G(2 - h)), 1.0 - h),
        ]
    )
    # int_0^1 (1 - 6x + 7x^2 - 2x^3 + x^4) dx = 1/30
    g2 = PowerSeries([(-2.0, nu), (-2.0 / 30.0, 0.0), (-2.0 / 30.0, 1.0)])
    # int_0^1 (2 - 12x + 12x^2) dx = 0, int_0^1 x^2 (1-x)^2 / 30 dx = 1/900
    g3 = PowerSeries(
        [
            (-1.0 / (30.0 * (1 + nu)), 1.0 + nu),
            (-1.0 / (30.0 * (1 + nu) * (2 + nu)), 2.0 + nu),
            (-1.0 / 900.0, 1.0),
            (-1.0 / 900.0, 2.0),
            (-1.0 / 5400.0, 3.0),
        ]
    )
    return g1 + g2 + g3


def example1_truth(nu: float, unknown_rho: bool = True) -> tuple[PowerSeries, ModelSpec]:
    """Exact observation and model of the two-term type I benchmark.

    With ``unknown_rho`` the second coefficient (true value 1/4) is an
    unknown constant; otherwise it is supplied.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError("nu must lie in (0, 1)")
    psi = PowerSeries([(PSI0, 0.0), (PSI0, 1.0), (1.0, nu)])
    op = OperatorSpec(
        FDOType.I,
        (
            Term(UNKNOWN_LEAD, PowerSeries.constant(0.5)),
            _second_term(0.25, unknown_rho, sign=-1.0),
        ),
    )
    model = ModelSpec(
        operator=op,
        psi0=PSI0,
        gbar=example1_gbar(nu),
        a0=PowerSeries.constant(2.0),
        b0=PowerSeries.constant(1.0 / 30.0),
        kernel=PowerSeries.polynomial([1.0, 1.0]),
        boundary=PowerSeries(),
        d=0,
    )
    return psi, model


def example1_field(nu: float):
    """Pointwise data of the first benchmark: ``(u_exact, u0, g)`` callables."""
    h = nu / 2.0

    def u_exact(x, t):
        x = np.asarray(x, dtype=float)
        return x**2 * (1 - x) ** 2 * (1 + t) + t**nu

    def u0(x):
        x = np.asarray(x, dtype=float)
        return x**2 * (1 - x) ** 2

    def g(x, t):
        x = np.asarray(x, dtype=float)
        w = x**2 * (1 - x) ** 2
        g1 = (
            G(1 + nu) / 2.0
            - G(1 + nu) / (4.0 * G(1 + h)) * t**h
            + w / 2.0 * (t ** (1 - nu) / G(2 - nu) - t ** (1 - h) / (2.0 * G(2 - h)))
        )
        g2 = -2.0 * t**nu - 2.0 * (1 + t) * (1 - 6 * x + 7 * x**2 - 2 * x**3 + x**4)
        g3 = (
            -(t ** (1 + nu)) / (30.0 * (1 + nu))
            - t ** (2 + nu) / (30.0 * (1 + nu) * (2 + nu))
            - (t + t**2 + t**3 / 6.0) * (w / 30.0 + 2 - 12 * x + 12 * x**2)
        )
        return g1 + g2 + g3

    return u_exact, u0, g


def example2_gbar(nu: float) -> PowerSeries:
    """Space integral of the source of the second benchmark.

    The third source component integrates to zero in ``x``, so the result
    does not depend on the kernel exponent.
    """
    c = 1.0 / 30.0  # int_0^1 x^2 (1-x)^2 dx
    g1 = PowerSeries(
        [
            (c * 15.0 * G(1 + nu), 0.0),
            (-c * 7.5 * G(1 + nu) / G(1 + nu / 2), nu / 2),
            (c / (2.0 * G(3 - nu / 3)), 2.0 - nu / 3),
            (c * 7.5 * G(1 + nu) / G(1 + 2 * nu / 3), 2 * nu / 3),
            (c * 7.5 * G(3 + nu) / G(3 + 2 * nu / 3), 2.0 + 2 * nu / 3),
        ]
    )
    g2 = PowerSeries([(-2.0 * c, 0.0), (-2.0, nu)])
    return g1 + g2


def example2_truth(
    nu: float, gamma: float = 0.5, unknown_rho: bool = False
) -> tuple[PowerSeries, ModelSpec]:
    """Exact observation and model of the three-term type II benchmark.

    The targeted term is the third one (order ``nu/3``).  With
    ``unknown_rho`` its coefficient is declared an unknown constant, which
    is only consistent with the data if the caller changes the truth; the
    default supplies the true ``(1 + t**2)/4``.
    """
    if not 0.0 < nu < 1.0:
        raise ValueError("nu must lie in (0, 1)")
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    psi = PowerSeries([(PSI0, 0.0), (1.0, nu)])
    third = (
        UNKNOWN_CONSTANT if unknown_rho else PowerSeries.polynomial([0.25, 0.0, 0.25])
    )
    op = OperatorSpec(
        FDOType.II,
        (
            Term(UNKNOWN_LEAD, PowerSeries.constant(0.5)),
            Term(nu / 2.0, PowerSeries.constant(-0.25)),
            Term(UNKNOWN_SECOND, third),
        ),
    )
    model = ModelSpec(
        operator=op,
        psi0=PSI0,
        gbar=example2_gbar(nu),
        a0=PowerSeries.constant(2.0),
        b0=PowerSeries(),
        kernel=PowerSeries.monomial(1.0, -gamma),
        boundary=PowerSeries(),
        d=0,
    )
    return psi, model


def example2_field(nu: float, gamma: float = 0.5):
    """Pointwise data of the second benchmark: ``(u_exact, u0, g)`` callables."""

    def u_exact(x, t):
        x = np.asarray(x, dtype=float)
        return x**2 * (1 - x) ** 2 * (1 + 30 * t**nu)

    def u0(x):
        x = np.asarray(x, dtype=float)
        return x**2 * (1 - x) ** 2

    def g(x, t):
        x = np.asarray(x, dtype=float)
        w = x**2 * (1 - x) ** 2
        g1 = w * (
            15 * G(1 + nu)
            - 7.5 * G(1 + nu) / G(1 + nu / 2) * t ** (nu / 2)
            + t ** (2 - nu / 3) / (2 * G(3 - nu / 3))
            + 7.5 * G(1 + nu) / G(1 + 2 * nu / 3) * t ** (2 * nu / 3)
            + 7.5 * G(3 + nu) / G(3 + 2 * nu / 3) * t ** (2 + 2 * nu / 3)
        )
        g2 = -2 * (1 + 30 * t**nu) * (1 - 6 * x + 7 * x**2 - 2 * x**3 + x**4)
        g3 = -2 * (1 - 6 * x + 6 * x**2) * (
            t ** (1 - gamma) / (1 - gamma)
            + 30 * t ** (1 - gamma + nu) * G(1 - gamma) * G(1 + nu) / G(2 + nu - gamma)
        )
        return g1 + g2 + g3

    return u_exact, u0, g


def example1_direct_config(nu: float, nx: int = 64, nt: int = 512, horizon: float = 0.002):
    """:class:`~fracid.directsim.DirectConfig` of the first benchmark with all data known."""
    from .directsim import DirectConfig

    _, u0, g = example1_field(nu)
    terms = (
        Term(nu, PowerSeries.constant(0.5)),
        Term(nu / 2.0, PowerSeries.constant(0.25), sign=-1.0),
    )
    return DirectConfig(
        terms, u0, g, (0.0, 1.0), nx, horizon, nt,
        a0=2.0, b0=1.0 / 30.0, kernel=PowerSeries.polynomial([1.0, 1.0]),
    )
