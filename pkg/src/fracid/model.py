"""Model description: fractional operator terms, known data, observations."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.interpolate import PchipInterpolator

from .fraccore import PowerSeries

__all__ = [
    "Unknown",
    "UNKNOWN_LEAD",
    "UNKNOWN_SECOND",
    "UNKNOWN_CONSTANT",
    "FDOType",
    "Term",
    "OperatorSpec",
    "Tabulated",
    "ModelSpec",
    "Observation",
]


class Unknown(enum.Enum):
    LEAD = "lead"
    SECOND = "second"
    CONSTANT = "constant"


UNKNOWN_LEAD = Unknown.LEAD
UNKNOWN_SECOND = Unknown.SECOND
UNKNOWN_CONSTANT = Unknown.CONSTANT


class FDOType(enum.Enum):
    """``I``: sum of ``rho_i D^nu_i u``; ``II``: sum of ``D^nu_i (rho_i u)``."""

    I = "I"  # noqa: E741
    II = "II"


@dataclass(frozen=True)
class Term:
    """One term ``sign * rho(t) * D^order`` of the fractional operator.

    ``sign`` lets the two-term operator be written as
    ``rho_1 D^nu_1 - rho_2 D^nu_2`` with a positive ``rho_2``; the recovered
    coefficient is reported in that same convention.
    """

    order: Union[float, Unknown]
    coefficient: Union[PowerSeries, Unknown]
    sign: float = 1.0

    def __post_init__(self):
        if isinstance(self.order, Unknown):
            if self.order is Unknown.CONSTANT:
                raise ValueError("an order cannot be UNKNOWN_CONSTANT")
        else:
            object.__setattr__(self, "order", float(self.order))
            if not 0.0 < self.order < 1.0:
                raise ValueError(f"orders must lie in (0, 1), got {self.order}")
        if isinstance(self.coefficient, Unknown):
            if self.coefficient is not Unknown.CONSTANT:
                raise ValueError("a coefficient can only be UNKNOWN_CONSTANT")
        elif isinstance(self.coefficient, (int, float)):
            object.__setattr__(self, "coefficient", PowerSeries.constant(self.coefficient))
        if self.sign not in (1.0, -1.0):
            raise ValueError("sign must be +1 or -1")

    def signed_coefficient(self) -> PowerSeries:
        if isinstance(self.coefficient, Unknown):
            raise ValueError("coefficient is unknown")
        return self.coefficient * self.sign


@dataclass(frozen=True)
class OperatorSpec:
    fdo_type: FDOType
    terms: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "fdo_type", FDOType(self.fdo_type))
        object.__setattr__(self, "terms", tuple(self.terms))
        orders = [t.order for t in self.terms]
        if orders.count(Unknown.LEAD) != 1 or orders.count(Unknown.SECOND) != 1:
            raise ValueError("need exactly one UNKNOWN_LEAD and one UNKNOWN_SECOND order")
        if self.terms[0].order is not Unknown.LEAD:
            raise ValueError("the leading (largest-order) term must come first")
        for k, t in enumerate(self.terms):
            if t.coefficient is Unknown.CONSTANT and k != self.target:
                raise ValueError("only the targeted term may have an unknown coefficient")
        lead = self.terms[0].coefficient
        if isinstance(lead, Unknown):
            raise ValueError("the leading coefficient must be known")
        if not lead.value_at_zero() * self.terms[0].sign > 0.0:
            raise ValueError("leading coefficient must be positive at t = 0")
        if self.fdo_type is FDOType.II:
            for t in self.terms:
                if isinstance(t.coefficient, PowerSeries) and not t.coefficient.is_polynomial():
                    raise ValueError("type II coefficients must be polynomials in t")

    @property
    def target(self) -> int:
        """Index ``i*`` of the term whose order is sought after the leading one."""
        return [t.order for t in self.terms].index(Unknown.SECOND)

    @property
    def rho_unknown(self) -> bool:
        return self.terms[self.target].coefficient is Unknown.CONSTANT

    @property
    def lead(self) -> Term:
        return self.terms[0]


class Tabulated:
    """Sampled time function with monotone cubic (PCHIP) interpolation."""

    def __init__(self, times, values):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self._interp = PchipInterpolator(self.times, self.values, extrapolate=False)

    def __call__(self, t):
        out = self._interp(np.asarray(t, dtype=float))
        if np.any(np.isnan(out)):
            raise ValueError("tabulated function evaluated outside its sample range")
        return out if np.ndim(out) else float(out)


TimeFunction = Union[PowerSeries, Tabulated, Callable[[float], float]]


@dataclass(frozen=True)
class ModelSpec:
    """Known data of the space-integrated problem.

    ``gbar`` is the space integral of the source, ``boundary`` the boundary
    trace (flux difference in 1D), ``psi0`` the integral of the initial
    datum.  ``kernel`` is the memory kernel or ``None``.
    """

    operator: OperatorSpec
    psi0: float
    gbar: TimeFunction
    a0: PowerSeries = field(default_factory=PowerSeries)
    b0: PowerSeries = field(default_factory=PowerSeries)
    kernel: PowerSeries | Callable[[float], float] | None = None
    boundary: PowerSeries = field(default_factory=PowerSeries)
    d: int = 0

    def __post_init__(self):
        if self.d not in (0, 1):
            raise ValueError("d must be 0 or 1")
        for name in ("a0", "b0", "boundary"):
            v = getattr(self, name)
            if isinstance(v, (int, float)):
                object.__setattr__(self, name, PowerSeries.constant(v))


@dataclass(frozen=True)
class Observation:
    """Noisy samples of the space integral; ``times[0] == 0``."""

    times: np.ndarray
    values: np.ndarray
    psi0: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be 1D arrays of equal length")
        if t.size < 2 or t[0] != 0.0:
            raise ValueError("observation must start at t = 0")
        if np.any(np.diff(t) <= 0.0):
            raise ValueError("observation times must be strictly increasing")
        if not math.isclose(v[0], self.psi0, rel_tol=1e-12, abs_tol=1e-15):
            raise ValueError("values[0] must equal psi0")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "psi0", float(self.psi0))

    @property
    def horizon(self) -> float:
        return float(self.times[-1])
