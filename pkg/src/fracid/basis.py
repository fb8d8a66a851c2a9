"""Mixed power / shifted-Jacobi basis for the small-time observation fit.

The basis is ``t**beta_1, ..., t**beta_I`` followed by the shifted Jacobi
polynomials ``P_m^{(0,-a)}(t / t_K)``, ``m = 0, ..., J - 1``.  The
polynomials are orthogonal in ``L^2`` on ``(0, t_K)`` with weight ``t**-a``.
Every element is held as an exact :class:`~fracid.fraccore.PowerSeries`,
so the weighted Gram matrix is assembled in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.special import binom

from .fraccore import PowerSeries

__all__ = ["DesignBasis", "jacobi_shifted", "design_matrix", "gram_matrix"]


def jacobi_shifted(m: int, a: float, t_K: float) -> PowerSeries:
    """Monomial expansion in ``t`` of ``P_m^{(0,-a)}(t / t_K)``.

    Expands ``sum_i C(m, i) C(m - a, m - i) (s - 1)**(m - i) s**i`` with
    ``s = t / t_K``.
    """
    if m < 0 or int(m) != m:
        raise ValueError(f"degree must be a non-negative integer, got {m!r}")
    if m > 20:
        raise ValueError("degrees above 20 are not supported")
    if t_K <= 0.0:
        raise ValueError("horizon t_K must be positive")
    m = int(m)
    coeffs = np.zeros(m + 1)  # in powers of s
    for i in range(m + 1):
        w = binom(m, i) * binom(m - a, m - i)
        # (s - 1)**(m - i) = sum_k C(m - i, k) s**k (-1)**(m - i - k)
        for k in range(m - i + 1):
            coeffs[k + i] += w * binom(m - i, k) * (-1.0) ** (m - i - k)
    return PowerSeries((c / t_K**k, float(k)) for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class DesignBasis:
    """Fit basis: ``len(power_exponents)`` powers plus ``jacobi_count`` polynomials.

    Parameters
    ----------
    power_exponents
        Increasing exponents ``beta_j`` in (0, 1].
    jacobi_count
        Number of Jacobi polynomials (degrees ``0 .. jacobi_count - 1``).
    weight_exponent
        The ``a`` in the weight ``t**-a``, in (0, 1).
    horizon
        ``t_K``, the last observation time.
    """

    power_exponents: tuple[float, ...]
    jacobi_count: int
    weight_exponent: float
    horizon: float
    elements: tuple[PowerSeries, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        betas = tuple(float(b) for b in self.power_exponents)
        if any(b <= 0.0 for b in betas):
            raise ValueError(f"power exponents must be positive: {betas}")
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError(f"power exponents must be strictly increasing: {betas}")
        if self.jacobi_count < 0:
            raise ValueError("jacobi_count must be non-negative")
        if not 0.0 < self.weight_exponent < 1.0:
            raise ValueError("weight exponent must lie in (0, 1)")
        if self.horizon <= 0.0:
            raise ValueError("horizon must be positive")
        object.__setattr__(self, "power_exponents", betas)
        elems = [PowerSeries.monomial(1.0, b) for b in betas]
        elems += [
            jacobi_shifted(m, self.weight_exponent, self.horizon)
            for m in range(self.jacobi_count)
        ]
        object.__setattr__(self, "elements", tuple(elems))

    @classmethod
    def uniform(
        cls, n_powers: int, size: int, weight_exponent: float, horizon: float
    ) -> DesignBasis:
        """Powers ``i / n_powers``, ``i = 1..n_powers``, then ``size - n_powers`` polynomials."""
        betas = tuple(i / n_powers for i in range(1, n_powers + 1))
        return cls(betas, size - n_powers, weight_exponent, horizon)

    @property
    def size(self) -> int:
        return len(self.elements)

    def combine(self, q: Sequence[float]) -> PowerSeries:
        """The series ``sum_j q_j e_j``."""
        q = np.asarray(q, dtype=float)
        if q.shape != (self.size,):
            raise ValueError(f"expected {self.size} coefficients, got {q.shape}")
        terms = []
        for qj, e in zip(q, self.elements):
            terms.extend((qj * c, p) for c, p in e.terms)
        return PowerSeries(terms)

    @cached_property
    def gram(self) -> np.ndarray:
        return gram_matrix(self)


def design_matrix(basis: DesignBasis, times) -> np.ndarray:
    """Matrix with entries ``e_j(t_i)``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    return np.column_stack([e(times) for e in basis.elements])


def _weighted_moment(p: float, q: float, a: float, t_K: float) -> float:
    s = p + q + 1.0 - a
    if s <= 0.0:
        raise ValueError(
            f"weighted inner product diverges for exponents {p}, {q} with a={a}"
        )
    return t_K**s / s


def gram_matrix(basis: DesignBasis) -> np.ndarray:
    """Exact ``H[l, m] = int_0^{t_K} t**-a e_l(t) e_m(t) dt``."""
    n = basis.size
    a, t_K = basis.weight_exponent, basis.horizon
    H = np.zeros((n, n))
    for l in range(n):
        for m in range(l, n):
            val = 0.0
            for cl, pl in basis.elements[l].terms:
                for cm, pm in basis.elements[m].terms:
                    val += cl * cm * _weighted_moment(pl, pm, a, t_K)
            H[l, m] = H[m, l] = val
    return H
