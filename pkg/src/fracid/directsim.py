"""Finite-difference solver for the type I subdiffusion equation with memory.

Solves on ``(l1, l2) x (0, T]``

    sum_i rho_i(t) D^nu_i u - u_xx - a0(t) u - K * (u_xx + b0 u) = g(x, t)

with ``u(x, 0) = u0(x)`` and zero Neumann data.  The scheme:

* every Caputo term by the L1 formula on a uniform time grid;
* the memory term lagged: on ``(t_{k-1}, t_k)`` the integrand
  ``u_xx + b0 u`` is frozen at ``t_{k-1}`` and the kernel is integrated
  exactly over the sub-interval, so each step is one tridiagonal solve;
* second-order centred differences with ghost points for the boundary;
* the space integral ``psi`` by the composite trapezoid rule.

The scheme is first order in time because of the lag.  Solutions that
behave like ``t**nu`` near ``t = 0`` lose further accuracy on the uniform
grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy import integrate, linalg

from .fraccore import PowerSeries, gamma_fn
from .model import Observation, Term

__all__ = ["DirectConfig", "solve_direct", "max_error"]

Coefficient = Union[float, PowerSeries, Callable[[float], float]]


def _as_time_fn(c: Coefficient) -> Callable[[float], float]:
    if isinstance(c, (int, float)):
        value = float(c)
        return lambda t: value
    return lambda t: float(c(t))


@dataclass(frozen=True)
class DirectConfig:
    """Problem and grid for :func:`solve_direct`.

    Parameters
    ----------
    terms
        Operator terms with numeric orders and known coefficients; the
        coefficient of each term is multiplied by its ``sign``.
    u0, g
        Initial datum ``u0(x)`` and source ``g(x, t)``, both vectorised in ``x``.
    kernel
        Memory kernel as a :class:`PowerSeries`, a callable, or ``None``.
    flux
        Neumann datum; only ``0.0`` is supported.
    """

    terms: tuple[Term, ...]
    u0: Callable
    g: Callable
    interval: tuple[float, float] = (0.0, 1.0)
    nx: int = 64
    horizon: float = 1.0
    nt: int = 256
    a0: Coefficient = 0.0
    b0: Coefficient = 0.0
    kernel: PowerSeries | Callable[[float], float] | None = None
    flux: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("need at least one operator term")
        for t in self.terms:
            if not isinstance(t.order, float):
                raise ValueError("all orders must be known numbers for the direct solver")
            if not isinstance(t.coefficient, PowerSeries):
                raise ValueError("all coefficients must be known for the direct solver")
        if self.nx < 8 or self.nt < 8:
            raise ValueError("need nx >= 8 and nt >= 8")
        l1, l2 = self.interval
        if not l2 > l1:
            raise ValueError("interval must have l2 > l1")
        if not self.horizon > 0.0:
            raise ValueError("horizon must be positive")
        if self.flux != 0.0:
            raise ValueError("only homogeneous Neumann data are supported")

    @property
    def x(self) -> np.ndarray:
        l1, l2 = self.interval
        return np.linspace(l1, l2, self.nx + 1)

    @property
    def t(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.nt + 1)


def _laplacian(u: np.ndarray, h: float) -> np.ndarray:
    lap = np.empty_like(u)
    lap[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h**2
    # ghost points u_{-1} = u_1 and u_{N+1} = u_{N-1}
    lap[0] = 2.0 * (u[1] - u[0]) / h**2
    lap[-1] = 2.0 * (u[-2] - u[-1]) / h**2
    return lap


def _kernel_weights(kernel, tau: float, n: int) -> np.ndarray:
    """``A[m] = int_{m tau}^{(m+1) tau} K(r) dr`` for ``m = 0 .. n-1``."""
    edges = tau * np.arange(n + 1)
    if isinstance(kernel, PowerSeries):
        prim = np.zeros(n + 1)
        for c, p in kernel.terms:
            prim += c * edges ** (p + 1.0) / (p + 1.0)
        return np.diff(prim)
    out = np.empty(n)
    for m in range(n):
        out[m], _ = integrate.quad(kernel, edges[m], edges[m + 1], limit=200)
    return out


def _trapezoid(u: np.ndarray, h: float) -> float:
    return float(h * (u.sum() - 0.5 * (u[0] + u[-1])))


def solve_direct(cfg: DirectConfig) -> tuple[np.ndarray, Observation]:
    """Time-march the equation; return ``u`` on the grid and the ``psi`` trace.

    ``u`` has shape ``(nt + 1, nx + 1)``.  The trace is an
    :class:`~fracid.model.Observation` at the grid times.

    Raises
    ------
    ArithmeticError
        When a step's tridiagonal system is singular or the solution
        stops being finite.
    """
    x, times = cfg.x, cfg.t
    h = x[1] - x[0]
    tau = times[1] - times[0]
    nt, npts = cfg.nt, x.size

    orders = [t.order for t in cfg.terms]
    coefs = [_as_time_fn(t.signed_coefficient()) for t in cfg.terms]
    a0, b0 = _as_time_fn(cfg.a0), _as_time_fn(cfg.b0)
    # L1 weights b_k = (k+1)^(1-nu) - k^(1-nu) and scalings tau^-nu / Gamma(2-nu)
    ks = np.arange(nt + 1, dtype=float)
    l1w = [(ks[1:] ** (1.0 - nu) - ks[:-1] ** (1.0 - nu)) for nu in orders]
    l1s = [tau**-nu / gamma_fn(2.0 - nu) for nu in orders]
    kw = _kernel_weights(cfg.kernel, tau, nt) if cfg.kernel is not None else None

    u = np.empty((nt + 1, npts))
    u[0] = np.asarray(cfg.u0(x), dtype=float) * np.ones(npts)
    du = np.empty((nt, npts))  # du[m] = u^{m+1} - u^m
    mem = np.empty((nt, npts))  # lagged integrand at t_m

    off = np.full(npts - 1, -1.0 / h**2)
    upper, lower = off.copy(), off.copy()
    upper[0] = lower[-1] = -2.0 / h**2

    for n in range(1, nt + 1):
        tn = times[n]
        mem[n - 1] = _laplacian(u[n - 1], h) + b0(times[n - 1]) * u[n - 1]
        rhs = np.asarray(cfg.g(x, tn), dtype=float) * np.ones(npts)
        diag_shift = -a0(tn)
        for w, s, rho in zip(l1w, l1s, coefs):
            r = rho(tn) * s
            diag_shift += r
            rhs += r * u[n - 1]
            if n > 1:
                rhs -= r * (w[1:n] @ du[n - 2 :: -1])
        if kw is not None:
            rhs += kw[:n][::-1] @ mem[:n]
        if not np.all(np.isfinite(rhs)):
            raise ArithmeticError(f"non-finite right-hand side at step {n}")
        ab = np.zeros((3, npts))
        ab[0, 1:] = upper
        ab[1, :] = diag_shift + 2.0 / h**2
        ab[2, :-1] = lower
        try:
            un = linalg.solve_banded((1, 1), ab, rhs)
        except linalg.LinAlgError as exc:
            raise ArithmeticError(f"singular system at step {n}") from exc
        if not np.all(np.isfinite(un)):
            raise ArithmeticError(f"non-finite solution at step {n}")
        u[n] = un
        du[n - 1] = un - u[n - 1]

    psi = np.array([_trapezoid(row, h) for row in u])
    return u, Observation(times, psi, psi[0])


def max_error(cfg: DirectConfig, exact: Callable, u: np.ndarray) -> float:
    """``max |u - exact(x, t)|`` over the space-time grid."""
    ref = np.array([exact(cfg.x, t) for t in cfg.t])
    return float(np.max(np.abs(u - ref)))

