import math
from dataclasses import replace

import numpy as np
import pytest

from fracid.directsim import DirectConfig, max_error, solve_direct
from fracid.fraccore import PowerSeries
from fracid.model import UNKNOWN_CONSTANT, Term
from fracid.problems import example1_direct_config, example1_field, example1_truth

PI2 = math.pi**2


def smooth_problem(nt, nx, a0=1.0, b0=0.5):
    """``u = (1 + t**2) cos(pi x)`` for ``D^0.6 u - D^0.3 u / 4`` with kernel ``1 + t``.

    The source is written out by hand: ``D^mu t**2 = 2 t**(2-mu) / Gamma(3-mu)``
    and ``(1 + t) * (1 + t**2) = t + t**2/2 + t**3/3 + t**4/12``.
    """

    def timepart(t):
        d = lambda mu: 2.0 * t ** (2.0 - mu) / math.gamma(3.0 - mu)  # noqa: E731
        conv = t + t**2 / 2 + t**3 / 3 + t**4 / 12
        return d(0.6) - 0.25 * d(0.3) + (PI2 - a0) * (1 + t * t) + (PI2 - b0) * conv

    terms = (Term(0.6, PowerSeries.constant(1.0)), Term(0.3, PowerSeries.constant(0.25), sign=-1.0))
    cfg = DirectConfig(
        terms,
        lambda x: np.cos(np.pi * x),
        lambda x, t: timepart(t) * np.cos(np.pi * x),
        nx=nx,
        horizon=1.0,
        nt=nt,
        a0=a0,
        b0=b0,
        kernel=PowerSeries.polynomial([1.0, 1.0]),
    )
    exact = lambda x, t: (1 + t * t) * np.cos(np.pi * x)  # noqa: E731
    return cfg, exact


def test_constant_preserved():
    terms = (Term(0.4, PowerSeries.constant(1.0)), Term(0.2, PowerSeries.constant(0.3)))
    cfg = DirectConfig(terms, lambda x: np.ones_like(x), lambda x, t: np.zeros_like(x),
                       interval=(-0.5, 1.5), nx=32, horizon=1.0, nt=64)
    u, trace = solve_direct(cfg)
    assert np.abs(u - 1.0).max() <= 1e-12
    assert np.abs(trace.values - 2.0).max() <= 1e-12


def test_shapes_and_trace():
    cfg, exact = smooth_problem(16, 40)
    u, trace = solve_direct(cfg)
    assert u.shape == (17, 41)
    assert np.array_equal(trace.times, cfg.t)
    assert trace.values[0] == pytest.approx(0.0, abs=1e-14)  # integral of cos(pi x)


def test_temporal_order_on_smooth_solution():
    nts = [16, 32, 64, 128]
    errs = []
    for nt in nts:
        cfg, exact = smooth_problem(nt, 1600)
        u, _ = solve_direct(cfg)
        errs.append(max_error(cfg, exact, u))
    slope = -np.polyfit(np.log(nts), np.log(errs), 1)[0]
    assert slope >= 1.0
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_joint_refinement_is_monotone():
    errs = []
    for nx, nt in [(16, 16), (32, 32), (64, 64), (128, 128)]:
        cfg, exact = smooth_problem(nt, nx)
        u, _ = solve_direct(cfg)
        errs.append(max_error(cfg, exact, u))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_example1_converges_in_time():
    nu = 0.5
    u_exact, _, _ = example1_field(nu)
    errs = []
    for nt in (256, 512):
        cfg = example1_direct_config(nu, nx=64, nt=nt, horizon=0.002)
        u, _ = solve_direct(cfg)
        errs.append(max_error(cfg, u_exact, u))
    assert errs[1] < errs[0]


def test_example1_trace_close_to_closed_form():
    nu = 0.5
    psi, _ = example1_truth(nu)
    _, trace = solve_direct(example1_direct_config(nu, nx=64, nt=512, horizon=0.002))
    assert np.abs(trace.values - psi(trace.times)).max() <= 2e-3


def test_callable_kernel_matches_series_kernel():
    cfg, _ = smooth_problem(32, 64)
    alt = replace(cfg, kernel=lambda r: 1.0 + r)
    u1, _ = solve_direct(cfg)
    u2, _ = solve_direct(alt)
    assert np.abs(u1 - u2).max() <= 1e-10


@pytest.mark.parametrize(
    "kw",
    [
        dict(nx=4),
        dict(nt=4),
        dict(interval=(1.0, 0.0)),
        dict(horizon=0.0),
        dict(flux=1.0),
    ],
)
def test_config_validation(kw):
    terms = (Term(0.5, PowerSeries.constant(1.0)),)
    base = dict(terms=terms, u0=lambda x: x, g=lambda x, t: x)
    base.update(kw)
    with pytest.raises(ValueError):
        DirectConfig(**base)


def test_rejects_unknown_parameters():
    with pytest.raises(ValueError):
        DirectConfig((Term(0.5, UNKNOWN_CONSTANT),), lambda x: x, lambda x, t: x)
    with pytest.raises(ValueError):
        DirectConfig((), lambda x: x, lambda x, t: x)


def test_non_finite_solution_raises():
    terms = (Term(0.5, PowerSeries.constant(1.0)),)
    cfg = DirectConfig(terms, lambda x: np.ones_like(x), lambda x, t: np.full_like(x, np.nan), nx=8, nt=8)
    with pytest.raises(ArithmeticError):
        solve_direct(cfg)
