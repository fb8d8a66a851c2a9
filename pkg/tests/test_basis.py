import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import eval_jacobi

from fracid.basis import DesignBasis, design_matrix, gram_matrix, jacobi_shifted


def jacobi_oracle(m, a, t_K, t):
    """scipy's Jacobi polynomial mapped to ``(0, t_K)``."""
    return eval_jacobi(m, 0.0, -a, 2.0 * np.asarray(t) / t_K - 1.0)


def weighted_quad(f, a, t_K, extra=0.0):
    """``int_0^t_K t**(extra - a) f(t) dt`` with the power folded into the quadrature weight."""
    val, _ = integrate.quad(f, 0.0, t_K, weight="alg", wvar=(extra - a, 0.0), epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def test_jacobi_degree_zero():
    assert jacobi_shifted(0, 0.99, 1.0).to_pairs() == [[1.0, 0.0]]


def test_jacobi_degree_one():
    p = jacobi_shifted(1, 0.99, 1.0)
    assert np.allclose(p.coefficients, [-0.01, 1.01], rtol=1e-12)
    assert np.allclose(p.exponents, [0.0, 1.0])


@pytest.mark.parametrize("m", range(9))
@pytest.mark.parametrize("a, t_K", [(0.99, 1.0), (0.5, 2.1e-3), (0.2, 3.0)])
def test_jacobi_matches_scipy(m, a, t_K):
    t = np.random.default_rng(m).uniform(0.0, t_K, 20)
    ours = jacobi_shifted(m, a, t_K)(t)
    ref = jacobi_oracle(m, a, t_K, t)
    # the monomial form loses about one digit per degree to cancellation;
    # the default basis stops at degree 5
    tol = 1e-11 if m <= 5 else 1e-10
    assert np.allclose(ours, ref, rtol=tol, atol=tol * np.abs(ref).max())


def test_jacobi_is_one_at_horizon():
    for m in range(6):
        assert jacobi_shifted(m, 0.99, 0.0021)(0.0021) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("a", [0.5, 0.99])
def test_jacobi_orthogonality(a):
    t_K = 1.0
    polys = [jacobi_shifted(m, a, t_K) for m in range(5)]
    norms = [weighted_quad(lambda t, p=p: p(t) ** 2, a, t_K) for p in polys]
    for i in range(5):
        for j in range(i + 1, 5):
            ip = weighted_quad(lambda t: polys[i](t) * polys[j](t), a, t_K)
            assert abs(ip) <= 1e-9 * max(norms[i], norms[j])


def test_jacobi_rejects_bad_arguments():
    with pytest.raises(ValueError):
        jacobi_shifted(-1, 0.5, 1.0)
    with pytest.raises(ValueError):
        jacobi_shifted(21, 0.5, 1.0)
    with pytest.raises(ValueError):
        jacobi_shifted(2, 0.5, 0.0)


def test_basis_validation():
    with pytest.raises(ValueError):
        DesignBasis((0.5, 0.3), 2, 0.99, 1.0)
    with pytest.raises(ValueError):
        DesignBasis((0.0,), 2, 0.99, 1.0)
    with pytest.raises(ValueError):
        DesignBasis((0.5,), 2, 1.0, 1.0)


def test_uniform_basis_shape():
    b = DesignBasis.uniform(3, 9, 0.99, 2.1e-3)
    assert b.power_exponents == pytest.approx((1 / 3, 2 / 3, 1.0))
    assert b.jacobi_count == 6
    assert b.size == 9
    assert all(min(e.exponents) >= 0.0 for e in b.elements)


def test_design_matrix_at_zero():
    b = DesignBasis((0.5,), 1, 0.99, 1.0)
    assert design_matrix(b, [0.0]).tolist() == [[0.0, 1.0]]


def test_design_matrix_at_horizon():
    b = DesignBasis((0.3,), 3, 0.99, 0.002)
    row = design_matrix(b, [0.002])[0]
    assert np.allclose(row[1:], 1.0, rtol=1e-12)


def test_design_matrix_power_entry():
    b = DesignBasis((0.3,), 1, 0.99, 1.0)
    assert design_matrix(b, [0.001])[0, 0] == pytest.approx(0.1258925412, rel=1e-9)


def test_gram_constant_element():
    b = DesignBasis((0.5,), 1, 0.99, 1.0)
    assert b.gram[1, 1] == pytest.approx(100.0, rel=1e-12)


def test_gram_jacobi_block_is_diagonal():
    b = DesignBasis((0.5,), 6, 0.99, 2.1e-3)
    H = b.gram
    assert np.array_equal(H, H.T)
    block = H[1:, 1:]
    off = block - np.diag(np.diag(block))
    assert np.abs(off).max() <= 1e-9 * np.abs(H).max()


def test_gram_is_psd():
    H = DesignBasis.uniform(3, 9, 0.99, 2.1e-3).gram
    w = np.linalg.eigvalsh(H)
    assert w.min() >= -1e-12 * w.max()


def test_gram_divergent_moment_raises():
    from fracid.basis import _weighted_moment

    assert _weighted_moment(0.0, 0.0, 0.5, 1.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        _weighted_moment(-0.3, 0.0, 0.8, 1.0)
    assert np.isfinite(gram_matrix(DesignBasis((0.5,), 1, 0.5, 1.0))).all()


@settings(max_examples=15, deadline=None)
@given(
    st.lists(st.floats(0.05, 1.0), min_size=1, max_size=3, unique=True),
    st.integers(0, 6),
    st.floats(0.1, 0.95),
    st.floats(1e-3, 2.0),
)
def test_gram_against_quadrature(betas, jcount, a, t_K):
    betas = sorted(betas)
    if any(b2 - b1 < 1e-3 for b1, b2 in zip(betas, betas[1:])):
        return
    b = DesignBasis(tuple(betas), jcount, a, t_K)
    H = b.gram
    n = b.size
    # element = t**power * smooth part, so quad never sees a singular integrand
    power = list(betas) + [0.0] * jcount
    smooth = [lambda t: 1.0] * len(betas) + [jacobi_shifted(m, a, t_K) for m in range(jcount)]
    for i in range(n):
        for j in range(i, n):
            ref = weighted_quad(lambda t: smooth[i](t) * smooth[j](t), a, t_K, power[i] + power[j])
            assert H[i, j] == pytest.approx(ref, rel=1e-8, abs=1e-10 * abs(H).max())


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=9, max_size=9), st.floats(1e-3, 1.0))
def test_combined_series_matches_direct_evaluation(q, t_K):
    b = DesignBasis.uniform(3, 9, 0.99, t_K)
    t = np.random.default_rng(0).uniform(0.0, t_K, 20)
    t[0] = t_K
    direct = sum(qj * t**beta for qj, beta in zip(q[:3], b.power_exponents))
    direct = direct + sum(qj * jacobi_oracle(m, 0.99, t_K, t) for m, qj in enumerate(q[3:]))
    scale = max(1.0, np.abs(q).max())
    assert np.allclose(b.combine(q)(t), direct, rtol=1e-11, atol=1e-11 * scale * 10)
