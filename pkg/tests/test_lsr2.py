import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from gausssieve.expsum import make_sequence
from gausssieve.lsr2 import (
    PHI_HAT0,
    R2_SIEVE_CONSTANT,
    ConvergenceError,
    DualSequence,
    PointSet,
    character_matrix,
    duality_gap,
    fejer_phi,
    fejer_phi_hat,
    gram_matrix,
    lhs_r2,
    power_iteration,
    spectral_norm,
    theorem5_extremal_ratio,
    theorem5_ratio,
    v_kernel,
)


def phi_hat_quadrature(s):
    # hat phi(s) = prod_j 2 int_0^inf (sin(pi x) / (2x))^2 cos(2 pi x s_j) dx
    out = 1.0
    for sj in s:
        f = lambda x: (math.pi / 2 * np.sinc(x)) ** 2
        if sj == 0:
            # on [1, inf) write the integrand as (1 - cos 2 pi x) / (8 x^2)
            osc = integrate.quad(lambda x: 1 / (8 * x * x), 1, np.inf, weight="cos", wvar=2 * math.pi)[0]
            val = integrate.quad(f, 0, 1)[0] + 1 / 8 - osc
        else:
            val, _ = integrate.quad(f, 0, np.inf, weight="cos", wvar=2 * math.pi * sj, limlst=200)
        out *= 2 * val
    return out


@pytest.mark.parametrize("s", [(0.3, 0.7), (0.0, 0.5), (0.9, 0.1)])
def test_phi_hat_against_quadrature(s):
    assert fejer_phi_hat(s) == pytest.approx(phi_hat_quadrature(s), rel=1e-6)


def test_phi_values():
    assert fejer_phi((0.0, 0.0)) == pytest.approx((math.pi / 2) ** 4)
    assert fejer_phi((1.0, 0.3)) == pytest.approx(0.0, abs=1e-30)
    assert fejer_phi_hat((0.0, 0.0)) == PHI_HAT0
    assert fejer_phi_hat((1.2, 0.0)) == 0.0
    assert fejer_phi(np.zeros((3, 2))).shape == (3,)


@given(st.floats(-1, 1), st.floats(-1, 1), st.integers(1, 30), st.floats(0.01, 0.5))
@settings(max_examples=25, deadline=None)
def test_v_kernel_identity(x, y, N, delta):
    direct, closed = v_kernel((x, y), N, delta)
    assert abs(direct - closed) <= 1e-9 * max(1.0, abs(closed))


def test_v_kernel_truncation_check():
    with pytest.raises(ValueError):
        v_kernel((0.1, 0.2), 10, 0.1, truncation=64, exact_tail=False)
    with pytest.raises(ValueError):
        v_kernel((0.1, 0.2), 10, 0.9)


def test_power_iteration():
    A = np.diag([1.0, 5.0, 2.0])
    lam, v = power_iteration(lambda w: A @ w, 3, tol=1e-12)
    assert lam == pytest.approx(5.0, rel=1e-10)
    assert abs(abs(v[1]) - 1) < 1e-5
    assert power_iteration(lambda w: w, 0)[0] == 0.0
    with pytest.raises(ConvergenceError):
        power_iteration(lambda w: A @ w, 3, tol=1e-14, max_iter=1)


def test_point_set_validation():
    with pytest.raises(ValueError):
        PointSet(np.empty((0, 2)))
    with pytest.raises(ValueError):
        PointSet([(np.nan, 0.0)])
    assert DualSequence(np.array([3.0, 4.0j])).norm2() == 25.0


@pytest.mark.parametrize("seed", range(3))
def test_duality_and_gram(seed):
    pts = np.random.default_rng(seed).random((12, 2))
    gap, s_row, s_col = duality_gap(pts, 9, return_values=True)
    assert gap < 1e-10
    C = character_matrix(pts, 9)
    assert s_row == pytest.approx(np.linalg.svd(C, compute_uv=False)[0], rel=1e-10)
    G = gram_matrix(pts, 9)
    assert np.allclose(G, G.conj().T)
    assert np.allclose(np.diag(G).real, C.shape[1])
    assert spectral_norm(pts, 9, tol=1e-12) == pytest.approx(s_row**2, rel=1e-8)


def test_lhs_r2_matches_matrix_product():
    pts = np.random.default_rng(1).random((7, 2))
    seq = make_sequence("random_gaussian", 10, seed=3)
    C = character_matrix(pts, 10)
    assert lhs_r2(pts, seq) == pytest.approx(float(np.sum(np.abs(C @ seq.values) ** 2)), rel=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_r2_sieve_ratio_below_constant(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((20, 2))
    seq = make_sequence("random_phase", 16, seed=seed)
    for delta in (0.01, 0.05, 0.2):
        assert theorem5_ratio(pts, seq, delta) <= R2_SIEVE_CONSTANT
        assert theorem5_ratio(pts, seq, delta) <= theorem5_extremal_ratio(pts, 16, delta) * (1 + 1e-8)
        assert theorem5_extremal_ratio(pts, 16, delta) <= R2_SIEVE_CONSTANT


def test_r2_sieve_clustered_points():
    # every point in one tiny ball: K counts all of them
    pts = 0.5 + 1e-4 * np.random.default_rng(0).random((30, 2))
    assert theorem5_extremal_ratio(pts, 25, 0.01) <= R2_SIEVE_CONSTANT
