import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gausssieve import oracles
from gausssieve.config import BudgetExceeded, Limits
from gausssieve.gaussint import (
    I,
    ONE,
    UNITS,
    ZERO,
    GaussInt,
    as_array,
    canonical_associate,
    canonical_elements,
    crt_combine,
    disk_points,
    divides,
    divisors_non_associate,
    divrem,
    euler_phi,
    factor,
    gcd,
    inverse_mod,
    is_prime,
    omega,
    reduce_mod_arrays,
    residue_classes,
    residue_system,
    sqrt_solutions,
    square_divisor_decomposition,
    xgcd,
)

small = st.integers(-60, 60)
gi = st.builds(GaussInt, small, small)
nonzero = gi.filter(lambda z: not z.is_zero())
tiny = st.integers(-10, 10)
small_mod = st.builds(GaussInt, tiny, tiny).filter(lambda z: not z.is_zero())


def test_constructor_and_overflow():
    assert GaussInt(3, -4).norm() == 25
    assert GaussInt.coerce(2 + 1j) == GaussInt(2, 1)
    assert GaussInt.coerce((1, 2)) == GaussInt(1, 2)
    with pytest.raises(OverflowError):
        GaussInt(2**31, 0)
    with pytest.raises(TypeError):
        GaussInt.coerce(0.5)
    with pytest.raises(AttributeError):
        GaussInt(1, 1).re = 3


def test_hand_examples():
    assert divrem(5, GaussInt(1, 1)) == (GaussInt(3, -2), GaussInt(0, -1))
    assert gcd(5, GaussInt(3, 4)) == GaussInt(2, 1)
    assert gcd(GaussInt(2, 1), GaussInt(2, -1)) == ONE
    assert inverse_mod(2, GaussInt(2, 1)) == I
    assert inverse_mod(I, 3) == GaussInt(0, -1)
    f2 = factor(2)
    assert f2.unit == GaussInt(0, -1) and f2.factors == ((GaussInt(1, 1), 2),)
    assert factor(I).factors == () and factor(I).unit == I
    assert [p for p, _ in factor(5).factors] == [GaussInt(1, 2), GaussInt(2, 1)]
    assert divisors_non_associate(5) == [ONE, GaussInt(1, 2), GaussInt(2, 1), GaussInt(5, 0)]
    assert euler_phi(2) == 2 and euler_phi(GaussInt(2, 1)) == 4 and euler_phi(ONE) == 1
    assert crt_combine([(1, GaussInt(1, 1)), (2, GaussInt(2, 1))]) == GaussInt(0, -1)
    assert square_divisor_decomposition(2) == (GaussInt(1, 1), I)
    assert square_divisor_decomposition(GaussInt(1, 1)) == (GaussInt(1, 1), GaussInt(1, 1))


def test_gcd_zero_zero_is_error():
    with pytest.raises(ValueError):
        gcd(0, 0)
    with pytest.raises(ValueError):
        inverse_mod(GaussInt(1, 1), 2)


@given(gi, nonzero)
def test_divrem_identity_and_remainder_size(a, b):
    q, r = divrem(a, b)
    assert q * b + r == a
    assert 2 * r.norm() <= b.norm()


@given(gi, gi)
def test_gcd_divides_and_is_canonical(a, b):
    assume(not (a.is_zero() and b.is_zero()))
    g = gcd(a, b)
    assert divides(g, a) and divides(g, b)
    assert g == canonical_associate(g)
    d, x, y = xgcd(a, b)
    assert x * a + y * b == d and canonical_associate(d) == g


@given(nonzero)
def test_factor_reconstructs(z):
    f = factor(z)
    assert f.value() == z
    assert f.unit in UNITS
    assert all(is_prime(p) and p == canonical_associate(p) for p, _ in f.factors)
    assert omega(z) == f.omega


@given(small_mod)
def test_euler_phi_matches_count(z):
    assert euler_phi(z) == sum(residue_system(z).reduced_mask)


@given(nonzero, gi)
def test_inverse_mod(k, a):
    if k.is_unit() or a.is_zero() or gcd(a, k) != ONE:
        return
    inv = inverse_mod(a, k)
    assert divides(k, inv * a - ONE)


@given(small_mod)
@settings(max_examples=50)
def test_residue_system_is_complete_and_reduced(k):
    rs = residue_system(k)
    arr = as_array(rs.representatives)
    n = k.norm()
    assert len(arr) == n
    assert all(2 * r.norm() <= n for r in rs.representatives)
    i, j = np.triu_indices(n, 1)
    assert not oracles.divisible_by(arr[i, 0] - arr[j, 0], arr[i, 1] - arr[j, 1], k).any()


@given(st.lists(st.tuples(small, small), min_size=1, max_size=30), small_mod)
def test_vectorised_reduction_matches_divrem(pts, k):
    arr = np.array(pts, dtype=np.int64)
    rx, ry = reduce_mod_arrays(arr[:, 0], arr[:, 1], k)
    for (x, y), a, b in zip(pts, rx, ry):
        assert divrem(GaussInt(x, y), k)[1] == GaussInt(int(a), int(b))
    idx = residue_classes(arr, k)
    reps = residue_system(k).representatives
    for (x, y), j in zip(pts, idx):
        assert divides(k, GaussInt(x, y) - reps[j])


@given(small_mod, st.sampled_from([ONE, I, GaussInt(1, 1), GaussInt(2, 1)]))
@settings(max_examples=60)
def test_sqrt_solutions_against_brute_force(k, g):
    reps = oracles.brute_residues(k)
    for l in residue_system(k).reduced[:8]:
        sols = sqrt_solutions(l, k, g)
        brute = oracles.brute_sqrt_count(reps, l, k, g)
        if k.is_unit():
            assert sols == [ZERO]
            continue
        assert len(sols) == len(brute)
        for x in sols:
            assert divides(k, x * x * g - l)


def test_sqrt_root_count_bound_that_actually_holds():
    # odd primes contribute at most 2 roots, the prime above 2 at most 8
    for k in canonical_elements(300):
        odd = [p for p, _ in factor(k).factors if p != GaussInt(1, 1)]
        cap = 2 ** len(odd) * (8 if divides(GaussInt(1, 1), k) else 1)
        for l in residue_system(k).reduced[:6]:
            assert len(sqrt_solutions(l, k)) <= cap


def test_sqrt_solutions_exceeds_two_power_omega_bound_mod_eight():
    # x^2 = 1 (mod 8) has 8 solutions while 2^(omega(8)+1) = 4
    assert len(sqrt_solutions(1, 8)) == 8
    assert 2 ** (omega(8) + 1) == 4


def test_sqrt_errors():
    with pytest.raises(ValueError):
        sqrt_solutions(GaussInt(1, 1), 2)
    assert sqrt_solutions(1, GaussInt(2, 1), GaussInt(2, 1)) == []


@given(nonzero)
def test_square_divisor_decomposition(t):
    assume(t.norm() <= 10**5)
    f, g = square_divisor_decomposition(t)
    assert t * g == f * f
    for p, e in factor(g).factors:
        assert e == 1


def test_disk_points_and_canonical_elements():
    assert len(disk_points(1)) == 5
    assert len(disk_points(1, include_zero=False)) == 4
    assert len(canonical_elements(2)) == 2
    for Q in (100, 400, 1600):
        assert abs(len(disk_points(Q, False)) / (math.pi * Q) - 1) < 0.05
    pts = disk_points(10)
    assert [tuple(p) for p in pts] == sorted(tuple(p) for p in pts)


def test_budget_caps():
    with pytest.raises(BudgetExceeded):
        residue_system(GaussInt(2000, 1), Limits(max_residue_norm=1000))
    with pytest.raises(BudgetExceeded):
        factor(GaussInt(10**6 + 3, 1), Limits(max_factor_norm=10**6))
