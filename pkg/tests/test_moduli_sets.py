import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausssieve.config import BudgetExceeded, Limits
from gausssieve.gaussint import (
    ONE,
    GaussInt,
    canonical_associate,
    divides,
    exact_div,
    is_prime,
    square_divisor_decomposition,
)
from gausssieve.moduli_sets import (
    build_set,
    class_filter,
    count_A_t,
    counts_by_class,
    dyadic_slices,
    min_X_condition11,
    subset_t,
)


def test_build_set_examples():
    assert set(build_set("all", 1).elements) == {GaussInt(1, 0), GaussInt(-1, 0), GaussInt(0, 1), GaussInt(0, -1)}
    primes = build_set("primes", 10)
    assert len(primes) == 16
    assert {canonical_associate(p) for p in primes} == {GaussInt(1, 1), GaussInt(2, 1), GaussInt(1, 2), GaussInt(3, 0)}
    sq = build_set("squares", 2)
    assert len(sq) == 8 and sq.norm_bound == 4 and sq.bound_Q == 2
    assert len(build_set("all", 2)) == 8


@pytest.mark.parametrize("Q", [100, 400, 1600])
def test_gauss_circle(Q):
    assert 0.95 <= len(build_set("all", Q)) / (math.pi * Q) <= 1.05


def test_set_errors():
    with pytest.raises(ValueError):
        build_set("bogus", 3)
    with pytest.raises(ValueError):
        build_set("all", 0)
    with pytest.raises(BudgetExceeded):
        build_set("all", 10**4, Limits(max_set_norm=1000))
    with pytest.raises(ValueError):
        build_set("custom", 2, elements=[GaussInt(2, 2)])


def test_primes_are_prime_and_closed_under_units():
    S = build_set("primes", 200)
    els = set(S.elements)
    for p in S:
        assert is_prime(p)
        assert p * GaussInt(0, 1) in els


def test_canonical_only():
    S = build_set("primes", 50)
    assert 4 * len(S.canonical_only()) == len(S)


def test_dyadic_slices_partition():
    for kind, Q in (("all", 50), ("squares", 6), ("primes", 300)):
        S = build_set(kind, Q)
        slices = dyadic_slices(S)
        flat = [q for sl in slices for q in sl.elements]
        assert sorted(flat, key=GaussInt.key) == sorted(S.elements, key=GaussInt.key)
        for sl in slices:
            assert all(sl.Q0 < q.norm() <= 2 * sl.Q0 for q in sl.elements)


def test_subset_t_basics():
    S = build_set("all", 20)
    assert set(subset_t(S, ONE)) == set(S.elements)
    assert subset_t(S, GaussInt(5, 0)) == []
    Q = S.norm_bound
    t = GaussInt(1, 1)
    assert all(abs(complex(q.re, q.im)) <= math.sqrt(Q) / abs(complex(t.re, t.im)) + 1e-12
               for q in subset_t(S, t))
    with pytest.raises(ValueError):
        subset_t(S, 0)


@given(st.integers(-6, 6), st.integers(-6, 6))
@settings(max_examples=50, deadline=None)
def test_subset_t_of_squares_matches_explicit_form(x, y):
    t = GaussInt(x, y)
    if t.is_zero():
        return
    Q = 12
    S = build_set("squares", Q)
    f, g = square_divisor_decomposition(t)
    expected = set()
    for q1 in build_set("all", Q).elements:
        if divides(f, q1):
            q2 = exact_div(q1, f)
            expected.add(q2 * q2 * g)
    assert set(subset_t(S, t)) == expected


def points(*zs):
    return [GaussInt(*z) for z in zs]


def test_count_A_t_examples():
    assert count_A_t([], 1.0, ONE, 0, None) == 0
    assert count_A_t(points((3, 4)), 0.0, ONE, 0, 5.0) == 1
    S = build_set("all", 30).elements
    assert count_A_t(S, 100.0, ONE, 0, 100.0) == len(S)
    with pytest.raises(ValueError):
        count_A_t(S, 1.0, GaussInt(1, 1), GaussInt(1, 1), None)
    with pytest.raises(ValueError):
        count_A_t(S, -1.0, ONE, 0, None)


def test_class_filter():
    S = build_set("all", 20).elements
    k = GaussInt(2, 1)
    kept = class_filter(S, k, 1)
    for x, y in kept:
        assert divides(k, GaussInt(int(x), int(y)) - ONE)


@given(st.floats(0.0, 5.0), st.floats(0.0, 3.0), st.floats(0.0, 6.0), st.floats(0.0, 3.0))
@settings(max_examples=40, deadline=None)
def test_count_A_t_monotone(u, du, B, dB):
    S = build_set("all", 40).elements
    k = GaussInt(1, 1)
    base = count_A_t(S, u, k, 1, B)
    assert base <= count_A_t(S, u + du, k, 1, B)
    assert base <= count_A_t(S, u, k, 1, B + dB)


def test_counts_by_class_agrees_with_single_class():
    S = build_set("primes", 400).elements
    k = GaussInt(2, 1)
    by = counts_by_class(S, 3.0, k, 20.0)
    for l, c in by.items():
        assert c == count_A_t(S, 3.0, k, l, 20.0)


def test_min_X_condition11():
    rep = min_X_condition11(build_set("custom", 1, elements=[ONE]), 16)
    assert rep.X == 1.0
    sq = min_X_condition11(build_set("squares", 3), 64, u_samples=3)
    assert 1.0 <= sq.X
    assert sq.envelope >= 2
    assert all(row[4] <= row[5] for row in sq.rows)  # clamped <= unclamped
