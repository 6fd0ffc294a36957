import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausssieve.config import BudgetExceeded, Limits
from gausssieve.expsum import (
    MODES,
    SEQ_KINDS,
    compute_Z,
    eval_S,
    extremal_lhs,
    lhs_sum,
    make_sequence,
    node_values,
)
from gausssieve.farey import enumerate_farey, farey_arrays, r2_points
from gausssieve.gaussint import disk_points
from gausssieve.moduli_sets import build_set


@pytest.mark.parametrize("kind", [k for k in SEQ_KINDS if k != "custom"])
def test_sequences_are_deterministic(kind):
    a = make_sequence(kind, 30, seed=4)
    b = make_sequence(kind, 30, seed=4)
    assert np.array_equal(a.values, b.values)
    assert len(a) == len(disk_points(30))
    with pytest.raises(ValueError):
        a.values[0] = 2.0


def test_sequence_kinds():
    assert compute_Z(make_sequence("ones", 10)) == len(disk_points(10))
    assert compute_Z(make_sequence("spike", 10, seed=3)) == 1.0
    ph = make_sequence("random_phase", 10, seed=1)
    assert np.allclose(np.abs(ph.values), 1.0)
    assert len(make_sequence("ones", 10, include_zero=False)) == len(disk_points(10)) - 1
    assert len(make_sequence("ones", 0)) == 1
    with pytest.raises(ValueError):
        make_sequence("custom", 2)
    with pytest.raises(ValueError):
        make_sequence("custom", 2, values=[1, 2])
    with pytest.raises(ValueError):
        make_sequence("stripes", 2)
    with pytest.raises(BudgetExceeded):
        make_sequence("ones", 10_000, limits=Limits(max_support=100))


@given(st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=40)
def test_eval_S_matches_definition_and_period(x, y):
    seq = make_sequence("random_gaussian", 12, seed=2)
    alpha = complex(x, y)
    ref = sum(v * np.exp(2j * math.pi * (n.real * alpha.real - n.imag * alpha.imag))
              for n, v in ((complex(*p), v) for p, v in zip(seq.points, seq.values)))
    assert abs(eval_S(seq, alpha) - ref) < 1e-10
    assert abs(eval_S(seq, alpha + 1) - eval_S(seq, alpha)) < 1e-10
    assert abs(eval_S(seq, alpha + 1j) - eval_S(seq, alpha)) < 1e-10


@pytest.mark.parametrize("kind,Q,N", [("all", 9, 40), ("squares", 3, 60), ("primes", 30, 25)])
def test_modes_agree(kind, Q, N):
    S = build_set(kind, Q)
    seq = make_sequence("random_phase", N, seed=7)
    ref = np.array([eval_S(seq, nd.point) for nd in enumerate_farey(S)])
    for mode in ("complex_form", "r2_form", "fft"):
        vals, used = node_values(S, seq, mode)
        assert used == mode
        assert np.max(np.abs(vals - ref)) < 1e-9
    res = {m: lhs_sum(S, seq, m).value for m in MODES}
    assert max(res.values()) - min(res.values()) <= 1e-10 * max(res.values())


def test_lhs_with_units_only():
    S = build_set("all", 1)
    seq = make_sequence("ones", 20)
    res = lhs_sum(S, seq)
    assert res.node_count == 4
    assert res.value == pytest.approx(4 * len(seq) ** 2)


def test_lhs_scales_quadratically():
    S = build_set("all", 5)
    seq = make_sequence("random_phase", 30, seed=1)
    base = lhs_sum(S, seq).value
    assert lhs_sum(S, seq.scaled(3 - 4j)).value == pytest.approx(25 * base, rel=1e-12)


def test_keep_terms_and_bad_mode():
    S = build_set("all", 4)
    seq = make_sequence("ones", 9)
    res = lhs_sum(S, seq, keep_terms=True)
    assert res.terms is not None and math.isclose(math.fsum(res.terms), res.value)
    assert res.max_term == pytest.approx(float(res.terms.max()))
    with pytest.raises(ValueError):
        lhs_sum(S, seq, "magic")
    with pytest.raises(BudgetExceeded):
        lhs_sum(S, seq, "fft", Limits(max_fft_side=2))
    with pytest.raises(BudgetExceeded):
        lhs_sum(S, seq, "complex_form", Limits(max_direct_work=10))


def test_extremal_dominates_every_sequence():
    S = build_set("all", 4)
    lam, seq = extremal_lhs(S, 16)
    assert lhs_sum(S, seq).value / compute_Z(seq) == pytest.approx(lam, rel=1e-8)
    for s in range(5):
        r = make_sequence("random_gaussian", 16, seed=s)
        assert lhs_sum(S, r).value / compute_Z(r) <= lam * (1 + 1e-9)
    # operator norm from a dense eigensolver
    a, q = farey_arrays(S)
    pts = r2_points(a, q)
    lat = disk_points(16).astype(float)
    C = np.exp(2j * math.pi * (pts @ lat.T))
    assert lam == pytest.approx(np.linalg.eigvalsh(C.conj().T @ C).max(), rel=1e-8)


@pytest.mark.parametrize("N,seed", [(100, 0), (100, 5), (400, 2)])
def test_single_term_sum_is_exact(N, seed):
    S = build_set("all", 16)
    seq = make_sequence("spike", N, seed=seed).scaled(0.6 + 0.8j)
    res = lhs_sum(S, seq)
    assert res.evaluation_mode == "single_term"
    assert res.value == res.node_count
    assert lhs_sum(S, seq, "fft").value == pytest.approx(res.value, rel=1e-12)
    zero = make_sequence("custom", 4, values=np.zeros(len(disk_points(4))))
    assert lhs_sum(S, zero).value == 0.0
