import math

import numpy as np
import pytest

from gausssieve.gaussint import ONE, GaussInt, is_prime
from gausssieve.moduli_sets import build_set
from gausssieve.verify import (
    CSV_HEADER,
    BoundSpec,
    SieveReport,
    brun_titchmarsh_check,
    bt_bound,
    chain_instance,
    class_majorant,
    csv_text,
    lemma_chain_check,
    make_bound,
    rhs_bound,
    run_experiment,
    sample_admissible,
    theorem1_rhs_sampled,
)


def test_bound_spec_validation():
    with pytest.raises(ValueError):
        BoundSpec("nope", 4, 4)
    with pytest.raises(ValueError):
        BoundSpec("huxley", 0, 4)
    with pytest.raises(ValueError):
        BoundSpec("thm3", 4, 4, epsilon=0.5)
    with pytest.raises(ValueError):
        BoundSpec("thm4", 64, 4, delta=1.0)


def test_rhs_expressions():
    assert rhs_bound(BoundSpec("huxley", 9, 100)) == 181
    assert rhs_bound(BoundSpec("thm3", 4, 16, epsilon=0.0)) == 64 + 16 * 4 + 16
    v = rhs_bound(BoundSpec("thm4", 256, 100, delta=0.5))
    assert v == pytest.approx(256**2 * math.log(math.log(256)) / (0.5 * math.log(256)))
    assert rhs_bound(BoundSpec("thm2", 4, 16, epsilon=0.0, X=2.0, set_size=10)) == 16 + 4 * 2 * (4 + 10)
    with pytest.raises(ValueError):
        rhs_bound(BoundSpec("thm4", 8, 100))
    with pytest.raises(ValueError):
        rhs_bound(BoundSpec("thm1_sampled", 8, 100))
    assert rhs_bound(BoundSpec("thm1_sampled", 8, 100), 17.0) == 17.0


def test_q_convention_per_bound():
    S = build_set("squares", 3)
    assert make_bound("huxley", S, 16).Q == 9
    assert make_bound("thm3", S, 16).Q == 3


def test_run_experiment_ratio():
    rep = run_experiment("all", 4, 25, "random_phase", 1, bounds=("huxley", "thm3"))
    for name in ("huxley", "thm3"):
        assert rep.ratio[name] == pytest.approx(rep.lhs / (rep.rhs[name] * rep.Z))
    assert rep.farey_node_count > 0 and rep.Z > 0


def test_huxley_ratio_with_trivial_sequence():
    # a spike: every |S(a/q)|^2 = 1, so lhs = number of nodes
    rep = run_experiment("all", 9, 16, "spike", 3)
    assert rep.lhs == pytest.approx(rep.farey_node_count)


def test_sampled_bound_is_monotone_and_above_N():
    S = build_set("all", 9)
    a = theorem1_rhs_sampled(S, 64, samples=1)
    b = theorem1_rhs_sampled(S, 64, samples=2)
    assert 64 <= a <= b
    det = theorem1_rhs_sampled(S, 64, samples=1, detail=True)
    assert det.value == a and det.evaluations > 0


def test_chain_instances_hold():
    S = build_set("all", 16)
    rep = lemma_chain_check(S, 16, 64, trials=4, seed=3)
    assert rep.failures == 0 and len(rep.instances) == 4
    for inst in rep.instances:
        assert inst.P <= inst.bound
        assert inst.error >= 0 and inst.integral >= 0


def test_sample_admissible():
    rng = np.random.default_rng(0)
    Delta = 1 / 256
    for _ in range(20):
        b, r, z = sample_admissible(256**0.25, Delta, rng)
        tau = Delta**-0.25
        assert math.sqrt(Delta) <= abs(z) * (1 + 1e-12)
        assert abs(z) <= 2 / (abs(complex(r.re, r.im)) * tau) * (1 + 1e-12)


def test_chain_instance_rejects_small_z():
    S = build_set("all", 4)
    with pytest.raises(ValueError):
        chain_instance(S, GaussInt(0, 0), ONE, 0.001, 0.01)
    assert class_majorant(S, GaussInt(0, 0), ONE, 0.2, 0.01) >= 16


def test_brun_titchmarsh_small():
    rep = brun_titchmarsh_check(Q=2000, max_k_norm=5, u_values=(3.0, 6.0, 12.0))
    assert rep.violations == 0
    assert rep.rows and all(r.count <= r.bound for r in rep.rows)
    for row in rep.rows:
        cx, cy = row.center
        assert math.hypot(cx, cy) <= math.sqrt(2000) - row.u + 1e-9
    with pytest.raises(ValueError):
        bt_bound(1.0, GaussInt(1, 1))


def test_brun_titchmarsh_fixed_centre():
    rep = brun_titchmarsh_check(Q=500, configs=[(ONE, ONE, 5.0, 0j)])
    assert rep.rows[0].count == len([1 for x in range(-5, 6) for y in range(-5, 6)
                                     if x * x + y * y <= 25 and _is_prime(x, y)])


def _is_prime(x, y):
    return (x, y) != (0, 0) and is_prime(GaussInt(x, y))


def _rep(kind, Q, N, seq, seed, bounds):
    r = SieveReport(kind, Q, N, seq, seed, 1.5, 2.0, 10)
    for b in bounds:
        r.rhs[b], r.ratio[b] = 3.0, 0.25
    return r


def test_csv_format():
    assert csv_text([]) == CSV_HEADER + "\n"
    text = csv_text([_rep("all", 4, 9, "ones", 0, ["thm3", "huxley"])])
    lines = text.split("\n")
    assert len(lines) == 4 and lines[-1] == ""
    assert lines[1].split(",")[8] == "huxley" and lines[2].split(",")[8] == "thm3"
    assert lines[1] == "all,4,9,ones,0,10,2,1.5,huxley,3,0.25,"
    assert "\r" not in text


def test_csv_sorting_and_timings():
    reps = [_rep("primes", 16, 9, "ones", 1, ["huxley"]), _rep("all", 16, 9, "ones", 0, ["huxley"]),
            _rep("all", 4, 100, "ones", 0, ["huxley"]), _rep("all", 4, 9, "ones", 0, ["huxley"])]
    rows = csv_text(reps).strip().split("\n")[1:]
    keys = [tuple(r.split(",")[:3]) for r in rows]
    assert keys == [("all", "4", "9"), ("all", "4", "100"), ("all", "16", "9"), ("primes", "16", "9")]
    assert csv_text(reps, timings=True).split("\n")[1].split(",")[-1] != ""


def test_csv_seventeen_digits():
    r = _rep("all", 4, 9, "ones", 0, ["huxley"])
    r.lhs = 1 / 3
    cell = csv_text([r]).split("\n")[1].split(",")[7]
    assert float(cell) == 1 / 3 and cell == format(1 / 3, ".17g")
