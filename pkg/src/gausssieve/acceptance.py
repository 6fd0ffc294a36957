"""The acceptance suite: one function per criterion, shared by ``selftest`` and pytest."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .expsum import lhs_sum, make_sequence
from .farey import count_K, dirichlet_approx
from .gaussint import (
    ONE,
    GaussInt,
    as_array,
    canonical_elements,
    euler_phi,
    gcd,
    omega,
    residue_system,
    sqrt_solutions,
)
from .lsr2 import R2_SIEVE_CONSTANT, duality_gap, theorem5_extremal_ratio, theorem5_ratio, v_kernel
from .moduli_sets import build_set, class_filter, count_A_t
from . import oracles
from .verify import brun_titchmarsh_check, csv_text, lemma_chain_check, run_experiment

GOLDEN_TOLERANCE = 0.05
SQRT_G = (GaussInt(1, 0), GaussInt(0, 1), GaussInt(1, 1), GaussInt(2, 1))

HUX_Q = (4, 9, 16, 25)
HUX_N = (25, 100, 400)
HUX_SEQ = [("ones", 0), ("spike", 0)] + [("random_phase", s) for s in range(10)]
SQ_Q = (4, 8, 16, 32)
SQ_N = (256, 1024)
SQ_SEQ = [("ones", 0)] + [("random_phase", s) for s in range(3)]
SQ_EPS = 0.05
PR_Q = (64, 256, 1024)
PR_DELTA = 0.5
PR_SEQ = [("ones", 0)] + [("random_phase", s) for s in range(3)]


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def golden_dir() -> Path:
    return Path(str(resources.files("gausssieve") / "golden"))


def load_constants(path: Path | None = None) -> dict:
    p = (path or golden_dir()) / "constants.json"
    return json.loads(p.read_text())


# ---------------------------------------------------------------- experiments


def prime_N(Q: int, delta: float = PR_DELTA) -> int:
    return int(math.floor(Q ** (1 + delta) / 16))


def huxley_reports():
    reps = []
    for Q in HUX_Q:
        for N in HUX_N:
            for kind, seed in HUX_SEQ:
                reps.append(run_experiment("all", Q, N, kind, seed, ["huxley"]))
    return reps


def squares_reports():
    reps = []
    for Q in SQ_Q:
        S = build_set("squares", Q)
        for N in SQ_N:
            for kind, seed in SQ_SEQ:
                reps.append(run_experiment("squares", Q, N, kind, seed, ["thm3"], epsilon=SQ_EPS,
                                           moduli=S))
    return reps


def primes_reports():
    reps = []
    for Q in PR_Q:
        S = build_set("primes", Q)
        for kind, seed in PR_SEQ:
            reps.append(run_experiment("primes", Q, prime_N(Q), kind, seed, ["thm4"],
                                       delta=PR_DELTA, moduli=S))
    return reps


def max_ratio(reports, bound: str) -> float:
    return max(r.ratio[bound] for r in reports)


# ---------------------------------------------------------------- criteria


def _timed(number, name, fn, *args):
    t0 = time.perf_counter()
    passed, detail = fn(*args)
    return CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)


def _arith_instances(max_norm: int = 300):
    """Yield (k, brute residues, brute gcd norms) for canonical N(k) <= max_norm."""
    for k in canonical_elements(max_norm):
        reps = oracles.brute_residues(k)
        yield k, reps, oracles.brute_gcd_norms(reps, k)


def check_arithmetic(max_norm: int = 300, collect_delta: list | None = None):
    bad = []
    n_sqrt = 0
    for k, reps, gnorms in _arith_instances(max_norm):
        n = k.norm()
        # residue system: complete, pairwise incongruent, reduced mask
        ours = as_array(residue_system(k).representatives)
        mask = np.array(residue_system(k).reduced_mask)
        if len(ours) != n:
            bad.append(f"residue_system({k}) size")
            continue
        i, j = np.triu_indices(n, 1)
        if n > 1 and oracles.divisible_by(ours[i, 0] - ours[j, 0], ours[i, 1] - ours[j, 1], k).any():
            bad.append(f"residue_system({k}) incongruence")
        our_g = oracles.brute_gcd_norms(ours, k)
        if not np.array_equal(mask, our_g == 1):
            bad.append(f"residue_system({k}) reduced mask")
        # gcd on every brute residue
        for (x, y), gn in zip(reps, gnorms):
            g = gcd(GaussInt(int(x), int(y)), k) if (x or y) else gcd(GaussInt(0, 0), k)
            if g.norm() != gn or not (oracles.divisible_by([x], [y], g)[0]
                                      and oracles.divisible_by([k.re], [k.im], g)[0]):
                bad.append(f"gcd({x}+{y}i, {k})")
                break
        if euler_phi(k) != int((gnorms == 1).sum()):
            bad.append(f"euler_phi({k})")
        # square roots
        reduced = reps[gnorms == 1]
        w = omega(k)
        for lx, ly in reduced:
            l = GaussInt(int(lx), int(ly))
            for g in SQRT_G:
                sols = sqrt_solutions(l, k, g)
                n_sqrt += 1
                brute = oracles.brute_sqrt_count(reps, l, k, g)
                if len(sols) != len(brute):
                    bad.append(f"sqrt({l},{k},{g}) count {len(sols)} vs {len(brute)}")
                    continue
                if sols:
                    sa = as_array(sols)
                    chk = oracles.brute_sqrt_count(sa, l, k, g)
                    if len(chk) != len(sa):
                        bad.append(f"sqrt({l},{k},{g}) non-root")
                    if len(sa) > 1:
                        a, b = np.triu_indices(len(sa), 1)
                        if oracles.divisible_by(sa[a, 0] - sa[b, 0], sa[a, 1] - sa[b, 1], k).any():
                            bad.append(f"sqrt({l},{k},{g}) duplicate class")
                if collect_delta is not None:
                    collect_delta.append((k, l, g, len(sols), 2 ** (w + 1)))
    return not bad, f"{n_sqrt} sqrt instances, {len(bad)} mismatches" + (f"; first: {bad[0]}" if bad else "")


def criterion_1_2():
    deltas: list = []
    t0 = time.perf_counter()
    ok1, d1 = check_arithmetic(300, deltas)
    r1 = CriterionResult(1, "arithmetic oracle equivalence", ok1, d1, time.perf_counter() - t0)
    t0 = time.perf_counter()
    viol = [(k, l, g, c, b) for k, l, g, c, b in deltas if c > b]
    detail = f"{len(viol)} of {len(deltas)} instances exceed 2^(omega+1)"
    if viol:
        k, l, g, c, b = max(viol, key=lambda v: v[3] / v[4])
        detail += f"; worst k={k} l={l} g={g}: {c} roots > {b}"
    r2 = CriterionResult(2, "delta-bound 2^(omega(k)+1)", not viol, detail, time.perf_counter() - t0)
    return r1, r2


def c3_dirichlet(n: int = 1000, seed: int = 0):
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(n):
        alpha = complex(*rng.random(2))
        tau = float((2, 4, 8)[int(rng.integers(3))])
        ap = dirichlet_approx(alpha, tau)
        r = complex(ap.r.re, ap.r.im)
        ok = (gcd(ap.b, ap.r) == ONE and 0 < abs(r) <= tau
              and abs(ap.z) < 2 / (abs(r) * tau) + 1e-12
              and abs(complex(ap.b.re, ap.b.im) / r + ap.z - alpha) <= 1e-12 * max(1, abs(alpha)))
        bad += not ok
    return bad == 0, f"{bad} violations in {n}"


def c4_dual_form(n: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n):
        Q = int(rng.integers(1, 21))
        N = int(rng.integers(1, 101))
        S = build_set("all", Q)
        seq = make_sequence("random_phase", N, seed=int(rng.integers(2**31)))
        a = lhs_sum(S, seq, "complex_form").value
        b = lhs_sum(S, seq, "r2_form").value
        worst = max(worst, abs(a - b) / max(abs(a), 1e-300))
    return worst < 1e-9, f"max relative difference {worst:.3g}"


def c5_duality(n: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        R = int(rng.integers(1, 11))
        N = int(rng.integers(1, 65))
        worst = max(worst, duality_gap(rng.random((R, 2)), N))
    return worst < 1e-9, f"max gap {worst:.3g}"


def c6_vkernel(n: int = 100, seed: int = 0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n):
        N = (16, 64)[i % 2]
        delta = (1 / 16, 1 / 64)[(i // 2) % 2]
        L = 2 * (math.sqrt(N) + delta**-0.5)
        # half the points inside the support of the closed form
        y = rng.uniform(-1 / L, 1 / L, 2) if i % 4 < 2 else rng.uniform(-0.5, 0.5, 2)
        d, c = v_kernel(y, N, delta)
        worst = max(worst, abs(d - c))
    return worst < 1e-6, f"max |direct - closed| {worst:.3g}"


def c7_r2_sieve(seeds: int = 20):
    worst, worst_ext, n = 0.0, 0.0, 0
    for N in (16, 64, 256):
        for delta in (1 / 16, 1 / 64):
            for R in (5, 20, 50):
                for s in range(seeds):
                    rng = np.random.default_rng([N, int(1 / delta), R, s])
                    pts = rng.random((R, 2))
                    seq = make_sequence("random_phase", N, seed=s)
                    worst = max(worst, theorem5_ratio(pts, seq, delta))
                    worst_ext = max(worst_ext, theorem5_extremal_ratio(pts, N, delta))
                    n += 1
    ok = worst <= R2_SIEVE_CONSTANT and worst_ext <= R2_SIEVE_CONSTANT
    return ok, (f"{n} instances; max ratio {worst:.4g}, max over sequences {worst_ext:.4g}"
                f" <= {R2_SIEVE_CONSTANT}")


def c8_huxley(constants: dict, reports=None):
    reports = reports if reports is not None else huxley_reports()
    cmax = max_ratio(reports, "huxley")
    frozen = constants["C_hux"]
    spikes_bad = 0
    for r in reports:
        if r.seq_kind == "spike":
            S = build_set("all", r.Q)
            spikes_bad += r.lhs != sum(euler_phi(q) for q in S)
    ok = cmax <= frozen * (1 + GOLDEN_TOLERANCE) and spikes_bad == 0
    return ok, (f"max ratio {cmax:.6g} vs frozen C_hux {frozen:.6g} (+5%); "
                f"{spikes_bad} spike mismatches")


def c9_squares(constants: dict, gold: Path, reports=None):
    reports = reports if reports is not None else squares_reports()
    cmax = max_ratio(reports, "thm3")
    frozen = constants["C_sq"]
    text = csv_text(reports)
    golden = (gold / "squares.csv").read_text(encoding="utf-8")
    same = text == golden
    ok = cmax <= frozen * (1 + GOLDEN_TOLERANCE) and same
    return ok, (f"max ratio {cmax:.6g} vs frozen {frozen:.6g} (+5%); golden CSV "
                f"{'identical' if same else 'DIFFERS'}")


def c10_primes(constants: dict, reports=None):
    reports = reports if reports is not None else primes_reports()
    cmax = max_ratio(reports, "thm4")
    frozen = constants["C_pr"]
    return cmax <= frozen * (1 + GOLDEN_TOLERANCE), f"max ratio {cmax:.6g} vs frozen {frozen:.6g} (+5%)"


def c11_brun_titchmarsh():
    rep = brun_titchmarsh_check(10_000, max_k_norm=25, min_ratio=4.0)
    return rep.violations == 0, (f"{rep.violations} violations over {len(rep.rows)} (k,l,u) "
                                 f"with exact sup over y; max count/bound {rep.max_ratio:.3g}; "
                                 f"max N(r)/phi(r)/loglog N(r) {rep.growth_max_ratio:.3g}")


def c12_chain(trials: int = 10):
    configs = [("all", 16, 64), ("all", 25, 256), ("primes", 50, 256), ("squares", 4, 64)]
    bad, total, slack = 0, 0, math.inf
    for j, (kind, Q, N) in enumerate(configs):
        S = build_set(kind, Q)
        n = trials if j == 0 else max(1, trials // 4)
        rep = lemma_chain_check(S, S.norm_bound, N, trials=n, seed=j)
        bad += rep.failures
        total += len(rep.instances)
        slack = min(slack, min(i.bound - i.P for i in rep.instances))
    return bad == 0, f"{bad} failures in {total} instances; min slack {slack:.3g}"


def c13_exact_counters(n: int = 20, seed: int = 0):
    rng = np.random.default_rng(seed)
    k_diff = a_diff = sandwich_bad = 0
    for _ in range(n):
        pts = rng.random((30, 2))
        delta = 1 / 64
        step = math.sqrt(delta) / 50
        exact = count_K(delta, pts)
        grid = oracles.grid_toroidal(pts, delta, step)
        upper = oracles.grid_toroidal(pts, (math.sqrt(delta) + step / math.sqrt(2)) ** 2, step)
        k_diff += exact != grid
        sandwich_bad += not grid <= exact <= upper
    for _ in range(n):
        raw = rng.integers(-10, 11, size=(20, 2))
        S_t = [GaussInt(int(x), int(y)) for x, y in raw]
        u = float(rng.uniform(1.0, 5.0))
        k = (ONE, GaussInt(1, 1), GaussInt(2, 1))[int(rng.integers(3))]
        reduced = residue_system(k).reduced
        l = reduced[int(rng.integers(len(reduced)))]
        bound = None if rng.random() < 0.5 else float(rng.uniform(2.0, 10.0))
        exact = count_A_t(S_t, u, k, l, bound)
        cls = class_filter(S_t, k, l)
        step = u / 50
        grid = oracles.grid_cover(cls, u, step, bound)
        upper = oracles.grid_cover(cls, u + step / math.sqrt(2), step, bound)
        a_diff += exact != grid
        sandwich_bad += not grid <= exact <= upper
    ok = k_diff == 0 and a_diff == 0 and sandwich_bad == 0
    return ok, (f"count_K differs from grid on {k_diff}/{n}, count_A_t on {a_diff}/{n}; "
                f"{sandwich_bad} sandwich violations")


def c14_determinism(first: dict):
    again = {
        "huxley": csv_text(huxley_reports()),
        "squares": csv_text(squares_reports()),
        "primes": csv_text(primes_reports()),
    }
    diff = [k for k in again if again[k] != first[k]]
    return not diff, "all CSV artifacts byte-identical" if not diff else f"differ: {diff}"


# ---------------------------------------------------------------- driver

ALL = tuple(range(1, 15))


def run_all(only=None, out_dir: Path | None = None, gold: Path | None = None, log=print):
    """Run the criteria in ``only`` (default all), writing CSV artifacts to ``out_dir``."""
    only = set(only or ALL)
    gold = gold or golden_dir()
    constants = load_constants(gold)
    results = []

    def emit(res):
        results.append(res)
        if log:
            log(res.line())

    if only & {1, 2}:
        r1, r2 = criterion_1_2()
        for r in (r1, r2):
            if r.number in only:
                emit(r)
    simple = {3: ("Dirichlet approximation", c3_dirichlet), 4: ("dual-form identity", c4_dual_form),
              5: ("duality gap", c5_duality), 6: ("V-kernel Poisson identity", c6_vkernel),
              7: ("R^2 large sieve ratio", c7_r2_sieve)}
    for num, (name, fn) in simple.items():
        if num in only:
            emit(_timed(num, name, fn))
    artifacts = {}
    need = only & {8, 9, 10, 14}
    builders = {8: ("huxley", huxley_reports), 9: ("squares", squares_reports),
                10: ("primes", primes_reports)}
    reports = {}
    for num, (key, build) in builders.items():
        if num in need or 14 in need:
            t0 = time.perf_counter()
            reports[num] = build()
            artifacts[key] = csv_text(reports[num])
            build_time = time.perf_counter() - t0
            if num in only:
                if num == 8:
                    res = _timed(8, "Huxley regression", c8_huxley, constants, reports[8])
                elif num == 9:
                    res = _timed(9, "square moduli", c9_squares, constants, gold, reports[9])
                else:
                    res = _timed(10, "prime moduli", c10_primes, constants, reports[10])
                res.seconds += build_time
                emit(res)
    if out_dir is not None and artifacts:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for key, text in artifacts.items():
            with open(out_dir / f"{key}.csv", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    if 11 in only:
        emit(_timed(11, "Brun-Titchmarsh", c11_brun_titchmarsh))
    if 12 in only:
        emit(_timed(12, "Farey count chain", c12_chain))
    if 13 in only:
        emit(_timed(13, "exact counters vs grid", c13_exact_counters))
    if 14 in only:
        emit(_timed(14, "determinism", c14_determinism, artifacts))
    return results
