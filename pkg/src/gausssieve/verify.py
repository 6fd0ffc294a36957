"""Right-hand sides of the sieve bounds, the experiment runner and the counting checks."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_LIMITS, Limits
from .expsum import lhs_sum, make_sequence
from .farey import count_P
from .gaussint import (
    ONE,
    GaussInt,
    as_array,
    canonical_elements,
    disk_points,
    divisible_arrays,
    divisors_non_associate,
    euler_phi,
    exact_div,
    factor,
    inverse_mod,
    is_prime,
    reduced_residue_array,
    residue_classes,
    residue_system,
)
from .geometry import max_disk_cover
from .moduli_sets import ModuliSet, build_set, counts_by_class, min_X_condition11, subset_t

BOUND_NAMES = ("huxley", "trivial", "thm1_sampled", "thm2", "thm3", "thm4")


@dataclass(frozen=True)
class BoundSpec:
    name: str
    Q: float
    N: float
    epsilon: float = 0.05
    X: float = 1.0
    set_size: int = 0
    delta: float = 0.5

    def __post_init__(self):
        if self.name not in BOUND_NAMES:
            raise ValueError(f"unknown bound {self.name!r}")
        if self.Q <= 0 or self.N <= 0 or self.X <= 0:
            raise ValueError("Q, N and X must be positive")
        if not 0 <= self.epsilon <= 0.25:
            raise ValueError("epsilon must lie in [0, 0.25]")
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie in (0, 1)")


def rhs_bound(spec: BoundSpec, value: float | None = None) -> float:
    """The bound's expression with unit constant.

    ``thm1_sampled`` has no closed form; pass the sampled value through
    ``value`` (see :func:`theorem1_rhs_sampled`).
    """
    Q, N, eps = float(spec.Q), float(spec.N), spec.epsilon
    if spec.name in ("huxley", "trivial"):
        return Q * Q + N
    if spec.name == "thm2":
        return N + Q * spec.X * N**eps * (math.sqrt(N) + spec.set_size)
    if spec.name == "thm3":
        return (Q * N) ** eps * (Q**3 + Q * Q * math.sqrt(N) + N)
    if spec.name == "thm4":
        if Q < 16:
            raise ValueError("the prime bound needs Q >= 16")
        return Q * Q * math.log(math.log(Q)) / ((1 - spec.delta) * math.log(Q))
    if value is None:
        raise ValueError("thm1_sampled needs a sampled value")
    return float(value)


# ---------------------------------------------------------------- sampled supremum bound


def _punctured_disk(radius: float) -> np.ndarray:
    if radius < 1:
        return np.empty((0, 2), dtype=np.int64)
    return disk_points(radius * radius * (1 + 1e-12), include_zero=False)


def _class_weights(m_pts: np.ndarray, k: GaussInt) -> np.ndarray:
    """Number of m in ``m_pts`` coprime to k in each residue class mod k."""
    rs = residue_system(k)
    n = len(rs.representatives)
    if len(m_pts) == 0:
        return np.zeros(n, dtype=np.int64)
    if not k.is_unit():
        ok = np.ones(len(m_pts), dtype=bool)
        for p, _ in factor(k).factors:
            ok &= ~divisible_arrays(m_pts[:, 0], m_pts[:, 1], p)
        m_pts = m_pts[ok]
    idx = residue_classes(m_pts, k)
    return np.bincount(idx, minlength=n)


def _multiplier_table(k: GaussInt, h: GaussInt) -> np.ndarray:
    """Index of h*c mod k for every representative c mod k."""
    reps = as_array(residue_system(k).representatives)
    x = h.re * reps[:, 0] - h.im * reps[:, 1]
    y = h.re * reps[:, 1] + h.im * reps[:, 0]
    return residue_classes(np.stack([x, y], axis=1), k)


def _radius_grid(lo: float, hi: float, level: int) -> np.ndarray:
    if lo > hi:
        return np.empty(0)
    if lo == hi:
        return np.array([lo])
    return np.geomspace(lo, hi, 2**level + 1)


@dataclass
class SupSample:
    value: float  # N (1 + sup)
    sup: float
    argmax: tuple  # (r, |z|, h)
    evaluations: int
    lower_bound: bool = True


def sup_inner(S: ModuliSet, r: GaussInt, zabs: float, N: float, Q: float | None = None,
              max_h: int | None = None, b: GaussInt | None = None,
              u_override: float | None = None):
    """max over h (or the single h = -conj(b)) of sum_{t|r} sum_m A_t(u_t, r/t, h m).

    Returns (best value, best h).  ``u_override`` replaces sqrt(Q)/(sqrt(N)|z||t|)
    by u_override/|t|.
    """
    if Q is None:
        Q = S.norm_bound
    sq = math.sqrt(Q)
    terms = []  # (k, weights, A array indexed like residue_system(k))
    for t in divisors_non_associate(r):
        k = exact_div(r, t)
        at = abs(complex(t.re, t.im))
        S_t = subset_t(S, t)
        m_pts = _punctured_disk(3 * abs(complex(r.re, r.im)) * zabs * sq / at)
        w = _class_weights(m_pts, k)
        if not S_t or not w.any():
            continue
        u = (u_override if u_override is not None else sq / (math.sqrt(N) * zabs)) / at
        counts = counts_by_class(S_t, u, k, sq / at)
        rs = residue_system(k)
        A = np.zeros(len(rs.representatives), dtype=np.int64)
        for j, rep in enumerate(rs.representatives):
            if rs.reduced_mask[j]:
                A[j] = counts[rep]
        terms.append((k, w, A))
    if not terms:
        return 0.0, ONE
    if b is not None:
        hs = [-inverse_mod(b, r)] if not r.is_unit() else [ONE]
    else:
        hs = [GaussInt(int(x), int(y)) for x, y in reduced_residue_array(r)]
        if max_h is not None:
            hs = hs[:max_h]
    best, best_h = -1.0, ONE
    for h in hs:
        total = 0
        for k, w, A in terms:
            total += int((w * A[_multiplier_table(k, h)]).sum())
        if total > best:
            best, best_h = float(total), h
    return best, best_h


def theorem1_rhs_sampled(S: ModuliSet, N: float, samples: int = 2, max_h: int | None = 64,
                         detail: bool = False):
    """Sampled lower estimate of N (1 + sup_{r,z,h} sum_t sum_m A_t(...)).

    r runs over canonical 1 <= |r| <= N^(1/4); |z| over 2^samples + 1
    log-spaced radii in [N^(-1/2), 2/(|r| N^(1/4))] (the summand depends on z
    only through |z|; the grids are nested so the value is nondecreasing in
    ``samples``); h over the first ``max_h`` reduced residues mod r.
    """
    N = float(N)
    best, arg, evals = 0.0, None, 0
    if len(S):
        n14 = N**0.25
        for r in canonical_elements(int(math.floor(n14 * n14 + 1e-9))):
            ar = abs(complex(r.re, r.im))
            for zabs in _radius_grid(N**-0.5, 2 / (ar * n14), samples):
                val, h = sup_inner(S, r, float(zabs), N, max_h=max_h)
                evals += 1
                if val > best:
                    best, arg = val, (r, float(zabs), h)
    out = SupSample(value=N * (1 + best), sup=best, argmax=arg, evaluations=evals)
    return out if detail else out.value


# ---------------------------------------------------------------- runner


@dataclass
class SieveReport:
    set_kind: str
    Q: int
    N: int
    seq_kind: str
    seed: int
    lhs: float
    Z: float
    farey_node_count: int
    rhs: dict = field(default_factory=dict)
    ratio: dict = field(default_factory=dict)
    mode: str = ""
    wall_time: float = 0.0

    def rows(self):
        for name in sorted(self.rhs):
            yield name, self.rhs[name], self.ratio[name]


def make_bound(name: str, S: ModuliSet, N: float, epsilon: float = 0.05, delta: float = 0.5,
               X: float | None = None) -> BoundSpec:
    """BoundSpec for ``name`` with the Q convention of that bound.

    huxley, trivial and thm2 use the norm bound of the moduli themselves
    (Q^2 for squares); thm3 and thm4 use the parameter the set was built from.
    """
    if name in ("thm3", "thm4"):
        Q = S.bound_Q
    else:
        Q = S.norm_bound
    if name == "thm2" and X is None:
        X = min_X_condition11(S, N).X
    return BoundSpec(name, Q, N, epsilon=epsilon, X=X or 1.0, set_size=len(S), delta=delta)


def run_experiment(kind: str, Q: int, N: int, seq_kind: str, seed: int, bounds=("huxley",),
                   epsilon: float = 0.05, delta: float = 0.5, include_zero: bool = True,
                   mode: str = "auto", limits: Limits = DEFAULT_LIMITS, thm1_samples: int = 2,
                   moduli: ModuliSet | None = None) -> SieveReport:
    t0 = time.perf_counter()
    S = moduli if moduli is not None else build_set(kind, Q, limits)
    seq = make_sequence(seq_kind, N, seed, include_zero=include_zero, limits=limits)
    res = lhs_sum(S, seq, mode, limits)
    rep = SieveReport(kind, int(Q), int(N), seq_kind, int(seed), res.value, res.Z,
                      res.node_count, mode=res.evaluation_mode)
    for b in bounds:
        spec = b if isinstance(b, BoundSpec) else None
        name = spec.name if spec else b
        if spec is None:
            spec = make_bound(name, S, N, epsilon, delta)
        extra = theorem1_rhs_sampled(S, N, thm1_samples) if name == "thm1_sampled" else None
        rhs = rhs_bound(spec, extra)
        rep.rhs[name] = rhs
        rep.ratio[name] = res.value / (rhs * res.Z) if res.Z > 0 else 0.0
    rep.wall_time = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------- Farey count chain


def _grid_count(lo, hi, h, disks) -> int:
    """Number of points of h Z^2 in the box [lo, hi] lying in every disk (c, rho)."""
    ix = np.arange(math.ceil(lo[0] / h), math.floor(hi[0] / h) + 1)
    iy = np.arange(math.ceil(lo[1] / h), math.floor(hi[1] / h) + 1)
    if len(ix) == 0 or len(iy) == 0:
        return 0
    X, Y = np.meshgrid(ix * h, iy * h, indexing="ij")
    inside = np.ones(X.shape, dtype=bool)
    for (cx, cy), rho in disks:
        inside &= (X - cx) ** 2 + (Y - cy) ** 2 <= rho * rho
    return int(inside.sum())


@dataclass
class ChainInstance:
    b: GaussInt
    r: GaussInt
    z: complex
    Delta: float
    delta: float
    P: int
    integral: float
    error: float
    pairs: int
    bound: float  # 16 + 4/(pi delta) (integral + error)
    holds: bool
    class_majorant: float
    majorant_ratio: float


@dataclass
class ChainReport:
    S_kind: str
    Q: float
    N: float
    instances: list
    failures: int


def chain_instance(S: ModuliSet, b: GaussInt, r: GaussInt, z: complex, Delta: float,
                   resolution: int = 32) -> ChainInstance:
    """P(b/r + z) against 16 + 4/(pi delta) times the integral of Pi(y, delta).

    delta = Q Delta / |z|^2.  For each pair (q, m) the y-region is the convex
    set B(q, delta^(1/2)) n B(m/(rz), 2 delta^(1/2)) n B(0, sqrt Q); its area
    is estimated by counting points of h Z^2, h = delta^(1/2)/resolution, with
    the lattice-point error |h^2 G - A| <= h Per/2 + h^2, Per <= 2 pi delta^(1/2).
    """
    Q = float(S.norm_bound)
    z = complex(z)
    zabs = abs(z)
    if zabs < math.sqrt(Delta) * (1 - 1e-12):
        raise ValueError("|z| must be at least Delta^(1/2)")
    delta = Q * Delta / zabs**2
    sd = math.sqrt(delta)
    cr = complex(r.re, r.im)
    alpha = complex(b.re, b.im) / cr + z
    P = count_P(alpha, Delta, S)
    rz = cr * z
    h = sd / resolution
    sQ = math.sqrt(Q)
    integral_pts = 0
    pairs = 0
    nr = r.norm()
    for q in S.elements:
        cq = complex(q.re, q.im)
        c = rz * cq
        rho = 3 * abs(rz) * sd
        xs = np.arange(math.floor(c.real - rho), math.ceil(c.real + rho) + 1)
        ys = np.arange(math.floor(c.imag - rho), math.ceil(c.imag + rho) + 1)
        MX, MY = np.meshgrid(xs, ys, indexing="ij")
        MX, MY = MX.ravel(), MY.ravel()
        keep = ((MX - c.real) ** 2 + (MY - c.imag) ** 2 <= rho * rho * (1 + 1e-12)) & ((MX != 0) | (MY != 0))
        MX, MY = MX[keep].astype(np.int64), MY[keep].astype(np.int64)
        # m = -b q (mod r)
        bq = b * q
        DX, DY = MX + bq.re, MY + bq.im
        cong = divisible_arrays(DX, DY, r) if nr > 1 else np.ones(len(MX), dtype=bool)
        for mx, my in zip(MX[cong], MY[cong]):
            cm = complex(int(mx), int(my)) / rz
            disks = [((cq.real, cq.imag), sd), ((cm.real, cm.imag), 2 * sd), ((0.0, 0.0), sQ)]
            lo = (cq.real - sd, cq.imag - sd)
            hi = (cq.real + sd, cq.imag + sd)
            integral_pts += _grid_count(lo, hi, h, disks)
            pairs += 1
    integral = integral_pts * h * h
    error = pairs * (h * math.pi * sd + h * h)
    bound = 16 + 4 / (math.pi * delta) * (integral + error)
    maj = class_majorant(S, b, r, z, Delta)
    return ChainInstance(
        b=b, r=r, z=z, Delta=Delta, delta=delta, P=P, integral=integral, error=error,
        pairs=pairs, bound=bound, holds=P <= bound, class_majorant=maj,
        majorant_ratio=P / maj if maj > 0 else math.inf,
    )


def class_majorant(S: ModuliSet, b: GaussInt, r: GaussInt, z: complex, Delta: float) -> float:
    """16 + sum_{t|r} sum_m A_t(sqrt(Q Delta)/(|z||t|), r/t, -conj(b) m), conj(b) b = 1 mod r."""
    Q = float(S.norm_bound)
    zabs = abs(complex(z))
    val, _ = sup_inner(S, r, zabs, 1.0, Q=Q, b=b, u_override=math.sqrt(Q * Delta) / zabs)
    return 16.0 + val


def sample_admissible(r_max_abs: float, Delta: float, rng) -> tuple:
    """Random (b, r, z) with 1 <= |r| <= tau, (b, r) = 1 and Delta^(1/2) <= |z| <= 2/(|r| tau)."""
    tau = Delta**-0.25
    rs = [r for r in canonical_elements(int(math.floor(min(tau, r_max_abs) ** 2 + 1e-9)))
          if math.sqrt(Delta) <= 2 / (abs(complex(r.re, r.im)) * tau)]
    r = rs[int(rng.integers(len(rs)))]
    reduced = reduced_residue_array(r)
    bx, by = reduced[int(rng.integers(len(reduced)))]
    b = GaussInt(int(bx), int(by))
    lo, hi = math.sqrt(Delta), 2 / (abs(complex(r.re, r.im)) * tau)
    zabs = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    theta = rng.uniform(0, 2 * math.pi)
    return b, r, zabs * complex(math.cos(theta), math.sin(theta))


def lemma_chain_check(S: ModuliSet, Q: float, N: float, trials: int = 10, seed: int = 0,
                      resolution: int = 32) -> ChainReport:
    """The Farey count chain on ``trials`` random admissible (b, r, z) with Delta = 1/N."""
    if float(Q) != float(S.norm_bound):
        S = ModuliSet(S.kind, S.bound_Q, S.elements, int(Q))
    rng = np.random.default_rng(seed)
    Delta = 1.0 / N
    out = []
    for _ in range(trials):
        b, r, z = sample_admissible(N**0.25, Delta, rng)
        out.append(chain_instance(S, b, r, z, Delta, resolution))
    return ChainReport(S.kind, float(Q), float(N), out, sum(not i.holds for i in out))


# ---------------------------------------------------------------- Brun-Titchmarsh


def bt_bound(u: float, k: GaussInt) -> float:
    ratio = u * u / k.norm()
    if ratio <= 1:
        raise ValueError("u^2/N(k) must exceed 1")
    return (2**5 / math.pi) * u * u / (euler_phi(k) * math.log(ratio))


@dataclass
class BTRow:
    k: GaussInt
    l: GaussInt
    u: float
    count: int
    center: tuple
    bound: float
    holds: bool


@dataclass
class BTReport:
    Q: int
    rows: list
    violations: int
    max_ratio: float
    growth: list  # (r, N(r)/phi(r), log log N(r))
    growth_max_ratio: float


def prime_points(Q: int) -> np.ndarray:
    pts = disk_points(Q, include_zero=False)
    keep = [is_prime(GaussInt(int(x), int(y))) for x, y in pts]
    return pts[np.array(keep, dtype=bool)]


def brun_titchmarsh_check(Q: int = 10_000, configs=None, max_k_norm: int = 25, min_ratio: float = 4.0,
                          u_values=None, growth_norm: int | None = None) -> BTReport:
    """Primes = l (mod k) in B(y, u) against (2^5/pi) u^2 / (phi(k) log(u^2/N(k))).

    ``configs`` is a list of (k, l, u, y); y = None takes the exact supremum
    over all centres whose ball stays inside the tabulated disk N(p) <= Q.
    Without configs every canonical k with N(k) <= max_k_norm, every reduced
    l and every u in ``u_values`` with u^2/N(k) >= min_ratio is used.
    """
    primes = prime_points(Q)
    pf = primes.astype(float)
    R = math.sqrt(Q)
    if configs is None:
        if u_values is None:
            u_values = (2.0, 3.0, 5.0, 8.0, 12.0, 20.0, 30.0, 45.0)
        configs = []
        for k in canonical_elements(max_k_norm):
            for l in residue_system(k).reduced:
                for u in u_values:
                    if u * u / k.norm() >= min_ratio:
                        configs.append((k, l, float(u), None))
    rows = []
    cls_cache: dict = {}
    for k, l, u, y in configs:
        k, l = GaussInt.coerce(k), GaussInt.coerce(l)
        if u * u / k.norm() <= 1:
            raise ValueError("u^2/N(k) must exceed 1")
        key = (k, l)
        if key not in cls_cache:
            if k.is_unit():
                cls_cache[key] = pf
            else:
                dx, dy = primes[:, 0] - l.re, primes[:, 1] - l.im
                cls_cache[key] = pf[divisible_arrays(dx, dy, k)]
        pts = cls_cache[key]
        if y is None:
            cov = max_disk_cover(pts, u, max(R - u, 0.0))
            count, center = cov.count, cov.center
        else:
            y = complex(y)
            d2 = (pts[:, 0] - y.real) ** 2 + (pts[:, 1] - y.imag) ** 2
            count, center = int((d2 <= u * u * (1 + 1e-12)).sum()), (y.real, y.imag)
        bound = bt_bound(u, k)
        rows.append(BTRow(k, l, u, count, center, bound, count <= bound))
    growth = []
    gmax = 0.0
    gn = growth_norm if growth_norm is not None else Q
    for r in canonical_elements(gn):
        n = r.norm()
        if n < 16:
            continue
        ratio = n / euler_phi(r)
        ll = math.log(math.log(n))
        growth.append((r, ratio, ll))
        gmax = max(gmax, ratio / ll)
    viol = sum(not row.holds for row in rows)
    mr = max((row.count / row.bound for row in rows), default=0.0)
    return BTReport(Q, rows, viol, mr, growth, gmax)


# ---------------------------------------------------------------- CSV

CSV_HEADER = "set,Q,N,seq,seed,nodes,Z,lhs,bound,rhs,ratio,seconds"


def _num(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def csv_text(reports, timings: bool = False) -> str:
    """One row per (report, bound), sorted by (set, Q, N, bound, seq, seed).

    The seconds column is left empty unless ``timings`` is set, so that
    reruns are byte-identical.
    """
    rows = []
    for rep in reports:
        for name, rhs, ratio in rep.rows():
            key = (rep.set_kind, rep.Q, rep.N, name, rep.seq_kind, rep.seed)
            cells = [rep.set_kind, _num(rep.Q), _num(rep.N), rep.seq_kind, _num(rep.seed),
                     _num(rep.farey_node_count), _num(rep.Z), _num(rep.lhs), name, _num(rhs),
                     _num(ratio), format(rep.wall_time, ".6f") if timings else ""]
            rows.append((key, ",".join(cells)))
    rows.sort(key=lambda kr: kr[0])
    return "\n".join([CSV_HEADER] + [r for _, r in rows]) + "\n"
