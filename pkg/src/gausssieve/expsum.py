"""Coefficient sequences, the exponential sum S(alpha) and the sums over Farey nodes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits
from .farey import farey_arrays, farey_count
from .gaussint import GaussInt, disk_points
from .moduli_sets import ModuliSet

SEQ_KINDS = ("ones", "random_phase", "random_gaussian", "spike", "custom")
MODES = ("complex_form", "r2_form", "fft", "auto")

TWO_PI = 2.0 * math.pi
_CHUNK_ELEMS = 1 << 21


@dataclass(frozen=True, eq=False)
class CoefficientSequence:
    """Coefficients a_n on the disk N(n) <= N, stored in lexicographic order of n."""

    N: int
    points: np.ndarray  # (D, 2) int64
    values: np.ndarray  # (D,) complex128
    kind: str
    seed: int = 0
    include_zero: bool = True

    def __post_init__(self):
        if self.points.shape != (len(self.values), 2):
            raise ValueError("points and values disagree in length")

    def __len__(self):
        return len(self.values)

    @property
    def entries(self) -> dict:
        return {GaussInt(int(s), int(t)): complex(v) for (s, t), v in zip(self.points, self.values)}

    def scaled(self, c: complex) -> "CoefficientSequence":
        return CoefficientSequence(self.N, self.points, self.values * c, self.kind, self.seed,
                                   self.include_zero)


def make_sequence(kind: str, N: int, seed: int = 0, include_zero: bool = True,
                  values=None, limits: Limits = DEFAULT_LIMITS) -> CoefficientSequence:
    """Deterministic test sequence of the given kind on N(n) <= N.

    ``spike`` puts a single 1 at a seeded position of the support; ``custom``
    takes ``values`` in lexicographic order of the support.
    """
    if kind not in SEQ_KINDS:
        raise ValueError(f"unknown sequence kind {kind!r}")
    N = int(N)
    if N < 0:
        raise ValueError("N must be nonnegative")
    pts = disk_points(N, include_zero=include_zero)
    D = len(pts)
    if D > limits.max_support:
        raise BudgetExceeded(f"support {D} exceeds cap {limits.max_support}")
    rng = np.random.default_rng(seed)
    if kind == "ones":
        vals = np.ones(D, dtype=complex)
    elif kind == "random_phase":
        vals = np.exp(1j * TWO_PI * rng.random(D))
    elif kind == "random_gaussian":
        vals = (rng.standard_normal(D) + 1j * rng.standard_normal(D)) / math.sqrt(2)
    elif kind == "spike":
        vals = np.zeros(D, dtype=complex)
        if D:
            vals[int(rng.integers(D))] = 1.0
    else:
        if values is None:
            raise ValueError("custom sequences need values")
        vals = np.asarray(values, dtype=complex).ravel()
        if len(vals) != D:
            raise ValueError(f"expected {D} values, got {len(vals)}")
    vals = np.ascontiguousarray(vals, dtype=complex)
    vals.setflags(write=False)
    return CoefficientSequence(N, pts, vals, kind, int(seed), include_zero)


def _fsum_complex(z: np.ndarray) -> complex:
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


def eval_S(seq: CoefficientSequence, alpha: complex) -> complex:
    """S(alpha) = sum_n a_n e(Re(n alpha)), compensated, in lexicographic order."""
    alpha = complex(alpha)
    s = seq.points[:, 0].astype(float)
    t = seq.points[:, 1].astype(float)
    terms = seq.values * np.exp(1j * TWO_PI * (s * alpha.real - t * alpha.imag))
    return _fsum_complex(terms)


def compute_Z(seq: CoefficientSequence) -> float:
    return math.fsum((np.abs(seq.values) ** 2).tolist())


@dataclass
class LhsResult:
    value: float
    node_count: int
    Z: float
    evaluation_mode: str
    max_term: float = 0.0
    terms: np.ndarray | None = field(default=None, repr=False)


def _complex_terms(a: np.ndarray, q: np.ndarray, seq: CoefficientSequence) -> np.ndarray:
    # alpha = a/q as a floating-point complex number
    alpha = (a[:, 0] + 1j * a[:, 1]) / (q[:, 0] + 1j * q[:, 1])
    s = seq.points[:, 0].astype(float)
    t = seq.points[:, 1].astype(float)
    out = np.empty(len(a), dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(1, len(s)))
    for lo in range(0, len(a), step):
        al = alpha[lo:lo + step]
        ph = np.outer(al.real, s) - np.outer(al.imag, t)
        out[lo:lo + step] = (np.exp(1j * TWO_PI * ph) * seq.values).sum(axis=1)
    return out


def _r2_terms(a: np.ndarray, q: np.ndarray, seq: CoefficientSequence) -> np.ndarray:
    # exact integer phase numerators s (xu + yv) + t (xv - yu) modulo N(q)
    x, y = a[:, 0], a[:, 1]
    u, v = q[:, 0], q[:, 1]
    M = u * u + v * v
    X = x * u + y * v
    Y = x * v - y * u
    s, t = seq.points[:, 0], seq.points[:, 1]
    out = np.empty(len(a), dtype=complex)
    step = max(1, _CHUNK_ELEMS // max(1, len(s)))
    for lo in range(0, len(a), step):
        sl = slice(lo, lo + step)
        m = M[sl, None]
        num = (np.outer(X[sl], s) + np.outer(Y[sl], t)) % m
        out[sl] = (np.exp(1j * TWO_PI * (num / m)) * seq.values).sum(axis=1)
    return out


def _fft_terms(a: np.ndarray, q: np.ndarray, seq: CoefficientSequence) -> np.ndarray:
    # phase (s wr - t wi) / M with w = a conj(q); one M x M transform per norm
    x, y = a[:, 0], a[:, 1]
    u, v = q[:, 0], q[:, 1]
    M = u * u + v * v
    wr = x * u + y * v
    wi = y * u - x * v
    s, t = seq.points[:, 0], seq.points[:, 1]
    out = np.empty(len(a), dtype=complex)
    for m in np.unique(M):
        m = int(m)
        idx = np.nonzero(M == m)[0]
        grid = np.zeros((m, m), dtype=complex)
        np.add.at(grid, (s % m, (-t) % m), seq.values)
        F = np.fft.ifft2(grid) * (m * m)
        out[idx] = F[wr[idx] % m, wi[idx] % m]
    return out


def _pick_mode(q: np.ndarray, n_nodes: int, D: int, limits: Limits) -> str:
    if n_nodes == 0:
        return "complex_form"
    norms = np.unique(q[:, 0] ** 2 + q[:, 1] ** 2)
    if int(norms.max()) <= limits.max_fft_side:
        fft_cost = float((norms.astype(float) ** 2 * np.log2(norms + 2.0)).sum()) + n_nodes
        if fft_cost < float(n_nodes) * D:
            return "fft"
    return "complex_form"


def node_values(S: ModuliSet, seq: CoefficientSequence, mode: str = "auto",
                limits: Limits = DEFAULT_LIMITS):
    """S(a/q) for every Farey node, in enumeration order, and the mode used."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    a, q = farey_arrays(S, limits)
    D = len(seq)
    if mode == "auto":
        mode = _pick_mode(q, len(a), D, limits)
    if mode == "fft":
        if len(a) and int((q[:, 0] ** 2 + q[:, 1] ** 2).max()) > limits.max_fft_side:
            raise BudgetExceeded("norm exceeds the FFT side cap")
    elif len(a) * D > limits.max_direct_work:
        raise BudgetExceeded(f"direct work {len(a) * D} exceeds cap {limits.max_direct_work}")
    if len(a) == 0 or D == 0:
        return np.zeros(len(a), dtype=complex), mode
    fn = {"complex_form": _complex_terms, "r2_form": _r2_terms, "fft": _fft_terms}[mode]
    return fn(a, q, seq), mode


def lhs_sum(S: ModuliSet, seq: CoefficientSequence, mode: str = "auto",
            limits: Limits = DEFAULT_LIMITS, keep_terms: bool = False) -> LhsResult:
    """U = sum over q in S and reduced a mod q of |S(a/q)|^2.

    In ``auto`` mode a sequence with at most one nonzero coefficient a_n is
    summed exactly: every node then has |S(a/q)|^2 = |a_n|^2.
    """
    nz = np.flatnonzero(seq.values)
    if mode == "auto" and len(nz) <= 1:
        n_nodes = farey_count(S)
        if n_nodes > limits.max_farey_nodes:
            raise BudgetExceeded(f"{n_nodes} Farey nodes exceed cap {limits.max_farey_nodes}")
        mag = abs(seq.values[nz[0]]) ** 2 if len(nz) else 0.0
        terms, used = np.full(n_nodes, mag), "single_term"
    else:
        vals, used = node_values(S, seq, mode, limits)
        terms = vals.real ** 2 + vals.imag ** 2
    value = math.fsum(terms.tolist())
    return LhsResult(
        value=value, node_count=len(terms), Z=compute_Z(seq), evaluation_mode=used,
        max_term=float(terms.max()) if len(terms) else 0.0,
        terms=terms if keep_terms else None,
    )


def extremal_lhs(S: ModuliSet, N: int, include_zero: bool = True, tol: float = 1e-10,
                 max_iter: int = 10_000, seed: int = 0, limits: Limits = DEFAULT_LIMITS):
    """Largest U/Z over all sequences on N(n) <= N, with a maximising sequence.

    Power iteration on C^H C where C is the node-by-support matrix of
    characters e(Re(n a/q)).
    """
    a, q = farey_arrays(S, limits)
    pts = disk_points(N, include_zero=include_zero)
    if len(a) * len(pts) > limits.max_direct_work // 4:
        raise BudgetExceeded("extremal matrix exceeds the direct work cap")
    x, y = a[:, 0], a[:, 1]
    u, v = q[:, 0], q[:, 1]
    M = u * u + v * v
    num = (np.outer(x * u + y * v, pts[:, 0]) + np.outer(x * v - y * u, pts[:, 1])) % M[:, None]
    C = np.exp(1j * TWO_PI * (num / M[:, None]))
    from .lsr2 import power_iteration

    lam, vec = power_iteration(lambda w: C.conj().T @ (C @ w), len(pts), tol=tol,
                               max_iter=max_iter, seed=seed)
    seq = make_sequence("custom", N, include_zero=include_zero, values=vec, limits=limits)
    return lam, seq
