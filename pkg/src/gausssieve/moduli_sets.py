"""Sparse moduli sets S, their scaled subsets S_t and the counter A_t."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits
from .gaussint import (
    ONE,
    GaussInt,
    as_array,
    canonical_associate,
    canonical_elements,
    disk_points,
    divides,
    exact_div,
    gcd,
    is_prime,
    residue_classes,
    residue_system,
)
from .geometry import max_disk_cover

KINDS = ("all", "squares", "primes", "custom")


@dataclass(frozen=True)
class ModuliSet:
    """A finite multiset of nonzero moduli.

    ``bound_Q`` is the parameter the set was built from; for ``squares`` the
    elements have norm up to ``bound_Q**2``.  ``norm_bound`` is always the
    norm bound of the elements themselves (the ``Q`` with S in B(0, sqrt Q)).
    """

    kind: str
    bound_Q: int
    elements: tuple[GaussInt, ...]
    norm_bound: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown set kind {self.kind!r}")
        if any(q.is_zero() for q in self.elements):
            raise ValueError("moduli must be nonzero")
        if not self.norm_bound:
            nb = max((q.norm() for q in self.elements), default=1)
            object.__setattr__(self, "norm_bound", nb)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def canonical_only(self) -> "ModuliSet":
        seen = sorted({canonical_associate(q) for q in self.elements}, key=GaussInt.key)
        return ModuliSet("custom", self.bound_Q, tuple(seen), self.norm_bound)

    def array(self) -> np.ndarray:
        return as_array(self.elements)


@dataclass(frozen=True)
class DyadicSlice:
    Q0: float
    elements: tuple[GaussInt, ...] = field(default_factory=tuple)


def build_set(kind: str, Q: int, limits: Limits = DEFAULT_LIMITS,
              elements: Sequence[GaussInt] | None = None) -> ModuliSet:
    """Build one of the standard moduli sets.

    * ``all``: every q with 0 < N(q) <= Q.
    * ``squares``: q^2 for every q with 0 < N(q) <= Q (so each square value
      appears twice, once for q and once for -q).
    * ``primes``: every Gaussian prime with N(p) <= Q, associates included.
    * ``custom``: the given elements, with ``Q`` as their norm bound.
    """
    Q = int(Q)
    if Q < 1:
        raise ValueError("Q must be >= 1")
    if kind == "custom":
        if elements is None:
            raise ValueError("custom sets need elements")
        els = tuple(GaussInt.coerce(e) for e in elements)
        if any(e.norm() > Q for e in els):
            raise ValueError("custom element exceeds the norm bound")
        return ModuliSet("custom", Q, els, Q)
    if kind == "squares":
        if Q * Q > limits.max_set_norm:
            raise BudgetExceeded(f"squares Q={Q} exceeds set cap")
        pts = disk_points(Q, include_zero=False)
        els = tuple(GaussInt(int(s * s - t * t), int(2 * s * t)) for s, t in pts)
        return ModuliSet("squares", Q, els, Q * Q)
    if Q > limits.max_set_norm:
        raise BudgetExceeded(f"Q={Q} exceeds set cap {limits.max_set_norm}")
    pts = disk_points(Q, include_zero=False)
    els = tuple(GaussInt(int(s), int(t)) for s, t in pts)
    if kind == "all":
        return ModuliSet("all", Q, els, Q)
    if kind == "primes":
        return ModuliSet("primes", Q, tuple(z for z in els if is_prime(z)), Q)
    raise ValueError(f"unknown set kind {kind!r}")


def dyadic_slices(S: ModuliSet) -> list[DyadicSlice]:
    """Split S into slices Q0 < N(q) <= 2 Q0 with Q0 = norm_bound / 2^j."""
    out = []
    Q0 = S.norm_bound / 2
    while 2 * Q0 >= 1:
        els = tuple(q for q in S.elements if Q0 < q.norm() <= 2 * Q0)
        out.append(DyadicSlice(Q0, els))
        Q0 /= 2
    return out


def subset_t(S: ModuliSet | Sequence[GaussInt], t) -> list[GaussInt]:
    """The set ``{q : t q in S}`` (distinct values, sorted by key)."""
    t = GaussInt.coerce(t)
    if t.is_zero():
        raise ValueError("t must be nonzero")
    els = S.elements if isinstance(S, ModuliSet) else S
    out = {exact_div(s, t) for s in els if divides(t, s)}
    return sorted(out, key=GaussInt.key)


def class_filter(points: Sequence[GaussInt], k, l) -> np.ndarray:
    """Coordinates of the points congruent to ``l`` modulo ``k``."""
    k = GaussInt.coerce(k)
    l = GaussInt.coerce(l)
    arr = as_array(points)
    if len(arr) == 0:
        return arr.astype(float)
    diff_x = arr[:, 0] - l.re
    diff_y = arr[:, 1] - l.im
    n = k.norm()
    nr = diff_x * k.re + diff_y * k.im
    ni = diff_y * k.re - diff_x * k.im
    keep = (nr % n == 0) & (ni % n == 0)
    return arr[keep].astype(float)


def count_A_t(S_t: Sequence[GaussInt], u: float, k, l, center_bound: float | None) -> int:
    """Max number of q in S_t with q = l (mod k) inside one closed ball B(y, u).

    The supremum runs over centres with ``|y| <= center_bound``
    (``None`` = unrestricted) and is computed exactly.
    """
    k = GaussInt.coerce(k)
    l = GaussInt.coerce(l)
    if k.is_zero():
        raise ValueError("k must be nonzero")
    if gcd(k, l) != ONE:
        raise ValueError(f"gcd({k}, {l}) != 1")
    if u < 0:
        raise ValueError("u must be nonnegative")
    pts = class_filter(S_t, k, l)
    return max_disk_cover(pts, u, center_bound).count


def counts_by_class(S_t: Sequence[GaussInt], u: float, k, center_bound: float | None) -> dict:
    """``count_A_t`` for every reduced class ``l`` mod ``k`` at once.

    Keys are the divrem-reduced representatives.
    """
    k = GaussInt.coerce(k)
    rs = residue_system(k)
    arr = as_array(S_t)
    out = {}
    if len(arr) == 0:
        return {r: 0 for r in rs.reduced}
    idx = residue_classes(arr, k)
    for j, (r, ok) in enumerate(zip(rs.representatives, rs.reduced_mask)):
        if ok:
            out[r] = max_disk_cover(arr[idx == j].astype(float), u, center_bound).count
    return out


@dataclass
class ConditionReport:
    X: float
    grid: dict
    rows: list  # (t, k, u, worst_l, A clamped, A unclamped, expected)
    envelope: int  # max 2^(omega(k)+1) over the sampled k


def min_X_condition11(S: ModuliSet, N: float, u_samples: int = 6,
                      max_k_norm: int | None = None) -> ConditionReport:
    """Smallest X >= 1 for which the well-distribution condition holds on a grid.

    The condition is A_t(u,k,l) <= (1 + |S_t| u^2 |t|^2 / (N(k) Q)) X, sampled
    over canonical t with |t| <= N^(1/4), canonical k with
    |k| <= N^(1/4)/|t|, every reduced l mod k and ``u_samples`` log-spaced
    radii between |k| sqrt(Q) / (2 N^(1/4)) and sqrt(Q)/|t|.
    """
    from .gaussint import omega

    Q = S.norm_bound
    n14 = N ** 0.25
    X = 1.0
    rows = []
    envelope = 1
    for t in canonical_elements(int(math.floor(n14**2))):
        S_t = subset_t(S, t)
        if not S_t:
            continue
        at = abs(t)
        kmax = (n14 / at) ** 2
        if max_k_norm is not None:
            kmax = min(kmax, max_k_norm)
        for k in canonical_elements(int(math.floor(kmax + 1e-9))):
            envelope = max(envelope, 2 ** (omega(k) + 1))
            lo = abs(k) * math.sqrt(Q) / (2 * n14)
            hi = math.sqrt(Q) / at
            if lo > hi:
                continue
            us = [hi] if u_samples < 2 or lo == hi else list(np.geomspace(lo, hi, u_samples))
            for u in us:
                counts = counts_by_class(S_t, u, k, math.sqrt(Q) / at)
                expected = 1 + len(S_t) * u * u * at * at / (k.norm() * Q)
                l_best, a_best = max(counts.items(), key=lambda kv: (kv[1], -kv[0].norm()))
                a_free = count_A_t(S_t, u, k, l_best, None)
                rows.append((t, k, float(u), l_best, a_best, a_free, expected))
                X = max(X, a_best / expected)
    grid = {"t_max_abs": n14, "u_samples": u_samples, "Q": Q, "N": N}
    return ConditionReport(X=X, grid=grid, rows=rows, envelope=envelope)
