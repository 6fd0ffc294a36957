"""Exact arithmetic in the Gaussian integers Z[i].

Everything here is pure and works on immutable values.  ``GaussInt`` keeps
both coordinates inside the signed 32-bit range so that norms always fit in
a signed 64-bit integer; anything larger is rejected at construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits

COMPONENT_MAX = 2**31 - 1


class GaussInt:
    """A Gaussian integer ``re + im*i`` with bounded components."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        re = int(re)
        im = int(im)
        if not (-COMPONENT_MAX <= re <= COMPONENT_MAX and -COMPONENT_MAX <= im <= COMPONENT_MAX):
            raise OverflowError(f"component out of range: ({re}, {im})")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    def __setattr__(self, name, value):
        raise AttributeError("GaussInt is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussInt":
        if isinstance(value, GaussInt):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value), 0)
        if isinstance(value, tuple) and len(value) == 2:
            return cls(*value)
        if isinstance(value, complex) and value.real.is_integer() and value.imag.is_integer():
            return cls(int(value.real), int(value.imag))
        raise TypeError(f"cannot interpret {value!r} as a Gaussian integer")

    # arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussInt(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussInt(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussInt(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussInt(self.re * other.re - self.im * other.im,
                        self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __neg__(self):
        return GaussInt(-self.re, -self.im)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    # comparison / hashing ----------------------------------------------

    def __eq__(self, other):
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def key(self) -> tuple[int, int, int]:
        """Sort key: norm first, then coordinates."""
        return (self.norm(), self.re, self.im)

    def __complex__(self):
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(complex(self.re, self.im))

    def __iter__(self):
        yield self.re
        yield self.im

    def __repr__(self):
        return f"GaussInt({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __reduce__(self):
        return (GaussInt, (self.re, self.im))


def _maybe(value):
    if isinstance(value, GaussInt):
        return value
    if isinstance(value, (int, np.integer)):
        return GaussInt(int(value), 0)
    return None


ZERO = GaussInt(0, 0)
ONE = GaussInt(1, 0)
I = GaussInt(0, 1)
UNITS = (ONE, I, GaussInt(-1, 0), GaussInt(0, -1))
ONE_PLUS_I = GaussInt(1, 1)


@dataclass(frozen=True)
class Factorization:
    unit: GaussInt
    factors: tuple[tuple[GaussInt, int], ...]

    def value(self) -> GaussInt:
        out = self.unit
        for p, e in self.factors:
            out = out * p**e
        return out

    @property
    def omega(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class ResidueSystem:
    modulus: GaussInt
    representatives: tuple[GaussInt, ...]
    reduced_mask: tuple[bool, ...]

    @property
    def reduced(self) -> list[GaussInt]:
        return [r for r, ok in zip(self.representatives, self.reduced_mask) if ok]

    def index_of(self, z: GaussInt) -> int:
        return self._index()[rem(z, self.modulus)]

    def _index(self) -> dict:
        idx = self.__dict__.get("_idx")
        if idx is None:
            idx = {r: j for j, r in enumerate(self.representatives)}
            object.__setattr__(self, "_idx", idx)
        return idx


def norm(z) -> int:
    return GaussInt.coerce(z).norm()


def canonical_associate(z) -> GaussInt:
    """The associate of ``z`` with ``re > 0`` and ``im >= 0`` (0 maps to 0)."""
    z = GaussInt.coerce(z)
    x, y = z.re, z.im
    if x == 0 and y == 0:
        return ZERO
    while not (x > 0 and y >= 0):
        x, y = -y, x
    return GaussInt(x, y)


def unit_to_canonical(z: GaussInt) -> GaussInt:
    """The unit ``u`` with ``u * z == canonical_associate(z)``."""
    c = canonical_associate(z)
    for u in UNITS:
        if u * z == c:
            return u
    raise ValueError("zero has no canonical unit")


def _round_half_up(num: int, den: int) -> int:
    # floor(num/den + 1/2) for den > 0
    return (2 * num + den) // (2 * den)


def divrem(a, b) -> tuple[GaussInt, GaussInt]:
    """Euclidean division ``a = q*b + r`` with ``N(r) <= N(b)/2``.

    ``q`` is ``a/b`` rounded coordinatewise to the nearest integer, halves
    rounded toward +infinity.
    """
    a = GaussInt.coerce(a)
    b = GaussInt.coerce(b)
    d = b.norm()
    if d == 0:
        raise ZeroDivisionError("Gaussian division by zero")
    nr = a.re * b.re + a.im * b.im
    ni = a.im * b.re - a.re * b.im
    q = GaussInt(_round_half_up(nr, d), _round_half_up(ni, d))
    return q, a - q * b


def rem(a, b) -> GaussInt:
    return divrem(a, b)[1]


def divides(d, z) -> bool:
    d = GaussInt.coerce(d)
    z = GaussInt.coerce(z)
    n = d.norm()
    if n == 0:
        return z.is_zero()
    return (z.re * d.re + z.im * d.im) % n == 0 and (z.im * d.re - z.re * d.im) % n == 0


def exact_div(z, d) -> GaussInt:
    z = GaussInt.coerce(z)
    d = GaussInt.coerce(d)
    n = d.norm()
    nr = z.re * d.re + z.im * d.im
    ni = z.im * d.re - z.re * d.im
    if n == 0 or nr % n or ni % n:
        raise ValueError(f"{d} does not divide {z}")
    return GaussInt(nr // n, ni // n)


def congruent(a, b, k) -> bool:
    return divides(k, GaussInt.coerce(a) - GaussInt.coerce(b))


def gcd(a, b) -> GaussInt:
    a = GaussInt.coerce(a)
    b = GaussInt.coerce(b)
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    while not b.is_zero():
        a, b = b, rem(a, b)
    return canonical_associate(a)


def xgcd(a, b) -> tuple[GaussInt, GaussInt, GaussInt]:
    """Return ``(g, s, t)`` with ``s*a + t*b == g`` (``g`` not normalised)."""
    a = GaussInt.coerce(a)
    b = GaussInt.coerce(b)
    r0, s0, t0 = a, ONE, ZERO
    r1, s1, t1 = b, ZERO, ONE
    while not r1.is_zero():
        q, r = divrem(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


def inverse_mod(a, k) -> GaussInt:
    """Multiplicative inverse of ``a`` modulo ``k``, divrem-reduced."""
    a = GaussInt.coerce(a)
    k = GaussInt.coerce(k)
    if k.is_zero():
        raise ZeroDivisionError("modulus must be nonzero")
    g, s, _ = xgcd(rem(a, k), k)
    if g.norm() != 1:
        raise ValueError(f"{a} is not invertible modulo {k}")
    # g is a unit; its inverse is its conjugate
    return rem(s * g.conj(), k)


# rational primes ------------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_rational_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _factor_rational(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _sqrt_minus_one(p: int) -> int:
    for c in range(2, p):
        if pow(c, (p - 1) // 2, p) == p - 1:
            return pow(c, (p - 1) // 4, p)
    raise ValueError(f"no square root of -1 modulo {p}")


@lru_cache(maxsize=None)
def _split_prime(p: int) -> tuple[GaussInt, ...]:
    """Canonical Gaussian primes above the rational prime ``p``."""
    if p == 2:
        return (ONE_PLUS_I,)
    if p % 4 == 3:
        return (GaussInt(p, 0),)
    x = _sqrt_minus_one(p)
    pi = gcd(GaussInt(p, 0), GaussInt(x, 1))
    return tuple(sorted({pi, canonical_associate(pi.conj())}, key=GaussInt.key))


def is_prime(z) -> bool:
    """True iff ``z`` is a Gaussian prime (units and 0 are not)."""
    z = GaussInt.coerce(z)
    n = z.norm()
    if n < 2:
        return False
    if is_rational_prime(n):
        return True
    if z.re == 0 or z.im == 0:
        p = abs(z.re) + abs(z.im)
        return p % 4 == 3 and is_rational_prime(p)
    return False


def factor(z, limits: Limits = DEFAULT_LIMITS) -> Factorization:
    z = GaussInt.coerce(z)
    if z.is_zero():
        raise ValueError("cannot factor zero")
    return _factor_cached(z.re, z.im, limits.max_factor_norm)


@lru_cache(maxsize=1 << 16)
def _factor_cached(re: int, im: int, cap: int) -> Factorization:
    z = GaussInt(re, im)
    n = z.norm()
    if n > cap:
        raise BudgetExceeded(f"norm {n} exceeds factorisation cap {cap}")
    factors = []
    rest = z
    for p, _ in _factor_rational(n):
        for pi in _split_prime(p):
            e = 0
            while divides(pi, rest):
                rest = exact_div(rest, pi)
                e += 1
            if e:
                factors.append((pi, e))
    if rest.norm() != 1:
        raise AssertionError(f"factorisation of {z} left cofactor {rest}")
    factors.sort(key=lambda pe: pe[0].key())
    return Factorization(unit=rest, factors=tuple(factors))


def omega(k) -> int:
    """Number of distinct (non-associate) prime divisors."""
    k = GaussInt.coerce(k)
    return 0 if k.is_unit() else factor(k).omega


def divisors_non_associate(r) -> list[GaussInt]:
    """One canonical representative per associate class of divisors of ``r``."""
    f = factor(r)
    out = []
    for exps in product(*(range(e + 1) for _, e in f.factors)):
        d = ONE
        for (p, _), e in zip(f.factors, exps):
            d = d * p**e
        out.append(canonical_associate(d))
    out.sort(key=GaussInt.key)
    return out


def residue_system(k, limits: Limits = DEFAULT_LIMITS) -> ResidueSystem:
    """A complete, divrem-reduced residue system modulo ``k``."""
    k = GaussInt.coerce(k)
    if k.is_zero():
        raise ValueError("modulus must be nonzero")
    n = k.norm()
    if n > limits.max_residue_norm:
        raise BudgetExceeded(f"N(k)={n} exceeds residue cap {limits.max_residue_norm}")
    return _residue_cached(k.re, k.im)


@lru_cache(maxsize=4096)
def _residue_cached(re: int, im: int) -> ResidueSystem:
    k = GaussInt(re, im)
    n = k.norm()
    # {x + iy : 0 <= x < N/g, 0 <= y < g} with g = gcd(re, im) is a transversal
    g = np.gcd(abs(re), abs(im))
    xs, ys = np.meshgrid(np.arange(n // g, dtype=np.int64), np.arange(g, dtype=np.int64), indexing="ij")
    rx, ry = reduce_mod_arrays(xs.ravel(), ys.ravel(), k)
    reps = [GaussInt(int(a), int(b)) for a, b in zip(rx, ry)]
    if len(set(reps)) != n:
        raise AssertionError(f"residue transversal for {k} is not complete")
    primes = [p for p, _ in factor(k).factors]
    mask = np.ones(n, dtype=bool)
    for p in primes:
        mask &= ~divisible_arrays(rx, ry, p)
    reps_sorted = sorted(zip(reps, mask.tolist()), key=lambda rm: rm[0].key())
    return ResidueSystem(
        modulus=k,
        representatives=tuple(r for r, _ in reps_sorted),
        reduced_mask=tuple(bool(m) for _, m in reps_sorted),
    )


def euler_phi(k) -> int:
    """Number of reduced residue classes modulo ``k``."""
    k = GaussInt.coerce(k)
    if k.is_zero():
        raise ValueError("modulus must be nonzero")
    out = 1
    for p, e in factor(k).factors:
        np_ = p.norm()
        out *= np_ ** (e - 1) * (np_ - 1)
    return out


def crt_combine(congruences: Iterable[tuple]) -> GaussInt:
    """Solve ``x = r_j mod k_j`` for pairwise coprime moduli."""
    x, m = ZERO, ONE
    for r, k in congruences:
        r = GaussInt.coerce(r)
        k = GaussInt.coerce(k)
        if k.is_zero():
            raise ValueError("moduli must be nonzero")
        if gcd(m, k) != ONE:
            raise ValueError(f"moduli {m} and {k} are not coprime")
        t = rem((r - x) * inverse_mod(m, k), k)
        x = x + m * t
        m = m * k
        x = rem(x, m)
    return x


# square roots ------------------------------------------------------------


def _roots_prime_power(c: GaussInt, p: GaussInt, a: int) -> list[GaussInt]:
    """All x mod p^a with x^2 = c (c a unit mod p)."""
    pa = p**a
    if p == ONE_PLUS_I:
        return _roots_ramified(c, a)
    base = [x for x in residue_system(p).representatives if divides(p, x * x - c)]
    roots = base
    pj = p
    for _ in range(1, a):
        pj1 = pj * p
        lifted = []
        for x in roots:
            fx = x * x - c
            x1 = rem(x - fx * inverse_mod(2 * x, pj1), pj1)
            lifted.append(x1)
        roots = lifted
        pj = pj1
    return sorted({rem(x, pa) for x in roots}, key=GaussInt.key)


_RAMIFIED_SEED = 6


def _roots_ramified(c: GaussInt, a: int) -> list[GaussInt]:
    pi = ONE_PLUS_I
    start = min(a, _RAMIFIED_SEED)
    m = pi**start
    roots = [x for x in residue_system(m).representatives if divides(m, x * x - c)]
    j = start
    while j < a:
        step = pi**j
        m1 = step * pi
        nxt = set()
        for x in roots:
            for cand in (x, x + step):
                if divides(m1, cand * cand - c):
                    nxt.add(rem(cand, m1))
        roots = list(nxt)
        j += 1
    return sorted(roots, key=GaussInt.key)


def sqrt_solutions(l, k, g=ONE) -> list[GaussInt]:
    """All residues ``x`` mod ``k`` with ``x^2 * g = l (mod k)``.

    Requires ``gcd(k, l) = 1``.  Returns ``[]`` when ``g`` and ``k`` share a
    factor.  Roots are found in each residue field, Hensel-lifted to the
    prime powers dividing ``k`` and glued back together by CRT.
    """
    l = GaussInt.coerce(l)
    k = GaussInt.coerce(k)
    g = GaussInt.coerce(g)
    if k.is_zero():
        raise ValueError("modulus must be nonzero")
    if k.is_unit():
        return [ZERO]
    if gcd(k, l) != ONE:
        raise ValueError(f"gcd({k}, {l}) != 1")
    if gcd(g, k) != ONE:
        return []
    c = rem(inverse_mod(g, k) * l, k)
    plan = _crt_plan(k.re, k.im)
    per_prime = []
    for p, a, pa, _ in plan:
        cr = rem(c, pa)
        roots = _roots_cached(cr.re, cr.im, p.re, p.im, a)
        if not roots:
            return []
        per_prime.append(roots)
    out = set()
    for combo in product(*per_prime):
        x = ZERO
        for xj, (_, _, _, e) in zip(combo, plan):
            x = x + xj * e
        out.add(rem(x, k))
    return sorted(out, key=GaussInt.key)


@lru_cache(maxsize=4096)
def _crt_plan(re: int, im: int):
    """Prime powers of k with CRT idempotents (e = 1 mod p^a, 0 mod the rest)."""
    k = GaussInt(re, im)
    plan = []
    for p, a in factor(k).factors:
        pa = p**a
        others = exact_div(k, pa)
        e = others * inverse_mod(others, pa)
        plan.append((p, a, pa, rem(e, k)))
    return tuple(plan)


@lru_cache(maxsize=1 << 16)
def _roots_cached(cre: int, cim: int, pre: int, pim: int, a: int) -> tuple[GaussInt, ...]:
    return tuple(_roots_prime_power(GaussInt(cre, cim), GaussInt(pre, pim), a))


def square_divisor_decomposition(t) -> tuple[GaussInt, GaussInt]:
    """Return ``(f_t, g_t)`` with ``t * g_t == f_t**2`` and ``g_t`` squarefree."""
    t = GaussInt.coerce(t)
    fac = factor(t)
    f = ONE
    for p, v in fac.factors:
        f = f * p ** ((v + 1) // 2)
    return f, exact_div(f * f, t)


# enumeration and vectorised helpers -------------------------------------


def disk_points(radius_sq: float, include_zero: bool = True) -> np.ndarray:
    """Lattice points ``(s, t)`` with ``s^2 + t^2 <= radius_sq``, lexicographic."""
    r = isqrt(int(np.floor(radius_sq)))
    s, t = np.meshgrid(np.arange(-r, r + 1), np.arange(-r, r + 1), indexing="ij")
    s = s.ravel()
    t = t.ravel()
    keep = s * s + t * t <= radius_sq
    if not include_zero:
        keep &= (s != 0) | (t != 0)
    return np.stack([s[keep], t[keep]], axis=1).astype(np.int64)


def canonical_elements(max_norm: int) -> list[GaussInt]:
    """All canonical associates with ``1 <= N(z) <= max_norm``, by key."""
    pts = disk_points(max_norm)
    out = [GaussInt(int(x), int(y)) for x, y in pts if x > 0 and y >= 0]
    out.sort(key=GaussInt.key)
    return out


def reduce_mod_arrays(xs: np.ndarray, ys: np.ndarray, k: GaussInt) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``rem(x + iy, k)``; same rounding as :func:`divrem`."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    a, b = k.re, k.im
    n = a * a + b * b
    nr = xs * a + ys * b
    ni = ys * a - xs * b
    qr = (2 * nr + n) // (2 * n)
    qi = (2 * ni + n) // (2 * n)
    return xs - (qr * a - qi * b), ys - (qr * b + qi * a)


def divisible_arrays(xs: np.ndarray, ys: np.ndarray, d: GaussInt) -> np.ndarray:
    n = d.norm()
    nr = xs * d.re + ys * d.im
    ni = ys * d.re - xs * d.im
    return (nr % n == 0) & (ni % n == 0)


def residue_classes(points: np.ndarray, k: GaussInt) -> np.ndarray:
    """Index of each point's class in ``residue_system(k).representatives``."""
    rs = residue_system(k)
    rx, ry = reduce_mod_arrays(points[:, 0], points[:, 1], k)
    # reduced representatives satisfy |x|, |y| <= |k|
    w = isqrt(k.norm()) + 2
    table = np.full((2 * w + 1) ** 2, -1, dtype=np.int64)
    for j, r in enumerate(rs.representatives):
        table[(r.re + w) * (2 * w + 1) + (r.im + w)] = j
    idx = table[(rx + w) * (2 * w + 1) + (ry + w)]
    if (idx < 0).any():
        raise AssertionError("reduction produced an unknown representative")
    return idx


def as_array(zs: Sequence[GaussInt]) -> np.ndarray:
    return np.array([(z.re, z.im) for z in zs], dtype=np.int64).reshape(-1, 2)


@lru_cache(maxsize=8192)
def _reduced_residue_cached(re: int, im: int) -> np.ndarray:
    rs = residue_system(GaussInt(re, im))
    arr = as_array(rs.reduced)
    arr.setflags(write=False)
    return arr


def reduced_residue_array(k) -> np.ndarray:
    """Reduced residues mod ``k`` as an (phi(k), 2) int array, in key order."""
    k = GaussInt.coerce(k)
    return _reduced_residue_cached(k.re, k.im)
