"""Brute-force references for the arithmetic and geometry routines.

Nothing here calls divrem, gcd or the square-root solver: congruence is
tested only through the criterion k | z  <=>  z conj(k) = 0 (mod N(k)).
"""

from __future__ import annotations

import math

import numpy as np

from .gaussint import GaussInt


def divisible_by(zx, zy, k: GaussInt):
    """Vectorised k | z for integer arrays, by the norm criterion."""
    n = k.re * k.re + k.im * k.im
    zx = np.asarray(zx, dtype=np.int64)
    zy = np.asarray(zy, dtype=np.int64)
    re = zx * k.re + zy * k.im
    im = zy * k.re - zx * k.im
    return (re % n == 0) & (im % n == 0)


def brute_residues(k: GaussInt) -> np.ndarray:
    """Greedy complete residue system: scan a box, keep pairwise incongruent points."""
    n = k.norm()
    R = int(math.isqrt(n)) + 1
    reps = np.empty((n, 2), dtype=np.int64)
    count = 0
    for x in range(-R, R + 1):
        for y in range(-R, R + 1):
            if count and divisible_by(reps[:count, 0] - x, reps[:count, 1] - y, k).any():
                continue
            reps[count] = (x, y)
            count += 1
            if count == n:
                return reps
    raise AssertionError(f"box too small for a residue system of {k}")


def brute_divisors(k: GaussInt) -> list[GaussInt]:
    """Canonical (re > 0, im >= 0) divisors of k, by trial division."""
    n = k.norm()
    R = int(math.isqrt(n))
    out = []
    for x in range(1, R + 1):
        for y in range(0, R + 1):
            d = GaussInt(x, y)
            if 0 < d.norm() <= n and divisible_by([k.re], [k.im], d)[0]:
                out.append(d)
    return out


def brute_gcd_norms(points: np.ndarray, k: GaussInt) -> np.ndarray:
    """N(gcd(a, k)) for each row a of ``points``: largest norm of a common divisor."""
    best = np.ones(len(points), dtype=np.int64)
    for d in brute_divisors(k):
        hit = divisible_by(points[:, 0], points[:, 1], d)
        best = np.where(hit, np.maximum(best, d.norm()), best)
    return best


def brute_sqrt_count(reps: np.ndarray, l: GaussInt, k: GaussInt, g: GaussInt) -> np.ndarray:
    """Rows of ``reps`` solving x^2 g = l (mod k)."""
    x, y = reps[:, 0], reps[:, 1]
    sx, sy = x * x - y * y, 2 * x * y
    vx = sx * g.re - sy * g.im - l.re
    vy = sx * g.im + sy * g.re - l.im
    return reps[divisible_by(vx, vy, k)]


def grid_cover(points, radius: float, step: float, center_bound: float | None = None) -> int:
    """Best closed-disk count over centres on the lattice step Z^2."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return 0
    lo = pts.min(axis=0) - radius
    hi = pts.max(axis=0) + radius
    if center_bound is not None:
        lo = np.maximum(lo, -center_bound)
        hi = np.minimum(hi, center_bound)
        if (lo > hi).any():
            return 0
    xs = np.arange(math.floor(lo[0] / step), math.ceil(hi[0] / step) + 1) * step
    ys = np.arange(math.floor(lo[1] / step), math.ceil(hi[1] / step) + 1) * step
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    C = np.stack([X.ravel(), Y.ravel()], axis=1)
    if center_bound is not None:
        C = C[(C**2).sum(axis=1) <= center_bound**2]
    best = 0
    r2 = radius * radius * (1 + 1e-12)
    for lo_i in range(0, len(C), 8192):
        c = C[lo_i:lo_i + 8192]
        d2 = ((c[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        best = max(best, int((d2 <= r2).sum(axis=1).max()))
    return best


def grid_toroidal(points, delta: float, step: float) -> int:
    """Best toroidal count over centres on step Z^2 inside [0, 1)^2."""
    pts = np.mod(np.asarray(points, dtype=float).reshape(-1, 2), 1.0)
    r2 = delta * (1 + 1e-12)
    g = np.arange(0.0, 1.0, step)
    X, Y = np.meshgrid(g, g, indexing="ij")
    C = np.stack([X.ravel(), Y.ravel()], axis=1)
    best = 0
    for lo_i in range(0, len(C), 8192):
        c = C[lo_i:lo_i + 8192]
        d = np.abs(c[:, None, :] - pts[None, :, :])
        d = np.minimum(d, 1 - d)
        best = max(best, int(((d**2).sum(axis=2) <= r2).sum(axis=1).max()))
    return best
