"""Farey fractions a/q in C, Dirichlet approximation, and the counts P and K."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits
from .gaussint import (
    GaussInt,
    ZERO,
    canonical_elements,
    divisible_arrays,
    euler_phi,
    exact_div,
    factor,
    gcd,
    reduced_residue_array,
    unit_to_canonical,
)
from .geometry import Cover, cover_candidates, cover_sweep
from .moduli_sets import ModuliSet


@dataclass(frozen=True)
class FareyNode:
    a: GaussInt
    q: GaussInt
    point: complex


@dataclass(frozen=True)
class Approximant:
    b: GaussInt
    r: GaussInt
    z: complex
    tau: float


def farey_count(S: ModuliSet) -> int:
    return sum(euler_phi(q) for q in S.elements)


def enumerate_farey(S: ModuliSet, limits: Limits = DEFAULT_LIMITS) -> list[FareyNode]:
    total = farey_count(S)
    if total > limits.max_farey_nodes:
        raise BudgetExceeded(f"{total} Farey nodes exceed cap {limits.max_farey_nodes}")
    out = []
    for q in S.elements:
        cq = complex(q.re, q.im)
        for x, y in reduced_residue_array(q):
            a = GaussInt(int(x), int(y))
            out.append(FareyNode(a, q, complex(a.re, a.im) / cq))
    return out


def farey_arrays(S: ModuliSet, limits: Limits = DEFAULT_LIMITS):
    """Vectorised nodes: ``(a, q)`` as two (n, 2) int arrays, in the order of
    :func:`enumerate_farey`."""
    total = farey_count(S)
    if total > limits.max_farey_nodes:
        raise BudgetExceeded(f"{total} Farey nodes exceed cap {limits.max_farey_nodes}")
    a_parts, q_parts = [], []
    for q in S.elements:
        res = reduced_residue_array(q)
        a_parts.append(res)
        q_parts.append(np.broadcast_to(np.array([q.re, q.im], dtype=np.int64), res.shape))
    if not a_parts:
        return np.empty((0, 2), np.int64), np.empty((0, 2), np.int64)
    return np.concatenate(a_parts), np.concatenate(q_parts)


def r2_points(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """The R^2 image ((xu+yv)/N(q), (xv-yu)/N(q)) of the fractions a/q."""
    x, y = a[:, 0], a[:, 1]
    u, v = q[:, 0], q[:, 1]
    n = u * u + v * v
    return np.stack([(x * u + y * v) / n, (x * v - y * u) / n], axis=1)


def _nearest(x: float) -> int:
    return math.floor(x + 0.5)


def dirichlet_approx(alpha: complex, tau: float, limits: Limits = DEFAULT_LIMITS) -> Approximant:
    """First reduced b/r (smallest |r|, then key order) with |alpha - b/r| < 2/(|r| tau)."""
    alpha = complex(alpha)
    if tau < 1:
        raise ValueError("tau must be >= 1")
    if tau > limits.max_tau:
        raise BudgetExceeded(f"tau={tau} exceeds cap {limits.max_tau}")
    for r in canonical_elements(int(math.floor(tau * tau + 1e-9))):
        cr = complex(r.re, r.im)
        ra = cr * alpha
        b = GaussInt(_nearest(ra.real), _nearest(ra.imag))
        ar = abs(cr)
        if abs(alpha - complex(b.re, b.im) / cr) < 2 / (ar * tau):
            g = gcd(b, r)
            b, r = exact_div(b, g), exact_div(r, g)
            u = unit_to_canonical(r)
            b, r = u * b, u * r
            z = alpha - complex(b.re, b.im) / complex(r.re, r.im)
            return Approximant(b, r, z, float(tau))
    raise AssertionError(f"no Dirichlet approximant for {alpha} at tau={tau}")


_P_TOL = 1e-12


def _count_P_single(q: GaussInt, alpha: complex, rad2: float) -> int:
    cq = complex(q.re, q.im)
    c = cq * alpha
    nq = q.norm()
    lim = nq * rad2 * (1 + _P_TOL) + 1e-15
    rho = math.sqrt(lim)
    xs = np.arange(math.floor(c.real - rho), math.ceil(c.real + rho) + 1, dtype=np.int64)
    ys = np.arange(math.floor(c.imag - rho), math.ceil(c.imag + rho) + 1, dtype=np.int64)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    keep = (X - c.real) ** 2 + (Y - c.imag) ** 2 <= lim
    X, Y = X[keep], Y[keep]
    if q.is_unit():
        return int(len(X))
    ok = np.ones(len(X), dtype=bool)
    for p, _ in factor(q).factors:
        ok &= ~divisible_arrays(X, Y, p)
    return int(ok.sum())


def count_P(alpha: complex, delta: float, S: ModuliSet) -> int:
    """Number of pairs (a, q), q in S, gcd(a, q) = 1, with |a/q - alpha| <= delta^(1/2).

    ``a`` ranges over all of Z[i], not just one residue system.
    """
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    alpha = complex(alpha)
    cache: dict = {}
    total = 0
    for q in S.elements:
        if q not in cache:
            cache[q] = _count_P_single(q, alpha, delta)
        total += cache[q]
    return total


def toroidal_unfold(points) -> tuple[np.ndarray, np.ndarray]:
    pts = np.mod(np.asarray(points, dtype=float).reshape(-1, 2), 1.0)
    shifts = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=float)
    unfolded = (pts[None, :, :] + shifts[:, None, :]).reshape(-1, 2)
    labels = np.tile(np.arange(len(pts)), len(shifts))
    return unfolded, labels


def count_K_cover(delta: float, points) -> Cover:
    """Best toroidal disk of radius delta^(1/2); centre reduced into [0,1)^2."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return Cover(0, (0.0, 0.0))
    unfolded, labels = toroidal_unfold(pts)
    rad = math.sqrt(delta)
    if 2 * rad < 1 - 1e-9:
        # two copies of one point can never share a ball
        cov = cover_sweep(unfolded, rad)
    else:
        cov = cover_candidates(unfolded, rad, labels=labels)
    cx, cy = cov.center
    return Cover(cov.count, (cx % 1.0, cy % 1.0))


def count_K(delta: float, points) -> int:
    """Max number of points within toroidal distance delta^(1/2) of one centre."""
    return count_K_cover(delta, points).count


@dataclass
class WitnessReport:
    delta: float
    K: int
    center: complex
    approximant: Approximant
    P_center: int
    shifted: list  # (point, P) for the four shifts, empty when |z| >= delta^(1/2)
    bound: int
    holds: bool
    shift_cover_holds: bool


def lemma1_check(delta: float, S: ModuliSet) -> WitnessReport:
    """Check K(delta) <= 4 max P at the approximant witnesses of the K-attaining centre.

    If the approximant of the centre has |z| >= delta^(1/2) the witness is the
    centre itself; otherwise it is the four points b/r +- delta^(1/2),
    b/r +- i delta^(1/2).
    """
    a, q = farey_arrays(S)
    pts = r2_points(a, q)
    cov = count_K_cover(delta, pts)
    # the R^2 image of a/q is its conjugate
    alpha = complex(cov.center[0], -cov.center[1])
    tau = delta ** -0.25
    ap = dirichlet_approx(alpha, tau)
    P_center = count_P(alpha, delta, S)
    s = math.sqrt(delta)
    shifted = []
    if abs(ap.z) >= s:
        bound = 4 * P_center
    else:
        base = complex(ap.b.re, ap.b.im) / complex(ap.r.re, ap.r.im)
        for w in (s, -s, 1j * s, -1j * s):
            shifted.append((base + w, count_P(base + w, delta, S)))
        bound = 4 * max(p for _, p in shifted)
    shift_ok = not shifted or P_center <= sum(p for _, p in shifted)
    return WitnessReport(
        delta=delta, K=cov.count, center=alpha, approximant=ap, P_center=P_center,
        shifted=shifted, bound=bound, holds=cov.count <= bound, shift_cover_holds=shift_ok,
    )


__all__ = [
    "FareyNode", "Approximant", "enumerate_farey", "farey_arrays", "farey_count", "r2_points",
    "dirichlet_approx", "count_P", "count_K", "count_K_cover", "lemma1_check", "WitnessReport",
    "toroidal_unfold", "ZERO",
]
