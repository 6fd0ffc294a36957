"""The large sieve for points of R^2 and the kernel identities behind it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import mpmath
import numpy as np

from .config import DEFAULT_LIMITS, BudgetExceeded, Limits
from .farey import count_K
from .gaussint import disk_points

TWO_PI = 2.0 * math.pi
PHI0 = (math.pi / 2) ** 2  # one-dimensional factor of phi at 0
PHI_HAT0 = (math.pi**2 / 4) ** 2
R2_SIEVE_CONSTANT = 12.2


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray  # (R, 2) float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 1:
            raise ValueError("a point set needs at least one point")
        if not np.isfinite(pts).all():
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True, eq=False)
class DualSequence:
    coefficients: np.ndarray  # (R,) complex

    def norm2(self) -> float:
        return math.fsum((np.abs(self.coefficients) ** 2).tolist())


def _as_points(points) -> np.ndarray:
    if isinstance(points, PointSet):
        return points.points
    return PointSet(points).points


def fejer_phi(x) -> np.ndarray | float:
    """prod_j (sin(pi x_j) / (2 x_j))^2, with value (pi/2)^2 per zero coordinate."""
    x = np.asarray(x, dtype=float)
    f = (math.pi / 2 * np.sinc(x)) ** 2
    out = f[..., 0] * f[..., 1]
    return float(out) if out.ndim == 0 else out


def fejer_phi_hat(s) -> np.ndarray | float:
    s = np.asarray(s, dtype=float)
    tri = np.maximum(1 - np.abs(s), 0.0)
    out = PHI_HAT0 * tri[..., 0] * tri[..., 1]
    return float(out) if out.ndim == 0 else out


def kernel_scale(N: float, delta: float) -> float:
    return 2 * (math.sqrt(N) + delta**-0.5)


def _cos_tail(theta: float, T: int) -> float:
    """sum_{n > T} cos(2 pi n theta) / n^2, summed exactly."""
    z = mpmath.expjpi(2 * mpmath.mpf(theta))
    val = z ** (T + 1) * mpmath.lerchphi(z, 2, T + 1)
    return float(mpmath.re(val))


def _axis_direct(y: float, L: float, T: int, exact_tail: bool) -> float:
    # sum_n phi1(n/L) e(n y) with phi1(x) = (sin(pi x) / (2x))^2
    n = np.arange(1, T + 1, dtype=float)
    head = (L * L / 4) * np.sin(math.pi * n / L) ** 2 / n**2 * np.cos(TWO_PI * n * y)
    total = PHI0 + 2 * math.fsum(head.tolist())
    if exact_tail:
        with mpmath.workdps(30):
            tail = 0.5 * _cos_tail(y, T) - 0.25 * (_cos_tail(y + 1 / L, T) + _cos_tail(y - 1 / L, T))
        total += 2 * (L * L / 4) * tail
    return total


def v_kernel(y, N: float, delta: float, truncation: int = 256, exact_tail: bool = True):
    """(direct, closed) evaluations of V(y) = sum_n phi(n / L) e(n . y).

    ``direct`` sums |n_j| <= truncation in each coordinate explicitly and adds
    the remaining series exactly through the Lerch transcendent (phi decays
    only like 1/x^2 along the axes).  With ``exact_tail=False`` the tail is
    dropped, and a truncation whose tail bound exceeds 1e-8 is an error.
    ``closed`` is L^2 (pi^2/4)^2 prod_j max(1 - L ||y_j||, 0) with ||.|| the
    distance to the nearest integer and L = 2(sqrt N + delta^(-1/2)).
    """
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    y = np.asarray(y, dtype=float).reshape(2)
    T = int(truncation)
    if T < 1:
        raise ValueError("truncation must be >= 1")
    L = kernel_scale(N, delta)
    if not exact_tail:
        tail_bound = 2 * (L * L / 4) / T * (L * PHI0 + L * L / (2 * T))
        if tail_bound >= 1e-8:
            raise ValueError(f"truncation {T} leaves a tail bound {tail_bound:.3g} >= 1e-8")
    direct = _axis_direct(y[0], L, T, exact_tail) * _axis_direct(y[1], L, T, exact_tail)
    dist = np.abs(y - np.round(y))
    closed = L * L * PHI_HAT0 * float(np.prod(np.maximum(1 - L * dist, 0.0)))
    return float(direct), float(closed)


def power_iteration(matvec: Callable[[np.ndarray], np.ndarray], n: int, tol: float = 1e-8,
                    max_iter: int = 10_000, seed: int = 0):
    """Largest eigenvalue (and eigenvector) of a Hermitian positive operator."""
    if n == 0:
        return 0.0, np.zeros(0, dtype=complex)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = matvec(v)
        new = float(np.vdot(v, w).real)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, v
        v = w / nw
        if abs(new - lam) <= tol * abs(new):
            return new, v
        lam = new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def character_matrix(points, N: int, include_zero: bool = True,
                     limits: Limits = DEFAULT_LIMITS) -> np.ndarray:
    """Matrix c_{rn} = e(n . x_r) over the points and N(n) <= N."""
    pts = _as_points(points)
    lat = disk_points(N, include_zero=include_zero).astype(float)
    if len(pts) * len(lat) > limits.max_direct_work // 4:
        raise BudgetExceeded("character matrix exceeds the direct work cap")
    return np.exp(1j * TWO_PI * (pts @ lat.T))


def duality_gap(points, N: int, tol: float = 1e-14, max_iter: int = 10_000, seed: int = 0,
                return_values: bool = False):
    """Relative gap between the operator norm of C and of its adjoint.

    The row side iterates C C^H, the column side C^H C.
    """
    C = character_matrix(points, N)
    CH = C.conj().T
    lam_row, _ = power_iteration(lambda w: C @ (CH @ w), C.shape[0], tol, max_iter, seed)
    lam_col, _ = power_iteration(lambda w: CH @ (C @ w), C.shape[1], tol, max_iter, seed + 1)
    s_row, s_col = math.sqrt(lam_row), math.sqrt(lam_col)
    gap = abs(s_row - s_col) / max(s_row, s_col)
    if return_values:
        return gap, s_row, s_col
    return gap


def gram_matrix(points, N: int) -> np.ndarray:
    C = character_matrix(points, N)
    return C @ C.conj().T


def spectral_norm(points, N: int, tol: float = 1e-8, max_iter: int = 10_000, seed: int = 0) -> float:
    """lambda_max of G_{rs} = sum_{N(n) <= N} e(n . (x_r - x_s)), i.e. sup LHS / Z."""
    G = gram_matrix(points, N)
    lam, _ = power_iteration(lambda w: G @ w, G.shape[0], tol, max_iter, seed)
    return lam


def lhs_r2(points, seq) -> float:
    """sum_r |sum_n a_n e(n . x_r)|^2 for a coefficient sequence on the disk."""
    pts = _as_points(points)
    lat = seq.points.astype(float)
    vals = np.exp(1j * TWO_PI * (pts @ lat.T)) @ seq.values if len(lat) else np.zeros(len(pts))
    return math.fsum((np.abs(vals) ** 2).tolist())


def theorem5_ratio(points, seq, delta: float) -> float:
    """LHS / (K(delta) (N + 1/delta) Z)."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must lie in (0, 1/2]")
    from .expsum import compute_Z

    Z = compute_Z(seq)
    if Z == 0:
        raise ValueError("Z = 0")
    K = count_K(delta, _as_points(points))
    return lhs_r2(points, seq) / (K * (seq.N + 1 / delta) * Z)


def theorem5_extremal_ratio(points, N: int, delta: float) -> float:
    """The same ratio maximised over all sequences, via spectral_norm."""
    K = count_K(delta, _as_points(points))
    return spectral_norm(points, N, tol=1e-10) / (K * (N + 1 / delta))
