"""Exact maximum coverage of a planar point set by one closed disk.

Both solvers return the true supremum over centres, optionally restricted to
``|centre| <= center_bound``.  The optimum is always attained on a circle of
radius ``u`` around some point (or, when the bound is active and no circle
is, at the origin), which is what both of them enumerate.

``cover_sweep`` does an angular sweep around every point, O(m^2 log m).
``cover_candidates`` tests every candidate vertex, O(m^3), and can count
distinct labels instead of points (used for toroidal unfolding).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REL_TOL = 1e-9
ANG_TOL = 1e-9


@dataclass(frozen=True)
class Cover:
    count: int
    center: tuple[float, float]


def _prep(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not np.isfinite(pts).all():
        raise ValueError("points must be finite")
    return pts


def count_at(points, center, radius: float, labels=None) -> int:
    """Number of points (or distinct labels) in the closed disk."""
    pts = _prep(points)
    if len(pts) == 0:
        return 0
    d2 = ((pts - np.asarray(center, dtype=float)) ** 2).sum(axis=1)
    inside = d2 <= (radius * (1 + REL_TOL)) ** 2 + 1e-24
    if labels is None:
        return int(inside.sum())
    return len(set(np.asarray(labels)[inside].tolist()))


def max_disk_cover(points, radius: float, center_bound: float | None = None, labels=None) -> Cover:
    if labels is not None:
        return cover_candidates(points, radius, center_bound, labels)
    return cover_sweep(points, radius, center_bound)


def _zero_radius(pts: np.ndarray, center_bound, labels) -> Cover:
    if center_bound is not None:
        keep = (pts**2).sum(axis=1) <= (center_bound * (1 + REL_TOL)) ** 2
        pts = pts[keep]
        if labels is not None:
            labels = np.asarray(labels)[keep]
    if len(pts) == 0:
        return Cover(0, (0.0, 0.0))
    best, where = 0, (0.0, 0.0)
    for j, p in enumerate(pts):
        c = count_at(pts, p, 0.0, labels)
        if c > best:
            best, where = c, (float(p[0]), float(p[1]))
    return Cover(best, where)


def cover_sweep(points, radius: float, center_bound: float | None = None) -> Cover:
    pts = _prep(points)
    m = len(pts)
    u = float(radius)
    if u < 0:
        raise ValueError("radius must be nonnegative")
    if m == 0:
        return Cover(0, (0.0, 0.0))
    if u == 0:
        return _zero_radius(pts, center_bound, None)

    best, where = 0, (0.0, 0.0)
    if center_bound is not None:
        best = count_at(pts, (0.0, 0.0), u)
        where = (0.0, 0.0)
    reach = 2 * u * (1 + REL_TOL)
    for i in range(m):
        p = pts[i]
        diff = pts - p
        d = np.hypot(diff[:, 0], diff[:, 1])
        near = d <= reach
        coincident = near & (d <= u * 1e-12)
        base = int(coincident.sum())
        others = near & ~coincident

        theta0, span = 0.0, 2 * np.pi
        if center_bound is not None:
            rp = float(np.hypot(p[0], p[1]))
            B = float(center_bound) * (1 + REL_TOL)
            if rp == 0.0:
                if u > B:
                    continue
            else:
                c = (B * B - rp * rp - u * u) / (2 * u * rp)
                if c < -1:
                    continue
                if c < 1:
                    ac = float(np.arccos(c))
                    theta0 = float(np.arctan2(p[1], p[0])) + ac
                    span = 2 * np.pi - 2 * ac

        if not others.any():
            if base > best:
                best = base
                where = (p[0] + u * np.cos(theta0), p[1] + u * np.sin(theta0))
            continue

        phi = np.arctan2(diff[others, 1], diff[others, 0])
        alpha = np.arccos(np.clip(d[others] / (2 * u), -1.0, 1.0)) + ANG_TOL
        s = np.mod(phi - alpha - theta0, 2 * np.pi)
        w = 2 * alpha
        e = s + w
        wrap = e > 2 * np.pi
        starts = np.concatenate([s, np.zeros(int(wrap.sum()))])
        ends = np.concatenate([np.minimum(e, 2 * np.pi), e[wrap] - 2 * np.pi])
        ang = np.concatenate([starts, ends])
        kind = np.concatenate([np.zeros(len(starts)), np.ones(len(ends))])
        order = np.lexsort((kind, ang))
        delta = np.where(kind[order] == 0, 1, -1)
        cov = np.cumsum(delta)
        ok = (kind[order] == 0) & (ang[order] <= span + ANG_TOL)
        if ok.any():
            j = int(np.argmax(np.where(ok, cov, -1)))
            val = int(cov[j]) + base
            theta = theta0 + float(ang[order][j])
        else:
            val, theta = base, theta0
        if val > best:
            best = val
            where = (p[0] + u * np.cos(theta), p[1] + u * np.sin(theta))
    return Cover(int(best), (float(where[0]), float(where[1])))


def _circle_pairs(pts: np.ndarray, u: float) -> np.ndarray:
    m = len(pts)
    if m < 2:
        return np.empty((0, 2))
    i, j = np.triu_indices(m, 1)
    diff = pts[j] - pts[i]
    d = np.hypot(diff[:, 0], diff[:, 1])
    ok = (d > u * 1e-12) & (d <= 2 * u * (1 + REL_TOL))
    i, diff, d = i[ok], diff[ok], d[ok]
    mid = pts[i] + diff / 2
    h = np.sqrt(np.clip(u * u - (d / 2) ** 2, 0.0, None))
    perp = np.stack([-diff[:, 1], diff[:, 0]], axis=1) / d[:, None]
    return np.concatenate([mid + perp * h[:, None], mid - perp * h[:, None]])


def _bound_pairs(pts: np.ndarray, u: float, B: float) -> np.ndarray:
    rp = np.hypot(pts[:, 0], pts[:, 1])
    ok = (rp > 0) & (rp <= B + u) & (rp >= abs(B - u))
    if not ok.any():
        return np.empty((0, 2))
    p, r = pts[ok], rp[ok]
    # intersection of |y| = B with |y - p| = u
    a = (B * B - u * u + r * r) / (2 * r)
    h = np.sqrt(np.clip(B * B - a * a, 0.0, None))
    unit = p / r[:, None]
    perp = np.stack([-unit[:, 1], unit[:, 0]], axis=1)
    base = unit * a[:, None]
    return np.concatenate([base + perp * h[:, None], base - perp * h[:, None]])


def cover_candidates(points, radius: float, center_bound: float | None = None, labels=None,
                     chunk: int = 4096) -> Cover:
    pts = _prep(points)
    u = float(radius)
    if u < 0:
        raise ValueError("radius must be nonnegative")
    if len(pts) == 0:
        return Cover(0, (0.0, 0.0))
    if labels is not None:
        labels = np.asarray(labels)
        order = np.argsort(labels, kind="stable")
        pts, labels = pts[order], labels[order]
    if u == 0:
        return _zero_radius(pts, center_bound, labels)

    cands = [pts, _circle_pairs(pts, u)]
    if center_bound is not None:
        cands.append(np.zeros((1, 2)))
        cands.append(_bound_pairs(pts, u, float(center_bound)))
    C = np.concatenate(cands)
    if center_bound is not None:
        C = C[(C**2).sum(axis=1) <= (center_bound * (1 + REL_TOL)) ** 2 + 1e-24]
    if len(C) == 0:
        return Cover(0, (0.0, 0.0))

    lim = (u * (1 + REL_TOL)) ** 2 + 1e-24
    if labels is not None:
        _, group_start = np.unique(labels, return_index=True)
    best, where = -1, (0.0, 0.0)
    for lo in range(0, len(C), chunk):
        c = C[lo:lo + chunk]
        d2 = ((c[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        inside = d2 <= lim
        if labels is None:
            counts = inside.sum(axis=1)
        else:
            counts = np.maximum.reduceat(inside, group_start, axis=1).sum(axis=1)
        j = int(np.argmax(counts))
        if counts[j] > best:
            best = int(counts[j])
            where = (float(c[j, 0]), float(c[j, 1]))
    return Cover(best, where)
