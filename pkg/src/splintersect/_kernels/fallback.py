"""Pure NumPy implementations of the hot kernels.

This is the reference backend; the Cython module ``_speedups`` mirrors these
signatures exactly and is preferred at import time when available.
"""

import numpy as np


def support_heights(points, directions):
    """Min/max projections of a point set onto each direction.

    points: (n, 3), directions: (k, 3). Returns (h_min, h_max), each (k,).
    """
    h = np.asarray(points, dtype=float) @ np.asarray(directions, dtype=float).T
    return h.min(axis=0), h.max(axis=0)


def decasteljau_split(net, axis, t=0.5):
    """Split a homogeneous control net along one parameter axis at t.

    net: (n1, n2, 4). Returns (left, right) nets covering [0, t] and [t, 1]
    of the original parameter interval along ``axis``.
    """
    w = np.moveaxis(np.array(net, dtype=float, copy=True), axis, 0)
    n = w.shape[0]
    left = np.empty_like(w)
    right = np.empty_like(w)
    left[0] = w[0]
    right[n - 1] = w[n - 1]
    for r in range(1, n):
        w[: n - r] = (1.0 - t) * w[: n - r] + t * w[1 : n - r + 1]
        left[r] = w[0]
        right[n - 1 - r] = w[n - 1 - r]
    return np.moveaxis(left, 0, axis), np.moveaxis(right, 0, axis)


def segment_triangle_intersect(p0, d, a, b, c, eps=1e-12):
    """Moeller-Trumbore ray/triangle test for the ray p0 + t*d.

    Returns (t, u, v) with barycentric (1-u-v, u, v), or None when the ray is
    parallel to the triangle plane or the hit lies outside the triangle.
    The caller is responsible for clamping t to the segment domain.
    """
    e1 = b - a
    e2 = c - a
    pvec = np.cross(d, e2)
    det = float(e1 @ pvec)
    scale = max(abs(e1).max(), abs(e2).max(), 1e-300)
    if abs(det) <= eps * scale * scale * max(abs(d).max(), 1e-300):
        return None
    inv = 1.0 / det
    tvec = p0 - a
    u = float(tvec @ pvec) * inv
    if u < -eps or u > 1.0 + eps:
        return None
    qvec = np.cross(tvec, e1)
    v = float(d @ qvec) * inv
    if v < -eps or u + v > 1.0 + eps:
        return None
    t = float(e2 @ qvec) * inv
    return t, u, v
