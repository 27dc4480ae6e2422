# cython: boundscheck=False, wraparound=False, cdivision=True
"""Cython fast path for the hot kernels; mirrors ``fallback`` exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def support_heights(points, directions):
    cdef const double[:, ::1] p = np.ascontiguousarray(points, dtype=np.float64)
    cdef const double[:, ::1] d = np.ascontiguousarray(directions, dtype=np.float64)
    cdef Py_ssize_t n = p.shape[0], k = d.shape[0]
    hmin = np.empty(k, dtype=np.float64)
    hmax = np.empty(k, dtype=np.float64)
    cdef double[::1] lo = hmin, hi = hmax
    cdef Py_ssize_t i, j
    cdef double h, a, b
    for j in range(k):
        a = 1e300
        b = -1e300
        for i in range(n):
            h = p[i, 0] * d[j, 0] + p[i, 1] * d[j, 1] + p[i, 2] * d[j, 2]
            if h < a:
                a = h
            if h > b:
                b = h
        lo[j] = a
        hi[j] = b
    return hmin, hmax


def decasteljau_split(net, axis, double t=0.5):
    a = np.ascontiguousarray(np.moveaxis(np.asarray(net, dtype=np.float64), axis, 0))
    cdef double[:, :, ::1] w = a.copy()
    cdef Py_ssize_t n = w.shape[0], m = w.shape[1], c = w.shape[2]
    left_arr = np.empty((n, m, c), dtype=np.float64)
    right_arr = np.empty((n, m, c), dtype=np.float64)
    cdef double[:, :, ::1] left = left_arr, right = right_arr
    cdef Py_ssize_t r, i, j, q
    cdef double s = 1.0 - t
    for j in range(m):
        for q in range(c):
            left[0, j, q] = w[0, j, q]
            right[n - 1, j, q] = w[n - 1, j, q]
    for r in range(1, n):
        for i in range(n - r):
            for j in range(m):
                for q in range(c):
                    w[i, j, q] = s * w[i, j, q] + t * w[i + 1, j, q]
        for j in range(m):
            for q in range(c):
                left[r, j, q] = w[0, j, q]
                right[n - 1 - r, j, q] = w[n - 1 - r, j, q]
    return (np.moveaxis(left_arr, 0, axis), np.moveaxis(right_arr, 0, axis))


def segment_triangle_intersect(p0, d, a, b, c, double eps=1e-12):
    cdef const double[::1] vp0 = np.ascontiguousarray(p0, dtype=np.float64)
    cdef const double[::1] vd = np.ascontiguousarray(d, dtype=np.float64)
    cdef const double[::1] va = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] vb = np.ascontiguousarray(b, dtype=np.float64)
    cdef const double[::1] vc = np.ascontiguousarray(c, dtype=np.float64)
    cdef double e1x = vb[0] - va[0], e1y = vb[1] - va[1], e1z = vb[2] - va[2]
    cdef double e2x = vc[0] - va[0], e2y = vc[1] - va[1], e2z = vc[2] - va[2]
    cdef double px = vd[1] * e2z - vd[2] * e2y
    cdef double py = vd[2] * e2x - vd[0] * e2z
    cdef double pz = vd[0] * e2y - vd[1] * e2x
    cdef double det = e1x * px + e1y * py + e1z * pz
    cdef double s1 = max(abs(e1x), abs(e1y), abs(e1z))
    cdef double s2 = max(abs(e2x), abs(e2y), abs(e2z))
    cdef double sd = max(abs(vd[0]), abs(vd[1]), abs(vd[2]))
    cdef double scale = max(s1, s2, 1e-300)
    if abs(det) <= eps * scale * scale * max(sd, 1e-300):
        return None
    cdef double inv = 1.0 / det
    cdef double tx = vp0[0] - va[0], ty = vp0[1] - va[1], tz = vp0[2] - va[2]
    cdef double u = (tx * px + ty * py + tz * pz) * inv
    if u < -eps or u > 1.0 + eps:
        return None
    cdef double qx = ty * e1z - tz * e1y
    cdef double qy = tz * e1x - tx * e1z
    cdef double qz = tx * e1y - ty * e1x
    cdef double v = (vd[0] * qx + vd[1] * qy + vd[2] * qz) * inv
    if v < -eps or u + v > 1.0 + eps:
        return None
    cdef double t = (e2x * qx + e2y * qy + e2z * qz) * inv
    return t, u, v
