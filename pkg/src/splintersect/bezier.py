"""Bernstein polynomial algebra, rational Bezier patches/curves and B-spline
to Bezier conversion.

Grid conventions
----------------
Control nets are stored as arrays of shape (mu1+1, mu2+1, 3) with the first
axis running along theta^1. Whenever a net is flattened (JSON files, the
implicitisation matrix) the order is row-major by the theta^1 index, i.e. the
1-based multi-index (i1, i2) maps to k = (i2 - 1) * (mu1 + 1) + i1. All types
here are immutable after construction and safe to share across threads.
"""

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BasePointError, InvalidArgumentError, UnsupportedInputError

MAX_EVAL_DEGREE = 10
_BINOM_CACHE = [np.array([1], dtype=float)]


def binomial_row(n):
    """Row n of Pascal's triangle as floats (exact integers up to n=12+)."""
    if n < 0:
        raise InvalidArgumentError(f"negative degree {n}")
    while len(_BINOM_CACHE) <= n:
        prev = _BINOM_CACHE[-1]
        row = np.empty(len(prev) + 1)
        row[0] = row[-1] = 1.0
        row[1:-1] = prev[:-1] + prev[1:]
        _BINOM_CACHE.append(row)
    return _BINOM_CACHE[n]


@dataclass(frozen=True)
class BernsteinIndex:
    """1-based index i of a Bernstein polynomial of degree mu."""

    i: int
    mu: int

    def __post_init__(self):
        if self.mu < 0 or not 1 <= self.i <= self.mu + 1:
            raise InvalidArgumentError(f"index {self.i} out of range for degree {self.mu}")


def bernstein_eval(idx, xi):
    """binom(mu, i-1) * xi^(i-1) * (1-xi)^(mu-i+1)."""
    i, mu = idx.i, idx.mu
    return float(binomial_row(mu)[i - 1] * xi ** (i - 1) * (1.0 - xi) ** (mu - i + 1))


def bernstein_basis(mu, xi):
    """All mu+1 Bernstein values at xi as a vector."""
    e = np.arange(mu + 1)
    return binomial_row(mu) * xi**e * (1.0 - xi) ** (mu - e)


def bernstein_deriv_basis(mu, xi):
    """Derivatives d/dxi of all Bernstein polynomials of degree mu at xi."""
    if mu == 0:
        return np.zeros(1)
    lower = bernstein_basis(mu - 1, xi)
    d = np.zeros(mu + 1)
    d[:-1] -= lower
    d[1:] += lower
    return mu * d


def bernstein_product(a, b):
    """Express B_a * B_b as coefficient times a single degree lambda+mu basis
    function; returns (BernsteinIndex, coefficient)."""
    i, lam = a.i, a.mu
    j, mu = b.i, b.mu
    coeff = (
        binomial_row(lam)[i - 1]
        * binomial_row(mu)[j - 1]
        / binomial_row(lam + mu)[i + j - 2]
    )
    return BernsteinIndex(i + j - 1, lam + mu), float(coeff)


def product_coefficients(p, q):
    """Matrix c[i, j] with B_i^p * B_j^q = c[i, j] * B_{i+j}^{p+q} (0-based)."""
    bp = binomial_row(p)
    bq = binomial_row(q)
    bpq = binomial_row(p + q)
    return np.outer(bp, bq) / bpq[np.arange(p + 1)[:, None] + np.arange(q + 1)[None, :]]


def _freeze(arr):
    arr = np.array(arr, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RationalBezierPatch:
    """Rational tensor-product Bezier patch in homogeneous form.

    degree: (mu1, mu2); points: (mu1+1, mu2+1, 3); weights: (mu1+1, mu2+1),
    all strictly positive so the convex-hull property holds.
    """

    degree: tuple
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = (int(self.degree[0]), int(self.degree[1]))
        object.__setattr__(self, "degree", d)
        pts = _freeze(self.points)
        w = _freeze(self.weights)
        if d[0] < 0 or d[1] < 0:
            raise InvalidArgumentError(f"negative degree {d}")
        if max(d) > MAX_EVAL_DEGREE:
            raise InvalidArgumentError(f"degree {d} above supported maximum {MAX_EVAL_DEGREE}")
        if pts.shape != (d[0] + 1, d[1] + 1, 3):
            raise InvalidArgumentError(
                f"control net shape {pts.shape} does not match degree {d}"
            )
        if w.shape != (d[0] + 1, d[1] + 1):
            raise InvalidArgumentError(f"weight grid shape {w.shape} does not match degree {d}")
        if not np.all(w > 0.0):
            raise InvalidArgumentError("weights must be strictly positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def homogeneous(self):
        """(mu1+1, mu2+1, 4) net of (w*x, w) rows."""
        h = np.empty(self.points.shape[:2] + (4,))
        h[..., :3] = self.points * self.weights[..., None]
        h[..., 3] = self.weights
        return h

    def flat_points(self):
        """Control points as an (n, 3) array in the documented flat order."""
        return self.points.transpose(1, 0, 2).reshape(-1, 3)

    def centroid(self):
        return self.flat_points().mean(axis=0)

    def diameter(self):
        pts = self.flat_points()
        return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))

    def eval(self, theta):
        return patch_eval(self, theta)


@dataclass(frozen=True, eq=False)
class BezierCurve:
    """Rational Bezier curve; univariate counterpart of the patch type."""

    degree: int
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = int(self.degree)
        object.__setattr__(self, "degree", d)
        pts = _freeze(self.points)
        w = _freeze(self.weights)
        if d < 0 or d > MAX_EVAL_DEGREE:
            raise InvalidArgumentError(f"unsupported curve degree {d}")
        if pts.shape != (d + 1, 3) or w.shape != (d + 1,):
            raise InvalidArgumentError("control point / weight count does not match degree")
        if not np.all(w > 0.0):
            raise InvalidArgumentError("weights must be strictly positive")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def homogeneous(self):
        h = np.empty((self.degree + 1, 4))
        h[:, :3] = self.points * self.weights[:, None]
        h[:, 3] = self.weights
        return h

    def diameter(self):
        return float(np.linalg.norm(self.points.max(axis=0) - self.points.min(axis=0)))

    def eval(self, theta):
        return curve_eval(self, theta)

    def as_patch(self):
        """View the curve as a degree (p, 0) patch."""
        return RationalBezierPatch(
            (self.degree, 0), self.points[:, None, :], self.weights[:, None]
        )


def _project(f, theta):
    scale = max(abs(f[3]), 0.0)
    if scale <= 1e-300:
        raise BasePointError(theta)
    return f[:3] / f[3]


def patch_eval(patch, theta):
    """Evaluate the rational patch at theta in [0, 1]^2."""
    t1, t2 = float(theta[0]), float(theta[1])
    b1 = bernstein_basis(patch.degree[0], t1)
    b2 = bernstein_basis(patch.degree[1], t2)
    f = np.einsum("i,j,ijc->c", b1, b2, patch.homogeneous())
    return _project(f, (t1, t2))


def patch_derivatives(patch, theta):
    """Point and first parametric derivatives (x, dx/dt1, dx/dt2) at theta."""
    t1, t2 = float(theta[0]), float(theta[1])
    h = patch.homogeneous()
    b1 = bernstein_basis(patch.degree[0], t1)
    b2 = bernstein_basis(patch.degree[1], t2)
    d1 = bernstein_deriv_basis(patch.degree[0], t1)
    d2 = bernstein_deriv_basis(patch.degree[1], t2)
    f = np.einsum("i,j,ijc->c", b1, b2, h)
    fu = np.einsum("i,j,ijc->c", d1, b2, h)
    fv = np.einsum("i,j,ijc->c", b1, d2, h)
    x = _project(f, (t1, t2))
    w = f[3]
    xu = (fu[:3] - x * fu[3]) / w
    xv = (fv[:3] - x * fv[3]) / w
    return x, xu, xv


def patch_normal(patch, theta):
    """Unit normal at theta; zero vector where the tangents degenerate."""
    _, xu, xv = patch_derivatives(patch, theta)
    n = np.cross(xu, xv)
    norm = np.linalg.norm(n)
    if norm <= 1e-300:
        return np.zeros(3)
    return n / norm


@lru_cache(maxsize=None)
def _grid33_rows(mu):
    ts = (0.0, 0.5, 1.0)
    vals = np.array([bernstein_basis(mu, t) for t in ts])
    derivs = np.array([bernstein_deriv_basis(mu, t) for t in ts])
    return vals, derivs


def average_normal_net(net, degree):
    """Average unit normal of a homogeneous net, sampled on the 3x3 grid
    {0, 1/2, 1}^2. Degenerate samples (collapsed edges) contribute nothing."""
    b1, d1 = _grid33_rows(degree[0])
    b2, d2 = _grid33_rows(degree[1])
    f = np.einsum("ai,bj,ijc->abc", b1, b2, net)
    fu = np.einsum("ai,bj,ijc->abc", d1, b2, net)
    fv = np.einsum("ai,bj,ijc->abc", b1, d2, net)
    w = f[..., 3:4]
    x = f[..., :3] / w
    xu = (fu[..., :3] - x * fu[..., 3:4]) / w
    xv = (fv[..., :3] - x * fv[..., 3:4]) / w
    n = np.cross(xu.reshape(-1, 3), xv.reshape(-1, 3))
    norms = np.linalg.norm(n, axis=1)
    mask = norms > 1e-300
    n[mask] /= norms[mask, None]
    n[~mask] = 0.0
    acc = n.sum(axis=0)
    norm = np.linalg.norm(acc)
    if norm <= 1e-300:
        # fully degenerate sampling; fall back to any axis
        return np.array([0.0, 0.0, 1.0])
    return acc / norm


def average_normal(patch):
    """Average unit normal sampled on the 3x3 parameter grid {0, 1/2, 1}^2."""
    return average_normal_net(patch.homogeneous(), patch.degree)


def curve_eval(curve, theta):
    t = float(theta)
    b = bernstein_basis(curve.degree, t)
    f = b @ curve.homogeneous()
    return _project(f, t)


def curve_derivative(curve, theta):
    t = float(theta)
    h = curve.homogeneous()
    f = bernstein_basis(curve.degree, t) @ h
    fd = bernstein_deriv_basis(curve.degree, t) @ h
    x = _project(f, t)
    return x, (fd[:3] - x * fd[3]) / f[3]


@dataclass(frozen=True, eq=False)
class TensorBSplineSurface:
    """Tensor-product B-spline surface on open knot vectors.

    degree: (p, q); knots_u / knots_v: open non-decreasing knot vectors;
    net: (nu, nv, 3) control points; weights: (nu, nv).
    """

    degree: tuple
    knots_u: np.ndarray
    knots_v: np.ndarray
    net: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        d = (int(self.degree[0]), int(self.degree[1]))
        object.__setattr__(self, "degree", d)
        ku = _freeze(self.knots_u)
        kv = _freeze(self.knots_v)
        net = _freeze(self.net)
        w = _freeze(self.weights)
        for p, k, n, name in ((d[0], ku, net.shape[0], "u"), (d[1], kv, net.shape[1], "v")):
            if np.any(np.diff(k) < 0):
                raise UnsupportedInputError(f"knot vector {name} is not non-decreasing")
            if len(k) != n + p + 1:
                raise InvalidArgumentError(
                    f"knot vector {name} has {len(k)} knots; expected {n + p + 1}"
                )
            if not (np.all(k[: p + 1] == k[0]) and np.all(k[-(p + 1) :] == k[-1])):
                raise UnsupportedInputError(f"knot vector {name} is not open")
        if net.shape[2:] != (3,) or w.shape != net.shape[:2]:
            raise InvalidArgumentError("net / weight shapes inconsistent")
        if not np.all(w > 0.0):
            raise InvalidArgumentError("weights must be strictly positive")
        object.__setattr__(self, "knots_u", ku)
        object.__setattr__(self, "knots_v", kv)
        object.__setattr__(self, "net", net)
        object.__setattr__(self, "weights", w)

    def homogeneous(self):
        h = np.empty(self.net.shape[:2] + (4,))
        h[..., :3] = self.net * self.weights[..., None]
        h[..., 3] = self.weights
        return h


def _find_span(knots, p, t):
    """Index k with knots[k] <= t < knots[k+1] (clamped at the right end)."""
    n = len(knots) - p - 2
    if t >= knots[n + 1]:
        return n
    return int(np.searchsorted(knots, t, side="right") - 1)


def bspline_basis(knots, p, t):
    """Cox-de Boor values of the p+1 non-vanishing functions and their span."""
    span = _find_span(knots, p, t)
    vals = np.zeros(p + 1)
    vals[0] = 1.0
    left = np.zeros(p + 1)
    right = np.zeros(p + 1)
    for j in range(1, p + 1):
        left[j] = t - knots[span + 1 - j]
        right[j] = knots[span + j] - t
        saved = 0.0
        for r in range(j):
            denom = right[r + 1] + left[j - r]
            tmp = vals[r] / denom
            vals[r] = saved + right[r + 1] * tmp
            saved = left[j - r] * tmp
        vals[j] = saved
    return vals, span


def bspline_eval(surface, theta):
    """Direct Cox-de Boor evaluation of the rational surface."""
    p, q = surface.degree
    bu, su = bspline_basis(surface.knots_u, p, float(theta[0]))
    bv, sv = bspline_basis(surface.knots_v, q, float(theta[1]))
    h = surface.homogeneous()[su - p : su + 1, sv - q : sv + 1]
    f = np.einsum("i,j,ijc->c", bu, bv, h)
    return _project(f, theta)


def _insert_knot_once(knots, hom, p, t, axis):
    """Boehm single knot insertion of t along the given net axis."""
    w = np.moveaxis(hom, axis, 0)
    k = _find_span(knots, p, t)
    new = np.empty((w.shape[0] + 1,) + w.shape[1:])
    new[: k - p + 1] = w[: k - p + 1]
    new[k + 1 :] = w[k:]
    for i in range(k - p + 1, k + 1):
        denom = knots[i + p] - knots[i]
        alpha = 1.0 if denom <= 0.0 else (t - knots[i]) / denom
        new[i] = alpha * w[i] + (1.0 - alpha) * w[i - 1]
    return np.insert(knots, k + 1, t), np.moveaxis(new, 0, axis)


def _bezier_segments_1d(knots, hom, p, axis):
    """Insert knots until every interior knot has multiplicity p, then return
    the per-span slices and the span breakpoints."""
    knots = np.asarray(knots, dtype=float)
    interior = knots[p + 1 : len(knots) - p - 1]
    for t in np.unique(interior):
        mult = int(np.sum(knots == t))
        for _ in range(p - mult):
            knots, hom = _insert_knot_once(knots, hom, p, t, axis)
    breaks = np.unique(knots)
    w = np.moveaxis(hom, axis, 0)
    segments = [
        np.moveaxis(w[i * p : i * p + p + 1], 0, axis) for i in range(len(breaks) - 1)
    ]
    return segments, breaks


def bspline_to_bezier(surface):
    """Convert an open-uniform tensor B-spline surface into Bezier patches.

    Returns one RationalBezierPatch per non-empty knot span, ordered u-major.
    """
    p, q = surface.degree
    hom = surface.homogeneous()
    strips, _ = _bezier_segments_1d(surface.knots_u, hom, p, axis=0)
    patches = []
    for strip in strips:
        cells, _ = _bezier_segments_1d(surface.knots_v, strip, q, axis=1)
        for cell in cells:
            w = cell[..., 3]
            patches.append(RationalBezierPatch((p, q), cell[..., :3] / w[..., None], w))
    return patches


# ---------------------------------------------------------------------------
# JSON patch-set files


def patches_to_json(patches):
    out = []
    for p in patches:
        out.append(
            {
                "degree": list(p.degree),
                "points": [[float(c) for c in row] for row in p.flat_points()],
                "weights": [float(w) for w in p.weights.reshape(-1, order="F")],
            }
        )
    return {"schema": 1, "patches": out}


def patches_from_json(doc):
    if not isinstance(doc, dict) or "patches" not in doc:
        raise InvalidArgumentError("patch file must contain a 'patches' list")
    patches = []
    for entry in doc["patches"]:
        try:
            p, q = (int(d) for d in entry["degree"])
            pts = np.asarray(entry["points"], dtype=float)
            w = np.asarray(entry["weights"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed patch entry: {exc}") from exc
        n = (p + 1) * (q + 1)
        if pts.shape != (n, 3) or w.shape != (n,):
            raise InvalidArgumentError(
                f"patch of degree ({p},{q}) needs {n} points/weights, "
                f"got {pts.shape[0]} / {w.shape[0]}"
            )
        grid_pts = pts.reshape(q + 1, p + 1, 3).transpose(1, 0, 2)
        grid_w = w.reshape(p + 1, q + 1, order="F")
        patches.append(RationalBezierPatch((p, q), grid_pts, grid_w))
    return patches


def save_patches(path, patches):
    with open(path, "w") as fh:
        json.dump(patches_to_json(patches), fh, indent=1)


def load_patches(path):
    with open(path) as fh:
        return patches_from_json(json.load(fh))


__all__ = [
    "BernsteinIndex",
    "BezierCurve",
    "RationalBezierPatch",
    "TensorBSplineSurface",
    "average_normal",
    "average_normal_net",
    "bernstein_basis",
    "bernstein_deriv_basis",
    "bernstein_eval",
    "bernstein_product",
    "binomial_row",
    "bspline_eval",
    "bspline_to_bezier",
    "curve_derivative",
    "curve_eval",
    "load_patches",
    "patch_derivatives",
    "patch_eval",
    "patch_normal",
    "patches_from_json",
    "patches_to_json",
    "product_coefficients",
    "save_patches",
]
