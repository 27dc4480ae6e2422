"""Divide-and-conquer intersection by recursive de Casteljau splitting.

Serves as the correctness oracle and performance baseline for the matrix
pipeline. Patches are split at the parametric midpoint with alternating axes
until the control net is flat along the sampled average normal, then each
flat leaf is triangulated from its corner points and intersected with the
segment. Work grows roughly like 1/tol, so tolerances are paid for in time
and memory; the matrix route does not have that trade-off.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bezier import RationalBezierPatch, average_normal, average_normal_net
from .errors import InvalidArgumentError, ToleranceUnreachableError
from .intersect import IntersectionRecord

MAX_DEPTH = 60


@dataclass(frozen=True)
class FlatnessTolerance:
    """Allowed support-height spread along the average normal (model units)."""

    tol: float

    def __post_init__(self):
        if not self.tol > 0.0:
            raise InvalidArgumentError(f"flatness tolerance must be positive, got {self.tol}")


def split_patch(patch, axis, at=0.5):
    """de Casteljau subdivision of the homogeneous net along axis 1 or 2."""
    if axis not in (1, 2):
        raise InvalidArgumentError(f"split axis must be 1 or 2, got {axis}")
    left, right = _kernels.decasteljau_split(patch.homogeneous(), axis - 1, at)
    out = []
    for net in (left, right):
        w = net[..., 3]
        out.append(RationalBezierPatch(patch.degree, net[..., :3] / w[..., None], w))
    return out[0], out[1]


def _net_points(net):
    w = net[..., 3]
    return np.ascontiguousarray((net[..., :3] / w[..., None]).reshape(-1, 3))


def _flat_spread(net, normal):
    lo, hi = _kernels.support_heights(_net_points(net), normal[None, :])
    return float(hi[0] - lo[0])


def is_flat(patch, ftol):
    """Support-height spread along the sampled average normal <= tol."""
    ftol = ftol if isinstance(ftol, FlatnessTolerance) else FlatnessTolerance(float(ftol))
    net = patch.homogeneous()
    return _flat_spread(net, average_normal(patch)) <= ftol.tol


def _prune_dirs(seg_dir):
    """Axis directions plus an orthonormal frame around the segment, so both
    along-segment and perpendicular separation can prune."""
    n = np.linalg.norm(seg_dir)
    if n <= 1e-300:
        return np.eye(3)
    d = seg_dir / n
    a = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(d, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return np.vstack([np.eye(3), d, e1, e2])


def _boxes_overlap(pts, seg_lo, seg_hi, dirs, pad):
    lo_a, hi_a = _kernels.support_heights(pts, dirs)
    return bool(np.all(hi_a >= seg_lo - pad) and np.all(seg_hi >= lo_a - pad))


def subdivision_intersect(patch, line, ftol, patch_id=None, stats=None):
    """Intersections of a patch with a line segment by recursive splitting.

    Flat leaves are triangulated from their four corner control points (two
    triangles); hits are mapped back to (xi, theta) through the leaf's
    parameter box and merged when closer than the flatness resolution.
    Exceeding the depth cap raises ToleranceUnreachableError, the signature
    of a (near-)tangential configuration. Passing a dict as ``stats`` fills
    in the deterministic work counters ("nodes", "leaves").
    """
    ftol = ftol if isinstance(ftol, FlatnessTolerance) else FlatnessTolerance(float(ftol))
    lo, hi = line.domain
    p0 = line.eval(lo)
    p1 = line.eval(hi)
    d = p1 - p0
    seg_len = float(np.linalg.norm(d))
    if seg_len <= 0.0:
        raise InvalidArgumentError("degenerate segment")
    dirs = _prune_dirs(d)
    seg_lo, seg_hi = _kernels.support_heights(np.vstack([p0, p1]), dirs)
    pad = ftol.tol
    degree = patch.degree
    hits = []
    n_nodes = n_leaves = 0
    stack = [(patch.homogeneous(), (0.0, 1.0), (0.0, 1.0), 1, 0)]
    while stack:
        net, box1, box2, axis, depth = stack.pop()
        n_nodes += 1
        if not _boxes_overlap(_net_points(net), seg_lo, seg_hi, dirs, pad):
            continue
        normal = average_normal_net(net, degree)
        if _flat_spread(net, normal) <= ftol.tol:
            n_leaves += 1
            hits.extend(_leaf_hits(net, box1, box2, p0, d))
            continue
        if depth >= MAX_DEPTH:
            raise ToleranceUnreachableError(
                f"subdivision depth {MAX_DEPTH} exceeded near theta box {box1} x {box2}"
            )
        split_axis = axis if degree[axis - 1] > 0 else (3 - axis)
        left, right = _kernels.decasteljau_split(net, split_axis - 1, 0.5)
        if split_axis == 1:
            mid = 0.5 * (box1[0] + box1[1])
            stack.append((left, (box1[0], mid), box2, 3 - axis, depth + 1))
            stack.append((right, (mid, box1[1]), box2, 3 - axis, depth + 1))
        else:
            mid = 0.5 * (box2[0] + box2[1])
            stack.append((left, box1, (box2[0], mid), 3 - axis, depth + 1))
            stack.append((right, box1, (mid, box2[1]), 3 - axis, depth + 1))
    if stats is not None:
        stats["nodes"] = n_nodes
        stats["leaves"] = n_leaves
    records = _merge_hits(hits, line, seg_len, ftol.tol, patch_id)
    return records


def _leaf_hits(net, box1, box2, p0, d):
    """Triangle/segment tests on the two corner triangles of a flat leaf."""
    w = net[..., 3]
    pts = net[..., :3] / w[..., None]
    c00 = pts[0, 0]
    c10 = pts[-1, 0]
    c01 = pts[0, -1]
    c11 = pts[-1, -1]
    t00 = (box1[0], box2[0])
    t10 = (box1[1], box2[0])
    t01 = (box1[0], box2[1])
    t11 = (box1[1], box2[1])
    out = []
    for tri, ths in (
        ((c00, c10, c11), (t00, t10, t11)),
        ((c00, c11, c01), (t00, t11, t01)),
    ):
        hit = _kernels.segment_triangle_intersect(p0, d, tri[0], tri[1], tri[2], 1e-10)
        if hit is None:
            continue
        t, u, v = hit
        l0 = 1.0 - u - v
        th1 = l0 * ths[0][0] + u * ths[1][0] + v * ths[2][0]
        th2 = l0 * ths[0][1] + u * ths[1][1] + v * ths[2][1]
        out.append((t, th1, th2))
    return out


def _merge_hits(hits, line, seg_len, ftol, patch_id):
    lo, hi = line.domain
    span = hi - lo
    dom_pad = 2.0 * ftol / seg_len
    valid = [h for h in hits if -dom_pad <= h[0] <= 1.0 + dom_pad]
    valid.sort(key=lambda h: h[0])
    merge_gap = 50.0 * ftol / seg_len
    groups = []
    for h in valid:
        if groups and h[0] - groups[-1][-1][0] <= merge_gap:
            groups[-1].append(h)
        else:
            groups.append([h])
    records = []
    for g in groups:
        t = float(np.mean([h[0] for h in g]))
        xi = lo + t * span
        records.append(
            IntersectionRecord(
                xi=xi,
                theta=(float(np.mean([h[1] for h in g])), float(np.mean([h[2] for h in g]))),
                point=line.eval(xi),
                patch_id=patch_id,
            )
        )
    return records


def subdivision_intersect_curve(curve, line, ftol, patch_id=None):
    """Curve/segment variant: split until the control polygon spread
    orthogonal to its chord is below tol, then closest-approach of chords."""
    ftol = ftol if isinstance(ftol, FlatnessTolerance) else FlatnessTolerance(float(ftol))
    lo, hi = line.domain
    p0 = line.eval(lo)
    p1 = line.eval(hi)
    d = p1 - p0
    seg_len = float(np.linalg.norm(d))
    dirs = _prune_dirs(d)
    seg_lo, seg_hi = _kernels.support_heights(np.vstack([p0, p1]), dirs)
    hits = []
    stack = [(curve.homogeneous()[:, None, :], (0.0, 1.0), 0)]
    while stack:
        net, box, depth = stack.pop()
        pts = _net_points(net)
        if not _boxes_overlap(pts, seg_lo, seg_hi, dirs, ftol.tol):
            continue
        if _chord_spread(pts) <= ftol.tol:
            hit = _chord_segment_hit(pts[0], pts[-1], p0, d, ftol.tol)
            if hit is not None:
                s, t = hit
                hits.append((t, box[0] + s * (box[1] - box[0])))
            continue
        if depth >= MAX_DEPTH:
            raise ToleranceUnreachableError("curve subdivision depth exceeded")
        mid = 0.5 * (box[0] + box[1])
        left, right = _kernels.decasteljau_split(net, 0, 0.5)
        stack.append((left, (box[0], mid), depth + 1))
        stack.append((right, (mid, box[1]), depth + 1))
    # merge and emit
    hits.sort(key=lambda h: h[0])
    merge_gap = 50.0 * ftol.tol / max(seg_len, 1e-300)
    records = []
    for t, th in hits:
        if records and abs((t - (records[-1].xi - lo) / (hi - lo))) <= merge_gap:
            continue
        if not -merge_gap <= t <= 1.0 + merge_gap:
            continue
        xi = lo + t * (hi - lo)
        records.append(
            IntersectionRecord(xi=xi, theta=float(np.clip(th, 0.0, 1.0)),
                               point=line.eval(xi), patch_id=patch_id)
        )
    return records


def _chord_spread(pts):
    chord = pts[-1] - pts[0]
    n = np.linalg.norm(chord)
    if n <= 1e-300:
        rel = pts - pts[0]
        return float(np.linalg.norm(rel, axis=1).max())
    rel = pts - pts[0]
    proj = np.outer(rel @ chord, chord) / (n * n)
    return float(np.linalg.norm(rel - proj, axis=1).max())


def _chord_segment_hit(a0, a1, p0, d, tol):
    """Closest approach of chord a0->a1 and the ray p0 + t d; a hit when the
    gap is below tol. Returns (s_on_chord, t_on_ray) or None."""
    u = a1 - a0
    det_m = np.array([[u @ u, -(u @ d)], [u @ d, -(d @ d)]])
    rhs = np.array([(p0 - a0) @ u, (p0 - a0) @ d])
    det = np.linalg.det(det_m)
    if abs(det) <= 1e-14 * max((u @ u) * (d @ d), 1e-300):
        return None  # parallel
    s, t = np.linalg.solve(det_m, rhs)
    if not -0.05 <= s <= 1.05:
        return None
    gap = np.linalg.norm((a0 + s * u) - (p0 + t * d))
    if gap > max(4.0 * tol, 1e-12):
        return None
    return float(np.clip(s, 0.0, 1.0)), float(t)


__all__ = [
    "FlatnessTolerance",
    "is_flat",
    "split_patch",
    "subdivision_intersect",
    "subdivision_intersect_curve",
]
