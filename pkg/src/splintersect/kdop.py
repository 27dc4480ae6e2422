"""k-dop support heights, overlap predicates and the bounding volume tree.

Only support heights are stored per node; no polytope geometry is ever
constructed. Trees are immutable after build and safe for concurrent queries.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bezier import average_normal
from .errors import InvalidArgumentError

DEFAULT_MAX_LEAF = 4


def _unit_rows(vectors):
    v = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(v, axis=1)
    return v, norms


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Fixed set of k >= 6 unit directions defining the k-dop family."""

    directions: np.ndarray

    def __post_init__(self):
        v, norms = _unit_rows(self.directions)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] < 6:
            raise InvalidArgumentError("need at least 6 direction vectors in 3D")
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise InvalidArgumentError("directions must have unit norm")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "directions", v)

    @property
    def k(self):
        return self.directions.shape[0]

    @classmethod
    def axes6(cls):
        """Axis-aligned 6-dop, equivalent to bounding boxes."""
        eye = np.eye(3)
        return cls(np.vstack([eye, -eye]))

    @classmethod
    def default14(cls, patches=None, lattice_axes=None):
        """The 14-dop used throughout: six axis directions, two along the
        average patch normal (sampled), six along the lattice axes. Duplicate
        directions are permitted."""
        eye = np.eye(3)
        dirs = [eye, -eye]
        if patches:
            acc = np.zeros(3)
            for p in patches:
                acc += average_normal(p)
            norm = np.linalg.norm(acc)
            n = acc / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
        else:
            n = np.array([0.0, 0.0, 1.0])
        dirs.append(np.vstack([n, -n]))
        if lattice_axes is not None:
            ax = np.asarray(lattice_axes, dtype=float)
            ax = ax / np.linalg.norm(ax, axis=1, keepdims=True)
            dirs.append(np.vstack([ax, -ax]))
        else:
            dirs.append(np.vstack([eye, -eye]))
        return cls(np.vstack(dirs))


@dataclass(frozen=True, eq=False)
class KDopBounds:
    """Per-direction support-height intervals [h_min, h_max]."""

    h_min: np.ndarray
    h_max: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.h_min, dtype=float).copy()
        hi = np.asarray(self.h_max, dtype=float).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidArgumentError("h_min/h_max must be 1D arrays of equal length")
        if np.any(lo > hi):
            raise InvalidArgumentError("h_min must not exceed h_max")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "h_min", lo)
        object.__setattr__(self, "h_max", hi)

    @property
    def k(self):
        return self.h_min.shape[0]

    def contains(self, other):
        return bool(np.all(self.h_min <= other.h_min + 1e-12) and np.all(self.h_max >= other.h_max - 1e-12))


def support_heights(points, dirs):
    """k-dop bounds of a point set; errors on an empty set."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if pts.shape[0] == 0:
        raise InvalidArgumentError("empty point list")
    lo, hi = _kernels.support_heights(pts, dirs.directions)
    return KDopBounds(lo, hi)


def kdops_overlap(a, b):
    """True iff the two k-dops may intersect (no separating direction)."""
    if a.k != b.k:
        raise InvalidArgumentError(f"mismatched direction counts {a.k} != {b.k}")
    return bool(np.all(a.h_max >= b.h_min) and np.all(b.h_max >= a.h_min))


class BvhNode:
    """Octree node: bounds plus either children or a list of patch ids."""

    __slots__ = ("bounds", "children", "patch_ids")

    def __init__(self, bounds, children=None, patch_ids=None):
        self.bounds = bounds
        self.children = children or []
        self.patch_ids = patch_ids if patch_ids is not None else []

    @property
    def is_leaf(self):
        return not self.children


class Bvh:
    """Root node plus the per-patch bounds needed for exact leaf filtering."""

    __slots__ = ("root", "dirs", "patch_bounds")

    def __init__(self, root, dirs, patch_bounds):
        self.root = root
        self.dirs = dirs
        self.patch_bounds = patch_bounds


def _merge_bounds(bounds_list):
    lo = np.min([b.h_min for b in bounds_list], axis=0)
    hi = np.max([b.h_max for b in bounds_list], axis=0)
    return KDopBounds(lo, hi)


def _build_node(ids, centroids, patch_bounds, max_leaf):
    if len(ids) <= max_leaf:
        return BvhNode(_merge_bounds([patch_bounds[i] for i in ids]), patch_ids=[int(i) for i in ids])
    med = np.median(centroids[ids], axis=0)
    octant = (
        (centroids[ids, 0] > med[0]).astype(int)
        + 2 * (centroids[ids, 1] > med[1]).astype(int)
        + 4 * (centroids[ids, 2] > med[2]).astype(int)
    )
    groups = [ids[octant == o] for o in range(8)]
    groups = [g for g in groups if len(g)]
    if len(groups) == 1:
        # splitting failed to separate anything; keep as a leaf
        return BvhNode(_merge_bounds([patch_bounds[i] for i in ids]), patch_ids=[int(i) for i in ids])
    children = [_build_node(g, centroids, patch_bounds, max_leaf) for g in groups]
    return BvhNode(_merge_bounds([c.bounds for c in children]), children=children)


def build_bvh(patches, dirs, max_leaf=DEFAULT_MAX_LEAF):
    """Build the k-dop tree by recursive octant splits of patch centroids."""
    if not patches:
        raise InvalidArgumentError("empty patch list")
    patch_bounds = [support_heights(p.flat_points(), dirs) for p in patches]
    centroids = np.array([p.centroid() for p in patches])
    ids = np.arange(len(patches))
    root = _build_node(ids, centroids, patch_bounds, max(1, int(max_leaf)))
    return Bvh(root, dirs, patch_bounds)


def query_segment(bvh, seg_points, dirs=None):
    """All patch ids whose k-dop overlaps the segment's k-dop.

    Exactly reproduces the brute-force per-patch scan: internal nodes only
    prune, leaves re-test each patch's own bounds.
    """
    dirs = dirs or bvh.dirs
    seg = support_heights(np.asarray(seg_points, dtype=float).reshape(2, 3), dirs)
    out = []
    stack = [bvh.root]
    while stack:
        node = stack.pop()
        if not kdops_overlap(node.bounds, seg):
            continue
        if node.is_leaf:
            for pid in node.patch_ids:
                if kdops_overlap(bvh.patch_bounds[pid], seg):
                    out.append(pid)
        else:
            stack.extend(node.children)
    out.sort()
    return out


def tree_stats(bvh):
    """(node count, depth, {leaf size: count}) for reporting."""
    nodes = 0
    depth = 0
    hist = {}
    stack = [(bvh.root, 1)]
    while stack:
        node, d = stack.pop()
        nodes += 1
        depth = max(depth, d)
        if node.is_leaf:
            hist[len(node.patch_ids)] = hist.get(len(node.patch_ids), 0) + 1
        else:
            stack.extend((c, d + 1) for c in node.children)
    return nodes, depth, dict(sorted(hist.items()))


__all__ = [
    "Bvh",
    "BvhNode",
    "DirectionSet",
    "KDopBounds",
    "build_bvh",
    "kdops_overlap",
    "query_segment",
    "support_heights",
    "tree_stats",
]
