import numpy as np
import pytest
import scipy.optimize

from conftest import random_patch
from splintersect.errors import InvalidArgumentError
from splintersect.kdop import (
    DirectionSet,
    KDopBounds,
    build_bvh,
    kdops_overlap,
    query_segment,
    support_heights,
    tree_stats,
)


def test_direction_set_validation():
    with pytest.raises(InvalidArgumentError):
        DirectionSet(np.eye(3))  # k < 6
    bad = np.vstack([np.eye(3), -np.eye(3)]) * 1.5
    with pytest.raises(InvalidArgumentError):
        DirectionSet(bad)


def test_default14_has_14_unit_directions(rng):
    dirs = DirectionSet.default14([random_patch(rng)])
    assert dirs.k == 14
    assert np.allclose(np.linalg.norm(dirs.directions, axis=1), 1.0, atol=1e-12)


def test_unit_cube_support_heights():
    dirs = DirectionSet.axes6()
    corners = np.array([[i, j, k] for i in (0, 1) for j in (0, 1) for k in (0, 1)], float)
    b = support_heights(corners, dirs)
    # +x,+y,+z then -x,-y,-z
    assert np.allclose(b.h_max[:3], 1.0) and np.allclose(b.h_max[3:], 0.0)
    assert np.allclose(b.h_min[:3], 0.0) and np.allclose(b.h_min[3:], -1.0)


def test_single_point_degenerate(rng):
    dirs = DirectionSet.default14()
    x = rng.normal(size=3)
    b = support_heights([x], dirs)
    assert np.allclose(b.h_min, b.h_max)
    assert np.allclose(b.h_min, dirs.directions @ x)


def test_support_heights_against_bruteforce(rng):
    dirs_raw = rng.normal(size=(14, 3))
    dirs = DirectionSet(dirs_raw / np.linalg.norm(dirs_raw, axis=1, keepdims=True))
    pts = rng.normal(size=(50, 3))
    b = support_heights(pts, dirs)
    for j in range(14):
        proj = pts @ dirs.directions[j]
        assert b.h_min[j] == pytest.approx(proj.min(), abs=1e-14)
        assert b.h_max[j] == pytest.approx(proj.max(), abs=1e-14)


def test_empty_point_list():
    with pytest.raises(InvalidArgumentError):
        support_heights(np.zeros((0, 3)), DirectionSet.axes6())


def test_overlap_identical_and_separated():
    dirs = DirectionSet.axes6()
    a = support_heights(np.array([[0.0, 0, 0], [1, 1, 1]]), dirs)
    assert kdops_overlap(a, a)
    b = support_heights(np.array([[1.1, 0, 0], [2.1, 1, 1]]), dirs)
    assert not kdops_overlap(a, b)
    with pytest.raises(InvalidArgumentError):
        kdops_overlap(a, KDopBounds(np.zeros(4), np.ones(4)))


def _hulls_intersect_lp(pts_a, pts_b):
    """Exact test: is there a common point of the two convex hulls?"""
    na, nb = len(pts_a), len(pts_b)
    # variables: lambda (na), mu (nb); equalities: mixture point equal, sums = 1
    a_eq = np.zeros((7, na + nb))
    b_eq = np.zeros(7)
    a_eq[:3, :na] = pts_a.T
    a_eq[:3, na:] = -pts_b.T
    a_eq[3, :na] = 1.0
    b_eq[3] = 1.0
    a_eq[4, na:] = 1.0
    b_eq[4] = 1.0
    # rows 5, 6 unused padding removed
    a_eq = a_eq[:5]
    b_eq = b_eq[:5]
    res = scipy.optimize.linprog(
        np.zeros(na + nb), A_eq=a_eq, b_eq=b_eq, bounds=[(0, None)] * (na + nb),
        method="highs",
    )
    return res.status == 0


def test_overlap_false_implies_disjoint_hulls(rng):
    dirs = DirectionSet.default14()
    checked_disjoint = 0
    for trial in range(60):
        shift = rng.uniform(0.0, 7.0)
        pts_a = rng.normal(size=(12, 3))
        pts_b = rng.normal(size=(12, 3)) + np.array([shift, 0.0, 0.0])
        overlap = kdops_overlap(support_heights(pts_a, dirs), support_heights(pts_b, dirs))
        if not overlap:
            assert not _hulls_intersect_lp(pts_a, pts_b)
            checked_disjoint += 1
        else:
            # conservative direction: exact intersection implies k-dop overlap
            if _hulls_intersect_lp(pts_a, pts_b):
                assert overlap
    assert checked_disjoint > 5  # the sample actually exercised the claim


# ---------------------------------------------------------------------------
# tree


def test_single_patch_tree(rng):
    patch = random_patch(rng)
    dirs = DirectionSet.default14([patch])
    bvh = build_bvh([patch], dirs)
    assert bvh.root.is_leaf and bvh.root.patch_ids == [0]
    leaf = support_heights(patch.flat_points(), dirs)
    assert np.allclose(bvh.root.bounds.h_min, leaf.h_min)
    assert np.allclose(bvh.root.bounds.h_max, leaf.h_max)


def test_eight_octants_become_eight_leaves(rng):
    patches = []
    for dx in (0, 4):
        for dy in (0, 4):
            for dz in (0, 4):
                p = random_patch(rng)
                pts = p.points + np.array([dx, dy, dz], float)
                patches.append(type(p)(p.degree, pts, p.weights))
    dirs = DirectionSet.default14(patches)
    bvh = build_bvh(patches, dirs, max_leaf=1)
    assert len(bvh.root.children) == 8
    assert all(c.is_leaf and len(c.patch_ids) == 1 for c in bvh.root.children)


def _containment_walk(node, dirs_k):
    """Every child's bounds sit inside the parent's bounds."""
    ok = True
    for c in node.children:
        ok &= bool(
            np.all(node.bounds.h_min <= c.bounds.h_min + 1e-12)
            and np.all(node.bounds.h_max >= c.bounds.h_max - 1e-12)
        )
        ok &= _containment_walk(c, dirs_k)
    return ok


def _collect_leaf_ids(node):
    if node.is_leaf:
        return set(node.patch_ids)
    out = set()
    for c in node.children:
        out |= _collect_leaf_ids(c)
    return out


def test_tree_reaches_every_patch_with_contained_bounds(rng):
    patches = [random_patch(rng) for _ in range(150)]
    for idx, p in enumerate(patches):
        shift = rng.uniform(-4, 4, 3)
        patches[idx] = type(p)(p.degree, p.points + shift, p.weights)
    dirs = DirectionSet.default14(patches)
    bvh = build_bvh(patches, dirs)
    assert _collect_leaf_ids(bvh.root) == set(range(150))
    assert _containment_walk(bvh.root, dirs.k)
    for pid, pb in enumerate(bvh.patch_bounds):
        assert bvh.root.bounds.contains(pb), pid


def _scatter_patches(rng, n, spread=4.0):
    out = []
    for _ in range(n):
        p = random_patch(rng)
        out.append(type(p)(p.degree, p.points + rng.uniform(-spread, spread, 3), p.weights))
    return out


def test_query_far_segment_is_empty(rng):
    patches = _scatter_patches(rng, 40)
    dirs = DirectionSet.default14(patches)
    bvh = build_bvh(patches, dirs)
    assert query_segment(bvh, np.array([[50.0, 50, 50], [51.0, 51, 51]])) == []


def test_query_equals_bruteforce_scan(rng):
    patches = _scatter_patches(rng, 120)
    dirs = DirectionSet.default14(patches)
    bvh = build_bvh(patches, dirs)
    for _ in range(100):
        seg = rng.uniform(-5, 5, size=(2, 3))
        got = query_segment(bvh, seg)
        seg_b = support_heights(seg, dirs)
        want = sorted(
            pid for pid, pb in enumerate(bvh.patch_bounds) if kdops_overlap(pb, seg_b)
        )
        assert got == want


def test_more_directions_never_admit_more_candidates(rng):
    patches = _scatter_patches(rng, 60)
    d6 = DirectionSet.axes6()
    d14 = DirectionSet.default14(patches, lattice_axes=np.eye(3) + 0)
    bvh6 = build_bvh(patches, d6)
    bvh14 = build_bvh(patches, d14)
    for _ in range(200):
        seg = rng.uniform(-5, 5, size=(2, 3))
        c14 = set(query_segment(bvh14, seg))
        c6 = set(query_segment(bvh6, seg))
        assert c14 <= c6


def test_tree_stats_consistent(rng):
    patches = _scatter_patches(rng, 64)
    bvh = build_bvh(patches, DirectionSet.default14(patches))
    nodes, depth, hist = tree_stats(bvh)
    assert nodes >= 1 and depth >= 1
    assert sum(k * v for k, v in hist.items()) == 64
