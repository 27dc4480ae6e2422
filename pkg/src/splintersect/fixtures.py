"""Bundled geometry fixtures used by the CLI, the tests and the benchmarks.

``fixture:<name>`` pseudo-paths (accepted by the CLI wherever a patch or
truss file is expected) resolve to the JSON files in ``splintersect/data``;
the builders here generate those files and give tests exact geometry.
"""

import json
import math
from importlib import resources

import numpy as np

from .bezier import BezierCurve, RationalBezierPatch, patches_to_json
from .errors import InvalidArgumentError
from .lattice import TrussModel

FIXTURE_NAMES = ("two-lines", "sphere", "bcc-cell")


def two_lines_curve():
    """Linear curve from (0,-1,0) to (1,1,0) with unit weights."""
    return BezierCurve(1, np.array([[0.0, -1.0, 0.0], [1.0, 1.0, 0.0]]), np.ones(2))


def two_lines_probe_points():
    """The second line, r(xi) = (xi, 1-xi, 0), as its two endpoints."""
    return np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0])


def _quadrant_arc(alpha):
    """Control columns of one 90-degree circular arc starting at angle alpha:
    (cos/sin pairs, middle point scaled to the tangent intersection)."""
    a0 = alpha
    am = alpha + math.pi / 4.0
    a1 = alpha + math.pi / 2.0
    s = math.sqrt(2.0)
    return (
        np.array([math.cos(a0), math.sin(a0)]),
        s * np.array([math.cos(am), math.sin(am)]),
        np.array([math.cos(a1), math.sin(a1)]),
    )


def sphere_patches(center=(0.5, 0.5, 0.5), radius=0.4):
    """Exact sphere as 8 rational biquadratic patches (surface of revolution:
    two quadratic profile arcs times four revolution quadrants)."""
    center = np.asarray(center, dtype=float)
    r = float(radius)
    if r <= 0:
        raise InvalidArgumentError("radius must be positive")
    w_mid = math.sqrt(0.5)
    # profile arcs in the (radial, z) plane: south pole -> equator -> north pole
    profiles = [
        (np.array([[0.0, -r], [r, -r], [r, 0.0]]), np.array([1.0, w_mid, 1.0])),
        (np.array([[r, 0.0], [r, r], [0.0, r]]), np.array([1.0, w_mid, 1.0])),
    ]
    patches = []
    for prof_pts, prof_w in profiles:
        for quadrant in range(4):
            cols = _quadrant_arc(quadrant * math.pi / 2.0)
            col_w = np.array([1.0, w_mid, 1.0])
            pts = np.empty((3, 3, 3))
            w = np.empty((3, 3))
            for i in range(3):
                rho, z = prof_pts[i]
                for j in range(3):
                    pts[i, j, 0] = rho * cols[j][0]
                    pts[i, j, 1] = rho * cols[j][1]
                    pts[i, j, 2] = z
                    w[i, j] = prof_w[i] * col_w[j]
            patches.append(RationalBezierPatch((2, 2), pts + center, w))
    return patches


def unit_bcc_truss(cell_size=1.0, area=1e-4):
    """Single body-centred cubic cell: 8 corner joints, 1 centre joint,
    12 edge struts and 8 diagonals."""
    h = float(cell_size)
    corners = [
        np.array([float(i), float(j), float(k)]) * h
        for k in (0, 1)
        for j in (0, 1)
        for i in (0, 1)
    ]
    joints = np.array(corners + [np.full(3, 0.5 * h)])
    edges = []
    for a in range(8):
        for b in range(a + 1, 8):
            if np.count_nonzero(joints[a] != joints[b]) == 1:
                edges.append((a, b, area))
    diagonals = [(a, 8, area) for a in range(8)]
    return TrussModel(joints, edges + diagonals)


def fixture_json(name):
    name = name.lower()
    if name == "two-lines":
        return patches_to_json([two_lines_curve().as_patch()])
    if name == "sphere":
        return patches_to_json(sphere_patches())
    if name == "bcc-cell":
        return unit_bcc_truss().to_json()
    raise InvalidArgumentError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")


def resolve_path(path_or_fixture):
    """Map ``fixture:<name>`` to the packaged data file, else pass through."""
    if not str(path_or_fixture).startswith("fixture:"):
        return path_or_fixture
    name = str(path_or_fixture).split(":", 1)[1].lower()
    if name not in FIXTURE_NAMES:
        raise InvalidArgumentError(f"unknown fixture {name!r}; have {FIXTURE_NAMES}")
    return resources.files("splintersect.data").joinpath(f"{name}.json")


def write_fixture_files(directory):
    """Regenerate the packaged fixture JSON files (used at development time)."""
    import pathlib

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in FIXTURE_NAMES:
        with open(directory / f"{name}.json", "w") as fh:
            json.dump(fixture_json(name), fh, indent=1)


__all__ = [
    "FIXTURE_NAMES",
    "two_lines_curve",
    "two_lines_probe_points",
    "fixture_json",
    "resolve_path",
    "sphere_patches",
    "unit_bcc_truss",
    "write_fixture_files",
]
