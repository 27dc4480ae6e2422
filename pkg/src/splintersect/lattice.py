"""Lattice immersion, edge-surface intersection, parity classification,
vertex projection and truss extraction.

A periodic cubic lattice is generated inside a closed spline surface; every
lattice line is intersected with the surface (BVH candidates first, matrix
pipeline second), vertices are classified inside/outside by crossing parity,
the vertices nearest to each intersection are pulled onto the surface, and
the surviving grid is tessellated into a pin-jointed truss.
"""

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bezier import patch_eval
from .errors import InvalidArgumentError, NumericalFailureError, OpenSurfaceError
from .implicitize import RankTolerance, build_mrep
from .intersect import IntersectOptions, ParametricLine, intersect_patch_line
from .kdop import query_segment

log = logging.getLogger(__name__)

UNKNOWN, INSIDE, OUTSIDE, PROJECTED = 0, 1, 2, 3
STATE_NAMES = {UNKNOWN: "unknown", INSIDE: "inside", OUTSIDE: "outside", PROJECTED: "projected"}

CELL_TYPES = ("bcc", "pyramidal", "cubic_edges")


def rotation_from_angles(angles_deg):
    """Intrinsic x-y-z rotation matrix from three angles in degrees."""
    ax, ay, az = (math.radians(a) for a in angles_deg)
    cx, sx = math.cos(ax), math.sin(ax)
    cy, sy = math.cos(ay), math.sin(ay)
    cz, sz = math.cos(az), math.sin(az)
    rx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]])
    ry = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]])
    rz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]])
    return rz @ ry @ rx


@dataclass(frozen=True, eq=False)
class LatticeSpec:
    """Periodic cubic lattice: origin corner, cell size, cell counts, rigid
    orientation (applied about the lattice centroid) and strut tessellation."""

    origin: np.ndarray
    cell_size: float
    counts: tuple
    orientation: np.ndarray = None
    cell_type: str = "bcc"

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3)
        counts = tuple(int(c) for c in self.counts)
        if self.cell_size <= 0.0:
            raise InvalidArgumentError("cell_size must be positive")
        if any(c < 1 for c in counts):
            raise InvalidArgumentError("cell counts must be >= 1")
        if self.cell_type not in CELL_TYPES:
            raise InvalidArgumentError(f"unknown cell type {self.cell_type!r}")
        rot = self.orientation
        if rot is None:
            rot = np.eye(3)
        else:
            rot = np.asarray(rot, dtype=float)
            if rot.shape == (3,):
                rot = rotation_from_angles(rot)
            if rot.shape != (3, 3) or np.abs(rot @ rot.T - np.eye(3)).max() > 1e-12:
                raise InvalidArgumentError("orientation must be orthonormal (or 3 angles)")
        origin.flags.writeable = False
        rot = rot.copy()
        rot.flags.writeable = False
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "cell_size", float(self.cell_size))
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "orientation", rot)

    @classmethod
    def from_json(cls, doc):
        try:
            return cls(
                origin=doc.get("origin", (0.0, 0.0, 0.0)),
                cell_size=doc["cell_size"],
                counts=doc["counts"],
                orientation=doc.get("orientation"),
                cell_type=doc.get("cell_type", "bcc"),
            )
        except KeyError as exc:
            raise InvalidArgumentError(f"lattice config missing key {exc}") from exc

    def to_json(self):
        return {
            "schema": 1,
            "origin": [float(c) for c in self.origin],
            "cell_size": self.cell_size,
            "counts": list(self.counts),
            "orientation": [[float(v) for v in row] for row in self.orientation],
            "cell_type": self.cell_type,
        }

    def centroid(self):
        n = np.asarray(self.counts, dtype=float)
        return self.origin + 0.5 * self.cell_size * n


class LatticeModel:
    """Mutable working model: grid vertices with classification state, edges
    grouped into lattice lines, and per-line sorted intersections."""

    def __init__(self, spec, vertices, lines, edges):
        self.spec = spec
        self.vertices = vertices  # (N, 3), updated in place by projection
        self.state = np.full(len(vertices), UNKNOWN, dtype=np.int8)
        self.lines = lines  # {(direction, a, b): [vertex ids in order]}
        self.edges = edges  # {(v_lo, v_hi): (direction, a, b)}
        self.intersections = {}  # line key -> [(s, theta, patch_id, point)]
        self.theta = {}  # vertex id -> (theta, patch_id) once projected
        self.unprojected = []  # hits that could not claim a vertex
        self.failed_lines = []

    def vertex_grid_shape(self):
        n1, n2, n3 = self.spec.counts
        return (n1 + 1, n2 + 1, n3 + 1)

    def vertex_id(self, i, j, k):
        n1, n2, n3 = self.spec.counts
        return i + (n1 + 1) * (j + (n2 + 1) * k)

    def surviving_vertices(self):
        return np.flatnonzero((self.state == INSIDE) | (self.state == PROJECTED))

    def surviving_edges(self):
        keep = (self.state == INSIDE) | (self.state == PROJECTED)
        return [e for e in self.edges if keep[e[0]] and keep[e[1]]]


def generate_lattice(spec):
    """Grid vertices and axis-aligned edges (rotated about the centroid)."""
    n1, n2, n3 = spec.counts
    h = spec.cell_size
    ii, jj, kk = np.meshgrid(
        np.arange(n1 + 1), np.arange(n2 + 1), np.arange(n3 + 1), indexing="ij"
    )
    grid = np.stack([ii, jj, kk], axis=-1)
    # flat vertex id = i + (n1+1) * (j + (n2+1) * k)
    pts = spec.origin + h * grid.transpose(2, 1, 0, 3).reshape(-1, 3).astype(float)
    # rotate about the lattice centroid
    c = spec.centroid()
    pts = (pts - c) @ spec.orientation.T + c

    def vid(i, j, k):
        return i + (n1 + 1) * (j + (n2 + 1) * k)

    lines = {}
    edges = {}
    for j in range(n2 + 1):
        for k in range(n3 + 1):
            ids = [vid(i, j, k) for i in range(n1 + 1)]
            lines[(0, j, k)] = ids
            for a, b in zip(ids, ids[1:]):
                edges[(a, b)] = (0, j, k)
    for i in range(n1 + 1):
        for k in range(n3 + 1):
            ids = [vid(i, j, k) for j in range(n2 + 1)]
            lines[(1, i, k)] = ids
            for a, b in zip(ids, ids[1:]):
                edges[(a, b)] = (1, i, k)
    for i in range(n1 + 1):
        for j in range(n2 + 1):
            ids = [vid(i, j, k) for k in range(n3 + 1)]
            lines[(2, i, j)] = ids
            for a, b in zip(ids, ids[1:]):
                edges[(a, b)] = (2, i, j)
    return LatticeModel(spec, pts, lines, edges)


def _check_contained(lattice, patches):
    """The parity rule assumes the surface sits inside the lattice box.

    The control-net hull is a fast sufficient test; when it protrudes (the
    middle control points of rational arcs routinely do) the decision falls
    to a sampled-surface bound. A protrusion between samples would surface
    later as an odd-parity line.
    """
    spec = lattice.spec
    c = spec.centroid()
    lo = spec.origin
    hi = spec.origin + spec.cell_size * np.asarray(spec.counts, dtype=float)
    pad = 1e-9 * spec.cell_size
    ts = np.linspace(0.0, 1.0, 7)
    for idx, p in enumerate(patches):
        local = (p.flat_points() - c) @ spec.orientation + c  # into lattice frame
        if np.all(local >= lo - pad) and np.all(local <= hi + pad):
            continue
        samples = np.array([patch_eval(p, (a, b)) for a in ts for b in ts])
        local = (samples - c) @ spec.orientation + c
        if np.any(local < lo - pad) or np.any(local > hi + pad):
            raise InvalidArgumentError(
                f"patch {idx} extends outside the lattice box; "
                "enlarge the lattice so the surface is fully contained"
            )


def compute_intersections(lattice, bvh, patches, tol=None, opts=None, mreps=None, threads=1):
    """Fill per-line intersection lists via BVH candidates and the matrix
    pipeline. Numerical failures are collected per line and those lines are
    marked unreliable rather than aborting the whole model."""
    opts = opts or IntersectOptions()
    if tol is not None:
        eps = tol.epsilon if isinstance(tol, RankTolerance) else float(tol)
        opts = replace(opts, epsilon=eps)
    _check_contained(lattice, patches)
    if mreps is None:
        mreps = {i: build_mrep(p, tol=RankTolerance(opts.epsilon)) for i, p in enumerate(patches)}
    seam_tol = 1e-6 * lattice.spec.cell_size

    def one_line(item):
        key, ids = item
        p0 = lattice.vertices[ids[0]]
        p1 = lattice.vertices[ids[-1]]
        length = float(np.linalg.norm(p1 - p0))
        seg = ParametricLine.through(p0, p1)
        hits = []
        failures = 0
        for pid in query_segment(bvh, np.vstack([p0, p1])):
            try:
                recs = intersect_patch_line(
                    patches[pid], seg, opts=opts, mrep=mreps[pid], patch_id=pid
                )
            except NumericalFailureError as exc:
                log.warning("line %s patch %s: %s", key, pid, exc)
                failures += 1
                continue
            for r in recs:
                hits.append((r.xi * length, r.theta, pid, r.point))
        hits.sort(key=lambda h: h[0])
        merged = []
        for h in hits:
            if merged and h[0] - merged[-1][0] <= seam_tol:
                continue  # same physical point reported by a seam-sharing patch
            merged.append(h)
        return key, merged, failures

    items = sorted(lattice.lines.items())
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_line, items))
    else:
        results = [one_line(it) for it in items]
    for key, merged, failures in results:
        lattice.intersections[key] = merged
        if failures:
            lattice.failed_lines.append(key)
    return lattice


def classify_and_project(lattice, tol=None):
    """Parity classification along every line, then vertex projection.

    Vertices between the (1st, 2nd), (3rd, 4th), ... intersections are inside;
    each intersection pulls its nearest non-projected vertex onto the surface
    (ties toward the inside vertex); outside non-projected vertices and their
    edges are dropped by the accessors.
    """
    spec = lattice.spec
    h = spec.cell_size
    snap = float(tol) if tol is not None else 1e-9 * h
    # parity pass: inside unless some line votes strictly outside; vertices
    # sitting exactly on a hit are left to the projection pass
    lattice.state[:] = INSIDE
    for key, ids in lattice.lines.items():
        hits = lattice.intersections.get(key, [])
        if len(hits) % 2 == 1:
            raise OpenSurfaceError(
                f"line {key} has {len(hits)} intersections; surface is not closed"
            )
        positions = [hit[0] for hit in hits]
        for rank, vid in enumerate(ids):
            s_v = rank * h
            if any(abs(s - s_v) <= snap for s in positions):
                continue
            below = sum(1 for s in positions if s < s_v - snap)
            if below % 2 == 0:
                lattice.state[vid] = OUTSIDE
    # projection pass, line by line in index order for determinism
    for key in sorted(lattice.lines):
        ids = lattice.lines[key]
        for s, theta, pid, point in lattice.intersections.get(key, []):
            choices = sorted(
                range(len(ids)),
                key=lambda r: (
                    abs(r * h - s),
                    0 if lattice.state[ids[r]] == INSIDE else 1,
                ),
            )
            placed = False
            for r in choices:
                if abs(r * h - s) >= h:
                    break  # only vertices within one cell may move
                vid = ids[r]
                if lattice.state[vid] == PROJECTED:
                    prev = lattice.vertices[vid]
                    if np.linalg.norm(prev - point) <= snap:
                        placed = True  # already sits at this very hit
                        break
                    continue
                lattice.vertices[vid] = np.asarray(point, dtype=float)
                lattice.state[vid] = PROJECTED
                lattice.theta[vid] = (theta, pid)
                placed = True
                break
            if not placed:
                log.warning("intersection at s=%.6g on line %s left unprojected", s, key)
                lattice.unprojected.append((key, s, theta, pid))
    return lattice


@dataclass(eq=False)
class TrussModel:
    """Joints (with optional surface coordinates) and struts with areas."""

    joints: np.ndarray
    struts: list  # [(j1, j2, area)]
    on_surface: np.ndarray = None
    theta: list = None
    patch_ids: list = None

    def __post_init__(self):
        self.joints = np.asarray(self.joints, dtype=float).reshape(-1, 3)
        if self.on_surface is None:
            self.on_surface = np.zeros(len(self.joints), dtype=bool)
        else:
            self.on_surface = np.asarray(self.on_surface, dtype=bool)
        if self.theta is None:
            self.theta = [None] * len(self.joints)
        if self.patch_ids is None:
            self.patch_ids = [None] * len(self.joints)
        seen = set()
        cleaned = []
        for j1, j2, area in self.struts:
            a, b = (int(j1), int(j2)) if j1 < j2 else (int(j2), int(j1))
            if a == b:
                raise InvalidArgumentError(f"strut connects joint {a} to itself")
            if (a, b) in seen:
                continue
            seen.add((a, b))
            length = float(np.linalg.norm(self.joints[b] - self.joints[a]))
            if length <= 0.0:
                log.warning("dropping zero-length strut (%d, %d)", a, b)
                continue
            cleaned.append((a, b, float(area)))
        self.struts = cleaned

    def strut_lengths(self):
        out = np.empty(len(self.struts))
        for idx, (a, b, _) in enumerate(self.struts):
            out[idx] = np.linalg.norm(self.joints[b] - self.joints[a])
        return out

    def to_json(self):
        joints = []
        for idx, x in enumerate(self.joints):
            entry = {"x": [float(c) for c in x], "on_surface": bool(self.on_surface[idx])}
            if self.on_surface[idx] and self.theta[idx] is not None:
                th = self.theta[idx]
                entry["theta"] = [float(t) for t in np.atleast_1d(th)]
                pid = self.patch_ids[idx]
                entry["patch"] = None if pid is None else int(pid)
            joints.append(entry)
        return {
            "schema": 1,
            "joints": joints,
            "struts": [[a, b, area] for a, b, area in self.struts],
        }

    @classmethod
    def from_json(cls, doc):
        try:
            joints = np.array([j["x"] for j in doc["joints"]], dtype=float)
            on_surface = np.array([bool(j.get("on_surface", False)) for j in doc["joints"]])
            theta = [j.get("theta") for j in doc["joints"]]
            patch_ids = [j.get("patch") for j in doc["joints"]]
            struts = [(int(a), int(b), float(area)) for a, b, area in doc["struts"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidArgumentError(f"malformed truss file: {exc}") from exc
        return cls(joints, struts, on_surface, theta, patch_ids)


def save_truss(path, truss):
    with open(path, "w") as fh:
        json.dump(truss.to_json(), fh, indent=1)


def load_truss(path):
    with open(path) as fh:
        return TrussModel.from_json(json.load(fh))


def build_truss(lattice, cell_type=None, area=1.0):
    """Tessellate the surviving lattice into joints and struts.

    cubic_edges: surviving grid edges only. bcc: grid edges plus a centre
    joint with 8 diagonals in every cell whose corners all survive.
    pyramidal: four struts per full cell rising from the bottom corners to
    the top-face centre (no in-plane members, matching the zero in-plane
    stiffness of the homogenised core).
    """
    cell_type = cell_type or lattice.spec.cell_type
    if cell_type not in CELL_TYPES:
        raise InvalidArgumentError(f"unknown cell type {cell_type!r}")
    surviving = lattice.surviving_vertices()
    index = {int(v): i for i, v in enumerate(surviving)}
    joints = [lattice.vertices[v].copy() for v in surviving]
    on_surface = [lattice.state[v] == PROJECTED for v in surviving]
    theta = [lattice.theta.get(int(v), (None, None))[0] for v in surviving]
    patch_ids = [lattice.theta.get(int(v), (None, None))[1] for v in surviving]
    struts = []
    if cell_type in ("bcc", "cubic_edges"):
        for a, b in lattice.surviving_edges():
            struts.append((index[a], index[b], area))
    n1, n2, n3 = lattice.spec.counts
    if cell_type in ("bcc", "pyramidal"):
        for i in range(n1):
            for j in range(n2):
                for k in range(n3):
                    corners = [
                        lattice.vertex_id(i + di, j + dj, k + dk)
                        for dk in (0, 1)
                        for dj in (0, 1)
                        for di in (0, 1)
                    ]
                    if not all(c in index for c in corners):
                        continue
                    pos = np.array([lattice.vertices[c] for c in corners])
                    if cell_type == "bcc":
                        centre = pos.mean(axis=0)
                        cid = len(joints)
                        joints.append(centre)
                        on_surface.append(False)
                        theta.append(None)
                        patch_ids.append(None)
                        for c in corners:
                            struts.append((index[c], cid, area))
                    else:
                        # bottom corners at dk=0 are the first four entries
                        apex = pos[4:].mean(axis=0)
                        cid = len(joints)
                        joints.append(apex)
                        on_surface.append(False)
                        theta.append(None)
                        patch_ids.append(None)
                        for c in corners[:4]:
                            struts.append((index[c], cid, area))
    return TrussModel(np.array(joints), struts, np.array(on_surface), theta, patch_ids)


def homogenised_pyramidal(d, l, phi, youngs_modulus):
    """Relative density and out-of-plane shear modulus of a pyramidal core.

    rho = pi / (2 cos^2(phi) sin(phi)) * (d/l)^2 and G = rho/8 * E * sin^2(2 phi)
    for strut diameter d, strut length l and inclination phi.
    """
    if d <= 0 or l <= 0 or youngs_modulus <= 0:
        raise InvalidArgumentError("d, l and E must be positive")
    if not 0.0 < phi < math.pi / 2:
        raise InvalidArgumentError("phi must lie in (0, pi/2)")
    rho = math.pi / (2.0 * math.cos(phi) ** 2 * math.sin(phi)) * (d / l) ** 2
    shear = rho / 8.0 * youngs_modulus * math.sin(2.0 * phi) ** 2
    return rho, shear


def verify_on_surface(truss, patches, tol=1e-7):
    """Check that every on-surface joint matches patch_eval at its theta."""
    worst = 0.0
    for idx in np.flatnonzero(truss.on_surface):
        th = truss.theta[idx]
        pid = truss.patch_ids[idx]
        if th is None or pid is None:
            continue
        y = patch_eval(patches[pid], th)
        worst = max(worst, float(np.linalg.norm(y - truss.joints[idx])))
    return worst <= tol, worst


__all__ = [
    "CELL_TYPES",
    "INSIDE",
    "OUTSIDE",
    "PROJECTED",
    "UNKNOWN",
    "LatticeModel",
    "LatticeSpec",
    "TrussModel",
    "build_truss",
    "classify_and_project",
    "compute_intersections",
    "generate_lattice",
    "homogenised_pyramidal",
    "load_truss",
    "rotation_from_angles",
    "save_truss",
    "verify_on_surface",
]
