"""Linear statics of pin-jointed trusses.

Strut energy density is E*eps^2/2 with the axial strain
eps = (u_left - u_right) . t / l, where "left" is the lower-indexed joint of
the strut. Stationarity of the total energy gives the usual per-strut
stiffness (E A / l) t t^T scattered into the global matrix; fixed dofs are
eliminated and the reduced system is solved with a sparse direct
factorization.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import InvalidArgumentError, MechanismError
from .lattice import TrussModel

log = logging.getLogger(__name__)


@dataclass(eq=False)
class TrussProblem:
    """Truss plus material and boundary conditions.

    fixed_dofs: iterable of (joint, component) pairs; point_loads: mapping
    joint -> 3-vector force.
    """

    truss: TrussModel
    youngs_modulus: float
    fixed_dofs: set = field(default_factory=set)
    point_loads: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise InvalidArgumentError("Young's modulus must be positive")
        n = len(self.truss.joints)
        fixed = set()
        for joint, comp in self.fixed_dofs:
            if not (0 <= int(joint) < n and 0 <= int(comp) < 3):
                raise InvalidArgumentError(f"fixed dof ({joint}, {comp}) out of range")
            fixed.add((int(joint), int(comp)))
        self.fixed_dofs = fixed
        loads = {}
        for joint, force in self.point_loads.items():
            if not 0 <= int(joint) < n:
                raise InvalidArgumentError(f"loaded joint {joint} out of range")
            loads[int(joint)] = np.asarray(force, dtype=float).reshape(3)
        self.point_loads = loads


@dataclass(eq=False)
class TrussSolution:
    displacements: np.ndarray  # (J, 3)
    strains: np.ndarray  # per strut
    compliance: float
    reactions: np.ndarray  # (J, 3), non-zero only at fixed dofs

    def to_json(self):
        return {
            "schema": 1,
            "displacements": [[float(c) for c in row] for row in self.displacements],
            "strains": [float(s) for s in self.strains],
            "compliance": float(self.compliance),
            "reactions": [[float(c) for c in row] for row in self.reactions],
        }


def strut_strain(u_left, u_right, tangent, length):
    """Axial strain ((u_left - u_right) . t) / l; sign convention is fixed by
    which joint the caller designates as left."""
    t = np.asarray(tangent, dtype=float)
    if length <= 0.0:
        raise InvalidArgumentError("strut length must be positive")
    if abs(np.linalg.norm(t) - 1.0) > 1e-12:
        raise InvalidArgumentError("tangent must be a unit vector")
    du = np.asarray(u_left, dtype=float) - np.asarray(u_right, dtype=float)
    return float(du @ t) / float(length)


def _geometry(truss):
    tangents = np.empty((len(truss.struts), 3))
    lengths = np.empty(len(truss.struts))
    for idx, (a, b, _) in enumerate(truss.struts):
        d = truss.joints[b] - truss.joints[a]
        lengths[idx] = np.linalg.norm(d)
        tangents[idx] = d / lengths[idx]
    return tangents, lengths


def assemble_stiffness(truss, youngs_modulus):
    """Global sparse stiffness matrix (3 dofs per joint)."""
    n_dof = 3 * len(truss.joints)
    tangents, lengths = _geometry(truss)
    rows, cols, vals = [], [], []
    for idx, (a, b, area) in enumerate(truss.struts):
        t = tangents[idx]
        k = youngs_modulus * area / lengths[idx]
        block = k * np.outer(t, t)
        dofs = [3 * a, 3 * a + 1, 3 * a + 2, 3 * b, 3 * b + 1, 3 * b + 2]
        ke = np.block([[block, -block], [-block, block]])
        for i in range(6):
            for j in range(6):
                rows.append(dofs[i])
                cols.append(dofs[j])
                vals.append(ke[i, j])
    k_full = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(n_dof, n_dof))
    return k_full.tocsc(), tangents, lengths


def _near_zero_mode_count(k_red):
    n = k_red.shape[0]
    dense = k_red.toarray() if n <= 1500 else None
    if dense is None:
        return -1  # unknown at this scale
    w = np.linalg.eigvalsh(0.5 * (dense + dense.T))
    scale = max(np.trace(dense) / n, 1e-300)
    return int(np.sum(np.abs(w) < 1e-10 * scale))


def assemble_and_solve(problem):
    """Reduced direct solve; raises MechanismError on a singular system."""
    truss = problem.truss
    n_dof = 3 * len(truss.joints)
    k_full, tangents, lengths = assemble_stiffness(truss, problem.youngs_modulus)
    f = np.zeros(n_dof)
    for joint, force in problem.point_loads.items():
        f[3 * joint : 3 * joint + 3] += force
    fixed_mask = np.zeros(n_dof, dtype=bool)
    for joint, comp in problem.fixed_dofs:
        fixed_mask[3 * joint + comp] = True
    free = np.flatnonzero(~fixed_mask)
    if free.size == 0:
        u = np.zeros(n_dof)
    else:
        k_red = k_full[free][:, free].tocsc()
        f_red = f[free]
        try:
            lu = scipy.sparse.linalg.splu(k_red)
            u_red = lu.solve(f_red)
        except RuntimeError as exc:
            raise MechanismError(_near_zero_mode_count(k_red)) from exc
        if not np.all(np.isfinite(u_red)):
            raise MechanismError(_near_zero_mode_count(k_red))
        residual = np.linalg.norm(k_red @ u_red - f_red)
        if residual > 1e-8 * (np.linalg.norm(f_red) + 1e-300):
            raise MechanismError(_near_zero_mode_count(k_red))
        u = np.zeros(n_dof)
        u[free] = u_red
    disp = u.reshape(-1, 3)
    strains = np.empty(len(truss.struts))
    for idx, (a, b, _) in enumerate(truss.struts):
        strains[idx] = strut_strain(disp[a], disp[b], tangents[idx], lengths[idx])
    reactions_vec = k_full @ u - f
    reactions = np.where(fixed_mask, reactions_vec, 0.0).reshape(-1, 3)
    compliance = float(f @ u)
    return TrussSolution(disp, strains, compliance, reactions)


def strain_energy(problem, solution):
    """Sum of E/2 * eps^2 * A * l over the struts."""
    truss = problem.truss
    _, lengths = _geometry(truss)
    areas = np.array([s[2] for s in truss.struts])
    return float(
        0.5 * problem.youngs_modulus * np.sum(solution.strains**2 * areas * lengths)
    )


# ---------------------------------------------------------------------------
# boundary-condition and solution files


def bc_from_json(doc):
    """{"fixed": [[joint, comp], ...], "loads": [[joint, fx, fy, fz], ...]}"""
    try:
        fixed = {(int(j), int(c)) for j, c in doc.get("fixed", [])}
        loads = {}
        for j, fx, fy, fz in doc.get("loads", []):
            loads[int(j)] = loads.get(int(j), np.zeros(3)) + np.array([fx, fy, fz], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed bc file: {exc}") from exc
    return fixed, loads


def load_bc(path):
    with open(path) as fh:
        return bc_from_json(json.load(fh))


def save_solution(path, solution):
    with open(path, "w") as fh:
        json.dump(solution.to_json(), fh, indent=1)


__all__ = [
    "TrussProblem",
    "TrussSolution",
    "assemble_and_solve",
    "assemble_stiffness",
    "bc_from_json",
    "load_bc",
    "save_solution",
    "strain_energy",
    "strut_strain",
]
