import math

import numpy as np
import pytest

from splintersect.errors import InvalidArgumentError, MechanismError
from splintersect.fixtures import unit_bcc_truss
from splintersect.lattice import (
    INSIDE,
    LatticeSpec,
    TrussModel,
    build_truss,
    generate_lattice,
    homogenised_pyramidal,
)
from splintersect.truss import (
    TrussProblem,
    assemble_and_solve,
    assemble_stiffness,
    bc_from_json,
    strain_energy,
    strut_strain,
)


def test_strain_rigid_translation_is_zero():
    t = np.array([1.0, 0, 0])
    u = np.array([0.3, -0.2, 0.7])
    assert strut_strain(u, u, t, 2.0) == 0.0


def test_strain_axial_stretch():
    t = np.array([1.0, 0, 0])
    eps = strut_strain(np.array([0.1, 0, 0]), np.zeros(3), t, 1.0)
    assert eps == pytest.approx(0.1, abs=1e-15)


def test_strain_transverse_is_zero_linearized():
    t = np.array([1.0, 0, 0])
    eps = strut_strain(np.array([0.0, 0.5, 0]), np.zeros(3), t, 1.0)
    assert eps == 0.0


def test_strain_validation():
    with pytest.raises(InvalidArgumentError):
        strut_strain(np.zeros(3), np.zeros(3), np.array([1.0, 0, 0]), 0.0)
    with pytest.raises(InvalidArgumentError):
        strut_strain(np.zeros(3), np.zeros(3), np.array([2.0, 0, 0]), 1.0)


def _single_strut():
    return TrussModel(np.array([[0.0, 0, 0], [1.0, 0, 0]]), [(0, 1, 1.0)])


def test_single_strut_axial_spring():
    problem = TrussProblem(
        _single_strut(),
        youngs_modulus=1.0,
        fixed_dofs={(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)},
        point_loads={1: [1.0, 0.0, 0.0]},
    )
    sol = assemble_and_solve(problem)
    assert sol.displacements[1, 0] == pytest.approx(1.0, abs=1e-12)
    assert abs(sol.strains[0]) == pytest.approx(1.0, abs=1e-12)
    assert sol.compliance == pytest.approx(1.0, abs=1e-12)
    # reaction balances the applied load
    assert sol.reactions[0, 0] == pytest.approx(-1.0, abs=1e-12)


def test_single_strut_transverse_is_a_mechanism():
    problem = TrussProblem(
        _single_strut(),
        youngs_modulus=1.0,
        fixed_dofs={(0, 0), (0, 1), (0, 2)},
        point_loads={1: [0.0, 1.0, 0.0]},
    )
    with pytest.raises(MechanismError) as err:
        assemble_and_solve(problem)
    assert err.value.n_modes >= 1


def test_problem_validation():
    with pytest.raises(InvalidArgumentError):
        TrussProblem(_single_strut(), -1.0)
    with pytest.raises(InvalidArgumentError):
        TrussProblem(_single_strut(), 1.0, fixed_dofs={(5, 0)})
    with pytest.raises(InvalidArgumentError):
        TrussProblem(_single_strut(), 1.0, point_loads={7: [0, 0, 1]})


def test_pyramidal_cell_shear_matches_homogenised_modulus():
    a = 1.0
    youngs = 70e9
    spec = LatticeSpec((0, 0, 0), a, (1, 1, 1), cell_type="pyramidal")
    lat = generate_lattice(spec)
    lat.state[:] = INSIDE
    l_strut = a * math.sqrt(1.5)
    d_strut = 0.1 * l_strut
    area = math.pi * d_strut**2 / 4.0
    truss = build_truss(lat, "pyramidal", area=area)
    apex = len(truss.joints) - 1
    fixed = {(j, c) for j in range(8) for c in range(3)}
    problem = TrussProblem(truss, youngs, fixed, {apex: [1.0, 0.0, 0.0]})
    sol = assemble_and_solve(problem)
    k_num = 1.0 / sol.displacements[apex, 0]
    rho, shear = homogenised_pyramidal(d_strut, l_strut, math.atan(math.sqrt(2)), youngs)
    k_hom = shear * a  # tau * a^2 = G (u/a) a^2
    assert abs(k_num - k_hom) / k_hom < 0.02
    # the y direction gives the same out-of-plane shear stiffness
    problem_y = TrussProblem(truss, youngs, fixed, {apex: [0.0, 1.0, 0.0]})
    sol_y = assemble_and_solve(problem_y)
    assert sol_y.displacements[apex, 1] == pytest.approx(sol.displacements[apex, 0], rel=1e-10)


def test_stiffness_symmetry_and_energy_consistency(rng):
    cell = unit_bcc_truss(area=2e-4)
    youngs = 70e9
    k_full, _, _ = assemble_stiffness(cell, youngs)
    assert abs(k_full - k_full.T).max() <= 1e-12 * abs(k_full).max()
    fixed = {(j, c) for j in (0, 1, 2, 4) for c in range(3)}
    loads = {int(j): rng.normal(size=3) * 10.0 for j in (3, 5, 6, 7, 8)}
    problem = TrussProblem(cell, youngs, fixed, loads)
    sol = assemble_and_solve(problem)
    u = sol.displacements.reshape(-1)
    quad = 0.5 * float(u @ (k_full @ u))
    assert strain_energy(problem, sol) == pytest.approx(quad, rel=1e-10)
    assert sol.compliance == pytest.approx(2.0 * quad, rel=1e-10)


def test_force_balance(rng):
    cell = unit_bcc_truss(area=1e-4)
    fixed = {(j, c) for j in (0, 3, 5) for c in range(3)}
    loads = {int(j): rng.normal(size=3) for j in (1, 2, 4, 6, 7, 8)}
    problem = TrussProblem(cell, 1e9, fixed, loads)
    sol = assemble_and_solve(problem)
    total_load = sum(loads.values())
    total_reaction = sol.reactions.sum(axis=0)
    assert np.linalg.norm(total_reaction + total_load) <= 1e-10 * np.linalg.norm(total_load)


def test_rigid_body_modes_of_rigid_structure():
    # tetrahedron: kinematically determinate, exactly 6 rigid modes
    pts = np.array(
        [
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.5, math.sqrt(3) / 2, 0.0],
            [0.5, math.sqrt(3) / 6, math.sqrt(2.0 / 3.0)],
        ]
    )
    struts = [(a, b, 1.0) for a in range(4) for b in range(a + 1, 4)]
    tet = TrussModel(pts, struts)
    k_full, _, _ = assemble_stiffness(tet, 1.0)
    w = np.linalg.eigvalsh(k_full.toarray())
    scale = np.trace(k_full.toarray()) / k_full.shape[0]
    assert int(np.sum(np.abs(w) < 1e-10 * scale)) == 6


def test_per_strut_areas_are_respected():
    joints = np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]])
    model = TrussModel(joints, [(0, 1, 2.0), (1, 2, 1.0)])
    fixed = {(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 1), (2, 2)}
    problem = TrussProblem(model, 1.0, fixed, {2: [1.0, 0, 0]})
    sol = assemble_and_solve(problem)
    # springs in series: u1 = F l / (E A1), u2 = u1 + F l / (E A2)
    assert sol.displacements[1, 0] == pytest.approx(0.5, abs=1e-12)
    assert sol.displacements[2, 0] == pytest.approx(1.5, abs=1e-12)


def test_bc_parsing():
    fixed, loads = bc_from_json(
        {"fixed": [[0, 0], [0, 1]], "loads": [[1, 0.0, 0.0, -9.0], [1, 1.0, 0.0, 0.0]]}
    )
    assert fixed == {(0, 0), (0, 1)}
    assert np.allclose(loads[1], [1.0, 0.0, -9.0])
    with pytest.raises(InvalidArgumentError):
        bc_from_json({"fixed": [["a", 0]]})
