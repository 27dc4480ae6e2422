import numpy as np
import pytest

from conftest import random_patch
from splintersect.bezier import (
    BezierCurve,
    bernstein_basis,
    patch_eval,
    patch_normal,
)
from splintersect.errors import InvalidArgumentError
from splintersect.implicitize import (
    AuxBasisSpec,
    MRep,
    RankTolerance,
    assemble_C,
    build_mrep,
    mrep_eval,
    null_space,
    numerical_rank,
    rank_drop_test,
)

TWO_LINES_CURVE = BezierCurve(1, np.array([[0.0, -1, 0], [1, 1, 0]]), np.ones(2))

# coefficient matrices and null bases of the two-line case, hand-derived
C_CONST = np.array([[0.0, -1, 0, 1], [1, 1, 0, 1]])
C_LINEAR = np.array(
    [
        [0.0, -1, 0, 1, 0, 0, 0, 0],
        [0.5, 0.5, 0, 0.5, 0, -0.5, 0, 0.5],
        [0.0, 0, 0, 0, 1, 1, 0, 1],
    ]
)
NULL_CONST = np.array([[-2.0, 1, 0, 1], [0, 0, 1, 0]])
NULL_LINEAR = np.array(
    [
        [-1.0, 0, 0, 0, -1, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [1, 0, 0, 0, -1, 1, 0, 0],
        [-2, 1, 0, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
    ]
)


def span_residual(vectors, basis):
    q, _ = np.linalg.qr(np.asarray(basis, float).T)
    proj = q @ q.T
    return float(np.abs(vectors.T - proj @ vectors.T).max())


def test_constant_aux_coefficient_matrix_is_exact():
    c = assemble_C(TWO_LINES_CURVE, AuxBasisSpec(0))
    assert np.array_equal(c, C_CONST)


def test_linear_aux_coefficient_matrix_is_exact():
    c = assemble_C(TWO_LINES_CURVE, AuxBasisSpec(1))
    assert np.allclose(c, C_LINEAR, atol=1e-15)


def test_null_space_dimensions_and_spans():
    n0 = null_space(C_CONST)
    n1 = null_space(C_LINEAR)
    assert n0.shape[0] == 2
    assert n1.shape[0] == 5
    assert span_residual(n0, NULL_CONST) < 1e-10
    assert span_residual(n1, NULL_LINEAR) < 1e-10
    # orthonormality of the returned basis
    assert np.allclose(n0 @ n0.T, np.eye(2), atol=1e-12)
    assert np.allclose(n1 @ n1.T, np.eye(5), atol=1e-12)


def test_identity_has_empty_null_space():
    assert null_space(np.eye(4)).shape[0] == 0


def test_constant_aux_mrep_matches_up_to_column_transform():
    m = build_mrep(TWO_LINES_CURVE, AuxBasisSpec(0))

    def reference_row(x):
        return np.array([[-2 * x[0] + x[1] + 1, x[2]]])

    xs = [np.array(v, float) for v in ((0.3, 0.7, 0.2), (1, 2, 3), (0, 0, 1), (-1, 0.5, 0.25))]
    ours = np.vstack([mrep_eval(m, x) for x in xs])
    reference = np.vstack([reference_row(x) for x in xs])
    transform, *_ = np.linalg.lstsq(reference, ours, rcond=None)
    assert np.abs(reference @ transform - ours).max() < 1e-12
    assert abs(np.linalg.det(transform)) > 1e-8


def test_linear_aux_rank_one_on_curve_two_off():
    m = build_mrep(TWO_LINES_CURVE, AuxBasisSpec(1))
    on = mrep_eval(m, np.array([2 / 3, 1 / 3, 0.0]))
    off = mrep_eval(m, np.array([10.0, 10.0, 10.0]))
    s_on = np.linalg.svd(on, compute_uv=False)
    s_off = np.linalg.svd(off, compute_uv=False)
    assert numerical_rank(s_on, 1e-6, 1e-12) == 1
    assert numerical_rank(s_off, 1e-6, 1e-12) == 2
    assert rank_drop_test(on)
    assert not rank_drop_test(off)


def test_rank_drop_trivial_cases():
    assert rank_drop_test(np.zeros((2, 2)))
    assert not rank_drop_test(np.eye(4))


def test_aux_spec_validation():
    with pytest.raises(InvalidArgumentError):
        AuxBasisSpec(-1)
    with pytest.raises(InvalidArgumentError):
        AuxBasisSpec((1, 0)).validate_against((2, 2))  # below (3, 1)
    AuxBasisSpec((3, 1)).validate_against((2, 2))
    AuxBasisSpec((1, 3)).validate_against((2, 2))  # swapped pair allowed


def test_unsupported_degree_rejected(rng):
    with pytest.raises(InvalidArgumentError):
        assemble_C(random_patch(rng, degree=5))
    bad = random_patch(rng, degree=2)
    patch = type(bad)((2, 2), bad.points, bad.weights)
    assemble_C(patch)  # fine
    with pytest.raises(InvalidArgumentError):
        build_mrep(BezierCurve(5, np.zeros((6, 3)) + np.arange(6)[:, None], np.ones(6)))


def test_c_shape_for_bilinear_and_cubic(rng):
    assert assemble_C(random_patch(rng, degree=1)).shape == (6, 8)
    assert assemble_C(random_patch(rng, degree=2)).shape == (24, 32)
    assert assemble_C(random_patch(rng, degree=3)).shape == (54, 72)


def test_bilinear_c_against_symbolic_expansion(rng):
    """Row-by-row check: column (j, c) of C must reproduce the coefficients
    of f_c(theta) * Btilde_j(theta) in the product basis."""
    patch = random_patch(rng, degree=1, rational=True)
    aux = AuxBasisSpec((1, 0))
    c = assemble_C(patch, aux)
    hom = patch.homogeneous()
    # product basis (2, 1): evaluate both sides on a parameter grid and fit
    ts = np.linspace(0, 1, 7)
    rows = []
    rhs = []
    for t1 in ts:
        for t2 in ts:
            b1 = bernstein_basis(2, t1)
            b2 = bernstein_basis(1, t2)
            rows.append(np.einsum("i,j->ji", b1, b2).reshape(-1))  # k1 fastest
            f = np.einsum("i,j,ijc->c", bernstein_basis(1, t1), bernstein_basis(1, t2), hom)
            bt1 = bernstein_basis(1, t1)
            col = []
            for j2 in range(1):
                for j1 in range(2):
                    for comp in range(4):
                        col.append(bt1[j1] * f[comp])
            rhs.append(col)
    coeffs, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    assert np.abs(coeffs - c).max() < 1e-12


def test_gamma_residual_and_orthogonality_along_patch(rng):
    patch = random_patch(rng, degree=3, rational=True)
    aux = AuxBasisSpec.minimal_for_patch(3)
    c = assemble_C(patch, aux)
    gammas = null_space(c)
    assert np.abs(c @ gammas.T).max() <= 1e-10 * np.abs(c).max()
    m = build_mrep(patch)
    hom = patch.homogeneous()
    scale = np.abs(hom).max()
    for t in rng.uniform(0, 1, size=(50, 2)):
        b1 = bernstein_basis(3, t[0])
        b2 = bernstein_basis(3, t[1])
        f = np.einsum("i,j,ijc->c", b1, b2, hom)
        q1, q2 = m.aux.degree
        a1 = bernstein_basis(q1, t[0])
        a2 = bernstein_basis(q2, t[1])
        aux_vals = np.einsum("i,j->ji", a1, a2).reshape(-1)
        for g in m.gammas:
            gv = aux_vals @ g
            assert abs(float(f @ gv)) <= 1e-10 * scale


def test_rank_dichotomy_on_random_cubics(rng):
    for _ in range(6):
        patch = random_patch(rng, rational=True)
        m = build_mrep(patch)
        diam = patch.diameter()
        for t in rng.uniform(0.05, 0.95, size=(25, 2)):
            x = patch_eval(patch, t)
            hint = float(np.linalg.norm(x)) + 1.0
            assert rank_drop_test(mrep_eval(m, x), scale_hint=hint)
            n = patch_normal(patch, t)
            x_off = x + 0.05 * diam * n
            hint = float(np.linalg.norm(x_off)) + 1.0
            assert not rank_drop_test(mrep_eval(m, x_off), scale_hint=hint)


def test_basis_invariance_under_orthogonal_mix(rng):
    patch = random_patch(rng)
    m = build_mrep(patch)
    q, _ = np.linalg.qr(rng.normal(size=(m.n_null, m.n_null)))
    mixed = MRep(m.source_degree, m.aux,
                 np.einsum("ab,bjc->ajc", q, np.asarray(m.gammas)), m.epsilon,
                 source=m.source)
    for t in rng.uniform(0, 1, size=(10, 2)):
        x = patch_eval(patch, t)
        a = mrep_eval(m, x)
        b = mixed.eval(x)
        # same column space => identical singular values and rank behaviour
        sa = np.linalg.svd(a, compute_uv=False)
        sb = np.linalg.svd(b, compute_uv=False)
        assert np.allclose(sa, sb, atol=1e-10)
        assert rank_drop_test(a) == rank_drop_test(b)
    x_off = patch_eval(patch, (0.5, 0.5)) + np.array([0.0, 0.0, 0.5])
    assert rank_drop_test(mrep_eval(m, x_off)) == rank_drop_test(mixed.eval(x_off))


def test_degenerate_planar_patch_has_larger_null_space(rng):
    pts = np.zeros((2, 2, 3))
    pts[..., 0] = [[0, 0], [1, 1]]
    pts[..., 1] = [[0, 1], [0, 1]]
    planar = type(random_patch(rng))((1, 1), pts, np.ones((2, 2)))
    m = build_mrep(planar)
    assert m.n_null > 2  # generic bilinear nullity is exactly 2


def test_row_scaling_keeps_null_space(rng):
    patch = random_patch(rng)
    c = assemble_C(patch)
    scaled = c * rng.uniform(0.5, 2.0, size=(c.shape[0], 1))
    n_plain = null_space(c)
    n_scaled = null_space(scaled)
    assert n_plain.shape == n_scaled.shape
    assert span_residual(n_scaled, n_plain) < 1e-9


def test_rank_tolerance_validation():
    with pytest.raises(InvalidArgumentError):
        RankTolerance(0.0)
    with pytest.raises(InvalidArgumentError):
        RankTolerance(1.5)
