"""Matrix-based implicit representation of rational Bezier patches and curves.

The orthogonality constraint between the homogeneous patch map and an
auxiliary polynomial vector yields a coefficient matrix C whose right null
vectors define a matrix M(x), affine in x, that loses rank exactly on the
surface. For a bi-degree (p, p) patch with the minimal auxiliary bi-degree
(2p-1, p-1) the matrix C has 6p^2 rows and 8p^2 columns.
"""

from dataclasses import dataclass, field

import numpy as np

from .bezier import BezierCurve, product_coefficients
from .errors import InvalidArgumentError, NumericalFailureError

MAX_IMPLICIT_DEGREE = 4
DEFAULT_EPSILON = 1e-6
_MACHINE_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class RankTolerance:
    """Tolerance for the consecutive-singular-value-ratio rank criterion."""

    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidArgumentError(f"epsilon must lie in (0, 1), got {self.epsilon}")


def numerical_rank(singular_values, eps=DEFAULT_EPSILON, floor=0.0):
    """Rank r = min{k : s[k+1]/s[k] < eps} over values above the absolute floor.

    The ratio rule alone cannot flag a uniformly tiny block as zero, hence the
    absolute floor (relative to some outer scale) supplied by callers.
    """
    s = np.asarray(singular_values, dtype=float)
    s = s[s > max(floor, 0.0)]
    if s.size == 0:
        return 0
    for k in range(s.size - 1):
        if s[k + 1] < eps * s[k]:
            return k + 1
    return int(s.size)


@dataclass(frozen=True)
class AuxBasisSpec:
    """Degree of the auxiliary Bezier basis: a pair for surfaces, a scalar
    (stored as (q, None)) for curves."""

    degree: tuple

    def __post_init__(self):
        d = self.degree
        if isinstance(d, (int, np.integer)):
            d = (int(d), None)
        else:
            d = tuple(int(x) if x is not None else None for x in d)
            if len(d) == 1:
                d = (d[0], None)
        if d[0] < 0 or (d[1] is not None and d[1] < 0):
            raise InvalidArgumentError(f"negative auxiliary degree {d}")
        object.__setattr__(self, "degree", d)

    @property
    def is_curve(self):
        return self.degree[1] is None

    @classmethod
    def minimal_for_patch(cls, p):
        return cls((2 * p - 1, p - 1))

    @classmethod
    def minimal_for_curve(cls, p):
        return cls((p - 1, None))

    def validate_against(self, source_degree):
        if self.is_curve:
            p = int(source_degree)
            if self.degree[0] < p - 1:
                raise InvalidArgumentError(
                    f"auxiliary degree {self.degree[0]} below minimum {p - 1}"
                )
            return
        p = int(source_degree[0])
        q1, q2 = self.degree
        lo_a = (2 * p - 1, p - 1)
        lo_b = (p - 1, 2 * p - 1)
        if not (
            (q1 >= lo_a[0] and q2 >= lo_a[1]) or (q1 >= lo_b[0] and q2 >= lo_b[1])
        ):
            raise InvalidArgumentError(
                f"auxiliary bi-degree {self.degree} below the minimum {lo_a} (or swapped)"
            )


def _homogeneous_grid(obj):
    """Homogeneous control data as a grid (n1, n2, 4); curves get n2 = 1."""
    if isinstance(obj, BezierCurve):
        return obj.homogeneous()[:, None, :], (obj.degree, None)
    return obj.homogeneous(), obj.degree


def _resolve_aux(obj, aux):
    if aux is None:
        if isinstance(obj, BezierCurve):
            return AuxBasisSpec.minimal_for_curve(obj.degree)
        p, q = obj.degree
        if p != q:
            raise InvalidArgumentError(
                f"implicitisation requires bi-degree (p, p); got {obj.degree}"
            )
        return AuxBasisSpec.minimal_for_patch(p)
    return aux if isinstance(aux, AuxBasisSpec) else AuxBasisSpec(aux)


def _check_source_degree(obj):
    if isinstance(obj, BezierCurve):
        p = obj.degree
        if not 1 <= p <= MAX_IMPLICIT_DEGREE:
            raise InvalidArgumentError(f"curve degree {p} outside supported range 1..4")
    else:
        p, q = obj.degree
        if p != q or not 1 <= p <= MAX_IMPLICIT_DEGREE:
            raise InvalidArgumentError(
                f"patch bi-degree {obj.degree} outside supported range (p, p), 1 <= p <= 4"
            )


def assemble_C(obj, aux=None):
    """Coefficient matrix of the orthogonality constraint f(theta) . g(theta) = 0.

    Rows are indexed by the product-basis multi-index (theta^1 fastest),
    columns by (aux index j, homogeneous component c) with 4 components per j.
    """
    _check_source_degree(obj)
    aux = _resolve_aux(obj, aux)
    hom, degree = _homogeneous_grid(obj)
    if aux.is_curve != (degree[1] is None):
        raise InvalidArgumentError("auxiliary spec kind does not match the source kind")
    p1 = degree[0]
    p2 = 0 if degree[1] is None else degree[1]
    q1 = aux.degree[0]
    q2 = 0 if aux.degree[1] is None else aux.degree[1]
    aux.validate_against(obj.degree)
    c1 = product_coefficients(p1, q1)
    c2 = product_coefficients(p2, q2)
    r1, r2 = p1 + q1 + 1, p2 + q2 + 1
    # staging grid: rows (k1, k2), columns (j1, j2, component)
    C = np.zeros((r1, r2, q1 + 1, q2 + 1, 4))
    for j1 in range(q1 + 1):
        for j2 in range(q2 + 1):
            coeff = np.einsum("i,j->ij", c1[:, j1], c2[:, j2])
            C[j1 : j1 + p1 + 1, j2 : j2 + p2 + 1, j1, j2, :] += coeff[..., None] * hom
    rows = r1 * r2
    cols = 4 * (q1 + 1) * (q2 + 1)
    # flatten rows k1-fastest and columns j1-fastest, 4 components per j
    C = C.transpose(1, 0, 3, 2, 4).reshape(rows, cols)
    return C


def null_space(C, tol=None):
    """Right null vectors of C per the singular-value-ratio rank criterion.

    Returns an (n_null, cols) array of orthonormal rows.
    """
    C = np.asarray(C, dtype=float)
    if C.size == 0:
        raise InvalidArgumentError("empty matrix")
    tol = tol or RankTolerance()
    # max-abs row scaling: identical exact null space, better conditioning
    scale = np.abs(C).max(axis=1)
    scale[scale == 0.0] = 1.0
    try:
        _, s, vt = np.linalg.svd(C / scale[:, None])
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD of C failed: {exc}") from exc
    floor = max(C.shape) * _MACHINE_EPS * (s[0] if s.size else 0.0)
    rank = numerical_rank(s, tol.epsilon, floor)
    return vt[rank:, :].copy()


@dataclass(frozen=True, eq=False)
class MRep:
    """Implicit matrix representation: M(x)[j, i] = gamma^(i)_j . (x, 1).

    gammas has shape (n_null, n_aux, 4); rows of M(x) follow the auxiliary
    basis (j1 fastest), columns follow the null vectors. The source geometry
    is retained so parameter recovery can build a degree-bumped companion
    when the primary auxiliary basis is constant in some direction.
    """

    source_degree: tuple
    aux: AuxBasisSpec
    gammas: np.ndarray
    epsilon: float
    source: object = field(repr=False, default=None)
    recovery: object = field(repr=False, default=None)

    def __post_init__(self):
        g = np.asarray(self.gammas, dtype=float).copy()
        g.flags.writeable = False
        object.__setattr__(self, "gammas", g)

    @property
    def n_null(self):
        return self.gammas.shape[0]

    @property
    def n_aux(self):
        return self.gammas.shape[1]

    @property
    def is_curve(self):
        return self.aux.is_curve

    def aux_shape(self):
        q1 = self.aux.degree[0]
        q2 = self.aux.degree[1]
        return (q1 + 1, 1 if q2 is None else q2 + 1)

    def eval(self, x):
        return mrep_eval(self, x)


def build_mrep(obj, aux=None, tol=None, _recover=True):
    """Assemble C, extract its null space and package the result."""
    tol = tol or RankTolerance()
    aux = _resolve_aux(obj, aux)
    C = assemble_C(obj, aux)
    vectors = null_space(C, tol)
    q1 = aux.degree[0]
    q2 = aux.degree[1]
    n_aux = (q1 + 1) * (1 if q2 is None else q2 + 1)
    gammas = vectors.reshape(vectors.shape[0], n_aux, 4)
    recovery = None
    if _recover and (q1 == 0 or q2 == 0):
        # a constant basis direction carries no parameter information; keep a
        # degree-bumped twin around for theta recovery
        if aux.is_curve:
            bumped = AuxBasisSpec((max(q1, 1), None))
        else:
            bumped = AuxBasisSpec((max(q1, 1), max(q2, 1)))
        recovery = build_mrep(obj, bumped, tol, _recover=False)
    source_degree = obj.degree if isinstance(obj.degree, tuple) else (obj.degree,)
    return MRep(source_degree, aux, gammas, tol.epsilon, source=obj, recovery=recovery)


def mrep_eval(m, x):
    """Evaluate M(x); entries are affine in x."""
    xh = np.array([x[0], x[1], x[2], 1.0])
    return np.tensordot(m.gammas, xh, axes=([2], [0])).T


def rank_drop_test(M, tol=None, scale_hint=None):
    """True iff the numerical rank falls below min(rows, cols).

    scale_hint guards the all-tiny case (a matrix uniformly at round-off level
    counts as rank zero relative to that scale).
    """
    M = np.asarray(M, dtype=float)
    tol = tol or RankTolerance()
    if min(M.shape) == 0:
        return False
    s = np.linalg.svd(M, compute_uv=False)
    top = s[0] if s.size else 0.0
    outer = max(top, scale_hint or 0.0)
    if outer == 0.0:
        return True  # zero matrix
    floor = max(M.shape) * _MACHINE_EPS * outer
    rank = numerical_rank(s, tol.epsilon, floor)
    return rank < min(M.shape)


__all__ = [
    "AuxBasisSpec",
    "MRep",
    "RankTolerance",
    "assemble_C",
    "build_mrep",
    "mrep_eval",
    "null_space",
    "numerical_rank",
    "rank_drop_test",
]
