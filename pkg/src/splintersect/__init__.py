"""Spline-surface interrogation and lattice-skin structures.

Curve vs. rational-Bezier-patch intersection through a matrix implicit
representation (SVD null spaces plus a generalized eigenvalue problem),
k-dop bounding volume trees for proximity search, a subdivision oracle,
and generation plus linear statics of lattice-skin truss models.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend
from .bezier import (
    BezierCurve,
    BernsteinIndex,
    RationalBezierPatch,
    TensorBSplineSurface,
    bernstein_eval,
    bernstein_product,
    bspline_to_bezier,
    load_patches,
    patch_eval,
    save_patches,
)
from .errors import (
    ComputationError,
    InputError,
    InvalidArgumentError,
    MechanismError,
    NumericalFailureError,
    OpenSurfaceError,
    SplintersectError,
    ToleranceUnreachableError,
)
from .implicitize import (
    AuxBasisSpec,
    MRep,
    RankTolerance,
    assemble_C,
    build_mrep,
    mrep_eval,
    null_space,
    rank_drop_test,
)
from .intersect import (
    IntersectOptions,
    IntersectionRecord,
    MatrixPencil,
    ParametricLine,
    ParametricQuadratic,
    intersect_curve_line,
    intersect_patch_line,
    intersect_patch_quadratic,
    param_from_point,
    pencil_from_line,
    pencil_from_quadratic,
    pencil_real_eigenvalues,
)
from .kdop import (
    Bvh,
    BvhNode,
    DirectionSet,
    KDopBounds,
    build_bvh,
    kdops_overlap,
    query_segment,
    support_heights,
)
from .lattice import (
    LatticeModel,
    LatticeSpec,
    TrussModel,
    build_truss,
    classify_and_project,
    compute_intersections,
    generate_lattice,
    homogenised_pyramidal,
)
from .subdivision import (
    FlatnessTolerance,
    is_flat,
    split_patch,
    subdivision_intersect,
    subdivision_intersect_curve,
)
from .truss import TrussProblem, TrussSolution, assemble_and_solve, strut_strain
