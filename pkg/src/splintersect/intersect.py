"""Curve/patch vs. line intersection through the matrix pencil A - xi*B.

The pencil obtained by substituting the parametric line into M(x) is usually
rectangular and singular; a sequence of orthogonal column/row compressions
(SVD based) deflates it to a square regular subpencil with the same finite
eigenvalues, which a dense generalized eigensolver then finishes. Real
eigenvalues are intersection parameters; the surface parameters are recovered
from the left null space of M(x*).
"""

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .bezier import (
    bernstein_basis,
    bernstein_deriv_basis,
    binomial_row,
    curve_eval,
    patch_eval,
)
from .errors import (
    DegenerateParameterizationError,
    InvalidArgumentError,
    NotOnSurfaceError,
    NumericalFailureError,
)
from .implicitize import (
    RankTolerance,
    build_mrep,
    mrep_eval,
    numerical_rank,
)

log = logging.getLogger(__name__)

_MACHINE_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class ParametricLine:
    """r(xi) = c1 * xi + c0 over the given xi interval."""

    c0: np.ndarray
    c1: np.ndarray
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        c0 = np.asarray(self.c0, dtype=float).reshape(3)
        c1 = np.asarray(self.c1, dtype=float).reshape(3)
        if np.linalg.norm(c1) == 0.0:
            raise InvalidArgumentError("line direction c1 must be non-zero")
        c0.flags.writeable = False
        c1.flags.writeable = False
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

    @classmethod
    def through(cls, p0, p1):
        p0 = np.asarray(p0, dtype=float)
        return cls(p0, np.asarray(p1, dtype=float) - p0)

    def eval(self, xi):
        return self.c0 + xi * self.c1


@dataclass(frozen=True, eq=False)
class ParametricQuadratic:
    """r(xi) = c2 * xi^2 + c1 * xi + c0."""

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    domain: tuple = (0.0, 1.0)

    def __post_init__(self):
        c0 = np.asarray(self.c0, dtype=float).reshape(3)
        c1 = np.asarray(self.c1, dtype=float).reshape(3)
        c2 = np.asarray(self.c2, dtype=float).reshape(3)
        if np.linalg.norm(c1) == 0.0 and np.linalg.norm(c2) == 0.0:
            raise InvalidArgumentError("c1 and c2 must not both vanish")
        for a in (c0, c1, c2):
            a.flags.writeable = False
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "c2", c2)
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

    def eval(self, xi):
        return self.c0 + xi * self.c1 + xi * xi * self.c2


@dataclass(frozen=True, eq=False)
class MatrixPencil:
    """A - xi * B with A and B of identical shape."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        if A.shape != B.shape:
            raise InvalidArgumentError(f"pencil shapes differ: {A.shape} vs {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)


@dataclass
class IntersectionRecord:
    """One curve-surface hit: curve parameter, surface parameter(s), point."""

    xi: float
    theta: object
    point: np.ndarray
    patch_id: object = None
    multiplicity_hint: int = 1
    self_intersection: bool = False

    def to_json(self):
        theta = self.theta
        if isinstance(theta, (tuple, list, np.ndarray)):
            theta = [float(t) for t in theta]
        else:
            theta = float(theta)
        return {
            "xi": float(self.xi),
            "theta": theta,
            "point": [float(c) for c in self.point],
            "patch": self.patch_id,
            "multiplicity_hint": int(self.multiplicity_hint),
            "self_intersection": bool(self.self_intersection),
        }


@dataclass(frozen=True)
class IntersectOptions:
    """Floating-point policy for the intersection pipeline.

    imag_tol and dedup_tol are relative; roundtrip_tol is scaled by the patch
    diameter when records are validated.
    """

    epsilon: float = 1e-6
    imag_tol: float = 1e-8
    dedup_tol: float = 1e-8
    domain_tol: float = 1e-8
    roundtrip_tol: float = 1e-7

    def rank_tol(self):
        return RankTolerance(self.epsilon)


def pencil_from_line(m, line):
    """A = M(c0), B = -(M(c0 + c1) - M(c0)); exact since M is affine in x."""
    A = mrep_eval(m, line.c0)
    B = -(mrep_eval(m, line.c0 + line.c1) - A)
    return MatrixPencil(A, B)


def pencil_from_quadratic(m, quad):
    """Companion linearisation of M0 + M1*xi + M2*xi^2 into a doubled pencil."""
    M0 = mrep_eval(m, quad.c0)
    M1 = mrep_eval(m, quad.c0 + quad.c1) - M0
    M2 = mrep_eval(m, quad.c0 + quad.c2) - M0
    rows, cols = M0.shape
    eye = np.eye(cols)
    A = np.block([[np.zeros((cols, cols)), eye], [M0, M1]])
    B = np.zeros((cols + rows, 2 * cols))
    B[:cols, :cols] = eye
    B[cols:, cols:] = -M2
    return MatrixPencil(A, B)


def pencil_real_eigenvalues(pencil, tol=None, imag_tol=1e-8):
    """All finite real generalized eigenvalues of (A - xi*B) phi = 0.

    Orthogonal column/row compressions deflate the (possibly rectangular and
    singular) pencil to a square subpencil with a full-column-rank B; a dense
    QZ solve finishes. Tall intermediate pencils are transposed, which leaves
    the rank-drop eigenvalues unchanged. An entirely deflated or entirely
    zero pencil has no isolated intersections and yields an empty list.
    """
    tol = tol or RankTolerance()
    A = np.array(pencil.A, dtype=float)
    B = np.array(pencil.B, dtype=float)
    if A.size == 0:
        return []
    scale = max(np.abs(A).max(), np.abs(B).max())
    if scale == 0.0:
        return []
    # deflation rank decisions treat singular values below epsilon * scale as
    # zero: blocks that vanish in exact arithmetic carry accumulated round-off
    # well above machine level after repeated orthogonal transforms, and a
    # noise-only spectrum has no ratio gap for the consecutive-ratio rule
    floor = max(tol.epsilon * scale, max(A.shape) * 64.0 * _MACHINE_EPS * scale)
    max_sweeps = sum(A.shape) + 4
    for _ in range(max_sweeps):
        m, n = A.shape
        if m == 0 or n == 0:
            return []
        if m > n:
            A, B = A.T.copy(), B.T.copy()
            continue
        try:
            _, sb, vbt = np.linalg.svd(B)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailureError(f"SVD failed in pencil reduction: {exc}") from exc
        rb = numerical_rank(sb, tol.epsilon, floor)
        if rb == n:
            return _finish_square(A, B, imag_tol)
        v = vbt.T
        A = A @ v
        B = B @ v
        B[:, rb:] = 0.0
        A12 = A[:, rb:]
        sa = np.linalg.svd(A12, compute_uv=False)
        ra = numerical_rank(sa, tol.epsilon, floor)
        if ra == 0:
            if rb == 0:
                return []  # pencil identically zero: no isolated eigenvalues
            A = A[:, :rb].copy()
            B = B[:, :rb].copy()
            continue
        ua, _, _ = np.linalg.svd(A12)
        A = (ua.T @ A)[ra:, :rb].copy()
        B = (ua.T @ B)[ra:, :rb].copy()
    raise NumericalFailureError("pencil reduction failed to terminate")


def _finish_square(A, B, imag_tol):
    if A.shape[0] != A.shape[1]:
        raise NumericalFailureError("reduction reached a non-square regular part")
    if A.shape[0] == 0:
        return []
    try:
        w = scipy.linalg.eig(A, B, right=False)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise NumericalFailureError(f"generalized eigensolver failed: {exc}") from exc
    out = []
    for z in w:
        if not np.isfinite(z.real) or not np.isfinite(z.imag):
            continue
        if abs(z.imag) <= imag_tol * (1.0 + abs(z.real)):
            out.append(float(z.real))
    out.sort()
    return out


# ---------------------------------------------------------------------------
# parameter recovery


def _ratio_solve(coeffs, degree):
    """theta from the adjacent-index ratio of Bernstein coefficients.

    Uses the neighbours of the largest-magnitude component; returns None when
    no usable ratio exists (constant basis or vanishing denominators).
    """
    q = degree
    if q == 0:
        return None
    n = np.asarray(coeffs, dtype=float)
    b = binomial_row(q)
    j = int(np.argmax(np.abs(n)))
    if j == q:
        j -= 1
    num = n[j + 1] * b[j]
    den = n[j] * b[j + 1] + n[j + 1] * b[j]
    if abs(den) <= 1e-14 * (abs(n[j] * b[j + 1]) + abs(num) + 1e-300):
        return None
    return float(num / den)


def _theta_from_left_null_vector(vec, shape, degrees):
    """Solve the two ratio equations for one left null vector."""
    q1, q2 = degrees
    grid = np.asarray(vec, dtype=float).reshape(shape[1], shape[0]).T  # j1 fastest
    j1, j2 = np.unravel_index(np.argmax(np.abs(grid)), grid.shape)
    t1 = _ratio_solve(grid[:, j2], q1)
    t2 = _ratio_solve(grid[j1, :], q2)
    return t1, t2


def _aux_row_values(m, theta):
    """Auxiliary basis values at theta, flattened j1-fastest."""
    q1, q2 = m.aux.degree
    b1 = bernstein_basis(q1, theta[0])
    if q2 is None:
        return b1
    b2 = bernstein_basis(q2, theta[1])
    return np.einsum("i,j->ji", b1, b2).reshape(-1)


def _aux_row_and_grad(m, theta):
    q1, q2 = m.aux.degree
    b1 = bernstein_basis(q1, theta[0])
    d1 = bernstein_deriv_basis(q1, theta[0])
    if q2 is None:
        return b1, d1[:, None]
    b2 = bernstein_basis(q2, theta[1])
    d2 = bernstein_deriv_basis(q2, theta[1])
    row = np.einsum("i,j->ji", b1, b2).reshape(-1)
    g1 = np.einsum("i,j->ji", d1, b2).reshape(-1)
    g2 = np.einsum("i,j->ji", b1, d2).reshape(-1)
    return row, np.stack([g1, g2], axis=1)


def _null_residual(m, null_basis, theta):
    """Relative distance of the auxiliary basis row at theta from the left
    null space span."""
    row = _aux_row_values(m, theta)
    res = row - null_basis @ (null_basis.T @ row)
    return float(np.linalg.norm(res) / np.linalg.norm(row))


def _gauss_newton_theta(m, null_basis, theta0, is_curve, iters=25):
    """Polish a preimage candidate by Gauss-Newton on the projection residual
    F(theta) = (I - N N^T) btilde(theta)."""
    t = np.array([theta0[0], 0.0 if is_curve else theta0[1]])
    for _ in range(iters):
        row, grad = _aux_row_and_grad(m, (t[0], None if is_curve else t[1]))
        f = row - null_basis @ (null_basis.T @ row)
        if np.linalg.norm(f) <= 1e-14 * np.linalg.norm(row):
            break
        j = grad - null_basis @ (null_basis.T @ grad)
        if is_curve:
            j = j[:, :1]
        step, *_ = np.linalg.lstsq(j, -f, rcond=None)
        if is_curve:
            t[0] += step[0]
        else:
            t += step
        if np.abs(step).max() < 1e-15:
            break
        # keep iterates near the unit box; preimages of interest live there
        t = np.clip(t, -0.25, 1.25)
    theta = (float(t[0]), None if is_curve else float(t[1]))
    return theta, _null_residual(m, null_basis, theta)


def _chain_clusters(points, link):
    """Group points whose chain-wise distance stays below link."""
    clusters = []
    assigned = [False] * len(points)
    for s in range(len(points)):
        if assigned[s]:
            continue
        group = [s]
        assigned[s] = True
        frontier = [s]
        while frontier:
            cur = frontier.pop()
            for t in range(len(points)):
                if not assigned[t] and max(
                    abs(points[t][0] - points[cur][0]),
                    abs((points[t][1] or 0.0) - (points[cur][1] or 0.0)),
                ) <= link:
                    assigned[t] = True
                    group.append(t)
                    frontier.append(t)
        clusters.append(group)
    return clusters


def _grid_search_theta(m, null_basis, n_grid=16):
    """Fallback for clustered null spaces: locate theta where the auxiliary
    basis row lies in the span of the left null vectors. Coarse vectorized
    grid to find basins, Gauss-Newton to polish; a contiguous zero family
    (degenerate edges, e.g. collapsed patch boundaries) is collapsed to one
    representative per cluster."""
    q1, q2 = m.aux.degree
    ts = np.linspace(0.0, 1.0, n_grid + 1)
    b1 = np.array([bernstein_basis(q1, t) for t in ts])
    b2 = np.array([bernstein_basis(q2, t) for t in ts])
    # row (a, b) holds the flattened basis values at (ts[a], ts[b]), j1 fastest
    rows = np.einsum("ai,bj->abji", b1, b2).reshape(len(ts), len(ts), -1)
    flat = rows.reshape(-1, rows.shape[-1])
    res = flat - (flat @ null_basis) @ null_basis.T
    rel = np.linalg.norm(res, axis=1) / np.linalg.norm(flat, axis=1)
    rel = rel.reshape(len(ts), len(ts))
    n1, n2 = rel.shape
    seeds = []
    for i in range(n1):
        for j in range(n2):
            v = rel[i, j]
            if v > 0.5:
                continue
            neigh = rel[max(0, i - 1) : i + 2, max(0, j - 1) : j + 2]
            if v <= neigh.min() + 1e-15:
                seeds.append((ts[i], ts[j]))
    cands = []
    for seed in seeds:
        theta, final = _gauss_newton_theta(m, null_basis, seed, is_curve=False)
        if final < 1e-7 and -0.2 <= theta[0] <= 1.2 and -0.2 <= theta[1] <= 1.2:
            cands.append(theta)
    if not cands:
        return []
    link = 2.0 / (len(ts) - 1)
    out = []
    for group in _chain_clusters(cands, link):
        best = min(group, key=lambda g: _null_residual(m, null_basis, cands[g]))
        out.append(cands[best])
    return out


def _left_null_vectors(M, eps, scale_hint):
    s_all = np.linalg.svd(M, compute_uv=False)
    top = s_all[0] if s_all.size else 0.0
    outer = max(top, scale_hint)
    floor = max(M.shape) * _MACHINE_EPS * outer
    rank = numerical_rank(s_all, eps, floor)
    if rank >= min(M.shape):
        return None
    u, _, _ = np.linalg.svd(M)
    return u[:, rank:]


def param_from_point(m, x_star, tol=None):
    """Surface/curve parameters theta* with M(x*) rank-deficient.

    Multiple isolated preimages (self intersections) yield multiple values; a
    contiguous preimage family (degenerate edge) is reported once. Raises
    NotOnSurfaceError when there is no rank drop at x_star and
    DegenerateParameterizationError when no candidate survives.
    """
    thetas, _ = _param_candidates(m, x_star, tol)
    return thetas


def _verify_theta(source, theta, x_star, rt_tol):
    """Algebraic consistency check: evaluate at the raw (unclipped) theta so
    that hits on the patch extension verify too; the domain filter rejects
    them later without triggering any fallback search."""
    if source is None:
        return True  # hand-built MRep without geometry; trust the algebra
    try:
        if theta[1] is None:
            y = curve_eval(source, float(theta[0]))
        else:
            y = patch_eval(source, (float(theta[0]), float(theta[1])))
    except Exception:
        return False
    return bool(np.linalg.norm(y - x_star) <= rt_tol)


def _dedup_thetas(thetas, tol=1e-6):
    out = []
    for t in thetas:
        dup = False
        for u in out:
            if t[1] is None:
                dup = abs(t[0] - u[0]) <= tol
            else:
                dup = abs(t[0] - u[0]) <= tol and abs(t[1] - u[1]) <= tol
            if dup:
                break
        if not dup:
            out.append(t)
    return out


def _param_candidates(m, x_star, tol=None, rt_tol=None, strict=True):
    """strict=True raises NotOnSurfaceError without a rank drop; the record
    pipeline passes strict=False and falls back to the smallest singular
    direction instead, because an eigenvalue that is accurate to only ~1e-8
    shifts x* enough to blur the rank test while the preimage is still
    recovered exactly and checked geometrically."""
    tol = tol or RankTolerance()
    x_star = np.asarray(x_star, dtype=float)
    M = mrep_eval(m, x_star)
    scale_hint = float(np.linalg.norm(x_star)) + 1.0
    null = _left_null_vectors(M, tol.epsilon, scale_hint)
    genuine_drop = null is not None
    if null is None:
        if strict:
            raise NotOnSurfaceError(f"no rank drop of M(x) at {x_star}")
        u, _, _ = np.linalg.svd(M)
        null = u[:, -1:]
    n_ln = null.shape[1]
    use = m
    if m.recovery is not None:
        use = m.recovery
        M = mrep_eval(use, x_star)
        null = _left_null_vectors(M, tol.epsilon, scale_hint)
        genuine_drop = genuine_drop and null is not None
        if null is None:
            if strict:
                raise NotOnSurfaceError(f"no rank drop of recovery M(x) at {x_star}")
            u, _, _ = np.linalg.svd(M)
            null = u[:, -1:]
    if rt_tol is None:
        diam = use.source.diameter() if use.source is not None else 1.0
        rt_tol = 1e-7 * (1.0 + diam)
    q1 = use.aux.degree[0]
    q2 = use.aux.degree[1]
    thetas = []
    if use.is_curve:
        for col in null.T:
            t = _ratio_solve(col, q1)
            if t is not None:
                thetas.append((t, None))
    else:
        shape = use.aux_shape()
        for col in null.T:
            t = _theta_from_left_null_vector(col, shape, (q1, q2))
            if t[0] is not None and t[1] is not None:
                thetas.append(t)
    src = use.source
    verified = _dedup_thetas(
        [t for t in thetas if _verify_theta(src, t, x_star, rt_tol)]
    )
    if (n_ln > 1 or not verified) and genuine_drop:
        # clustered null spaces rotate arbitrarily under perturbation, so the
        # ratio route may land on an extension preimage; search the unit box
        # for the in-domain preimages directly. Without a genuine rank drop
        # there is nothing to search for.
        if use.is_curve:
            fallback = _curve_preimages(use, null)
        else:
            fallback = _grid_search_theta(use, null)
        extra = [t for t in fallback if _verify_theta(src, t, x_star, rt_tol)]
        if not verified and not extra and src is None:
            extra = fallback
        verified = _dedup_thetas(verified + extra)
        if not verified and not thetas and not fallback:
            raise DegenerateParameterizationError(
                f"no usable ratio equations at {x_star}"
            )
    return verified, n_ln


def _curve_preimages(m, null_basis, n_grid=128):
    """Curve parameters whose basis row lies in the left null span; grid scan
    for basins plus Gauss-Newton polish of the projection residual."""
    q = m.aux.degree[0]
    ts = np.linspace(0.0, 1.0, n_grid + 1)
    rows = np.array([bernstein_basis(q, t) for t in ts])
    res = rows - (rows @ null_basis) @ null_basis.T
    rel = np.linalg.norm(res, axis=1) / np.linalg.norm(rows, axis=1)
    cands = []
    for i in range(len(ts)):
        if rel[i] > 0.5:
            continue
        if (i > 0 and rel[i - 1] < rel[i]) or (i + 1 < len(ts) and rel[i + 1] < rel[i]):
            continue  # not a local minimum
        theta, final = _gauss_newton_theta(m, null_basis, (ts[i], None), is_curve=True)
        if final < 1e-7 and -0.2 <= theta[0] <= 1.2:
            cands.append(theta)
    if not cands:
        return []
    out = []
    for group in _chain_clusters(cands, 2.0 / n_grid):
        best = min(group, key=lambda g: _null_residual(m, null_basis, cands[g]))
        out.append(cands[best])
    return out


# ---------------------------------------------------------------------------
# full pipelines


def _cluster_eigenvalues(values, dedup_tol):
    """Group near-coincident eigenvalues; returns (representative, count)."""
    if not values:
        return []
    values = sorted(values)
    groups = [[values[0]]]
    for v in values[1:]:
        if abs(v - groups[-1][-1]) <= dedup_tol * (1.0 + abs(v)):
            groups[-1].append(v)
        else:
            groups.append([v])
    return [(float(np.mean(g)), len(g)) for g in groups]


def _theta_key(theta):
    if theta[1] is None:
        return (theta[0],)
    return theta


def _records_for_curve_points(geometry, mrep, curve_like, eigen, opts, patch_id):
    """Shared record assembly for line/quadratic pipelines."""
    lo, hi = curve_like.domain
    span = max(hi - lo, 1.0)
    diam = geometry.diameter()
    rt = opts.roundtrip_tol * (1.0 + diam)
    records = []
    for xi, count in _cluster_eigenvalues(eigen, opts.dedup_tol):
        if xi < lo - opts.domain_tol * span or xi > hi + opts.domain_tol * span:
            continue
        x_star = curve_like.eval(xi)
        try:
            thetas, n_ln = _param_candidates(
                mrep, x_star, opts.rank_tol(), rt_tol=rt, strict=False
            )
        except DegenerateParameterizationError:
            log.warning("parameter recovery degenerate at xi=%g (patch %s)", xi, patch_id)
            continue
        for theta in thetas:
            if theta[1] is None:
                t = float(theta[0])
                if not -opts.domain_tol <= t <= 1.0 + opts.domain_tol:
                    continue
                theta_out = float(np.clip(t, 0.0, 1.0))
            else:
                t1, t2 = float(theta[0]), float(theta[1])
                if not (
                    -opts.domain_tol <= t1 <= 1.0 + opts.domain_tol
                    and -opts.domain_tol <= t2 <= 1.0 + opts.domain_tol
                ):
                    continue
                theta_out = (float(np.clip(t1, 0.0, 1.0)), float(np.clip(t2, 0.0, 1.0)))
            records.append(
                IntersectionRecord(
                    xi=float(xi),
                    theta=theta_out,
                    point=np.asarray(x_star, dtype=float),
                    patch_id=patch_id,
                    multiplicity_hint=count,
                    self_intersection=n_ln > 1,
                )
            )
    records.sort(key=lambda r: r.xi)
    return records


def intersect_patch_line(patch, line, tol=None, opts=None, mrep=None, patch_id=None):
    """All valid intersections of a rational Bezier patch with a line segment."""
    opts = _merge_opts(tol, opts)
    if mrep is None:
        mrep = build_mrep(patch, tol=opts.rank_tol())
    pencil = pencil_from_line(mrep, line)
    eigen = pencil_real_eigenvalues(pencil, opts.rank_tol(), opts.imag_tol)
    return _records_for_curve_points(patch, mrep, line, eigen, opts, patch_id)


def intersect_patch_quadratic(patch, quad, tol=None, opts=None, mrep=None, patch_id=None):
    """Same pipeline for a quadratic curve via the companion pencil."""
    opts = _merge_opts(tol, opts)
    if mrep is None:
        mrep = build_mrep(patch, tol=opts.rank_tol())
    pencil = pencil_from_quadratic(mrep, quad)
    eigen = pencil_real_eigenvalues(pencil, opts.rank_tol(), opts.imag_tol)
    return _records_for_curve_points(patch, mrep, quad, eigen, opts, patch_id)


def intersect_curve_line(curve, line, tol=None, opts=None, aux=None, mrep=None, patch_id=None):
    """Curve vs. line intersection (degree 1..4) with a configurable auxiliary
    basis degree; the minimal degree p-1 is used by default."""
    opts = _merge_opts(tol, opts)
    if mrep is None:
        mrep = build_mrep(curve, aux=aux, tol=opts.rank_tol())
    pencil = pencil_from_line(mrep, line)
    eigen = pencil_real_eigenvalues(pencil, opts.rank_tol(), opts.imag_tol)
    return _records_for_curve_points(curve, mrep, line, eigen, opts, patch_id)


def intersect_curve_quadratic(curve, quad, tol=None, opts=None, aux=None, mrep=None, patch_id=None):
    opts = _merge_opts(tol, opts)
    if mrep is None:
        mrep = build_mrep(curve, aux=aux, tol=opts.rank_tol())
    pencil = pencil_from_quadratic(mrep, quad)
    eigen = pencil_real_eigenvalues(pencil, opts.rank_tol(), opts.imag_tol)
    return _records_for_curve_points(curve, mrep, quad, eigen, opts, patch_id)


def _merge_opts(tol, opts):
    if opts is None:
        opts = IntersectOptions()
    if tol is not None:
        eps = tol.epsilon if isinstance(tol, RankTolerance) else float(tol)
        opts = replace(opts, epsilon=eps)
    return opts


__all__ = [
    "IntersectOptions",
    "IntersectionRecord",
    "MatrixPencil",
    "ParametricLine",
    "ParametricQuadratic",
    "intersect_curve_line",
    "intersect_curve_quadratic",
    "intersect_patch_line",
    "intersect_patch_quadratic",
    "param_from_point",
    "pencil_from_line",
    "pencil_from_quadratic",
    "pencil_real_eigenvalues",
]
