"""Command-line front end: intersect, lattice-gen, solve-truss, bvh-stats,
bench.

Exit codes: 0 success, 1 input error (bad flags, files, geometry), 2
numerical failure. JSON outputs carry a "schema": 1 field; CSV outputs start
with a "# schema=1" comment line. Paths of the form ``fixture:<name>``
resolve to the bundled fixtures (two-lines, sphere, bcc-cell).
"""

import argparse
import csv
import json
import logging
import os
import sys
import time
import tracemalloc

import numpy as np

from . import __version__
from .bezier import BezierCurve, load_patches
from .errors import ComputationError, InputError
from .fixtures import resolve_path
from .implicitize import RankTolerance
from .intersect import (
    IntersectOptions,
    ParametricLine,
    ParametricQuadratic,
    intersect_curve_line,
    intersect_curve_quadratic,
    intersect_patch_line,
    intersect_patch_quadratic,
)
from .kdop import DirectionSet, build_bvh, tree_stats
from .lattice import (
    LatticeSpec,
    build_truss,
    classify_and_project,
    compute_intersections,
    generate_lattice,
    load_truss,
    save_truss,
)
from .subdivision import subdivision_intersect, subdivision_intersect_curve
from .truss import TrussProblem, assemble_and_solve, load_bc, save_solution

log = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_vec3(token):
    parts = [float(v) for v in token.replace(",", " ").split()]
    if len(parts) != 3:
        raise UsageError(f"expected 3 coordinates, got {token!r}")
    return np.array(parts)


def _parse_points(text, n):
    tokens = text.strip().split()
    if len(tokens) != n:
        raise UsageError(f"expected {n} comma-separated points, got {len(tokens)}")
    return [_parse_vec3(t) for t in tokens]


def _as_curve(patch):
    """Degree (p, 0) patches are curves in disguise."""
    if patch.degree[1] == 0:
        return BezierCurve(patch.degree[0], patch.points[:, 0, :], patch.weights[:, 0])
    return None


def _write_csv(path, header, rows):
    out = sys.stdout if path in (None, "-") else open(path, "w", newline="")
    try:
        out.write("# schema=1\n")
        writer = csv.writer(out)
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


def _load_patch_file(path):
    return load_patches(resolve_path(path))


def cmd_intersect(args):
    patches = _load_patch_file(args.patches)
    opts = IntersectOptions(epsilon=args.tol)
    curve_arg = None
    if args.quadratic:
        c0, c1, c2 = _parse_points(args.quadratic, 3)
        curve_arg = ParametricQuadratic(c0, c1, c2)
    else:
        p0, p1 = _parse_points(args.line, 2)
        curve_arg = ParametricLine.through(p0, p1)
    records = []
    for pid, patch in enumerate(patches):
        curve = _as_curve(patch)
        if args.method == "subdivision":
            if isinstance(curve_arg, ParametricQuadratic):
                raise UsageError("subdivision method supports straight segments only")
            if curve is not None:
                recs = subdivision_intersect_curve(curve, curve_arg, args.ftol, patch_id=pid)
            else:
                recs = subdivision_intersect(patch, curve_arg, args.ftol, patch_id=pid)
        elif curve is not None:
            if isinstance(curve_arg, ParametricQuadratic):
                recs = intersect_curve_quadratic(curve, curve_arg, opts=opts, patch_id=pid)
            else:
                recs = intersect_curve_line(curve, curve_arg, opts=opts, patch_id=pid)
        else:
            if isinstance(curve_arg, ParametricQuadratic):
                recs = intersect_patch_quadratic(patch, curve_arg, opts=opts, patch_id=pid)
            else:
                recs = intersect_patch_line(patch, curve_arg, opts=opts, patch_id=pid)
        records.extend(recs)
    records.sort(key=lambda r: r.xi)
    doc = {
        "schema": 1,
        "method": args.method,
        "records": [r.to_json() for r in records],
    }
    _dump_json(args.out, doc)
    return 0


def _dump_json(path, doc):
    if path in (None, "-"):
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")
    else:
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)


def cmd_bvh_stats(args):
    patches = _load_patch_file(args.patches)
    dirs = DirectionSet.axes6() if args.dirs == 6 else DirectionSet.default14(patches)
    bvh = build_bvh(patches, dirs, max_leaf=args.max_leaf)
    nodes, depth, hist = tree_stats(bvh)
    rows = [["nodes", nodes], ["depth", depth], ["patches", len(patches)]]
    rows += [[f"leaf_size_{k}", v] for k, v in hist.items()]
    _write_csv(args.out, ["metric", "value"], rows)
    return 0


def cmd_lattice_gen(args):
    patches = _load_patch_file(args.patches)
    with open(resolve_path(args.lattice)) as fh:
        spec = LatticeSpec.from_json(json.load(fh))
    if args.cell_type:
        spec = LatticeSpec(spec.origin, spec.cell_size, spec.counts,
                           spec.orientation, args.cell_type)
    timings = {}
    t0 = time.perf_counter()
    lat = generate_lattice(spec)
    timings["generate_ms"] = 1e3 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    dirs = DirectionSet.default14(patches, lattice_axes=spec.orientation.T)
    bvh = build_bvh(patches, dirs)
    timings["bvh_ms"] = 1e3 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    compute_intersections(lat, bvh, patches, tol=RankTolerance(args.tol),
                          threads=args.threads)
    timings["intersect_ms"] = 1e3 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    classify_and_project(lat)
    timings["classify_ms"] = 1e3 * (time.perf_counter() - t0)
    t0 = time.perf_counter()
    truss = build_truss(lat, args.cell_type or spec.cell_type, area=args.area)
    timings["truss_ms"] = 1e3 * (time.perf_counter() - t0)
    save_truss(args.out, truss)
    if args.report:
        from .lattice import INSIDE, PROJECTED

        n_hits = sum(len(v) for v in lat.intersections.values())
        parity_even = all(len(v) % 2 == 0 for v in lat.intersections.values())
        rows = [
            ["intersections", n_hits],
            ["interior_vertices", int((lat.state == INSIDE).sum())],
            ["projected_vertices", int((lat.state == PROJECTED).sum())],
            ["joints", len(truss.joints)],
            ["struts", len(truss.struts)],
            ["parity_even", int(parity_even)],
            ["unprojected", len(lat.unprojected)],
        ]
        rows += [[k, f"{v:.3f}"] for k, v in timings.items()]
        _write_csv(args.report, ["metric", "value"], rows)
    return 0


def cmd_solve_truss(args):
    truss = load_truss(resolve_path(args.truss))
    fixed, loads = load_bc(args.bc)
    problem = TrussProblem(truss, args.youngs_modulus, fixed, loads)
    solution = assemble_and_solve(problem)
    save_solution(args.out, solution)
    return 0


def _bench_cases(n, seed):
    rng = np.random.default_rng(seed)
    from .bezier import RationalBezierPatch

    cases = []
    for k in range(n):
        g = np.linspace(0.0, 1.0, 4)
        xx, yy = np.meshgrid(g, g, indexing="ij")
        pts = np.empty((4, 4, 3))
        pts[..., 0] = xx + rng.uniform(-0.05, 0.05, xx.shape)
        pts[..., 1] = yy + rng.uniform(-0.05, 0.05, yy.shape)
        pts[..., 2] = rng.uniform(0.0, 0.3, xx.shape)
        w = rng.uniform(0.8, 1.25, xx.shape) if k % 3 == 0 else np.ones(xx.shape)
        patch = RationalBezierPatch((3, 3), pts, w)
        x0, y0, x1, y1 = rng.uniform(0.25, 0.75, 4)
        line = ParametricLine.through([x0, y0, -0.4], [x1, y1, 0.7])
        cases.append((patch, line))
    return cases


def cmd_bench(args):
    if not args.cases.startswith("random"):
        raise UsageError("bench --cases expects 'random<N>'")
    try:
        n = int(args.cases[len("random"):])
    except ValueError as exc:
        raise UsageError(f"bad case spec {args.cases!r}") from exc
    ftols = [float(t) for t in args.ftol.split(",") if t]
    cases = _bench_cases(n, args.seed)
    rows = []
    for cid, (patch, line) in enumerate(cases):
        tracemalloc.start()
        t0 = time.perf_counter()
        recs = intersect_patch_line(patch, line)
        dt = 1e3 * (time.perf_counter() - t0)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        rows.append([cid, "mrep", "", f"{dt:.3f}", peak // 1024, len(recs)])
        for ftol in ftols:
            tracemalloc.start()
            t0 = time.perf_counter()
            recs = subdivision_intersect(patch, line, ftol)
            dt = 1e3 * (time.perf_counter() - t0)
            _, peak = tracemalloc.get_traced_memory()
            tracemalloc.stop()
            rows.append([cid, "subdivision", f"{ftol:g}", f"{dt:.3f}", peak // 1024, len(recs)])
    _write_csv(args.out, ["case", "method", "ftol", "time_ms", "peak_kb", "hits"], rows)
    return 0


def build_parser():
    parser = _Parser(prog="splintersect", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=42, help="seed for random workloads")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("intersect", help="intersect a patch set with a line or quadratic")
    p.add_argument("--patches", required=True)
    p.add_argument("--line", help='segment endpoints: "x0,y0,z0 x1,y1,z1"')
    p.add_argument("--quadratic", help='coefficients: "c0x,c0y,c0z c1x,c1y,c1z c2x,c2y,c2z"')
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--ftol", type=float, default=1e-9, help="flatness tol for subdivision")
    p.add_argument("--method", choices=("mrep", "subdivision"), default="mrep")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("bvh-stats", help="bounding volume tree statistics as CSV")
    p.add_argument("--patches", required=True)
    p.add_argument("--dirs", type=int, choices=(6, 14), default=14)
    p.add_argument("--max-leaf", type=int, default=4)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bvh_stats)

    p = sub.add_parser("lattice-gen", help="generate a lattice-skin truss model")
    p.add_argument("--patches", required=True)
    p.add_argument("--lattice", required=True, help="lattice config JSON")
    p.add_argument("--cell-type", choices=("bcc", "pyramidal", "cubic_edges"))
    p.add_argument("--area", type=float, default=1e-4)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out", required=True, help="truss JSON output")
    p.add_argument("--report", help="stats CSV output")
    p.set_defaults(func=cmd_lattice_gen)

    p = sub.add_parser("solve-truss", help="linear statics of a truss JSON file")
    p.add_argument("--truss", required=True)
    p.add_argument("--bc", required=True, help="boundary conditions JSON")
    p.add_argument("--youngs-modulus", type=float, default=70e9)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_solve_truss)

    p = sub.add_parser("bench", help="time mrep vs subdivision on random cases")
    p.add_argument("--cases", default="random100")
    p.add_argument("--ftol", default="1e-6,1e-9", help="comma-separated flatness tols")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.verbose:
            logging.basicConfig(level=logging.INFO)
        if args.command == "intersect" and not (args.line or args.quadratic):
            raise UsageError("intersect needs --line or --quadratic")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (InputError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ComputationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
