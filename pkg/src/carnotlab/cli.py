"""Command-line front end.

Exit codes: 0 ok, 1 parse error, 2 validation error, 3 uncertain verdict,
4 invariant violation, 5 coverage failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import checks, classify as cl, graphs as gr, ilip, minlab, splitting as sp
from . import io as cio
from .errors import CoverageError, LineSearchError, ParseError, ValidationError
from .grid import Grid
from .group import DEFAULT_SEED, Point, calibrate_epsilon2

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_UNCERTAIN, EXIT_VIOLATION, EXIT_COVERAGE = range(6)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _emit(text: str, out: str | None, force: bool) -> None:
    if out:
        cio.check_writable(out, force)
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _split_from_args(args, spec):
    if args.nu:
        nu = np.array(_floats(args.nu))
        n = np.linalg.norm(nu)
        if n == 0:
            raise ValidationError("nu must be nonzero")
        nu = nu / n
    else:
        nu = np.eye(spec.m1)[0]
    return sp.make_splitting(spec, nu)


def _grid_from_args(args, d: int) -> Grid:
    box = _floats(args.box)
    if len(box) == 2:
        lo, hi = np.full(d, box[0]), np.full(d, box[1])
    elif len(box) == 2 * d:
        lo, hi = np.array(box[0::2]), np.array(box[1::2])
    else:
        raise ValidationError(f"--box needs 2 or {2 * d} numbers (lo,hi per axis)")
    res = [int(v) for v in _floats(args.resolution)]
    shape = tuple(res * d) if len(res) == 1 else tuple(res)
    return Grid(lo, hi, shape)


# --- commands -----------------------------------------------------------------


def cmd_classify(args) -> int:
    if args.lie:
        with open(args.lie, encoding="utf-8") as fh:
            spec = cl.to_group_spec(cl.parse_lie_spec(fh.read()))
    elif args.spec:
        spec = cio.load_group(args.spec)
    else:
        spec = cl.builtin(args.builtin or "h1")
    rep = cl.is_plentiful(spec, seed=args.seed)
    _emit(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n", args.out, args.force)
    return EXIT_UNCERTAIN if rep.plentiful == "uncertain" else EXIT_OK


def cmd_check(args) -> int:
    results = checks.run_suites(seed=args.seed, samples=args.samples, threads=args.threads,
                                suites=args.suite or None, groups=args.group or None)
    text = checks.summary_text(results, args.seed)
    _emit(text, args.out, args.force)
    bad = [r for r in results if r.violations]
    for r in bad:
        sys.stderr.write(
            f"violation: suite={r.suite} group={r.group} seed={args.seed} "
            f"index={r.first_violation}; reproduce with: carnotlab check --seed {args.seed} "
            f"--suite {r.suite} --group {r.group} --samples {r.samples}\n")
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_extend(args) -> int:
    spec = cio.load_group(args.group)
    split = _split_from_args(args, spec)
    samples = cio.read_samples(args.samples, split)
    grid = _grid_from_args(args, split.wdim)
    field = ilip.extend(samples, args.L, grid=grid)
    consts = field.constants()
    header = {"command": "extend", "seed": args.seed, "samples": args.samples, **consts}
    graph = gr.SampledGraph(split, grid, field.psi.reshape(grid.shape))
    if args.out:
        cio.write_graph(args.out, graph, header, force=args.force)
    else:
        sys.stdout.write(cio.write_graph(None, graph, header))
    sys.stderr.write(json.dumps(consts, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_excess(args) -> int:
    graph = cio.read_graph(args.graph)
    spec = graph.split.spec
    center = Point.zero(spec) if not args.center else Point.from_vector(
        np.array(_floats(args.center)), spec.m1)
    if center.as_vector().shape != (spec.n,):
        raise ValidationError(f"--center needs {spec.n} coordinates")
    radii = _floats(args.radii) if args.radii else minlab.default_radii(1.0)
    rep = minlab.excess_decay_report(graph, center, radii)
    header = {"command": "excess", "graph": args.graph, "center": center.as_vector().tolist(),
              "form": args.form, "seed": args.seed}
    if args.form == "half-square":
        cols, rows = ["r", "excess_half"], [(r, a) for r, a, _ in rep.rows()]
    elif args.form == "one-minus-square":
        cols, rows = ["r", "excess_sq"], [(r, b) for r, _, b in rep.rows()]
    else:
        cols, rows = ["r", "excess_half", "excess_sq"], list(rep.rows())
    text = cio.write_csv(args.out, header, cols, rows, force=args.force)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if all(rep.bound_ok) else EXIT_VIOLATION


def _boundary_from_args(args, graph):
    b = args.boundary
    if b is None or b.strip() in ("", "flat", "zero"):
        return np.zeros(graph.grid.shape)
    if b.startswith("affine"):
        coeffs = _floats(b[len("affine"):])
        return minlab.affine_boundary(graph, coeffs)
    other = cio.read_graph(b)
    if other.grid.shape != graph.grid.shape:
        raise ValidationError("boundary graph file has a different grid shape")
    return other.values


def cmd_minimize(args) -> int:
    spec = cio.load_group(args.group)
    split = _split_from_args(args, spec)
    grid = _grid_from_args(args, split.wdim)
    g0 = gr.SampledGraph(split, grid, np.zeros(grid.shape))
    boundary = _boundary_from_args(args, g0)
    rng = np.random.default_rng(args.seed)
    start = boundary + args.init_noise * rng.standard_normal(grid.shape)
    opts = minlab.MinimizeOptions(max_iters=args.max_iters, grad_tol=args.tol, seed=args.seed)
    trace_path = args.trace or (args.out + ".trace.csv" if args.out else None)
    cio.check_writable(args.out, args.force)
    cio.check_writable(trace_path, args.force)
    graph, trace = minlab.minimize(g0.with_values(start), boundary, opts)
    header = {"command": "minimize", "seed": args.seed, "boundary": args.boundary or "flat",
              "max_iters": args.max_iters, "tol": args.tol,
              "energy": trace.rows[-1][1], "grad_norm": trace.rows[-1][2]}
    text = cio.write_graph(args.out, graph, header, force=args.force)
    ttext = cio.write_csv(trace_path, header, ["iter", "energy", "grad_norm", "step"],
                          [(str(i), e, g, s) for i, e, g, s in trace.rows], force=args.force)
    if not args.out:
        sys.stdout.write(ttext)
    return EXIT_OK


def cmd_catalog(args) -> int:
    lines = ["name,m1,m2,Q,bound_C,eps2,expected_plentiful,expected_htype,plentiful,htype,mode"]
    for e in cl.builtin_catalog():
        s = e.spec
        rep = cl.is_plentiful(s, seed=args.seed)
        lines.append(",".join([s.name, str(s.m1), str(s.m2), str(s.Q), repr(s.bound_C),
                               repr(s.eps2), e.expected_plentiful, e.expected_htype,
                               rep.plentiful, rep.htype, rep.mode]))
    _emit("\n".join(lines) + "\n", args.out, args.force)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    spec = cio.load_group(args.group)
    _, report = calibrate_epsilon2(spec, trials=args.trials, seed=args.seed, eps2=args.eps2)
    _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out, args.force)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 0)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for suites")
    common.add_argument("--force", action="store_true", help="overwrite existing outputs")
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    p = _Parser(prog="carnotlab", description="Step-2 Carnot group toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("classify", parents=[common], help="plentiful / H-type verdicts")
    src = c.add_mutually_exclusive_group()
    src.add_argument("--builtin", help="catalog group name")
    src.add_argument("--spec", help="group-spec JSON file")
    src.add_argument("--lie", help="Lie-spec JSON file with bracket entries")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser("check", parents=[common], help="run seeded invariant suites")
    c.add_argument("--samples", type=int, default=None, help="samples per suite (overrides defaults)")
    c.add_argument("--suite", action="append", choices=checks.SUITES)
    c.add_argument("--group", action="append", help="restrict to catalog groups")
    c.set_defaults(func=cmd_check)

    def geometry(c):
        c.add_argument("--group", required=True, help="builtin name or spec file")
        c.add_argument("--nu", default=None, help="horizontal direction, comma list (default e1)")
        c.add_argument("--box", required=True, help="lo,hi (all axes) or lo1,hi1,lo2,hi2,...")
        c.add_argument("--resolution", required=True, help="nodes per axis (one or per-axis)")

    c = sub.add_parser("extend", parents=[common], help="extend sampled phi to a lattice")
    geometry(c)
    c.add_argument("--samples", required=True, help="CSV of W-coordinates plus value")
    c.add_argument("--L", type=float, required=True, help="intrinsic Lipschitz constant in (0,1)")
    c.set_defaults(func=cmd_extend)

    c = sub.add_parser("excess", parents=[common], help="excess table of a graph file")
    c.add_argument("--graph", required=True)
    c.add_argument("--center", default=None, help="point coordinates x..,t.. (default origin)")
    c.add_argument("--radii", default=None, help="comma list (default 1/8,1/4,1/2,1)")
    c.add_argument("--form", default="both", choices=["half-square", "one-minus-square", "both"])
    c.set_defaults(func=cmd_excess)

    c = sub.add_parser("minimize", parents=[common], help="minimise the discrete area")
    geometry(c)
    c.add_argument("--boundary", default=None, help="'flat', 'affine a1,..,ad' or a graph file")
    c.add_argument("--max-iters", type=int, default=2000)
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--init-noise", type=float, default=0.0, help="random start amplitude")
    c.add_argument("--trace", default=None, help="trace CSV path (default OUT.trace.csv)")
    c.set_defaults(func=cmd_minimize)

    c = sub.add_parser("catalog", parents=[common], help="list builtin groups")
    c.set_defaults(func=cmd_catalog)

    c = sub.add_parser("calibrate", parents=[common], help="audit eps2 for a group")
    c.add_argument("--group", required=True)
    c.add_argument("--trials", type=int, default=10**6)
    c.add_argument("--eps2", type=float, default=None)
    c.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except CoverageError as exc:
        sys.stderr.write(f"coverage error: {exc}\n")
        return EXIT_COVERAGE
    except (ValidationError, LineSearchError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
