"""Command-line interface: geometry export, batch extension, range tests, fits.

Exit codes: 0 success or range-test pass, 1 range-test failure (or a failed
verify check), 2 invalid configuration or a failed geometry run.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import io
from .curve import parse_curve
from .errors import LineContError, SpecError
from .extend import (
    QuadratureConfig,
    SamplePlan,
    extend,
    global_fit,
    sample_region,
)
from .linedata import (
    PROFILES,
    corrupt,
    fit_from_real_samples,
    from_ground_truth,
    parse_truth,
    read_samples_csv,
)
from .rangetest import N_MAX, TOL_M, default_z_set, range_test
from .slices import OMEGA_MINUS, OMEGA_PLUS, OMEGA_ZERO, _classify, build_gamma, k_slice, z_slice
from .verify import run_checks

log = logging.getLogger("linecont")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --- configuration ---------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--curve", default="circle:1",
                   help='"circle:R", "ellipse:A,B" or "fourier:c0,a1,b1,..." (default circle:1)')
    src = p.add_mutually_exclusive_group()
    src.add_argument("--truth", help='ground truth, "poly:j,k,re,im;..." or "exp:ra,ia,rb,ib"')
    src.add_argument("--samples", help="CSV of real line samples (theta, t, re_f, im_f)")
    p.add_argument("--line-degree", type=int, default=4,
                   help="polynomial degree per line when fitting --samples (default 4)")
    p.add_argument("--corrupt", type=float, metavar="EPS",
                   help="add EPS * profile(theta) to every line")
    p.add_argument("--corrupt-profile", choices=sorted(PROFILES), default="cos")
    p.add_argument("--nodes", type=int, default=512, help="trapezoid nodes on K_c loops")
    p.add_argument("--panels", type=int, default=8, help="Gauss-Legendre panels per arc")
    p.add_argument("--panel-order", type=int, default=32)
    p.add_argument("--guard", type=float, default=1e-3,
                   help="minimum target distance to a contour, relative to its extent")
    p.add_argument("--seed", type=int, default=0, help="seed for random point sets")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="linecont", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", parents=[common], help="export slice loops as CSV")
    g.add_argument("--z", action="append", default=[], help="Gamma_z for this z (re,im or 3+0i)")
    g.add_argument("--w", action="append", default=[], help="z-slice C_w for this w")
    g.add_argument("--c", action="append", default=[], help="K_c for this c")
    g.add_argument("--raster", type=int, metavar="N",
                   help="also label an N x N w-grid at each --z")
    g.add_argument("--raster-radius", type=float, help="half-width of the w-grid (default 3m)")
    g.add_argument("--raster-out", help="raster CSV path (default: stdout after the loops)")

    e = sub.add_parser("extend", parents=[common], help="evaluate F at points of C^2")
    e.add_argument("--at", action="append", default=[], metavar="RE_Z,IM_Z,RE_W,IM_W")
    e.add_argument("--points", help="CSV with columns re_z, im_z, re_w, im_w")
    e.add_argument("--grid", choices=["default"],
                   help="random admissible points from every region (uses --seed)")
    e.add_argument("--grid-size", type=int, default=10, help="points per region for --grid")
    e.add_argument("--fallback-degree", type=int,
                   help="global polynomial fit of this degree for unreachable OmegaZero points")

    r = sub.add_parser("range-test", parents=[common], help="moment conditions as a JSON report")
    r.add_argument("--nmax", type=int, default=N_MAX)
    r.add_argument("--tol", type=float, default=TOL_M)
    r.add_argument("--z-set", default="default",
                   help='"default", "empty", or points "re,im;re,im;..."')

    f = sub.add_parser("fit", parents=[common], help="global polynomial fit of the extension")
    f.add_argument("--degree", type=int, default=2)
    f.add_argument("--n-samples", type=int, default=120)
    f.add_argument("--holdout", type=float, default=0.25)

    sub.add_parser("verify", parents=[common], help="run built-in smoke checks")
    return parser


def _config(args) -> QuadratureConfig:
    try:
        return QuadratureConfig(nodes=args.nodes, panels=args.panels, panel_order=args.panel_order,
                                guard=args.guard)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _field(args, curve, required: bool = True):
    if args.truth:
        field_ = from_ground_truth(curve, parse_truth(args.truth))
    elif args.samples:
        field_ = fit_from_real_samples(curve, read_samples_csv(args.samples), args.line_degree)
    elif required:
        raise UsageError("a field is required: pass --truth or --samples")
    else:
        return None
    if args.corrupt is not None:
        field_ = corrupt(field_, args.corrupt, args.corrupt_profile)
    return field_


def _emit(path, text: str) -> None:
    if path:
        io.write_text(path, text)
    else:
        sys.stdout.write(text)


def _z_set(text: str, curve):
    key = text.strip().lower()
    if key == "default":
        return default_z_set(curve)
    if key == "empty":
        return []
    return [io.parse_complex(p) for p in text.split(";") if p.strip()]


# --- subcommands -----------------------------------------------------------


def cmd_geometry(args) -> int:
    curve = parse_curve(args.curve)
    zs = [io.parse_complex(s) for s in args.z]
    ws = [io.parse_complex(s) for s in args.w]
    cs = [io.parse_complex(s) for s in args.c]
    if not (zs or ws or cs):
        raise UsageError("geometry needs at least one --z, --w or --c target")
    config = _config(args)
    several = len(zs) + len(ws) + len(cs) > 1

    def tag(loop, k):
        return f"{loop.branch}#{k}" if several else loop.branch

    rows, k = [], 0
    for z in zs:
        for loop in build_gamma(curve, z).loops:
            rows.extend(io.loop_rows(loop, tag(loop, k)))
        k += 1
    for w in ws:
        for loop in z_slice(curve, w).loops:
            rows.extend(io.loop_rows(loop, tag(loop, k)))
        k += 1
    for c in cs:
        for loop in k_slice(curve, c, config.nodes, config.delta_c).loops:
            rows.extend(io.loop_rows(loop, tag(loop, k)))
        k += 1
    loops_text = io.render_csv(io.LOOP_HEADER, rows)

    raster_text = None
    if args.raster:
        if not zs:
            raise UsageError("--raster needs a --z target")
        raster_text = io.render_csv(io.RASTER_HEADER, _raster(curve, zs, args.raster,
                                                              args.raster_radius))
    # write only once everything is computed, so a failure leaves no files
    written = []
    try:
        if args.out:
            io.write_text(args.out, loops_text)
            written.append(args.out)
        else:
            sys.stdout.write(loops_text)
        if raster_text is not None:
            _emit(args.raster_out, raster_text)
    except BaseException:
        for path in written:
            Path(path).unlink(missing_ok=True)
        raise
    return EXIT_OK


def _raster(curve, zs, n, radius):
    radius = radius or 3.0 * curve.m
    axis = np.linspace(-radius, radius, n)
    for z in zs:
        for im in axis:
            for re in axis:
                w = complex(re, im)
                try:
                    label = _classify(curve, z, w)[0].label
                except LineContError as exc:
                    label = type(exc).__name__
                yield (z.real, z.imag, w.real, w.imag, label)


def _default_grid(curve, size, seed, config):
    rng = np.random.default_rng(seed)
    pts = []
    for region in (OMEGA_MINUS, OMEGA_PLUS, OMEGA_ZERO):
        pts += sample_region(curve, region, size, rng, config=config)
    return pts


def cmd_extend(args) -> int:
    curve = parse_curve(args.curve)
    field_ = _field(args, curve)
    config = _config(args)
    pts = [io.parse_point(s) for s in args.at]
    if args.points:
        pts += io.read_points_csv(args.points)
    if args.grid:
        pts += _default_grid(curve, args.grid_size, args.seed, config)
    if not pts:
        raise UsageError("no points: pass --at, --points or --grid")
    fallback = None
    if args.fallback_degree is not None:
        fallback = global_fit(field_, args.fallback_degree, SamplePlan(seed=args.seed), config)

    rows, methods, statuses, max_err = [], Counter(), Counter(), 0.0
    for z, w in pts:
        try:
            res = extend(field_, z, w, config, fallback)
            value, method, err, label, status = res.value, res.method, res.error, res.label, "ok"
            methods[method] += 1
            max_err = max(max_err, err)
        except LineContError as exc:
            try:
                label = _classify(curve, z, w)[0].label
            except LineContError:
                label = ""
            value, method, err, status = complex(np.nan, np.nan), "", np.nan, type(exc).__name__
            log.info("(%s, %s): %s", z, w, exc)
        statuses[status] += 1
        rows.append((z.real, z.imag, w.real, w.imag, value.real, value.imag, method, err,
                     label, status))
    _emit(args.out, io.render_csv(io.EXTEND_HEADER, rows))

    counts = " ".join(f"{k}={v}" for k, v in sorted(methods.items())) or "none"
    failed = " ".join(f"{k}={v}" for k, v in sorted(statuses.items()) if k != "ok") or "none"
    print(f"points={len(pts)} methods: {counts} errors: {failed} max_err_est={max_err:.3e}",
          file=sys.stderr)
    return EXIT_OK


def cmd_range_test(args) -> int:
    curve = parse_curve(args.curve)
    field_ = _field(args, curve)
    config = _config(args)
    if args.nmax < 0:
        raise UsageError("--nmax must be nonnegative")
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    zs = _z_set(args.z_set, curve)
    report = range_test(field_, zs, args.nmax, args.tol, config)
    _emit(args.out, report.to_json(args.curve, field_.provenance) + "\n")

    for e in report.offending:
        print(f"FAIL z={e.z.real:.6g},{e.z.imag:.6g} n={e.n} normalized={e.normalized:.3e}",
              file=sys.stderr)
    for z, msg in report.errors:
        print(f"ERROR z={z.real:.6g},{z.imag:.6g} {msg}", file=sys.stderr)
    verdict = "PASS" if report.aggregate_pass else "FAIL"
    print(f"{verdict} entries={len(report.entries)} max_normalized={report.max_normalized:.3e} "
          f"tol={args.tol:g}", file=sys.stderr)
    return EXIT_OK if report.aggregate_pass else EXIT_FAIL


def cmd_fit(args) -> int:
    curve = parse_curve(args.curve)
    field_ = _field(args, curve)
    config = _config(args)
    if not 0 <= args.holdout < 1:
        raise UsageError("--holdout must lie in [0, 1)")
    plan = SamplePlan(n_samples=args.n_samples, holdout=args.holdout, seed=args.seed)
    fit = global_fit(field_, args.degree, plan, config)
    doc = {
        "curve": args.curve,
        "field_provenance": field_.provenance,
        "degree": fit.degree,
        "coefficients": [
            {"j": j, "k": k, "re": c.real, "im": c.imag}
            for (j, k), c in sorted(fit.coefficients.items())
        ],
        "holdout_residual": fit.holdout_residual,
        "holdout_relative": fit.holdout_relative,
        "train_residual": fit.train_residual,
        "condition": fit.condition,
        "n_train": fit.n_train,
        "n_holdout": fit.n_holdout,
    }
    if "residuals" in field_.diagnostics:
        doc["line_residuals"] = [
            {"theta": th, "residual": r} for th, r in sorted(field_.diagnostics["residuals"].items())
        ]
    _emit(args.out, json.dumps(doc, indent=2) + "\n")
    print(f"degree={fit.degree} holdout_residual={fit.holdout_residual:.3e} "
          f"condition={fit.condition:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_checks()
    lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in checks]
    _emit(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAIL


COMMANDS = {
    "geometry": cmd_geometry,
    "extend": cmd_extend,
    "range-test": cmd_range_test,
    "fit": cmd_fit,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, SpecError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LineContError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
