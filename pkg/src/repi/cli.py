"""Command-line front end: ``repi <verb> [--key value ...]``.

Exit status is 0 on success, 1 when a verification fails and 2 on usage
errors.  Output is JSON unless ``--format csv`` is given (the default for
``sweep``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from repi import constants, harness, solver
from repi.convolution import reverse_young_margin
from repi.density import PreconditionError, default_grid, parse_family
from repi.rearrangement import rearrange, rearrangement_monotonicity_check
from repi.renyi import closed_form_entropy_power, fmw_comparison_check, phi_log_concavity_check, renyi_entropy_power
from repi.report import PRECONDITION, VerificationReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CLAIMS = ("thm1.1", "thm1.2", "thm1.4", "prop5.1", "thm2.1", "thm7.1", "lem2.2", "lem2.3", "thmA.1", "appB", "consistency")


class UsageError(Exception):
    pass


def _order(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _family(args, name: str):
    words = getattr(args, name)
    if not words:
        raise UsageError(f"--{name} is required")
    return parse_family(" ".join(words))


def _emit(payload, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    rows = payload if isinstance(payload, list) else [payload]
    if rows and all(isinstance(r, dict) and "claim_id" in r for r in rows):
        out.write(harness.reports_to_csv([VerificationReport.from_dict(r) for r in rows]))
        return
    flat = [{k: v for k, v in r.items() if not isinstance(v, (dict, list))} for r in rows]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
    writer.writeheader()
    for r in flat:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    out.write(buf.getvalue())


def _write_xy(path: str, x: np.ndarray, y: np.ndarray) -> None:
    with open(path, "w") as fh:
        for xi, yi in zip(x, y):
            fh.write(f"{float(xi)!r} {float(yi)!r}\n")


def cmd_entropy(args) -> tuple[object, bool]:
    f = _family(args, "f")
    r = args.r
    g = default_grid(f, r_min=min(r, 1.0) if r > 0 else 1.0, resolution=args.resolution, renormalize=True)
    grid_value = renyi_entropy_power(g, r)
    try:
        closed = closed_form_entropy_power(f, r).value
    except ValueError:
        closed = None
    if args.xy:
        _write_xy(args.xy, g.x, g.values)
    return {
        "family": f.spec,
        "r": r,
        "grid": grid_value.value,
        "quad_error": grid_value.quad_error,
        "closed_form": closed,
        "h": g.h,
        "n_points": g.n_points,
    }, True


def cmd_constants(args):
    return constants.constant_bundle(args.r, args.k).to_dict(), True


def cmd_solve(args):
    if args.which == "alpha":
        res = solver.numeric_alpha(args.r, args.grid_size)
    elif args.which == "beta":
        res = solver.numeric_beta(args.r, args.grid_size)
    elif args.which == "beta-stationary":
        res = solver.numeric_beta_stationary(args.r, args.grid_size)
    else:
        if args.k is None:
            raise UsageError("solve crk needs --k")
        res = solver.numeric_crk(args.r, args.k, args.seed)
    return res.to_dict(), True


def _verify(args) -> VerificationReport:
    claim, r, res = args.claim, args.r, args.resolution
    if claim in ("thm1.1", "consistency", "thm2.1", "thm7.1"):
        f, g = _family(args, "f"), _family(args, "g")
        if claim == "thm1.1":
            return harness.verify_main_epi(f, g, r, exponent=args.alpha, resolution=res)
        if claim == "consistency":
            return harness.consistency_report(f, g, r, res)
        rr = min(r, args.p or 1.0, args.q or 1.0)
        gf = default_grid(f, r_min=rr, resolution=res, renormalize=True)
        gg = default_grid(g, r_min=rr, resolution=res, renormalize=True)
        if claim == "thm7.1":
            return rearrangement_monotonicity_check(gf, gg, r)
        if args.p is None or args.q is None:
            raise UsageError("thm2.1 needs --p and --q")
        return reverse_young_margin(gf, gg, args.p, args.q, r)
    if claim == "thm1.2":
        if args.len_a is None or args.len_b is None:
            raise UsageError("thm1.2 needs --len-a and --len-b")
        return harness.verify_uniform_epi(args.len_a, args.len_b, r, res)
    if claim == "thm1.4":
        f = _family(args, "f")
        fams = [f] * (args.k or 2)
        if args.g:
            fams = [f, _family(args, "g")] + [f] * max(0, (args.k or 2) - 2)
        return harness.verify_ktuple_epi(fams, r, res)
    if claim == "prop5.1":
        return harness.sharpness_exponential(r, args.alpha if args.alpha is not None else constants.alpha(r))
    if claim == "lem2.3":
        return solver.calculus_lemma_check(r)
    if claim == "appB":
        if args.x is None or args.y is None:
            raise UsageError("appB needs --x and --y")
        return harness.log_A_check(args.x, args.y)
    f = _family(args, "f")
    g = default_grid(f, r_min=min(r, args.p or r), resolution=res, renormalize=True)
    if claim == "lem2.2":
        p = args.p if args.p is not None else r
        q = args.q if args.q is not None else (1 + r) / 2
        return fmw_comparison_check(g, p, q)
    return phi_log_concavity_check(g, harness.PHI_T_GRID)


def cmd_verify(args):
    try:
        rep = _verify(args)
    except PreconditionError as exc:
        rep = VerificationReport.precondition(args.claim, " ".join(sys.argv[1:]), str(exc))
    return rep.to_dict(), rep.passed or rep.status == PRECONDITION


def cmd_sweep(args):
    cfg = harness.SweepConfig.load(args.config)
    reps = harness.run_sweep(cfg)
    return [r.to_dict() for r in reps], harness.all_passed(reps)


def cmd_clt(args):
    rep = harness.clt_sharpness(args.r, args.k_max, args.resolution or harness.CLT_RESOLUTION)
    return rep.to_dict(), rep.passed


def cmd_rearrange(args):
    f = _family(args, "f")
    r = args.r
    g = default_grid(f, r_min=min(r, 1.0), resolution=args.resolution, renormalize=True)
    if args.g:
        gg = default_grid(_family(args, "g"), r_min=min(r, 1.0), resolution=args.resolution, renormalize=True)
        rep = rearrangement_monotonicity_check(g, gg, r)
        return rep.to_dict(), rep.passed
    star = rearrange(g, f.spec)
    if args.xy:
        _write_xy(args.xy, star.density.x, star.density.values)
    before, after = renyi_entropy_power(g, r).value, renyi_entropy_power(star.density, r).value
    return {
        "family": f.spec,
        "r": r,
        "N_r": before,
        "N_r_rearranged": after,
        "rel_diff": abs(after - before) / before,
        "mass_error": star.mass_error,
        "h": star.density.h,
        "n_points": star.density.n_points,
    }, True


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repi", description="Rényi entropy powers and EPI checks for 1-D densities.")
    parser.add_argument("--format", choices=("json", "csv"), default=None)
    parser.add_argument("--output", default=None, help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, family=True, g=False):
        p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
        p.add_argument("--output", default=argparse.SUPPRESS)
        if family:
            p.add_argument("--f", nargs="+", metavar="SPEC", help='family spec, e.g. "exponential rate=1"')
        if g:
            p.add_argument("--g", nargs="+", metavar="SPEC")
        p.add_argument("--resolution", type=int, default=None, help="grid points per unit length")

    p = sub.add_parser("entropy", help="N_r of a family: grid quadrature and closed form")
    common(p)
    p.add_argument("--r", type=_order, required=True)
    p.add_argument("--xy", default=None, help="write the grid as (x, y) columns")
    p.set_defaults(run=cmd_entropy)

    p = sub.add_parser("constants", help="closed-form exponents and constants")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--output", default=argparse.SUPPRESS)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(run=cmd_constants)

    p = sub.add_parser("solve", help="numerical oracle for alpha, beta or c(r, k)")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--output", default=argparse.SUPPRESS)
    p.add_argument("--which", choices=("alpha", "beta", "beta-stationary", "crk"), required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--grid-size", type=int, default=solver.DEFAULT_GRID_SIZE)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("verify", help="run one claim check")
    common(p, g=True)
    p.add_argument("--claim", choices=CLAIMS, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None, help="exponent to test instead of alpha(r)")
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--len-a", type=float, default=None)
    p.add_argument("--len-b", type=float, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--y", type=float, default=None)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("sweep", help="run every claim over a config matrix")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--output", default=argparse.SUPPRESS)
    p.add_argument("--config", required=True)
    p.set_defaults(run=cmd_sweep, default_format="csv")

    p = sub.add_parser("clt", help="N_r of normalized Laplace sums")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--output", default=argparse.SUPPRESS)
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--k-max", type=int, default=64)
    p.add_argument("--resolution", type=int, default=None)
    p.set_defaults(run=cmd_clt)

    p = sub.add_parser("rearrange", help="symmetric decreasing rearrangement")
    common(p, g=True)
    p.add_argument("--r", type=_order, default=0.5)
    p.add_argument("--xy", default=None, help="write the rearranged grid as (x, y) columns")
    p.set_defaults(run=cmd_rearrange)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or getattr(args, "default_format", "json")
    try:
        payload, ok = args.run(args)
    except (UsageError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"repi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with open(args.output, "w") as fh:
            _emit(payload, fmt, fh)
    else:
        _emit(payload, fmt, sys.stdout)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
