"""Command-line front end: kernel evaluation, lemma checks, equidistribution
experiments, and the pre-trace verification, with CSV/JSON output.

Exit codes: 0 success, 2 config or precondition error, 3 resource/cutoff
failure, 4 verification finding.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from .errors import CutoffExceeded, CuspKernelError, SupportViolation
from .halfplane import Point
from .kernel import WeightConfig, bergman_R
from .modgroup import (
    StripRegion,
    elliptic_points_in_strip,
    min_displacement,
    sample_bulk,
    write_elliptic_csv,
)
from .equidist import (
    BumpFunction2D,
    TestFunction,
    integrate_horizontal,
    integrate_region,
    integrate_vertical,
)
from .oracle import delta_coeffs, verify_pretrace, write_coeffs_csv

RNG_NAME = "philox"


def parse_point(text: str) -> Point:
    """Parse 'a+bi' / 'a-bi' complex literals into a half-plane point."""
    z = complex(text.replace("i", "j"))
    if z.imag <= 0:
        raise argparse.ArgumentTypeError(f"point must satisfy Im z > 0: {text!r}")
    return Point(z.real, z.imag)


def _rng(seed: int):
    return np.random.Generator(np.random.Philox(seed))


def _emit(args, payload: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _fmt(x: float) -> str:
    return format(x, ".17g")


def cmd_kernel(args) -> int:
    cfg = WeightConfig(args.k, args.tol, args.A, args.c0)
    res = bergman_R(args.z, args.w if args.w else args.z, cfg, fast=args.fast)
    record = {
        "k": args.k,
        "re": res.value.real,
        "im": res.value.imag,
        "tail_bound": res.tail_bound,
        "terms_used": res.terms_used,
        "cosets_used": res.cosets_used,
    }
    if args.format == "json":
        _emit(args, _json(record))
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(record.keys())
        w.writerow([record["k"], _fmt(record["re"]), _fmt(record["im"]),
                    _fmt(record["tail_bound"]), record["terms_used"],
                    record["cosets_used"]])
        _emit(args, buf.getvalue())
    return 0


def cmd_scan(args) -> int:
    try:
        x0, x1, nx, y0, y1, ny = args.grid.split(",")
        x0, x1, y0, y1 = float(x0), float(x1), float(y0), float(y1)
        nx, ny = int(nx), int(ny)
        if nx < 1 or ny < 1 or y0 <= 0 or y1 < y0 or x1 < x0:
            raise ValueError
    except ValueError:
        print("malformed --grid, expected x0,x1,nx,y0,y1,ny", file=sys.stderr)
        return 2
    cfg = WeightConfig(args.k, args.tol, args.A, args.c0)
    xs = [x0] if nx == 1 else [x0 + i * (x1 - x0) / (nx - 1) for i in range(nx)]
    ys = [y0] if ny == 1 else [y0 + j * (y1 - y0) / (ny - 1) for j in range(ny)]
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["x", "y", "k", "re_R", "im_R", "tail_bound", "terms_used"])
    for y in ys:
        for x in xs:
            res = bergman_R(Point(x, y), Point(x, y), cfg, fast=args.fast)
            w.writerow([_fmt(x), _fmt(y), args.k, _fmt(res.value.real),
                        _fmt(res.value.imag), _fmt(res.tail_bound),
                        res.terms_used])
    _emit(args, buf.getvalue())
    return 0


def cmd_lemmas(args) -> int:
    delta = args.delta if args.delta is not None else 0.05
    region = StripRegion(args.Y, delta)
    elist = elliptic_points_in_strip(args.Y)
    rng = _rng(args.seed)
    zs = sample_bulk(region, elist, args.samples, rng)
    bound = delta / (4.0 * args.Y)
    min_observed = math.inf
    worst = None
    for z in zs:
        _, d = min_displacement(z)
        if d < min_observed:
            min_observed = d
            worst = z
    passed = min_observed > bound
    report = {
        "rng": RNG_NAME,
        "seed": args.seed,
        "Y": args.Y,
        "delta": delta,
        "samples": args.samples,
        "bound": bound,
        "min_observed": min_observed,
        "worst_point": {"x": worst.x, "y": worst.y},
        "pass": passed,
    }
    _emit(args, _json(report))
    return 0 if passed else 4


def _sweep_ks(args):
    if args.sweep:
        return [int(s) for s in args.sweep.split(",")]
    return [args.k]


def _run_integral(args, runner):
    records = []
    for k in _sweep_ks(args):
        cfg = WeightConfig(k, args.tol, args.A, args.c0)
        region = StripRegion(args.Y, args.delta if args.delta else 0.05)
        t0 = time.time()
        res = runner(cfg, region)
        ms = 1000.0 * (time.time() - t0)
        records.append({
            "k": k,
            "integral": res.integral,
            "reference": res.reference,
            "gap": res.integral - res.reference,
            "reported_error": res.error,
            "nodes": res.nodes,
            "wall_time_ms": ms,
        })
    return records


_SWEEP_COLUMNS = ("k", "x_or_y", "integral", "reference", "gap",
                  "reported_error", "nodes", "wall_time_ms")


def _emit_records(args, records) -> None:
    """Sweep results as a JSON list or as CSV rows per weight."""
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf)
        cols = [c for c in _SWEEP_COLUMNS if c in records[0]]
        w.writerow(cols)
        for r in records:
            w.writerow([r[c] if isinstance(r[c], int) else _fmt(r[c])
                        for c in cols])
        _emit(args, buf.getvalue())
    else:
        _emit(args, _json(records))


def cmd_vertical(args) -> int:
    a, b = (float(s) for s in args.support.split(","))
    psi = TestFunction.bump(a, b, weight="log")
    records = _run_integral(
        args,
        lambda cfg, region: integrate_vertical(
            args.x, psi, cfg, region, unsafe=args.unsafe, fast=args.fast
        ),
    )
    for r in records:
        r["x_or_y"] = args.x
    _emit_records(args, records)
    return 0


def cmd_horizontal(args) -> int:
    if args.psi == "const":
        psi = TestFunction.indicator(-0.5, 0.5, weight="lin")
    elif args.psi.startswith("indicator:"):
        a, b = (float(s) for s in args.psi.split(":", 1)[1].split(","))
        psi = TestFunction.indicator(a, b, weight="lin")
    elif args.psi.startswith("bump:"):
        a, b = (float(s) for s in args.psi.split(":", 1)[1].split(","))
        psi = TestFunction.bump(a, b, weight="lin")
    else:
        print("--psi must be const, indicator:a,b or bump:a,b", file=sys.stderr)
        return 2
    records = _run_integral(
        args,
        lambda cfg, region: integrate_horizontal(
            args.y, psi, cfg, region, unsafe=args.unsafe, fast=args.fast
        ),
    )
    for r in records:
        r["x_or_y"] = args.y
    _emit_records(args, records)
    return 0


def cmd_region(args) -> int:
    cx, cy = (float(s) for s in args.center.split(","))
    phi = BumpFunction2D(cx, cy, args.radius)
    records = _run_integral(
        args,
        lambda cfg, region: integrate_region(
            phi, cfg, unsafe=args.unsafe, fast=args.fast
        ),
    )
    _emit_records(args, records)
    return 0


def pretrace_points(n: int, seed: int) -> list:
    """Seeded fundamental-domain sample points in the q-series regime."""
    rng = _rng(seed)
    points = []
    while len(points) < n:
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(0.95, 2.6)
        if x * x + y * y >= 1.05:
            points.append(Point(x, y))
    return points


def cmd_pretrace(args) -> int:
    reports = []
    worst = 0.0
    for z in pretrace_points(args.points, args.seed):
        res = verify_pretrace(z, kernel_tol=1e-14, norm_tol=1e-10)
        worst = max(worst, res)
        reports.append({"x": z.x, "y": z.y, "residual": res})
    payload = {
        "rng": RNG_NAME,
        "seed": args.seed,
        "tol": args.tol,
        "max_residual": worst,
        "points": reports,
        "pass": worst < args.tol,
    }
    _emit(args, _json(payload))
    return 0 if worst < args.tol else 4


def cmd_elliptic(args) -> int:
    pts = elliptic_points_in_strip(args.Y)
    if args.out:
        write_elliptic_csv(pts, args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["x", "y", "stab_order", "gen_a", "gen_b", "gen_c", "gen_d"])
        for e in pts:
            g = e.generator
            w.writerow([repr(e.location.x), repr(e.location.y),
                        e.stabilizer_order, g.a, g.b, g.c, g.d])
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_coeffs(args) -> int:
    qexp = delta_coeffs(args.n)
    if args.out:
        write_coeffs_csv(qexp, args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "a_n"])
        for n in range(1, qexp.N + 1):
            w.writerow([n, qexp.a(n)])
        sys.stdout.write(buf.getvalue())
    return 0


def _add_common(p, *, k=True):
    if k:
        p.add_argument("--k", type=int, default=12, help="even weight >= 4")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="requested certified tail bound")
    p.add_argument("--Y", type=float, default=7.0, help="strip parameter")
    p.add_argument("--delta", type=float, default=None,
                   help="neighborhood radius (hyperbolic)")
    p.add_argument("--A", type=float, default=2.0, help="squeeze constant")
    p.add_argument("--c0", type=float, default=0.125, help="proximity constant")
    p.add_argument("--seed", type=int, default=20250809, help="64-bit RNG seed")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--fast", action="store_true",
                   help="unordered reduction; results may differ in the last ulps")
    p.add_argument("--unsafe", action="store_true",
                   help="lift the proved support-window preconditions")
    p.add_argument("--sweep", default=None, help="comma-separated k list")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cuspkernel",
        description="Bergman-kernel numerics for cusp forms on the modular group",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="evaluate R_k(z, w)")
    p.add_argument("--z", type=parse_point, required=True)
    p.add_argument("--w", type=parse_point, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("scan", help="grid scan of the diagonal kernel")
    p.add_argument("--grid", required=True, help="x0,x1,nx,y0,y1,ny")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("lemmas", help="displacement lemma verification")
    p.add_argument("--samples", type=int, default=1000)
    _add_common(p, k=False)
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("vertical", help="vertical-geodesic mass integral")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--support", default="1,2", help="bump support a,b")
    _add_common(p)
    p.set_defaults(func=cmd_vertical)

    p = sub.add_parser("horizontal", help="horizontal-segment mass integral")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--psi", default="const",
                   help="const | indicator:a,b | bump:a,b")
    _add_common(p)
    p.set_defaults(func=cmd_horizontal)

    p = sub.add_parser("region", help="2-D bump mass integral")
    p.add_argument("--center", default="0.1,1.2", help="cx,cy")
    p.add_argument("--radius", type=float, default=0.2)
    _add_common(p)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("pretrace", help="weight-12 pre-trace verification")
    p.add_argument("--points", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_pretrace, tol=1e-8)  # tol = residual threshold here

    p = sub.add_parser("elliptic", help="dump elliptic points as CSV")
    _add_common(p, k=False)
    p.set_defaults(func=cmd_elliptic)

    p = sub.add_parser("coeffs", help="dump discriminant-form coefficients")
    p.add_argument("--n", type=int, default=100)
    _add_common(p, k=False)
    p.set_defaults(func=cmd_coeffs)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        rc = args.func(args)
    except SupportViolation as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return 2
    except CutoffExceeded as exc:
        print(f"cutoff exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, CuspKernelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return rc


if __name__ == "__main__":
    sys.exit(main())
