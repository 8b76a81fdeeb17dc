"""Command-line front end.

Results go to stdout as a single JSON line; logs go to stderr.
Exit codes: 0 success, 1 usage or validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .evaluate import evaluate, polygon_iou
from .fit import FitConfig, FitDivergence, fit
from .geometry import GeometryError, geometric_centroid, to_cartesian, to_polar
from .gradients import gradcheck
from .io import PRED_STYLE, TARGET_STYLE, FormatError, Style, read_polygons, render_svg, write_polygons, write_profile_csv, write_trace_csv
from .losses import LossWeights
from .resample import resample_oracle, resample_triangle, resample_vector
from .shapes import BUILTIN

log = logging.getLogger("polarpoly")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2
DEMO_SNAPSHOTS = (1, 200, 500)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stdout.flush()


def _snapshot_styles(n: int):
    # older snapshots fade toward grey
    greys = ["#bbbbbb", "#999999", "#777777", "#555555"]
    return [Style(stroke=greys[min(i, len(greys) - 1)], width=1.0, dash="4 3") for i in range(n)]


def _load_target(path):
    items = read_polygons(path)
    if not items:
        raise UsageError(f"{path}: no polygons")
    if len(items) > 1:
        log.warning("%s holds %d polygons; fitting the first (%s)", path, len(items), items[0][0])
    return items[0][1]


def cmd_fit(args) -> int:
    if args.k < 3:
        raise UsageError(f"--k must satisfy k >= 3, got {args.k}")
    target = _load_target(args.target)
    cfg = FitConfig(
        k=args.k,
        m=args.m,
        max_iters=args.iters,
        learning_rate=args.lr,
        weights=LossWeights(args.w1, args.w2, args.w3),
        angle_mode=args.angle_mode.replace("-", "_"),
        origin_mode=args.origin_mode.replace("-", "_"),
        seed=args.seed,
        snapshot_iters=tuple(args.snapshot_iters),
    )
    result = _run_fit(target, cfg, args.out_svg, args.out_trace)
    _emit(result)
    return EXIT_OK


def _run_fit(target, cfg: FitConfig, out_svg=None, out_trace=None) -> dict:
    poly, trace = fit(target, cfg)
    final = trace.records[-1].loss
    iou = polygon_iou(to_cartesian(poly), target)
    log.info("fit finished after %d iterations: total=%.6g iou=%.4f", len(trace), final.total, iou)
    if out_trace:
        write_trace_csv(trace, out_trace)
    if out_svg:
        snaps = [to_cartesian(trace.snapshots[i]) for i in sorted(trace.snapshots)]
        shapes = [(target, TARGET_STYLE)] + list(zip(snaps, _snapshot_styles(len(snaps))))
        shapes.append((to_cartesian(poly), PRED_STYLE))
        render_svg(shapes, out_svg)
    out = final.as_dict()
    out["raster_iou"] = iou
    out["iterations"] = len(trace)
    return out


def cmd_resample(args) -> int:
    rows = []
    for pid, poly, origin in read_polygons(args.input):
        o = origin if origin is not None else geometric_centroid(poly)
        try:
            if args.method == "triangle":
                prof = resample_triangle(to_polar(poly, o), args.m, args.phase)
            elif args.method == "vector":
                prof = resample_vector(poly, o, args.m, args.phase)
            else:
                prof = resample_oracle(poly, o, args.m, args.phase)
        except GeometryError as exc:
            raise UsageError(f"polygon {pid}: {exc}") from exc
        rows += [(pid, j, float(a), float(r)) for j, (a, r) in enumerate(zip(prof.angles, prof.radii))]
    write_profile_csv(rows, args.out)
    _emit({"polygons": len({r[0] for r in rows}), "rays": args.m, "method": args.method, "out": str(args.out)})
    return EXIT_OK


def cmd_eval(args) -> int:
    preds = [p for _, p, _ in read_polygons(args.pred)]
    gts = [p for _, p, _ in read_polygons(args.gt)]
    if not 0 < args.iou_threshold < 1:
        raise UsageError("--iou-threshold must lie in (0, 1)")
    if args.grid < 64:
        raise UsageError("--grid must be >= 64")
    report = evaluate(preds, gts, args.iou_threshold, args.grid)
    if report.empty:
        log.warning("empty prediction or ground-truth list")
    _emit(report.as_dict())
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    results = []
    ok = True
    for k in args.k:
        for m in args.m:
            if k < 3 or m < 8:
                raise UsageError(f"need k >= 3 and m >= 8, got k={k}, m={m}")
            rep = gradcheck(k, m, args.trials, args.eps, args.tolerance, seed=args.seed)
            log.info("k=%d m=%d max rel err %.3g (%d excluded)", k, m, rep.max_rel_error, rep.excluded)
            results.append({"k": k, "m": m, **rep.as_dict()})
            ok &= rep.passed
    _emit(
        {
            "passed": ok,
            "max_rel_error": max(r["max_rel_error"] for r in results),
            "tolerance": args.tolerance,
            "runs": results,
        }
    )
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_demo(args) -> int:
    target = BUILTIN[args.shape]()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_polygons([(args.shape, target)], out / "target.json")
    cfg = FitConfig(k=24, m=360, max_iters=500, snapshot_iters=DEMO_SNAPSHOTS)
    poly, trace = fit(target, cfg)
    for it, snap in sorted(trace.snapshots.items()):
        render_svg([(target, TARGET_STYLE), (to_cartesian(snap), PRED_STYLE)], out / f"snapshot_{it:04d}.svg")
    write_trace_csv(trace, out / "trace.csv")
    final = trace.records[-1].loss
    payload = final.as_dict()
    payload["raster_iou"] = polygon_iou(to_cartesian(poly), target)
    payload["iterations"] = len(trace)
    _emit(payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="polarpoly", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a deformable polygon to a target")
    f.add_argument("--target", required=True)
    f.add_argument("--k", type=int, default=24)
    f.add_argument("--m", type=int, default=360)
    f.add_argument("--iters", type=int, default=500)
    f.add_argument("--angle-mode", choices=["cumsum", "bin-offset", "fixed"], default="cumsum")
    f.add_argument("--origin-mode", choices=["centroid", "bbox", "vertex-mean"], default="centroid")
    f.add_argument("--w1", type=float, default=1.0)
    f.add_argument("--w2", type=float, default=1.0)
    f.add_argument("--w3", type=float, default=0.1)
    f.add_argument("--lr", type=float, default=0.05)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--out-svg")
    f.add_argument("--out-trace")
    f.add_argument("--snapshot-iters", type=_int_list, default=[])
    f.set_defaults(func=cmd_fit)

    r = sub.add_parser("resample", help="dense radial profiles of polygons")
    r.add_argument("--input", required=True)
    r.add_argument("--m", type=int, default=360)
    r.add_argument("--phase", type=float, default=0.0)
    r.add_argument("--method", choices=["triangle", "vector", "oracle"], default="vector")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_resample)

    e = sub.add_parser("eval", help="match predictions to ground truths")
    e.add_argument("--pred", required=True)
    e.add_argument("--gt", required=True)
    e.add_argument("--iou-threshold", type=float, default=0.5)
    e.add_argument("--grid", type=int, default=512)
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("gradcheck", help="analytic vs finite-difference gradients")
    g.add_argument("--k", type=_int_list, default=[12], help="vertex count(s), comma separated")
    g.add_argument("--m", type=_int_list, default=[90], help="ray count(s), comma separated")
    g.add_argument("--trials", type=int, default=100)
    g.add_argument("--eps", type=float, default=1e-5)
    g.add_argument("--tolerance", type=float, default=1e-4)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gradcheck)

    d = sub.add_parser("demo", help="fit a built-in shape and write snapshots")
    d.add_argument("--shape", choices=sorted(BUILTIN), default="star")
    d.add_argument("--out-dir", required=True)
    d.set_defaults(func=cmd_demo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except (UsageError, FormatError, GeometryError, ValueError, OSError) as exc:
        if isinstance(exc, FitDivergence):
            log.error("numerical failure: %s", exc)
            return EXIT_NUMERIC
        log.error("%s", exc)
        return EXIT_USAGE
    except FloatingPointError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
