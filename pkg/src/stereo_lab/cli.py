"""Command-line entry point: ``stereo-lab <subcommand>``.

Exit codes: 0 success, 2 usage error, 3 format error, 4 precondition
violation.  ``STEREO_LAB_THREADS`` caps worker threads.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import cv2
import numpy as np

from stereo_lab import analysis, io, pipeline, synth
from stereo_lab._threads import max_workers
from stereo_lab.errors import FormatError, PreconditionError
from stereo_lab.evaluation import CSV_HEADER, evaluate
from stereo_lab.fusion import augment_images
from stereo_lab.geometry import depth_to_disparity, disparity_to_depth, read_calib
from stereo_lab.prefill import fill_ipbasic, fill_nearest
from stereo_lab.refiner import init_disparity
from stereo_lab.sparsify import sample_beams, sample_uniform

log = logging.getLogger("stereo_lab")

EXIT_OK, EXIT_USAGE, EXIT_FORMAT, EXIT_PRECONDITION = 0, 2, 3, 4


def _shape(text):
    try:
        h, w = text.lower().split("x")
        return int(h), int(w)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text):
    return [t for t in text.split(",") if t]


def _rig(args, needed_for=None):
    if getattr(args, "calib", None):
        return read_calib(args.calib)
    if needed_for:
        raise PreconditionError(f"--calib is required to {needed_for}")
    return None


def _write_map(grid, path, unit):
    suffix = Path(path).suffix.lower()
    if suffix == ".png":
        if unit != "m":
            raise PreconditionError("KITTI PNG output stores depth; use .pfm for disparity")
        io.write_kitti_depth_png(grid, path)
    elif suffix == ".pfm":
        io.write_pfm(grid, path)
    else:
        raise FormatError(f"{path}: output must be .png or .pfm")


def cmd_sparsify(args):
    gt = io.read_kitti_depth_png(args.gt)
    if args.mode == "uniform":
        if args.n is None:
            raise PreconditionError("--mode uniform needs --n")
        points = sample_uniform(gt, args.n, args.seed, unit="m")
    else:
        if args.beams is None:
            raise PreconditionError("--mode beams needs --beams")
        points = sample_beams(gt, _rig(args, "place beams"), args.beams, unit="m")
    io.write_sparse_points(points, args.output)
    log.info("wrote %d points to %s", len(points), args.output)


def cmd_prefill(args):
    points = io.read_sparse_points(args.points)
    if tuple(args.shape) != points.shape:
        raise PreconditionError(f"--shape {args.shape} does not match point frame {points.shape}")
    space = {"depth": "m", "disparity": "px"}[args.space] if args.space else points.unit
    rig = _rig(args)

    if args.method == "ipbasic":
        if points.unit == "px":
            if rig is None:
                raise PreconditionError("--calib is required to fill disparities with ipbasic")
            points = points.with_values(disparity_to_depth(points.values, rig), "m")
        dense, unit = fill_ipbasic(points), "m"
    else:
        dense, unit = fill_nearest(points), points.unit

    if unit != space:
        if rig is None:
            raise PreconditionError(f"--calib is required to convert the fill to {args.space}")
        dense = depth_to_disparity(dense, rig) if space == "px" else disparity_to_depth(dense, rig)
    _write_map(dense, args.output, space)


def cmd_fuse(args):
    rig = _rig(args, "lift points to 3D")
    left, right = io.read_image(args.left), io.read_image(args.right)
    points = io.read_sparse_points(args.points)
    if points.unit != "m":
        raise PreconditionError("fuse needs depth points (unit=m)")
    fl, fr = augment_images(left, right, points, rig)
    io.write_tensors([fl.data, fr.data], args.output)
    log.info("fused %d point pairs", int(fl.occupancy.sum()))


def cmd_match(args):
    rig = _rig(args)
    left, right = io.read_image(args.left), io.read_image(args.right)
    config = pipeline.MatchConfig(
        features=args.features, window=args.window, iters=args.iters, radius=args.k,
        smooth_radius=args.smooth_radius, max_disp=args.max_disp,
        prefill=args.prefill or "nearest",
    )
    shape = left.shape[:2]
    base = None
    if args.init:
        base = io.read_pfm(args.init).astype(np.float64)
        if base.shape != shape:
            raise PreconditionError(f"--init shape {base.shape} != image {shape}")
    guidance = prefilled = None
    if args.points:
        points = io.read_sparse_points(args.points)
        if points.unit == "m" and rig is None:
            raise PreconditionError("--calib is required to use depth points as disparity guidance")
        if args.prefill:
            prefilled = pipeline.prefill_disparity(points, args.prefill, rig)
        else:
            guidance = pipeline.to_disparity_points(points, rig)
    elif args.prefill:
        raise PreconditionError("--prefill needs --points")

    d0, rejected = init_disparity(shape, guidance=guidance, prefilled=prefilled,
                                  max_disp=config.max_disp)
    if rejected:
        log.warning("%d guidance points fell outside the image", rejected)
    if base is not None and prefilled is None:
        keep = np.isfinite(base)
        if guidance is not None:
            keep[guidance.rows, guidance.cols] = False
        d0[keep] = np.clip(base[keep], 0.0, config.max_disp)

    trace = pipeline.match(left, right, d0, config)
    io.write_pfm(trace.final, args.output)
    if args.trace_dir:
        out = Path(args.trace_dir)
        out.mkdir(parents=True, exist_ok=True)
        for t, snap in enumerate(trace.snapshots, 1):
            io.write_pfm(snap, out / f"disp_{t:03d}.pfm")


def _as_disparity(path, rig):
    grid, unit = io.read_disparity_or_depth(path)
    return depth_to_disparity(grid, rig) if unit == "m" else grid


def cmd_eval(args):
    rig = _rig(args, "compare disparity and depth")
    pred = _as_disparity(args.pred, rig)
    gt = _as_disparity(args.gt, rig)
    if pred.shape != gt.shape:
        raise PreconditionError(f"prediction {pred.shape} and ground truth {gt.shape} differ")
    scores = evaluate(pred, gt, rig)
    if args.header:
        print(CSV_HEADER)
    print(scores.csv_row())


def _to_gray8(values):
    v = np.asarray(values, dtype=np.float64)
    lo, hi = np.nanmin(v), np.nanmax(v)
    scaled = (v - lo) / (hi - lo) if hi > lo else np.zeros_like(v)
    return np.rint(scaled * 255).astype(np.uint8)


def cmd_toy(args):
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    study = analysis.toy_study(args.size, args.fg, args.dbg, args.dfg, args.stride, args.k,
                               args.lowpass_radius)
    with open(out / "laplacian.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["init", "laplacian"])
        for name in analysis.INITS:
            w.writerow([name, f"{study.laplacian[name]:.6f}"])
    with open(out / "retrieval_error.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["init", "error", "error_lowpass"])
        for name in analysis.INITS:
            w.writerow([name, f"{study.error[name]:.6f}", f"{study.error_lowpass[name]:.6f}"])
    with open(out / "spectra.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["init", "bin", "magnitude"])
        for name in analysis.INITS:
            for i, m in enumerate(study.spectra[name]):
                w.writerow([name, i, f"{m:.6f}"])

    mid = args.size // 2
    # rendered as cost (negated score): darker means cheaper
    io.write_image(np.rint(study.left * 255).astype(np.uint8), out / "left.png")
    io.write_image(np.rint(study.right * 255).astype(np.uint8), out / "right.png")
    io.write_image(_to_gray8(study.gt), out / "gt.png")
    io.write_image(_to_gray8(-study.cost[mid]), out / "cost_slice.png")
    for name in analysis.INITS:
        io.write_image(_to_gray8(-study.slabs[name][mid].T), out / f"slab_{name}.png")
        io.write_image(_to_gray8(study.inits[name]), out / f"init_{name}.png")
    for name in analysis.INITS:
        print(f"{name},{study.laplacian[name]:.4f},{study.error[name]:.4f},"
              f"{study.error_lowpass[name]:.4f}")


def cmd_sweep(args):
    scenes = synth.load_corpus(args.corpus)
    if not scenes:
        raise FormatError(f"{args.corpus}: no scenes (expected <scene>/disp.pfm)")
    config = pipeline.MatchConfig(features=args.features, window=args.window, iters=args.iters,
                                  radius=args.k, prefill=args.prefill)
    records = pipeline.sweep(scenes, args.points, args.variants, config, args.seed)
    summary = pipeline.summarize(records)
    with open(args.output, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["variant", "n_points", "scenes", "bad1", "bad2", "avg_err"])
        for n in args.points:
            for v in args.variants:
                s = summary[(v, n)]
                w.writerow([v, n, s["scenes"], f"{s['bad1']:.4f}", f"{s['bad2']:.4f}",
                            f"{s['avg_err']:.4f}"])
    if args.per_scene:
        with open(args.per_scene, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["scene", "variant", "n_points", "bad1", "bad2", "avg_err"])
            for r in records:
                w.writerow([r.scene, r.variant, r.n_points, f"{r.bad1:.4f}", f"{r.bad2:.4f}",
                            f"{r.avg_err:.4f}"])
    if args.curves:
        with open(args.curves, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["scene", "variant", "n_points", "iter", "avg_err"])
            for r in records:
                for t, e in enumerate(r.curve, 1):
                    w.writerow([r.scene, r.variant, r.n_points, t, f"{e:.6f}"])


def cmd_synth(args):
    rng = np.random.default_rng(args.seed)
    out = Path(args.output)
    for i in range(args.n):
        scene = synth.make_scene(rng, args.height, args.width)
        synth.save_scene(scene, out / f"scene_{i:03d}")
    log.info("wrote %d scenes to %s", args.n, out)


def build_parser():
    p = argparse.ArgumentParser(prog="stereo-lab", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sparsify", help="simulate sparse LiDAR from a KITTI depth PNG")
    s.add_argument("--gt", required=True)
    s.add_argument("--mode", choices=("uniform", "beams"), default="uniform")
    s.add_argument("--n", type=int)
    s.add_argument("--beams", type=int)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--calib")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_sparsify)

    s = sub.add_parser("prefill", help="densify sparse points")
    s.add_argument("--points", required=True)
    s.add_argument("--method", choices=("nearest", "ipbasic"), default="nearest")
    s.add_argument("--shape", type=_shape, required=True)
    s.add_argument("--space", choices=("depth", "disparity"))
    s.add_argument("--calib")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_prefill)

    s = sub.add_parser("fuse", help="append XYZ channels to a stereo pair")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--points", required=True)
    s.add_argument("--calib", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_fuse)

    s = sub.add_parser("match", help="iterative stereo matching")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--init")
    s.add_argument("--points")
    s.add_argument("--prefill", choices=("nearest", "ipbasic"))
    s.add_argument("--features", choices=("census", "zncc", "raw"), default="census")
    s.add_argument("--window", type=int, default=5)
    s.add_argument("--iters", type=int, default=32)
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--smooth-radius", type=int, default=1)
    s.add_argument("--max-disp", type=float, default=192.0)
    s.add_argument("--calib")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--trace-dir")
    s.set_defaults(func=cmd_match)

    s = sub.add_parser("eval", help="score a prediction against ground truth")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--calib", required=True)
    s.add_argument("--header", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("toy", help="toy retrieval diagnostics")
    s.add_argument("--size", type=int, default=40)
    s.add_argument("--fg", type=int, default=15)
    s.add_argument("--dbg", type=int, default=6)
    s.add_argument("--dfg", type=int, default=15)
    s.add_argument("--stride", type=int, default=6)
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--lowpass-radius", type=int, default=2)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_toy)

    s = sub.add_parser("sweep", help="guidance benefit vs. number of points")
    s.add_argument("--corpus", required=True)
    s.add_argument("--points", type=_int_list, default=[100, 300, 1000, 3000])
    s.add_argument("--variants", type=_str_list, default=["zero", "naive", "prefilled"])
    s.add_argument("--prefill", choices=("nearest", "ipbasic"), default="nearest")
    s.add_argument("--features", choices=("census", "zncc", "raw"), default="census")
    s.add_argument("--window", type=int, default=5)
    s.add_argument("--iters", type=int, default=32)
    s.add_argument("--k", type=int, default=4)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--per-scene")
    s.add_argument("--curves")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("synth", help="write a synthetic planted-disparity corpus")
    s.add_argument("--n", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--height", type=int, default=96)
    s.add_argument("--width", type=int, default=256)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    cv2.setNumThreads(max_workers())
    try:
        args.func(args)
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    except PreconditionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except FileNotFoundError as e:
        print(f"format error: {e}", file=sys.stderr)
        return EXIT_FORMAT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
