"""Batch command-line front end.

Subcommands: eval-pose, eval-track, stats, merge, oracle-check. Tables
print at fixed 3-decimal precision; the json-report format carries full
precision. Output is byte-identical across repeated runs with the same
configuration: tie-breaking is deterministic and every aggregation runs
in a fixed order. The CLI adds no computation of its own; every number
comes from the library API.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from itertools import permutations
from pathlib import Path

import numpy as np

from .assignment import brute_force_min_cost, solve_min_cost
from .dataio import (
    AnnotationError,
    CameraLayout,
    compute_stats,
    load_annotations,
    load_camera_layout,
    load_schema,
    merge_views,
    save_annotations,
)
from .evaluate import pose_report, track_report
from .model import KeypointSchema, SequenceSet, build_trajectories
from .ospa import ospa_pose
from .ospa2 import ospa2_pose, track_distance
from .synth import random_pose_set, random_scene

__all__ = ["main"]

_LEVELS = ("visible", "occluded", "invisible")


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.3f}"


def _unit_open_interval(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if not 0.0 < val < 1.0:
        raise argparse.ArgumentTypeError("must lie strictly between 0 and 1")
    return val


def _load_side(path: str, kind: str, schema: KeypointSchema) -> list[SequenceSet]:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.jsonl"))
        if not files:
            raise AnnotationError(f"{p}: directory holds no .jsonl scene files")
        return [load_annotations(f, kind, schema) for f in files]
    return [load_annotations(p, kind, schema)]


def _load_schema_arg(args) -> KeypointSchema:
    schema = load_schema(args.schema) if args.schema else KeypointSchema.default()
    if getattr(args, "oks_mode", None):
        schema = KeypointSchema(schema.names, schema.sigmas, args.oks_mode, schema.scalar_k)
    return schema


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _table(headers: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "csv":
        lines = [",".join(headers)] + [",".join(r) for r in rows]
        return "\n".join(lines) + "\n"
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    head = "| " + " | ".join(h.ljust(w) for h, w in zip(headers, widths)) + " |"
    sep = "|" + "|".join("-" * (w + 2) for w in widths) + "|"
    body = ["| " + " | ".join(v.ljust(w) for v, w in zip(r, widths)) + " |" for r in rows]
    return "\n".join([head, sep] + body) + "\n"


def _breakdown_cells(bd: dict) -> list[str]:
    cells = []
    for key in ("contribution", "per_keypoint_average", "per_frame_average", "per_pose_average"):
        for lvl in _LEVELS:
            cells.append(_fmt(bd[lvl][key]))
    return cells


_BREAKDOWN_HEADERS = [
    f"{key}_{lvl[0]}"
    for key in ("contrib", "per_kp", "per_frame", "per_pose")
    for lvl in _LEVELS
]


def cmd_eval_pose(args) -> int:
    schema = _load_schema_arg(args)
    gt = _load_side(args.gt, "ground_truth", schema)
    pred = _load_side(args.pred, "prediction", schema)
    report = pose_report(
        gt, pred, schema,
        oks_threshold=args.oks_threshold,
        map_sweep=args.map_sweep,
        jobs=args.jobs,
    )
    if args.format == "json-report":
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        return 0
    headers = ["scene", "ospa_pose", "loc", "card", "ap", "ar"] + _BREAKDOWN_HEADERS
    if args.map_sweep:
        headers.insert(6, "map")
    rows = []
    if args.per_scene:
        for name, s in report["scenes"].items():
            row = [name] + [_fmt(s[k]) for k in ("ospa_pose", "loc", "card", "ap", "ar")]
            if args.map_sweep:
                row.append("n/a")
            rows.append(row + _breakdown_cells(s["visibility_breakdown"]))
    d = report["dataset"]
    row = ["dataset"] + [_fmt(d[k]) for k in ("ospa_pose", "loc", "card", "ap", "ar")]
    if args.map_sweep:
        row.append(_fmt(d["map"]))
    rows.append(row + _breakdown_cells(d["visibility_breakdown"]))
    _emit(_table(headers, rows, args.format), args.out)
    return 0


def cmd_eval_track(args) -> int:
    schema = _load_schema_arg(args)
    gt = _load_side(args.gt, "ground_truth", schema)
    pred = _load_side(args.pred, "prediction", schema)
    report = track_report(gt, pred, schema, oks_threshold=args.oks_threshold, jobs=args.jobs)
    if args.format == "json-report":
        _emit(json.dumps(report, indent=2) + "\n", args.out)
        return 0
    headers = [
        "scene", "mota", "idf1", "idsw", "fp", "fn", "gt_count",
        "ospa2", "ospa2_card", "ospa2_loc", "ospa2_v", "ospa2_o", "ospa2_i",
    ]
    def row_of(name: str, s: dict) -> list[str]:
        o2 = s["ospa2"]
        return [
            name, _fmt(s["mota"]), _fmt(s["idf1"]), _fmt(s["idsw"]), _fmt(s["fp"]),
            _fmt(s["fn"]), _fmt(s["gt_count"]), _fmt(o2["total"]), _fmt(o2["card"]),
            _fmt(o2["loc"]), _fmt(o2["visible"]), _fmt(o2["occluded"]), _fmt(o2["invisible"]),
        ]
    rows = []
    if args.per_scene:
        for name, s in report["scenes"].items():
            rows.append(row_of(name, s))
    rows.append(row_of("dataset", report["dataset"]))
    _emit(_table(headers, rows, args.format), args.out)
    return 0


def cmd_stats(args) -> int:
    schema = _load_schema_arg(args)
    scenes = _load_side(args.gt, "ground_truth", schema)
    stats = compute_stats(scenes, bbox_scale_bin_px=args.bbox_bin)
    if args.format == "json-report":
        payload = {
            "command": "stats",
            "track_count": stats.track_count,
            "mean_track_length": stats.mean_track_length,
            "max_track_length": stats.max_track_length,
            "total_poses": stats.total_poses,
            "total_keypoints": stats.total_keypoints,
            "track_length_histogram": stats.track_length_histogram,
            "poses_per_frame_histogram": stats.poses_per_frame_histogram,
            "visible_keypoints_histogram": stats.visible_keypoints_histogram,
            "per_scene_visibility_distribution": stats.per_scene_visibility_distribution,
            "bbox_scale_histogram": stats.bbox_scale_histogram,
            "bbox_scale_bin_px": stats.bbox_scale_bin_px,
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    lines = [
        f"track_count,{stats.track_count}",
        f"mean_track_length,{stats.mean_track_length:.3f}",
        f"max_track_length,{stats.max_track_length}",
        f"total_poses,{stats.total_poses}",
        f"total_keypoints,{stats.total_keypoints}",
    ]
    sections = [
        ("track_length", stats.track_length_histogram),
        ("poses_per_frame", stats.poses_per_frame_histogram),
        ("visible_keypoints", stats.visible_keypoints_histogram),
        ("bbox_scale", stats.bbox_scale_histogram),
    ]
    for label, hist in sections:
        for key, count in hist.items():
            lines.append(f"{label},{key},{count}")
    for scene, dist in stats.per_scene_visibility_distribution.items():
        lines.append(f"scene_visibility,{scene},{dist[0]},{dist[1]},{dist[2]}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_merge(args) -> int:
    schema = _load_schema_arg(args)
    layout = load_camera_layout(args.layout) if args.layout else CameraLayout.default()
    cams = [load_annotations(p, args.kind, schema) for p in args.cameras]
    merged = merge_views(cams, layout, args.kind, nms_iou=args.nms_iou, scene_name=args.scene)
    save_annotations(merged, args.out, args.kind)
    total = sum(len(f.poses) for f in merged.frames)
    sys.stdout.write(
        f"merged {len(cams)} cameras x {len(merged.frames)} frames -> "
        f"{args.out} ({total} poses)\n"
    )
    return 0


def cmd_oracle_check(args) -> int:
    """Brute-force equivalence sweeps; prints max deviations."""
    rng = np.random.default_rng(args.seed)
    schema = KeypointSchema.default()
    failed = False

    dev = 0.0
    for _ in range(args.trials):
        m = int(rng.integers(1, 8))
        n = int(rng.integers(1, 8))
        c = rng.uniform(size=(m, n))
        dev = max(dev, abs(solve_min_cost(c).total_cost - brute_force_min_cost(c).total_cost))
    ok = dev < 1e-9
    failed |= not ok
    print(f"assignment vs brute force: {args.trials} trials, max deviation {dev:.3e} "
          f"[{'PASS' if ok else 'FAIL'}]")

    dev = 0.0
    n_pose_trials = max(1, args.trials // 2)
    for _ in range(n_pose_trials):
        X = random_pose_set(rng, int(rng.integers(0, 7)), bbox_area=10000.0)
        Y = random_pose_set(rng, int(rng.integers(0, 7)), bbox_area=10000.0)
        res = ospa_pose(X, Y, schema)
        dev = max(dev, abs(res.total - _brute_ospa_value(X, Y, schema)))
    ok = dev < 1e-9
    failed |= not ok
    print(f"pose set error vs exhaustive permutations: {n_pose_trials} trials, "
          f"max deviation {dev:.3e} [{'PASS' if ok else 'FAIL'}]")

    dev = 0.0
    n_track_trials = max(1, args.trials // 4)
    for i in range(n_track_trials):
        gt_scene = random_scene(rng, f"a{i}", n_tracks=int(rng.integers(1, 5)), n_frames=8)
        pred_scene = random_scene(rng, f"b{i}", n_tracks=int(rng.integers(1, 5)), n_frames=8)
        gt_tracks = list(build_trajectories(gt_scene).values())
        pred_tracks = list(build_trajectories(pred_scene).values())
        res = ospa2_pose(gt_tracks, pred_tracks, schema)
        dev = max(dev, abs(res.total - _brute_ospa2_value(gt_tracks, pred_tracks, schema)))
    ok = dev < 1e-9
    failed |= not ok
    print(f"track set error vs exhaustive permutations: {n_track_trials} trials, "
          f"max deviation {dev:.3e} [{'PASS' if ok else 'FAIL'}]")

    return 1 if failed else 0


def _brute_ospa_value(X, Y, schema) -> float:
    from .oks import pose_distance

    m, n = min(len(X), len(Y)), max(len(X), len(Y))
    if n == 0:
        return 0.0
    if m == 0:
        return 1.0
    small, large, gt_is_small = (X, Y, True) if len(X) <= len(Y) else (Y, X, False)
    best = np.inf
    for perm in permutations(range(n), m):
        cost = 0.0
        for i, j in enumerate(perm):
            if gt_is_small:
                cost += pose_distance(small[i], large[j], schema)
            else:
                cost += pose_distance(large[j], small[i], schema)
        best = min(best, cost)
    return (best + (n - m)) / n


def _brute_ospa2_value(GT, Pred, schema) -> float:
    m, n = min(len(GT), len(Pred)), max(len(GT), len(Pred))
    if n == 0:
        return 0.0
    if m == 0:
        return 1.0
    small, large, gt_is_small = (GT, Pred, True) if len(GT) <= len(Pred) else (Pred, GT, False)
    best = np.inf
    for perm in permutations(range(n), m):
        cost = 0.0
        for i, j in enumerate(perm):
            if gt_is_small:
                cost += track_distance(small[i], large[j], schema)
            else:
                cost += track_distance(large[j], small[i], schema)
        best = min(best, cost)
    return (best + (n - m)) / n


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posemetrics",
        description="Multi-person pose estimation and tracking evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--schema", help="keypoint schema file (default: built-in)")
    common.add_argument("--oks-mode", choices=["mean_distance", "per_joint"],
                        help="override the schema's similarity mode")
    common.add_argument("--format", choices=["csv", "markdown", "json-report"],
                        default="csv", help="output format (default: csv)")
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized commands")

    eval_common = argparse.ArgumentParser(add_help=False, parents=[common])
    eval_common.add_argument("--gt", required=True, help="ground-truth scene file or directory")
    eval_common.add_argument("--pred", required=True, help="prediction scene file or directory")
    eval_common.add_argument("--oks-threshold", type=_unit_open_interval, default=0.5,
                             help="OKS acceptance threshold in (0, 1) (default: 0.5)")
    eval_common.add_argument("--per-scene", action="store_true",
                             help="emit one row per scene before the dataset row")
    eval_common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                             help="scene-level parallelism (default: available cores)")

    p = sub.add_parser("eval-pose", parents=[eval_common],
                       help="per-frame pose set error plus AP/AR")
    p.add_argument("--map-sweep", action="store_true",
                   help="also average AP over thresholds 0.50:0.05:0.95")
    p.set_defaults(func=cmd_eval_pose)

    p = sub.add_parser("eval-track", parents=[eval_common],
                       help="MOTA/IDF1/IDSW plus track set error")
    p.set_defaults(func=cmd_eval_track)

    p = sub.add_parser("stats", parents=[common], help="dataset statistics from ground truth")
    p.add_argument("--gt", required=True, help="ground-truth scene file or directory")
    p.add_argument("--bbox-bin", type=int, default=10, help="bbox scale bin width in px")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("merge", parents=[common],
                       help="merge per-camera annotations into the stitched panorama")
    p.add_argument("--cameras", nargs="+", required=True,
                   help="per-camera scene files, in camera layout order")
    p.add_argument("--kind", choices=["ground_truth", "prediction"], required=True)
    p.add_argument("--layout", help="camera layout file (default: built-in 5-camera layout)")
    p.add_argument("--nms-iou", type=_unit_open_interval, default=0.5,
                   help="box overlap above which duplicate predictions are suppressed")
    p.add_argument("--scene", help="scene name for the merged output")
    p.set_defaults(func=cmd_merge, out_required=True)

    p = sub.add_parser("oracle-check", parents=[common],
                       help="verify the fast solvers against brute-force enumeration")
    p.add_argument("--trials", type=int, default=200, help="assignment trials (default: 200)")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "merge" and not args.out:
        parser.error("merge requires --out")
    try:
        return args.func(args)
    except (AnnotationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
