"""Run the evaluator CLI and return its json-report as nested mappings."""

from __future__ import annotations

import json
import subprocess
import sys

__all__ = ["EvaluationError", "py_eval_pose", "py_eval_track", "py_stats"]


class EvaluationError(RuntimeError):
    """The evaluator exited with an error; the message is its diagnostic."""


def _run(args: list[str]) -> dict:
    cmd = [sys.executable, "-m", "posemetrics", *args, "--format", "json-report"]
    proc = subprocess.run(cmd, capture_output=True, text=True)
    if proc.returncode != 0:
        detail = proc.stderr.strip() or f"evaluator exited with code {proc.returncode}"
        raise EvaluationError(detail)
    try:
        return json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise EvaluationError(f"unparseable evaluator output: {exc}") from exc


def _common_args(schema_path, oks_mode, jobs) -> list[str]:
    args = []
    if schema_path:
        args += ["--schema", str(schema_path)]
    if oks_mode:
        args += ["--oks-mode", oks_mode]
    if jobs is not None:
        args += ["--jobs", str(jobs)]
    return args


def py_eval_pose(
    gt_path,
    pred_path,
    schema_path=None,
    *,
    oks_threshold: float = 0.5,
    oks_mode: str | None = None,
    map_sweep: bool = False,
    jobs: int | None = 1,
) -> dict:
    """Pose-estimation report: set error with loc/card split, AP/AR and
    the per-occlusion localization breakdown, per scene and dataset-wide.
    """
    args = ["eval-pose", "--gt", str(gt_path), "--pred", str(pred_path),
            "--oks-threshold", repr(float(oks_threshold))]
    if map_sweep:
        args.append("--map-sweep")
    return _run(args + _common_args(schema_path, oks_mode, jobs))


def py_eval_track(
    gt_path,
    pred_path,
    schema_path=None,
    *,
    oks_threshold: float = 0.5,
    oks_mode: str | None = None,
    jobs: int | None = 1,
) -> dict:
    """Tracking report: MOTA/IDF1/IDSW plus the track set error with its
    cardinality/localization components and per-occlusion totals.
    """
    args = ["eval-track", "--gt", str(gt_path), "--pred", str(pred_path),
            "--oks-threshold", repr(float(oks_threshold))]
    return _run(args + _common_args(schema_path, oks_mode, jobs))


def py_stats(gt_path, schema_path=None, *, bbox_bin: int = 10) -> dict:
    """Dataset statistics over ground-truth scenes: histograms and scalars."""
    args = ["stats", "--gt", str(gt_path), "--bbox-bin", str(int(bbox_bin))]
    return _run(args + _common_args(schema_path, None, None))
