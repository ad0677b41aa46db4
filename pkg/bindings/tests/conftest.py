"""Fixture scene files written directly in the documented JSONL format.

The bindings talk to the evaluator only through its file formats and
CLI, so these fixtures are built by hand rather than with the
evaluator's own writers.
"""

from __future__ import annotations

import json
import math

import pytest

N_JOINTS = 17


def pose_record(cx: float, cy: float, *, track_id=None, score=None, vis=2) -> dict:
    kps = [
        [cx + 6.0 * j, cy + 12.0 * j, vis if j % 5 else max(vis - 1, 0)]
        for j in range(N_JOINTS)
    ]
    rec = {
        "bbox": [cx - 10.0, cy - 10.0, 6.0 * N_JOINTS + 20.0, 12.0 * N_JOINTS + 20.0],
        "keypoints": kps,
    }
    if track_id is not None:
        rec["track_id"] = track_id
    if score is not None:
        rec["score"] = score
    return rec


def write_scene(path, kind: str, scene: str, frames: list[dict]) -> None:
    header = {"type": "header", "version": 1, "kind": kind, "scene": scene,
              "frame_rate_hz": 15.0}
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for frame in frames:
            fh.write(json.dumps(frame) + "\n")


def gt_frames() -> list[dict]:
    """Two tracks: id 1 over frames 0-7, id 2 over frames 0-3."""
    frames = []
    for t in range(8):
        poses = [pose_record(300.0 + 4.0 * t, 100.0, track_id=1)]
        if t < 4:
            poses.append(pose_record(1500.0 + 4.0 * t, 140.0, track_id=2))
        frames.append({"type": "frame", "frame_id": t, "poses": poses})
    return frames


def perfect_pred_frames() -> list[dict]:
    frames = []
    for frame in gt_frames():
        poses = [dict(p, score=1.0) for p in frame["poses"]]
        frames.append({"type": "frame", "frame_id": frame["frame_id"], "poses": poses})
    return frames


def split_pred_frames(switch_at: int = 4) -> list[dict]:
    """Track 1's predictions change id at the switch frame."""
    frames = []
    for frame in perfect_pred_frames():
        poses = []
        for p in frame["poses"]:
            p = dict(p)
            if p["track_id"] == 1 and frame["frame_id"] >= switch_at:
                p["track_id"] = 9
            poses.append(p)
        frames.append({"type": "frame", "frame_id": frame["frame_id"], "poses": poses})
    return frames


@pytest.fixture(scope="session")
def fixture_paths(tmp_path_factory):
    root = tmp_path_factory.mktemp("binding_fixture")
    paths = {
        "gt": root / "gt.jsonl",
        "perfect": root / "perfect.jsonl",
        "empty": root / "empty.jsonl",
        "split": root / "split.jsonl",
    }
    write_scene(paths["gt"], "ground_truth", "demo", gt_frames())
    write_scene(paths["perfect"], "prediction", "demo", perfect_pred_frames())
    write_scene(paths["empty"], "prediction", "demo", [])
    write_scene(paths["split"], "prediction", "demo", split_pred_frames())
    return paths


def assert_close(a, b, tol=1e-9, path="$"):
    """Recursive numeric comparison of two parsed reports."""
    assert type(a) is type(b) or (isinstance(a, (int, float)) and isinstance(b, (int, float))), (
        f"{path}: type mismatch {type(a)} vs {type(b)}"
    )
    if isinstance(a, dict):
        assert a.keys() == b.keys(), f"{path}: key sets differ"
        for k in a:
            assert_close(a[k], b[k], tol, f"{path}.{k}")
    elif isinstance(a, list):
        assert len(a) == len(b), f"{path}: length differs"
        for i, (x, y) in enumerate(zip(a, b)):
            assert_close(x, y, tol, f"{path}[{i}]")
    elif isinstance(a, float) or isinstance(b, float):
        assert a == pytest.approx(b, abs=tol), f"{path}: {a} != {b}"
        assert not (math.isnan(float(a)) or math.isnan(float(b))), f"{path}: NaN"
    else:
        assert a == b, f"{path}: {a} != {b}"
