"""Shared fixtures: schema, the 5-scene synthetic benchmark and its files."""

from __future__ import annotations

import numpy as np
import pytest

from posemetrics import KeypointSchema, Pose, SequenceSet, save_annotations
from posemetrics.model import FrameAnnotations
from posemetrics.synth import perfect_predictions, random_pose, random_scene

FIXTURE_SEED = 20240517


@pytest.fixture(scope="session")
def schema() -> KeypointSchema:
    return KeypointSchema.default()


def _plaza_scene(rng: np.random.Generator) -> SequenceSet:
    """Purpose-built scene: track 1 spans frames 0-9, track 2 frames 0-4,
    track 3 frames 2-7. Used by the structured-perturbation tests."""
    spans = {1: range(0, 10), 2: range(0, 5), 3: range(2, 8)}
    centers = {1: (400.0, 240.0), 2: (1200.0, 200.0), 3: (2400.0, 300.0)}
    poses_by_track = {}
    for tid, span in spans.items():
        poses_by_track[tid] = {
            t: random_pose(
                rng,
                center=(centers[tid][0] + 3.0 * t, centers[tid][1]),
                track_id=tid,
            )
            for t in span
        }
    frames = []
    for t in range(10):
        poses = tuple(
            poses_by_track[tid][t] for tid in sorted(spans) if t in poses_by_track[tid]
        )
        frames.append(FrameAnnotations(t, poses))
    return SequenceSet("scene0_plaza", tuple(frames))


def build_fixture_scenes() -> list[SequenceSet]:
    rng = np.random.default_rng(FIXTURE_SEED)
    scenes = [_plaza_scene(rng)]
    for i in range(1, 5):
        scenes.append(
            random_scene(
                rng,
                f"scene{i}",
                n_tracks=int(rng.integers(3, 6)),
                n_frames=int(rng.integers(8, 13)),
                gap_prob=0.25,
            )
        )
    return scenes


@pytest.fixture(scope="session")
def fixture_scenes() -> list[SequenceSet]:
    return build_fixture_scenes()


@pytest.fixture(scope="session")
def fixture_perfect_preds(fixture_scenes) -> list[SequenceSet]:
    return [perfect_predictions(s) for s in fixture_scenes]


@pytest.fixture(scope="session")
def fixture_dirs(tmp_path_factory, fixture_scenes, fixture_perfect_preds):
    """(gt_dir, pred_dir) with one scene file each, perfect predictions."""
    root = tmp_path_factory.mktemp("fixture")
    gt_dir = root / "gt"
    pred_dir = root / "pred"
    gt_dir.mkdir()
    pred_dir.mkdir()
    for seq in fixture_scenes:
        save_annotations(seq, gt_dir / f"{seq.scene_name}.jsonl", "ground_truth")
    for seq in fixture_perfect_preds:
        save_annotations(seq, pred_dir / f"{seq.scene_name}.jsonl", "prediction")
    return gt_dir, pred_dir


def with_poses(seq: SequenceSet, mutate) -> SequenceSet:
    """Rebuild a scene, passing each (frame_id, poses tuple) through mutate."""
    frames = tuple(
        FrameAnnotations(f.frame_id, tuple(mutate(f.frame_id, f.poses)))
        for f in seq.frames
    )
    return SequenceSet(seq.scene_name, frames, seq.frame_rate_hz)


def relabel(pose: Pose, track_id: int) -> Pose:
    return Pose(pose.keypoints, pose.bbox, track_id, pose.score, pose.head_bbox, pose.wraps_seam)
