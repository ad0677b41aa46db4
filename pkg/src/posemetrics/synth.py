"""Seeded synthetic poses, scenes and trajectories.

Used by the oracle-check command and by test fixtures. Everything is a
pure function of the passed generator, so a fixed seed reproduces the
same data everywhere.
"""

from __future__ import annotations

import numpy as np

from .model import (
    NUM_KEYPOINTS,
    FrameAnnotations,
    Keypoint,
    Pose,
    SequenceSet,
)

__all__ = [
    "random_pose",
    "random_pose_set",
    "random_scene",
    "perfect_predictions",
]


def random_pose(
    rng: np.random.Generator,
    *,
    center: tuple[float, float] | None = None,
    spread: float = 40.0,
    bbox_area: float | None = None,
    track_id: int | None = None,
    score: float | None = None,
    visibility_probs: tuple[float, float, float] = (0.1, 0.2, 0.7),
) -> Pose:
    """One plausible random pose with a bbox around its keypoints.

    ``bbox_area`` pins the box area (useful where a shared scale keeps
    the pose distance symmetric in its arguments).
    """
    if center is None:
        center = (float(rng.uniform(100, 3600)), float(rng.uniform(100, 380)))
    xy = np.array(center) + rng.normal(scale=spread, size=(NUM_KEYPOINTS, 2))
    vis = rng.choice([0, 1, 2], size=NUM_KEYPOINTS, p=visibility_probs)
    x0, y0 = xy.min(axis=0)
    x1, y1 = xy.max(axis=0)
    if bbox_area is not None:
        side = float(np.sqrt(bbox_area))
        bbox = (float(x0), float(y0), side, bbox_area / side)
    else:
        bbox = (float(x0) - 2.0, float(y0) - 2.0, float(x1 - x0) + 4.0, float(y1 - y0) + 4.0)
    kps = tuple(Keypoint(float(x), float(y), int(v)) for (x, y), v in zip(xy, vis))
    return Pose(kps, bbox, track_id, score)


def random_pose_set(
    rng: np.random.Generator,
    size: int,
    *,
    bbox_area: float | None = None,
    with_scores: bool = False,
) -> list[Pose]:
    return [
        random_pose(
            rng,
            bbox_area=bbox_area,
            score=float(rng.uniform(0.05, 1.0)) if with_scores else None,
        )
        for _ in range(size)
    ]


def random_scene(
    rng: np.random.Generator,
    scene_name: str,
    *,
    n_tracks: int = 4,
    n_frames: int = 10,
    gap_prob: float = 0.25,
    bbox_area: float | None = None,
) -> SequenceSet:
    """A ground-truth scene of wandering tracks with random absence gaps.

    Every track is present in at least one frame.
    """
    anchors = [
        (float(rng.uniform(200, 3500)), float(rng.uniform(120, 360))) for _ in range(n_tracks)
    ]
    present = rng.random((n_tracks, n_frames)) >= gap_prob
    for tid in range(n_tracks):
        if not present[tid].any():
            present[tid, int(rng.integers(n_frames))] = True
    frames = []
    for t in range(n_frames):
        poses = []
        for tid in range(n_tracks):
            if not present[tid, t]:
                continue
            cx = anchors[tid][0] + 3.0 * t
            cy = anchors[tid][1] + float(rng.normal(scale=1.5))
            poses.append(random_pose(rng, center=(cx, cy), track_id=tid, bbox_area=bbox_area))
        frames.append(FrameAnnotations(t, tuple(poses)))
    return SequenceSet(scene_name, tuple(frames))


def perfect_predictions(seq: SequenceSet, score: float = 1.0) -> SequenceSet:
    """Prediction scene that copies the ground truth exactly."""
    frames = []
    for frame in seq.frames:
        poses = tuple(
            Pose(p.keypoints, p.bbox, p.track_id, score, p.head_bbox, p.wraps_seam)
            for p in frame.poses
        )
        frames.append(FrameAnnotations(frame.frame_id, poses))
    return SequenceSet(seq.scene_name, tuple(frames), seq.frame_rate_hz)
