"""Core domain types shared by every metric and I/O module.

All types are immutable after construction and safe to share across
parallel workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "Visibility",
    "Keypoint",
    "Pose",
    "KeypointSchema",
    "FrameAnnotations",
    "Trajectory",
    "SequenceSet",
    "build_trajectories",
    "NUM_KEYPOINTS",
    "DEFAULT_JOINT_NAMES",
    "DEFAULT_SIGMAS",
]

NUM_KEYPOINTS = 17

# 17-joint skeleton: 15 joints with COCO counterparts plus the two synthetic
# midpoints (center of shoulders, center of hips). "neck" is accepted as an
# alias for center_shoulder in loaders.
DEFAULT_JOINT_NAMES = (
    "head",
    "left_eye",
    "right_eye",
    "left_shoulder",
    "right_shoulder",
    "center_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "center_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
)

# Per-joint falloff constants: COCO sigma values mapped onto this skeleton
# (head takes the nose sigma, center_shoulder the shoulder sigma,
# center_hip the hip sigma). Override via a schema file where needed.
DEFAULT_SIGMAS = (
    0.026,  # head
    0.025,  # left_eye
    0.025,  # right_eye
    0.079,  # left_shoulder
    0.079,  # right_shoulder
    0.079,  # center_shoulder
    0.072,  # left_elbow
    0.072,  # right_elbow
    0.062,  # left_wrist
    0.062,  # right_wrist
    0.107,  # left_hip
    0.107,  # right_hip
    0.107,  # center_hip
    0.087,  # left_knee
    0.087,  # right_knee
    0.089,  # left_ankle
    0.089,  # right_ankle
)

JOINT_NAME_ALIASES = {"neck": "center_shoulder"}


class Visibility(IntEnum):
    """Per-keypoint occlusion label."""

    INVISIBLE = 0  # out of frame or inferred from context by the annotator
    OCCLUDED = 1   # obscured, but location apparent from image context
    VISIBLE = 2    # fully visible in the camera view


@dataclass(frozen=True)
class Keypoint:
    """A single 2D joint in pixel coordinates with its occlusion label.

    Panorama x may exceed a single camera's width; coordinates only have
    to be finite.
    """

    x: float
    y: float
    visibility: int = Visibility.VISIBLE

    def __post_init__(self):
        if not (np.isfinite(self.x) and np.isfinite(self.y)):
            raise ValueError(f"keypoint coordinates must be finite, got ({self.x}, {self.y})")
        if self.visibility not in (0, 1, 2):
            raise ValueError(f"visibility must be 0, 1 or 2, got {self.visibility}")


@dataclass(frozen=True)
class Pose:
    """One annotated or predicted person: 17 keypoints plus box/identity.

    Ground-truth poses must carry a bbox (it supplies the similarity
    scale) and visibility labels. Predicted poses may omit both; missing
    visibility is treated as fully visible.
    """

    keypoints: tuple[Keypoint, ...]
    bbox: tuple[float, float, float, float] | None = None
    track_id: int | None = None
    score: float | None = None
    head_bbox: tuple[float, float, float, float] | None = None
    wraps_seam: bool = False

    def __post_init__(self):
        kps = tuple(self.keypoints)
        object.__setattr__(self, "keypoints", kps)
        if len(kps) != NUM_KEYPOINTS:
            raise ValueError(f"a pose needs exactly {NUM_KEYPOINTS} keypoints, got {len(kps)}")
        if self.bbox is not None:
            x, y, w, h = self.bbox
            if not all(np.isfinite(v) for v in (x, y, w, h)):
                raise ValueError(f"bbox values must be finite, got {self.bbox}")
            if w <= 0 or h <= 0:
                raise ValueError(f"bbox must have positive extent, got w={w}, h={h}")
            object.__setattr__(self, "bbox", (float(x), float(y), float(w), float(h)))
        if self.track_id is not None and self.track_id < 0:
            raise ValueError(f"track_id must be non-negative, got {self.track_id}")
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score must lie in [0, 1], got {self.score}")

    @classmethod
    def from_arrays(
        cls,
        xy: np.ndarray,
        visibility: np.ndarray | Iterable[int] | None = None,
        bbox: tuple[float, float, float, float] | None = None,
        track_id: int | None = None,
        score: float | None = None,
    ) -> "Pose":
        """Build a pose from a (17, 2) coordinate array and optional labels."""
        xy = np.asarray(xy, dtype=float)
        if xy.shape != (NUM_KEYPOINTS, 2):
            raise ValueError(f"expected coordinates of shape ({NUM_KEYPOINTS}, 2), got {xy.shape}")
        if visibility is None:
            vis = [int(Visibility.VISIBLE)] * NUM_KEYPOINTS
        else:
            vis = [int(v) for v in np.asarray(visibility).ravel()]
        kps = tuple(Keypoint(float(x), float(y), v) for (x, y), v in zip(xy, vis))
        return cls(keypoints=kps, bbox=bbox, track_id=track_id, score=score)

    @cached_property
    def xy(self) -> np.ndarray:
        """(17, 2) read-only coordinate array in schema order."""
        arr = np.array([(k.x, k.y) for k in self.keypoints], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def visibilities(self) -> np.ndarray:
        """(17,) read-only array of occlusion labels."""
        arr = np.array([k.visibility for k in self.keypoints], dtype=np.int64)
        arr.setflags(write=False)
        return arr

    @property
    def bbox_area(self) -> float:
        if self.bbox is None:
            raise ValueError(self._missing_bbox_message())
        return self.bbox[2] * self.bbox[3]

    def _missing_bbox_message(self) -> str:
        who = f"track {self.track_id}" if self.track_id is not None else "an unidentified pose"
        return f"pose ({who}) lacks a bbox, which supplies the similarity scale"


@dataclass(frozen=True)
class KeypointSchema:
    """Joint names, per-joint sigma constants and similarity configuration.

    ``oks_mode`` selects how the keypoint similarity pools joints:

    - ``"mean_distance"`` (canonical): one Gaussian of the mean Euclidean
      distance, using the scalar constant ``scalar_k``.
    - ``"per_joint"``: COCO-style mean of per-joint Gaussians, using the
      per-joint ``sigmas``.
    """

    names: tuple[str, ...] = DEFAULT_JOINT_NAMES
    sigmas: tuple[float, ...] = DEFAULT_SIGMAS
    oks_mode: str = "mean_distance"
    scalar_k: float | None = None

    def __post_init__(self):
        names = tuple(self.names)
        sigmas = tuple(float(s) for s in self.sigmas)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "sigmas", sigmas)
        if len(names) != NUM_KEYPOINTS:
            raise ValueError(f"schema needs {NUM_KEYPOINTS} joint names, got {len(names)}")
        if len(set(names)) != len(names):
            raise ValueError("joint names must be unique")
        if len(sigmas) != NUM_KEYPOINTS:
            raise ValueError(f"schema needs {NUM_KEYPOINTS} sigmas, got {len(sigmas)}")
        if any(s <= 0 for s in sigmas):
            raise ValueError("all sigmas must be positive")
        if self.oks_mode not in ("mean_distance", "per_joint"):
            raise ValueError(f"unknown oks_mode {self.oks_mode!r}")
        if self.scalar_k is None:
            # default scalar constant: arithmetic mean of the per-joint sigmas
            object.__setattr__(self, "scalar_k", sum(sigmas) / len(sigmas))
        elif self.scalar_k <= 0:
            raise ValueError(f"scalar_k must be positive, got {self.scalar_k}")

    @classmethod
    def default(cls, oks_mode: str = "mean_distance") -> "KeypointSchema":
        return cls(oks_mode=oks_mode)

    @cached_property
    def sigma_array(self) -> np.ndarray:
        arr = np.array(self.sigmas, dtype=float)
        arr.setflags(write=False)
        return arr

    def index_of(self, name: str) -> int:
        canonical = JOINT_NAME_ALIASES.get(name, name)
        try:
            return self.names.index(canonical)
        except ValueError:
            raise KeyError(f"unknown joint name {name!r}") from None


@dataclass(frozen=True)
class FrameAnnotations:
    """All poses of one frame."""

    frame_id: int
    poses: tuple[Pose, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "poses", tuple(self.poses))
        if self.frame_id < 0:
            raise ValueError(f"frame_id must be non-negative, got {self.frame_id}")
        seen: set[int] = set()
        for pose in self.poses:
            if pose.track_id is None:
                continue
            if pose.track_id in seen:
                raise ValueError(
                    f"frame {self.frame_id}: duplicate track_id {pose.track_id}"
                )
            seen.add(pose.track_id)


@dataclass(frozen=True)
class Trajectory:
    """A track's pose states over the frames where it exists (gaps allowed)."""

    track_id: int
    states: Mapping[int, Pose]

    def __post_init__(self):
        items = sorted(dict(self.states).items())
        if not items:
            raise ValueError(f"trajectory {self.track_id} has an empty domain")
        object.__setattr__(self, "states", dict(items))

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(self.states.keys())

    def __len__(self) -> int:
        return len(self.states)


@dataclass(frozen=True)
class SequenceSet:
    """One scene: an ordered list of frames plus capture metadata."""

    scene_name: str
    frames: tuple[FrameAnnotations, ...] = ()
    frame_rate_hz: float = 15.0

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        ids = [f.frame_id for f in frames]
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise ValueError(f"scene {self.scene_name!r}: frame_ids must be strictly increasing")

    @property
    def frame_ids(self) -> tuple[int, ...]:
        return tuple(f.frame_id for f in self.frames)

    def poses_by_frame(self) -> dict[int, tuple[Pose, ...]]:
        return {f.frame_id: f.poses for f in self.frames}


def build_trajectories(seq: SequenceSet) -> dict[int, Trajectory]:
    """Group a scene's ID-carrying poses into one trajectory per track ID.

    Poses without a track ID are ignored. A duplicate (frame, ID) pair is
    rejected; within-frame duplicates are already impossible, so this only
    guards hand-built inputs.
    """
    states: dict[int, dict[int, Pose]] = {}
    for frame in seq.frames:
        for pose in frame.poses:
            if pose.track_id is None:
                continue
            per_track = states.setdefault(pose.track_id, {})
            if frame.frame_id in per_track:
                raise ValueError(
                    f"duplicate pose for track {pose.track_id} in frame {frame.frame_id}"
                )
            per_track[frame.frame_id] = pose
    return {tid: Trajectory(tid, st) for tid, st in sorted(states.items())}
