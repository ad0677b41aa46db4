"""Annotation file I/O, panoramic view merging and dataset statistics.

Annotation files are line-delimited JSON: a header record followed by one
frame record per line. Ground-truth records carry track ids, boxes and
per-keypoint visibility labels; prediction records carry scores and may
omit visibility, boxes and ids. Keypoints may be given positionally (in
schema order) or as a name-to-coordinates mapping; names are mapped onto
the schema order, so file order never matters.

Schema and camera-layout files are plain-text key-value documents, one
entry per line, ``#`` comments allowed.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .model import (
    NUM_KEYPOINTS,
    FrameAnnotations,
    Keypoint,
    KeypointSchema,
    Pose,
    SequenceSet,
    Visibility,
    build_trajectories,
)

__all__ = [
    "AnnotationError",
    "CameraLayout",
    "DatasetStats",
    "load_annotations",
    "save_annotations",
    "load_schema",
    "save_schema",
    "load_camera_layout",
    "save_camera_layout",
    "merge_views",
    "compute_stats",
]

FORMAT_VERSION = 1
KINDS = ("ground_truth", "prediction")


class AnnotationError(ValueError):
    """A malformed annotation, schema or layout file."""


# ---------------------------------------------------------------------------
# schema and camera layout files


def save_schema(schema: KeypointSchema, path: str | Path) -> None:
    lines = [
        "# keypoint schema: oks configuration, then one 'name sigma' row per joint",
        f"oks_mode {schema.oks_mode}",
        f"scalar_k {schema.scalar_k!r}",
    ]
    for name, sigma in zip(schema.names, schema.sigmas):
        lines.append(f"{name} {sigma!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_schema(path: str | Path) -> KeypointSchema:
    names: list[str] = []
    sigmas: list[float] = []
    oks_mode = "mean_distance"
    scalar_k: float | None = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "oks_mode":
            if len(parts) != 2:
                raise AnnotationError(f"{path}:{lineno}: oks_mode takes one value")
            oks_mode = parts[1]
        elif parts[0] == "scalar_k":
            if len(parts) != 2:
                raise AnnotationError(f"{path}:{lineno}: scalar_k takes one value")
            scalar_k = _parse_float(parts[1], path, lineno, "scalar_k")
        elif len(parts) == 2:
            names.append(parts[0])
            sigmas.append(_parse_float(parts[1], path, lineno, f"sigma for {parts[0]!r}"))
        else:
            raise AnnotationError(f"{path}:{lineno}: expected 'name sigma', got {raw!r}")
    try:
        return KeypointSchema(tuple(names), tuple(sigmas), oks_mode, scalar_k)
    except ValueError as exc:
        raise AnnotationError(f"{path}: {exc}") from exc


def _parse_float(token: str, path, lineno: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise AnnotationError(f"{path}:{lineno}: {what} must be a number, got {token!r}") from None


@dataclass(frozen=True)
class CameraLayout:
    """Horizontal pixel offset of each camera within the panorama."""

    offsets: tuple[float, ...]
    panorama_width: float = 3760.0
    panorama_height: float = 480.0

    def __post_init__(self):
        object.__setattr__(self, "offsets", tuple(float(o) for o in self.offsets))
        if not self.offsets:
            raise ValueError("a camera layout needs at least one camera")
        if any(o < 0 or o >= self.panorama_width for o in self.offsets):
            raise ValueError("camera offsets must lie inside [0, panorama_width)")
        if self.panorama_width <= 0 or self.panorama_height <= 0:
            raise ValueError("panorama dimensions must be positive")

    @classmethod
    def default(cls) -> "CameraLayout":
        # five cameras evenly spaced around the 3760 px cylinder
        return cls(offsets=tuple(i * 752.0 for i in range(5)))


def save_camera_layout(layout: CameraLayout, path: str | Path) -> None:
    lines = [
        "# camera layout: panorama size, then one 'camera offset' row per view",
        f"panorama_width {layout.panorama_width!r}",
        f"panorama_height {layout.panorama_height!r}",
    ]
    for off in layout.offsets:
        lines.append(f"camera {off!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_camera_layout(path: str | Path) -> CameraLayout:
    offsets: list[float] = []
    width = 3760.0
    height = 480.0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "panorama_width" and len(parts) == 2:
            width = _parse_float(parts[1], path, lineno, "panorama_width")
        elif parts[0] == "panorama_height" and len(parts) == 2:
            height = _parse_float(parts[1], path, lineno, "panorama_height")
        elif parts[0] == "camera" and len(parts) == 2:
            offsets.append(_parse_float(parts[1], path, lineno, "camera offset"))
        else:
            raise AnnotationError(f"{path}:{lineno}: unrecognized layout line {raw!r}")
    try:
        return CameraLayout(tuple(offsets), width, height)
    except ValueError as exc:
        raise AnnotationError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# annotation records


def _pose_to_record(pose: Pose) -> dict:
    rec: dict = {}
    if pose.track_id is not None:
        rec["track_id"] = pose.track_id
    if pose.score is not None:
        rec["score"] = pose.score
    if pose.bbox is not None:
        rec["bbox"] = list(pose.bbox)
    rec["keypoints"] = [[k.x, k.y, int(k.visibility)] for k in pose.keypoints]
    if pose.head_bbox is not None:
        rec["head_bbox"] = list(pose.head_bbox)
    if pose.wraps_seam:
        rec["wraps"] = True
    return rec


def _keypoints_from_record(raw, schema: KeypointSchema, kind: str, ctx: str) -> tuple[Keypoint, ...]:
    if isinstance(raw, dict):
        ordered: list[list] = [None] * NUM_KEYPOINTS  # type: ignore[list-item]
        for name, coords in raw.items():
            try:
                idx = schema.index_of(name)
            except KeyError:
                raise AnnotationError(f"{ctx}: unknown joint name {name!r}") from None
            if ordered[idx] is not None:
                raise AnnotationError(f"{ctx}: joint {name!r} given twice")
            ordered[idx] = coords
        missing = [schema.names[i] for i, c in enumerate(ordered) if c is None]
        if missing:
            raise AnnotationError(f"{ctx}: missing joints {missing}")
        raw = ordered
    if not isinstance(raw, list) or len(raw) != NUM_KEYPOINTS:
        raise AnnotationError(f"{ctx}: expected {NUM_KEYPOINTS} keypoints")
    kps = []
    for i, entry in enumerate(raw):
        if not isinstance(entry, list) or len(entry) not in (2, 3):
            raise AnnotationError(f"{ctx}: keypoint {i} must be [x, y] or [x, y, v]")
        if len(entry) == 2:
            if kind == "ground_truth":
                raise AnnotationError(f"{ctx}: keypoint {i} lacks a visibility label")
            x, y = entry
            v = int(Visibility.VISIBLE)
        else:
            x, y, v = entry
        try:
            kps.append(Keypoint(float(x), float(y), int(v)))
        except (TypeError, ValueError) as exc:
            raise AnnotationError(f"{ctx}: keypoint {i}: {exc}") from exc
    return tuple(kps)


def _pose_from_record(rec: dict, schema: KeypointSchema, kind: str, ctx: str) -> Pose:
    if not isinstance(rec, dict):
        raise AnnotationError(f"{ctx}: pose record must be an object")
    track_id = rec.get("track_id")
    bbox = rec.get("bbox")
    score = rec.get("score")
    if kind == "ground_truth":
        if track_id is None:
            raise AnnotationError(f"{ctx}: ground-truth pose lacks a track_id")
        if bbox is None:
            raise AnnotationError(f"{ctx}: ground-truth pose lacks a bbox")
    else:
        if score is None:
            raise AnnotationError(f"{ctx}: prediction lacks a score")
    kps = _keypoints_from_record(rec.get("keypoints"), schema, kind, ctx)
    try:
        return Pose(
            keypoints=kps,
            bbox=tuple(bbox) if bbox is not None else None,
            track_id=int(track_id) if track_id is not None else None,
            score=float(score) if score is not None else None,
            head_bbox=tuple(rec["head_bbox"]) if rec.get("head_bbox") is not None else None,
            wraps_seam=bool(rec.get("wraps", False)),
        )
    except (TypeError, ValueError) as exc:
        raise AnnotationError(f"{ctx}: {exc}") from exc


def save_annotations(seq: SequenceSet, path: str | Path, kind: str) -> None:
    """Write one scene as line-delimited JSON with a leading header record."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    header = {
        "type": "header",
        "version": FORMAT_VERSION,
        "kind": kind,
        "scene": seq.scene_name,
        "frame_rate_hz": seq.frame_rate_hz,
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(header) + "\n")
        for frame in seq.frames:
            rec = {
                "type": "frame",
                "frame_id": frame.frame_id,
                "poses": [_pose_to_record(p) for p in frame.poses],
            }
            fh.write(json.dumps(rec) + "\n")


def load_annotations(
    path: str | Path,
    kind: str,
    schema: KeypointSchema | None = None,
) -> SequenceSet:
    """Read and fully validate one scene file of the given kind."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if schema is None:
        schema = KeypointSchema.default()
    path = Path(path)
    if not path.exists():
        raise AnnotationError(f"{path}: no such file")

    frames: list[FrameAnnotations] = []
    header: dict | None = None
    scene_name = path.stem
    frame_rate = 15.0
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotationError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            if header is None:
                if not isinstance(rec, dict) or rec.get("type") != "header":
                    raise AnnotationError(f"{path}:{lineno}: first record must be a header")
                if rec.get("version") != FORMAT_VERSION:
                    raise AnnotationError(
                        f"{path}:{lineno}: unsupported format version {rec.get('version')!r}"
                    )
                if rec.get("kind") != kind:
                    raise AnnotationError(
                        f"{path}:{lineno}: file holds {rec.get('kind')!r} data, expected {kind!r}"
                    )
                header = rec
                scene_name = rec.get("scene", scene_name)
                frame_rate = float(rec.get("frame_rate_hz", frame_rate))
                continue
            if rec.get("type") != "frame":
                raise AnnotationError(f"{path}:{lineno}: expected a frame record")
            fid = rec.get("frame_id")
            if not isinstance(fid, int) or fid < 0:
                raise AnnotationError(f"{path}:{lineno}: frame_id must be a non-negative integer")
            poses = []
            for k, prec in enumerate(rec.get("poses", [])):
                ctx = f"{path}:{lineno}: frame {fid} pose {k}"
                poses.append(_pose_from_record(prec, schema, kind, ctx))
            try:
                frames.append(FrameAnnotations(fid, tuple(poses)))
            except ValueError as exc:
                raise AnnotationError(f"{path}:{lineno}: {exc}") from exc
    if header is None:
        raise AnnotationError(f"{path}: empty file, expected a header record")
    try:
        return SequenceSet(scene_name, tuple(frames), frame_rate)
    except ValueError as exc:
        raise AnnotationError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# panoramic merging


def _shift_x(x: float, offset: float, width: float) -> float:
    return float(np.mod(x + offset, width))


def _shift_pose(pose: Pose, offset: float, width: float) -> Pose:
    kps = tuple(
        Keypoint(_shift_x(k.x, offset, width), k.y, k.visibility) for k in pose.keypoints
    )
    bbox = pose.bbox
    wraps = pose.wraps_seam
    if bbox is not None:
        bx = _shift_x(bbox[0], offset, width)
        bbox = (bx, bbox[1], bbox[2], bbox[3])
        wraps = wraps or bx + bbox[2] > width
    head = pose.head_bbox
    if head is not None:
        head = (_shift_x(head[0], offset, width), head[1], head[2], head[3])
    return Pose(kps, bbox, pose.track_id, pose.score, head, wraps)


def _box_iou_cyclic(a, b, width: float) -> float:
    """Box overlap on the panorama cylinder (handles seam-crossing boxes)."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    best = 0.0
    for shift in (-width, 0.0, width):
        x0 = max(ax + shift, bx)
        y0 = max(ay, by)
        x1 = min(ax + shift + aw, bx + bw)
        y1 = min(ay + ah, by + bh)
        inter = max(0.0, x1 - x0) * max(0.0, y1 - y0)
        union = aw * ah + bw * bh - inter
        if union > 0:
            best = max(best, inter / union)
    return best


def _fuse_gt_group(candidates: list[tuple[int, Pose]], layout: CameraLayout) -> Pose:
    """Fuse one track's per-view annotations into a single panorama pose.

    Joint by joint, the view with the higher visibility label wins; equal
    labels defer to the pose with higher overall visibility (sum of its 17
    labels), then to the earlier camera. The bbox comes from the overall
    winner.
    """
    width = layout.panorama_width
    overall = {cam: int(pose.visibilities.sum()) for cam, pose in candidates}
    primary_cam, primary = max(candidates, key=lambda cp: (overall[cp[0]], -cp[0]))

    kps: list[Keypoint] = []
    for j in range(NUM_KEYPOINTS):
        cam, pose = max(
            candidates,
            key=lambda cp: (cp[1].keypoints[j].visibility, overall[cp[0]], -cp[0]),
        )
        k = pose.keypoints[j]
        kps.append(Keypoint(_shift_x(k.x, layout.offsets[cam], width), k.y, k.visibility))

    shifted_primary = _shift_pose(primary, layout.offsets[primary_cam], width)
    return Pose(
        keypoints=tuple(kps),
        bbox=shifted_primary.bbox,
        track_id=primary.track_id,
        score=primary.score,
        head_bbox=shifted_primary.head_bbox,
        wraps_seam=shifted_primary.wraps_seam,
    )


def merge_views(
    per_camera: Sequence[SequenceSet],
    layout: CameraLayout,
    kind: str,
    nms_iou: float = 0.5,
    scene_name: str | None = None,
) -> SequenceSet:
    """Merge per-camera annotations into a single stitched panorama scene.

    Ground truth fuses poses sharing a track id across views joint by
    joint; predictions are shifted into panorama coordinates and
    deduplicated by cyclic box overlap, keeping the higher score.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if len(per_camera) != len(layout.offsets):
        raise ValueError(
            f"layout has {len(layout.offsets)} cameras but {len(per_camera)} scenes were given"
        )
    frame_ids = per_camera[0].frame_ids
    for cam, seq in enumerate(per_camera):
        if seq.frame_ids != frame_ids:
            raise ValueError(
                f"camera {cam} ({seq.scene_name!r}) frame ids differ from camera 0"
            )

    width = layout.panorama_width
    name = scene_name or per_camera[0].scene_name
    out_frames: list[FrameAnnotations] = []
    for f_idx, fid in enumerate(frame_ids):
        per_cam_poses = [seq.frames[f_idx].poses for seq in per_camera]
        if kind == "ground_truth":
            groups: dict[int, list[tuple[int, Pose]]] = {}
            for cam, poses in enumerate(per_cam_poses):
                for pose in poses:
                    if pose.track_id is None:
                        raise ValueError(
                            f"frame {fid} camera {cam}: ground-truth pose lacks a track id"
                        )
                    groups.setdefault(pose.track_id, []).append((cam, pose))
            merged = [_fuse_gt_group(g, layout) for _, g in sorted(groups.items())]
        else:
            shifted: list[tuple[float, int, int, Pose]] = []
            for cam, poses in enumerate(per_cam_poses):
                for k, pose in enumerate(poses):
                    if pose.score is None:
                        raise ValueError(f"frame {fid} camera {cam}: prediction {k} lacks a score")
                    if pose.bbox is None:
                        raise ValueError(
                            f"frame {fid} camera {cam}: prediction {k} lacks a bbox, "
                            f"required for duplicate suppression"
                        )
                    shifted.append((pose.score, cam, k, _shift_pose(pose, layout.offsets[cam], width)))
            shifted.sort(key=lambda e: (-e[0], e[1], e[2]))
            merged = []
            for _, _, _, pose in shifted:
                if all(
                    _box_iou_cyclic(pose.bbox, kept.bbox, width) < nms_iou for kept in merged
                ):
                    merged.append(pose)
        out_frames.append(FrameAnnotations(fid, tuple(merged)))
    return SequenceSet(name, tuple(out_frames), per_camera[0].frame_rate_hz)


# ---------------------------------------------------------------------------
# dataset statistics


@dataclass(frozen=True)
class DatasetStats:
    """Histograms and scalar summaries over stitched ground-truth scenes."""

    track_length_histogram: dict[int, int]
    poses_per_frame_histogram: dict[int, int]
    visible_keypoints_histogram: dict[int, int]
    per_scene_visibility_distribution: dict[str, dict[int, int]]
    bbox_scale_histogram: dict[int, int]
    track_count: int
    mean_track_length: float
    max_track_length: int
    total_poses: int
    total_keypoints: int
    bbox_scale_bin_px: int = 10


def compute_stats(scenes: Iterable[SequenceSet], bbox_scale_bin_px: int = 10) -> DatasetStats:
    """Dataset statistics over ground-truth scenes.

    Track length is the number of annotated frames of a track (gaps do
    not count). Box scale is the square root of the bbox area, binned.
    """
    track_lengths: Counter[int] = Counter()
    per_frame: Counter[int] = Counter()
    visible_kp: Counter[int] = Counter()
    per_scene_vis: dict[str, dict[int, int]] = {}
    scale_hist: Counter[int] = Counter()
    total_poses = 0
    track_count = 0
    length_sum = 0
    max_length = 0

    for seq in scenes:
        vis_counts = Counter()
        for frame in seq.frames:
            per_frame[len(frame.poses)] += 1
            for pose in frame.poses:
                total_poses += 1
                vis = pose.visibilities
                vis_counts.update(int(v) for v in vis)
                visible_kp[int((vis == int(Visibility.VISIBLE)).sum())] += 1
                if pose.bbox is not None:
                    scale = float(np.sqrt(pose.bbox_area))
                    scale_hist[int(scale // bbox_scale_bin_px) * bbox_scale_bin_px] += 1
        per_scene_vis[seq.scene_name] = {v: vis_counts.get(v, 0) for v in (0, 1, 2)}
        for tid, traj in build_trajectories(seq).items():
            track_count += 1
            length_sum += len(traj)
            max_length = max(max_length, len(traj))
            track_lengths[len(traj)] += 1

    return DatasetStats(
        track_length_histogram=dict(sorted(track_lengths.items())),
        poses_per_frame_histogram=dict(sorted(per_frame.items())),
        visible_keypoints_histogram=dict(sorted(visible_kp.items())),
        per_scene_visibility_distribution=dict(sorted(per_scene_vis.items())),
        bbox_scale_histogram=dict(sorted(scale_hist.items())),
        track_count=track_count,
        mean_track_length=(length_sum / track_count) if track_count else 0.0,
        max_track_length=max_length,
        total_poses=total_poses,
        total_keypoints=total_poses * NUM_KEYPOINTS,
        bbox_scale_bin_px=bbox_scale_bin_px,
    )
