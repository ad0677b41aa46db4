"""Converter from upstream COCO-style annotation files to scene files.

This is the single adaptation point for external annotation layouts:
if an upstream release shifts its field names or file structure, only
this module changes. The expected input is one JSON file per scene in
the COCO dictionary style::

    {
      "images": [{"id": 0, "file_name": "000000.jpg"}, ...],
      "annotations": [
        {"image_id": 0, "track_id": 3, "bbox": [x, y, w, h],
         "keypoints": [x1, y1, v1, ..., x17, y17, v17], "score": 0.9},
        ...
      ]
    }

Frame ids come from the numeric prefix of ``file_name`` when present,
otherwise from the image id. Keypoints must be flat [x, y, v] triplets
in schema order.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .dataio import AnnotationError, save_annotations
from .model import (
    NUM_KEYPOINTS,
    FrameAnnotations,
    Keypoint,
    KeypointSchema,
    Pose,
    SequenceSet,
)

__all__ = ["convert_coco_style"]


def _frame_id(image: dict) -> int:
    name = image.get("file_name", "")
    match = re.search(r"(\d+)", Path(name).stem)
    if match:
        return int(match.group(1))
    return int(image["id"])


def convert_coco_style(
    src: str | Path,
    dst: str | Path,
    kind: str,
    schema: KeypointSchema | None = None,
    scene_name: str | None = None,
    frame_rate_hz: float = 15.0,
) -> SequenceSet:
    """Convert one COCO-style scene file and write it as a scene file."""
    if schema is None:
        schema = KeypointSchema.default()
    src = Path(src)
    try:
        doc = json.loads(src.read_text())
    except json.JSONDecodeError as exc:
        raise AnnotationError(f"{src}: invalid JSON ({exc})") from exc

    images = {img["id"]: img for img in doc.get("images", [])}
    by_frame: dict[int, list[Pose]] = {}
    for k, ann in enumerate(doc.get("annotations", [])):
        ctx = f"{src}: annotation {k}"
        image_id = ann.get("image_id")
        if image_id not in images:
            raise AnnotationError(f"{ctx}: unknown image_id {image_id!r}")
        flat = ann.get("keypoints")
        if not isinstance(flat, list) or len(flat) != 3 * NUM_KEYPOINTS:
            raise AnnotationError(f"{ctx}: expected {3 * NUM_KEYPOINTS} keypoint values")
        kps = tuple(
            Keypoint(float(flat[3 * i]), float(flat[3 * i + 1]), int(flat[3 * i + 2]))
            for i in range(NUM_KEYPOINTS)
        )
        bbox = ann.get("bbox")
        try:
            pose = Pose(
                keypoints=kps,
                bbox=tuple(bbox) if bbox is not None else None,
                track_id=ann.get("track_id"),
                score=ann.get("score"),
            )
        except ValueError as exc:
            raise AnnotationError(f"{ctx}: {exc}") from exc
        by_frame.setdefault(_frame_id(images[image_id]), []).append(pose)

    frames = tuple(
        FrameAnnotations(fid, tuple(poses)) for fid, poses in sorted(by_frame.items())
    )
    seq = SequenceSet(scene_name or src.stem, frames, frame_rate_hz)
    save_annotations(seq, dst, kind)
    return seq
