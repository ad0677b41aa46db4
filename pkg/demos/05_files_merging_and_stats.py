# Annotation files, panoramic merging and dataset statistics.
#
# Scenes live in line-delimited JSON files (a header record, then one
# frame per line). Five camera views merge into a 3760x480 panorama:
# ground truth fuses per-joint by visibility, predictions deduplicate by
# cyclic box overlap. Statistics run over stitched ground truth.

import tempfile
from pathlib import Path

import numpy as np

from posemetrics import (
    CameraLayout,
    KeypointSchema,
    SequenceSet,
    compute_stats,
    load_annotations,
    merge_views,
    save_annotations,
    save_schema,
)
from posemetrics.model import FrameAnnotations, Keypoint, Pose
from posemetrics.synth import random_scene

rng = np.random.default_rng(9)
schema = KeypointSchema.default()
workdir = Path(tempfile.mkdtemp())

# --- round-trip a scene file -----------------------------------------
scene = random_scene(rng, "entrance", n_tracks=3, n_frames=5)
path = workdir / "entrance.jsonl"
save_annotations(scene, path, "ground_truth")
assert load_annotations(path, "ground_truth") == scene
print("wrote", path, f"({path.stat().st_size} bytes)")
print("first line:", path.read_text().splitlines()[0])

# The schema file is a plain-text table; tweak it to change sigmas or
# the similarity mode without touching code.
save_schema(schema, workdir / "schema.txt")
print("schema file head:", *(workdir / "schema.txt").read_text().splitlines()[:3], sep="\n  ")

# --- merging two views of the same person ----------------------------
# Joint 0 is visible only in view A, joint 1 only in view B; the merged
# pose takes each joint from the view that saw it better, with view B's
# coordinates shifted by its panorama offset.
layout = CameraLayout(offsets=(0.0, 1880.0))
vis_a = [2] + [1] * 16
vis_b = [1] + [2] * 16
kp_a = tuple(Keypoint(10.0 + j, 60.0, vis_a[j]) for j in range(17))
kp_b = tuple(Keypoint(40.0 + j, 60.0, vis_b[j]) for j in range(17))
cam0 = SequenceSet("cam0", (FrameAnnotations(0, (Pose(kp_a, bbox=(0, 0, 80, 100), track_id=1),)),))
cam1 = SequenceSet("cam1", (FrameAnnotations(0, (Pose(kp_b, bbox=(30, 0, 80, 100), track_id=1),)),))
merged = merge_views([cam0, cam1], layout, "ground_truth")
pose = merged.frames[0].poses[0]
print("joint 0 kept from view A:", pose.keypoints[0].x)
print("joint 1 kept from view B:", pose.keypoints[1].x, "(offset applied)")

# --- statistics -------------------------------------------------------
scenes = [random_scene(rng, f"scene{i}", n_tracks=4, n_frames=15, gap_prob=0.2)
          for i in range(3)]
stats = compute_stats(scenes)
print(f"tracks={stats.track_count} mean_len={stats.mean_track_length:.1f} "
      f"max_len={stats.max_track_length} poses={stats.total_poses}")
print("poses per frame:", stats.poses_per_frame_histogram)
print("visible-keypoint histogram:", dict(list(stats.visible_keypoints_histogram.items())[:5]), "...")

# The same operations are available in batch form:
#   posemetrics eval-pose --gt gt/ --pred pred/ --format markdown
#   posemetrics eval-track --gt gt/ --pred pred/ --per-scene
#   posemetrics stats --gt gt/
#   posemetrics merge --cameras cam*.jsonl --kind ground_truth --out stitched.jsonl
#   posemetrics oracle-check --seed 0
