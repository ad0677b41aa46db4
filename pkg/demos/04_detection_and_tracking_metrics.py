# Conventional metrics, adapted to keypoints.
#
# AP/AR label each prediction TP or FP by greedy confidence-ordered
# matching at a keypoint-similarity threshold of 0.5, then sweep the
# confidence ordering. MOTA/IDF1/IDSW use the same similarity for frame
# correspondence instead of box overlap.

import numpy as np

from posemetrics import (
    KeypointSchema,
    Pose,
    SequenceSet,
    average_precision,
    greedy_match,
    track_metrics,
)
from posemetrics.model import FrameAnnotations
from posemetrics.synth import perfect_predictions, random_pose, random_scene

rng = np.random.default_rng(3)
schema = KeypointSchema.default()

# --- greedy matching inside one frame -------------------------------
gts = [random_pose(rng, center=(600.0 + 500.0 * i, 240.0)) for i in range(3)]
preds = [
    Pose.from_arrays(gts[0].xy + 2.0, score=0.95),            # good hit
    Pose.from_arrays(gts[0].xy + 4.0, score=0.60),            # duplicate -> FP
    Pose.from_arrays(gts[2].xy + rng.normal(scale=2, size=(17, 2)), score=0.80),
    random_pose(rng, center=(3400.0, 100.0), score=0.70),     # hallucination
]
match = greedy_match(gts, preds, schema, threshold=0.5)
print("pairs (gt, pred):", match.pairs)
print("missed gts:", match.unmatched_gt, " false predictions:", match.unmatched_pred)

# --- AP / AR over many frames ----------------------------------------
gt_frames, pred_frames = [], []
for _ in range(20):
    frame_gts = [random_pose(rng, center=(400.0 + 700.0 * i, 240.0)) for i in range(3)]
    frame_preds = []
    for g in frame_gts:
        if rng.random() < 0.75:  # detector recall
            frame_preds.append(
                Pose.from_arrays(g.xy + rng.normal(scale=2.5, size=(17, 2)),
                                 score=float(rng.uniform(0.5, 1.0)))
            )
    if rng.random() < 0.4:       # occasional false positive
        frame_preds.append(random_pose(rng, center=(3500.0, 300.0),
                                       score=float(rng.uniform(0.2, 0.6))))
    gt_frames.append(frame_gts)
    pred_frames.append(frame_preds)

res = average_precision(gt_frames, pred_frames, schema)
print(f"ap={res.ap:.3f} ar={res.ar:.3f} over {sum(map(len, gt_frames))} gt poses")
tail = list(zip(res.curve.thresholds, res.curve.precision, res.curve.recall))[-3:]
print("curve tail (threshold, precision, recall):",
      [(round(t, 2), round(p, 2), round(r, 2)) for t, p, r in tail])

# --- tracking: a split identity costs one switch ---------------------
scene = random_scene(rng, "walkway", n_tracks=3, n_frames=10, gap_prob=0.0)
perfect = perfect_predictions(scene)
print("perfect tracking:", track_metrics([scene], [perfect], schema))

split_frames = []
for f in perfect.frames:
    poses = []
    for p in f.poses:
        if p.track_id == 0 and f.frame_id >= 5:
            p = Pose(p.keypoints, p.bbox, 1000, p.score)  # new id mid-track
        poses.append(p)
    split_frames.append(FrameAnnotations(f.frame_id, tuple(poses)))
split = SequenceSet("walkway", tuple(split_frames))
print("split identity: ", track_metrics([scene], [split], schema))
