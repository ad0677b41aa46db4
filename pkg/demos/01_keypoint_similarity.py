# Keypoint similarity from the ground up.
#
# A pose is 17 keypoints with per-joint occlusion labels plus a bbox.
# The similarity between a ground-truth pose and a prediction is a
# Gaussian of the mean joint distance, normalized by the ground-truth
# box area and a sigma constant; 1 - similarity is the pose distance
# every set metric in this package is built on.

import numpy as np

from posemetrics import (
    Keypoint,
    KeypointSchema,
    Pose,
    VisibilityFilter,
    mean_euclidean,
    oks,
    pose_distance,
)

schema = KeypointSchema.default()
print(f"schema: {len(schema.names)} joints, scalar_k = {schema.scalar_k:.5f}")

# A simple synthetic person: joints on a slanted line, fully visible.
gt = Pose(
    keypoints=tuple(Keypoint(100.0 + 6.0 * j, 40.0 + 20.0 * j, 2) for j in range(17)),
    bbox=(90.0, 30.0, 120.0, 360.0),
)

# Identical prediction: similarity 1, distance 0.
print("identical:", oks(gt, gt, schema), pose_distance(gt, gt, schema))

# Shift every joint by (3, 4) px: the mean Euclidean distance is exactly 5.
pred = Pose.from_arrays(gt.xy + np.array([3.0, 4.0]), bbox=gt.bbox)
print("mean distance under (3,4) shift:", mean_euclidean(gt, pred))
print("similarity:", round(oks(gt, pred, schema), 6))

# Similarity decays with distance, scaled by the ground-truth box area.
for scale in (1.0, 4.0, 16.0, 64.0):
    moved = Pose.from_arrays(gt.xy + np.array([scale, 0.0]), bbox=gt.bbox)
    print(f"  offset {scale:5.1f}px -> oks {oks(gt, moved, schema):.4f}")

# Occlusion-restricted variants: distances are computed only over the
# ground-truth joints at one occlusion level (0=invisible, 1=occluded,
# 2=visible); an empty level yields similarity 1 by convention.
vis = [2] * 9 + [1] * 5 + [0] * 3
gt_mixed = Pose(
    keypoints=tuple(Keypoint(k.x, k.y, v) for k, v in zip(gt.keypoints, vis)),
    bbox=gt.bbox,
)
for level in (2, 1, 0):
    fil = VisibilityFilter.only(level)
    print(f"level {level}: d_E = {mean_euclidean(gt_mixed, pred, fil):.3f}, "
          f"oks = {oks(gt_mixed, pred, schema, fil):.4f}")

# The alternative per-joint mode averages one Gaussian per joint with
# per-joint sigmas (the COCO convention); the default pools the mean
# distance through a single scalar constant.
per_joint = KeypointSchema.default(oks_mode="per_joint")
print("per-joint mode:", round(oks(gt, pred, per_joint), 6))
