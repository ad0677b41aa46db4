# Set error between the poses of one frame.
#
# Ground truth and predictions are unordered sets; the metric finds the
# optimal one-to-one assignment under the pose distance and adds a
# cardinality penalty for unmatched poses:
#
#     total = (assignment cost)/n + (n - m)/n        with n = max size
#
# so total = loc + card exactly, everything in [0, 1], and no threshold
# is involved.

import numpy as np

from posemetrics import KeypointSchema, Pose, loc_breakdown_by_visibility, ospa_pose
from posemetrics.synth import random_pose

rng = np.random.default_rng(7)
schema = KeypointSchema.default()

people = [random_pose(rng, center=(500.0 + 400.0 * i, 240.0)) for i in range(3)]

# Perfect predictions: zero error.
res = ospa_pose(people, people, schema)
print(f"perfect: total={res.total} loc={res.loc} card={res.card}")

# A missed person is pure cardinality error: (3-2)/3.
res = ospa_pose(people, people[:2], schema)
print(f"one miss: total={res.total:.4f} loc={res.loc:.4f} card={res.card:.4f}")

# Jittered predictions in shuffled order: the assignment recovers the
# correspondence, so only localization error remains.
jittered = [
    Pose.from_arrays(p.xy + rng.normal(scale=3.0, size=(17, 2)), p.visibilities, p.bbox)
    for p in people
]
res = ospa_pose(people, jittered[::-1], schema)
print(f"jittered: total={res.total:.4f} loc={res.loc:.4f} card={res.card:.4f}")
print("recovered pairs (gt, pred):", res.assignment.pairs)

# Empty-set conventions.
print("both empty:", ospa_pose([], [], schema).total)
print("missed everything:", ospa_pose(people, [], schema).total)
print("hallucinated only:", ospa_pose([], people, schema).total)

# The localization error decomposes by ground-truth occlusion level,
# reusing the same optimal assignment for all three levels.
res = ospa_pose(people, jittered, schema)
for level, piece in loc_breakdown_by_visibility(people, jittered, schema, res).items():
    print(f"level {level}: contribution={piece.contribution:.5f} "
          f"over {piece.gt_keypoint_count} joints "
          f"(per-joint {piece.per_keypoint_average:.2e})")
