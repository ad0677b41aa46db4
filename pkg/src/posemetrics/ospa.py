"""Optimal sub-pattern assignment over two pose sets of one frame.

The error between a ground-truth set X and a prediction set Y is, with
m = min(|X|, |Y|) and n = max(|X|, |Y|),

    (1/n) * ( min-cost assignment under the pose distance  +  (n - m) )

which splits into a localization term (assignment cost / n) and a
cardinality term ((n - m)/n). Conventions: empty vs empty is 0, empty vs
non-empty is 1. Everything lies in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .assignment import Assignment, solve_min_cost
from .model import KeypointSchema, Pose, Visibility
from .oks import ALL_JOINTS, VisibilityFilter, oks_matrix, pose_distance

__all__ = ["OspaResult", "LevelContribution", "ospa_pose", "loc_breakdown_by_visibility"]


@dataclass(frozen=True)
class OspaResult:
    """One frame's set error, decomposed. total == loc + card exactly."""

    total: float
    loc: float
    card: float
    assignment: Assignment
    m: int
    n: int


def ospa_pose(
    X: Sequence[Pose],
    Y: Sequence[Pose],
    schema: KeypointSchema,
    filter: VisibilityFilter = ALL_JOINTS,
) -> OspaResult:
    """Set error between ground-truth poses X and predicted poses Y.

    The assignment pairs index (gt, pred) regardless of which side is
    larger. Ground-truth poses must carry bboxes; they also supply the
    visibility labels that ``filter`` keys on.
    """
    m, n = min(len(X), len(Y)), max(len(X), len(Y))
    if n == 0:
        return OspaResult(0.0, 0.0, 0.0, Assignment((), 0.0), 0, 0)
    if m == 0:
        return OspaResult(1.0, 0.0, 1.0, Assignment((), 0.0), m, n)

    dist = 1.0 - oks_matrix(list(X), list(Y), schema, filter)  # (|X|, |Y|)
    assignment = solve_min_cost(dist)
    loc = assignment.total_cost / n
    card = (n - m) / n
    return OspaResult(loc + card, loc, card, assignment, m, n)


@dataclass(frozen=True)
class LevelContribution:
    """One occlusion level's share of a frame's localization error."""

    contribution: float       # sum of filtered pair distances / n for this frame
    gt_keypoint_count: int    # ground-truth joints at this level in this frame

    @property
    def per_keypoint_average(self) -> float:
        if self.gt_keypoint_count == 0:
            return 0.0
        return self.contribution / self.gt_keypoint_count


def loc_breakdown_by_visibility(
    X: Sequence[Pose],
    Y: Sequence[Pose],
    schema: KeypointSchema,
    result: OspaResult | None = None,
) -> dict[int, LevelContribution]:
    """Split a frame's localization error by ground-truth occlusion level.

    The optimal assignment of the unrestricted evaluation is kept and each
    matched pair's distance is recomputed with a single-level filter, so
    the three levels decompose one evaluation rather than re-matching per
    level. Pass ``result`` to reuse an already-computed evaluation.
    """
    if result is None:
        result = ospa_pose(X, Y, schema)
    gts = list(X)
    preds = list(Y)
    out: dict[int, LevelContribution] = {}
    for level in (Visibility.VISIBLE, Visibility.OCCLUDED, Visibility.INVISIBLE):
        fil = VisibilityFilter.only(int(level))
        contribution = 0.0
        for gt_i, pred_j in result.assignment.pairs:
            contribution += pose_distance(gts[gt_i], preds[pred_j], schema, fil)
        if result.n > 0:
            contribution /= result.n
        count = sum(int((p.visibilities == int(level)).sum()) for p in gts)
        out[int(level)] = LevelContribution(contribution, count)
    return out
