"""Optimal sub-pattern assignment over two sets of pose trajectories.

Each pair of tracks is first reduced to a time-averaged distance over the
union of their existence domains: the pose distance where both exist, 1
where exactly one exists. A second assignment over the resulting track
distance matrix then yields the set error, with the same localization and
cardinality split and empty-set conventions as the per-frame metric.

The localization term absorbs identity switches and keypoint error; the
cardinality term absorbs false and missed tracks. Per-occlusion variants
re-solve the outer assignment on a matrix computed with a single-level
joint filter, since each level is assessed on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .assignment import Assignment, solve_min_cost
from .model import KeypointSchema, Trajectory, Visibility
from .oks import ALL_JOINTS, VisibilityFilter, pose_distance

__all__ = ["Ospa2Result", "track_distance", "ospa2_pose"]


@dataclass(frozen=True)
class Ospa2Result:
    """Set error over trajectory sets. total == loc + card exactly."""

    total: float
    loc: float
    card: float
    assignment: Assignment
    m: int
    n: int
    per_visibility: Mapping[int, float]  # occlusion level -> total


def track_distance(
    Xi: Trajectory,
    Yj: Trajectory,
    schema: KeypointSchema,
    filter: VisibilityFilter = ALL_JOINTS,
) -> float:
    """Time-averaged distance between two tracks over their domain union.

    Per timestep: pose distance when both tracks exist, 1 when exactly one
    does. Steps outside both domains never occur within the union; the
    zero branch exists only to keep the definition total.
    """
    union = sorted(set(Xi.states) | set(Yj.states))
    if not union:
        raise ValueError("track distance needs non-empty trajectories")
    total = 0.0
    for t in union:
        x = Xi.states.get(t)
        y = Yj.states.get(t)
        if x is not None and y is not None:
            total += pose_distance(x, y, schema, filter)
        elif x is not None or y is not None:
            total += 1.0
    return total / len(union)


def _track_distance_matrix(
    gt: Sequence[Trajectory],
    pred: Sequence[Trajectory],
    schema: KeypointSchema,
    filter: VisibilityFilter,
) -> np.ndarray:
    out = np.zeros((len(gt), len(pred)))
    for i, xi in enumerate(gt):
        for j, yj in enumerate(pred):
            out[i, j] = track_distance(xi, yj, schema, filter)
    return out


def _check_unique_ids(tracks: Sequence[Trajectory], side: str) -> None:
    seen: set[int] = set()
    for t in tracks:
        if t.track_id in seen:
            raise ValueError(f"duplicate track id {t.track_id} among {side} trajectories")
        seen.add(t.track_id)


def ospa2_pose(
    GT: Sequence[Trajectory],
    Pred: Sequence[Trajectory],
    schema: KeypointSchema,
) -> Ospa2Result:
    """Set error between ground-truth and predicted trajectory sets.

    Assignment pairs index (gt, pred) positions in the given sequences.
    ``per_visibility`` holds the three single-level totals, each with its
    own re-solved assignment.
    """
    _check_unique_ids(GT, "ground-truth")
    _check_unique_ids(Pred, "predicted")
    m, n = min(len(GT), len(Pred)), max(len(GT), len(Pred))
    levels = (int(Visibility.VISIBLE), int(Visibility.OCCLUDED), int(Visibility.INVISIBLE))
    if n == 0:
        return Ospa2Result(0.0, 0.0, 0.0, Assignment((), 0.0), 0, 0, {v: 0.0 for v in levels})
    if m == 0:
        return Ospa2Result(1.0, 0.0, 1.0, Assignment((), 0.0), m, n, {v: 1.0 for v in levels})

    card = (n - m) / n
    dist = _track_distance_matrix(GT, Pred, schema, ALL_JOINTS)
    assignment = solve_min_cost(dist)
    loc = assignment.total_cost / n

    per_visibility: dict[int, float] = {}
    for level in levels:
        fil = VisibilityFilter.only(level)
        level_dist = _track_distance_matrix(GT, Pred, schema, fil)
        level_assignment = solve_min_cost(level_dist)
        per_visibility[level] = level_assignment.total_cost / n + card

    return Ospa2Result(loc + card, loc, card, assignment, m, n, per_visibility)
