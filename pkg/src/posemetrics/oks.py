"""Keypoint similarity and the normalized pose distance built on it.

The similarity between a ground-truth pose x and a predicted pose y is

    OKS(x, y) = exp(-d_E^2 / (2 * s^2 * k^2))

where d_E is the mean Euclidean distance over the selected joints, s^2 is
the ground-truth bbox area (so s is its square root) and k a sigma
constant. ``pose_distance`` is 1 - OKS and lies in [0, 1]; it is the base
distance of every set metric in this package.

Joint selection keys on ground-truth visibility labels: either all 17
joints, or only those at one occlusion level. Joints outside the selection
contribute zero distance, so an empty selection yields OKS = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import KeypointSchema, Pose

__all__ = ["VisibilityFilter", "mean_euclidean", "oks", "pose_distance", "oks_matrix"]


@dataclass(frozen=True)
class VisibilityFilter:
    """Selects ground-truth joints: all of them, or one occlusion level."""

    level: int | None = None  # None selects every joint

    def __post_init__(self):
        if self.level is not None and self.level not in (0, 1, 2):
            raise ValueError(f"visibility level must be 0, 1 or 2, got {self.level}")

    @classmethod
    def all(cls) -> "VisibilityFilter":
        return cls(None)

    @classmethod
    def only(cls, level: int) -> "VisibilityFilter":
        return cls(int(level))

    def mask(self, gt_visibilities: np.ndarray) -> np.ndarray:
        if self.level is None:
            return np.ones_like(gt_visibilities, dtype=bool)
        return gt_visibilities == self.level


ALL_JOINTS = VisibilityFilter.all()


def mean_euclidean(gt: Pose, pred: Pose, filter: VisibilityFilter = ALL_JOINTS) -> float:
    """Mean Euclidean distance over the joints selected by the filter.

    Returns 0 when the filter selects no ground-truth joints.
    """
    mask = filter.mask(gt.visibilities)
    count = int(mask.sum())
    if count == 0:
        return 0.0
    diffs = gt.xy[mask] - pred.xy[mask]
    return float(np.linalg.norm(diffs, axis=1).sum() / count)


def _check_gt_bbox(gt: Pose) -> float:
    if gt.bbox is None:
        raise ValueError(gt._missing_bbox_message())
    area = gt.bbox_area
    if area <= 0:
        raise ValueError(gt._missing_bbox_message())
    return area


def oks(
    gt: Pose,
    pred: Pose,
    schema: KeypointSchema,
    filter: VisibilityFilter = ALL_JOINTS,
) -> float:
    """Keypoint similarity in [0, 1]; 1 iff the selected joints coincide.

    Asymmetric in its arguments: the ground-truth pose supplies the bbox
    scale and the visibility labels.
    """
    area = _check_gt_bbox(gt)
    mask = filter.mask(gt.visibilities)
    count = int(mask.sum())
    if count == 0:
        return 1.0
    if schema.oks_mode == "mean_distance":
        d = mean_euclidean(gt, pred, filter)
        return float(np.exp(-(d * d) / (2.0 * area * schema.scalar_k**2)))
    # per_joint: COCO-style mean of per-joint Gaussians
    diffs = gt.xy[mask] - pred.xy[mask]
    d2 = np.sum(diffs * diffs, axis=1)
    k2 = schema.sigma_array[mask] ** 2
    return float(np.mean(np.exp(-d2 / (2.0 * area * k2))))


def pose_distance(
    gt: Pose,
    pred: Pose,
    schema: KeypointSchema,
    filter: VisibilityFilter = ALL_JOINTS,
) -> float:
    """Normalized pose distance 1 - OKS, in [0, 1]."""
    return 1.0 - oks(gt, pred, schema, filter)


def oks_matrix(
    gts: list[Pose] | tuple[Pose, ...],
    preds: list[Pose] | tuple[Pose, ...],
    schema: KeypointSchema,
    filter: VisibilityFilter = ALL_JOINTS,
) -> np.ndarray:
    """(len(gts), len(preds)) matrix of OKS values, vectorized.

    Matches ``oks`` pairwise; rows follow ground-truth order.
    """
    m, n = len(gts), len(preds)
    out = np.ones((m, n), dtype=float)
    if m == 0 or n == 0:
        return out
    areas = np.array([_check_gt_bbox(g) for g in gts])
    gt_xy = np.stack([g.xy for g in gts])        # (m, 17, 2)
    pr_xy = np.stack([p.xy for p in preds])      # (n, 17, 2)
    masks = np.stack([filter.mask(g.visibilities) for g in gts])  # (m, 17)
    counts = masks.sum(axis=1)                   # (m,)
    dists = np.linalg.norm(gt_xy[:, None] - pr_xy[None, :], axis=3)  # (m, n, 17)
    if schema.oks_mode == "mean_distance":
        sums = np.einsum("mnj,mj->mn", dists, masks.astype(float))
        with np.errstate(invalid="ignore"):
            d_e = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], 0.0)
        out = np.exp(-(d_e * d_e) / (2.0 * areas[:, None] * schema.scalar_k**2))
    else:
        k2 = schema.sigma_array**2  # (17,)
        expo = np.exp(-(dists**2) / (2.0 * areas[:, None, None] * k2[None, None, :]))
        sums = np.einsum("mnj,mj->mn", expo, masks.astype(float))
        out = np.where(counts[:, None] > 0, sums / np.maximum(counts, 1)[:, None], 1.0)
    return out
