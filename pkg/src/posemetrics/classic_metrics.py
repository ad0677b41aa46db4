"""Conventional detection and tracking metrics with keypoint matching.

AP/AR use the greedy confidence-ordered matching common to keypoint
benchmarks: predictions are matched high-confidence-first to the free
ground-truth pose of highest OKS, with a fixed OKS acceptance threshold
(0.5 by default) instead of box overlap. MOTA/IDF1/IDSW follow the CLEAR
and identity-measure conventions, again with OKS as the correspondence
score.
"""

from __future__ import annotations

import warnings
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .assignment import solve_min_cost
from .model import KeypointSchema, Pose, SequenceSet
from .oks import oks_matrix

__all__ = [
    "MatchResult",
    "PrCurve",
    "ApResult",
    "TrackEvalResult",
    "SceneTrackCounts",
    "greedy_match",
    "label_predictions",
    "ap_from_records",
    "average_precision",
    "scene_track_counts",
    "track_metrics",
]

# cost assigned to pairs below the OKS threshold; large enough that the
# solver prefers any number of feasible pairs over one infeasible pair
_INFEASIBLE = 1e9


@dataclass(frozen=True)
class MatchResult:
    """Greedy matching outcome for one frame, as index pairs."""

    pairs: tuple[tuple[int, int], ...]      # (gt_index, pred_index)
    unmatched_gt: tuple[int, ...]
    unmatched_pred: tuple[int, ...]


def greedy_match(
    gt_frame: Sequence[Pose],
    pred_frame: Sequence[Pose],
    schema: KeypointSchema,
    threshold: float = 0.5,
) -> MatchResult:
    """Match predictions to ground truth, highest confidence first.

    Each prediction takes the free ground-truth pose of maximal OKS and
    the pair is kept iff that OKS reaches the threshold. Ties in
    confidence fall back to input order, ties in OKS to the lower
    ground-truth index. All predictions must carry scores.
    """
    gts = list(gt_frame)
    preds = list(pred_frame)
    for j, p in enumerate(preds):
        if p.score is None:
            raise ValueError(f"prediction {j} lacks a confidence score, required for matching")
    if not gts or not preds:
        return MatchResult((), tuple(range(len(gts))), tuple(range(len(preds))))

    order = sorted(range(len(preds)), key=lambda j: -preds[j].score)
    sim = oks_matrix(gts, preds, schema)
    free = np.ones(len(gts), dtype=bool)
    pairs: list[tuple[int, int]] = []
    for j in order:
        if not free.any():
            break
        col = np.where(free, sim[:, j], -np.inf)
        i = int(np.argmax(col))
        if col[i] >= threshold:
            pairs.append((i, j))
            free[i] = False
    matched_gt = {i for i, _ in pairs}
    matched_pred = {j for _, j in pairs}
    return MatchResult(
        tuple(sorted(pairs)),
        tuple(i for i in range(len(gts)) if i not in matched_gt),
        tuple(j for j in range(len(preds)) if j not in matched_pred),
    )


@dataclass(frozen=True)
class PrCurve:
    """Precision/recall sweep over descending confidence thresholds."""

    thresholds: tuple[float, ...]
    precision: tuple[float, ...]
    recall: tuple[float, ...]
    ap: float


@dataclass(frozen=True)
class ApResult:
    ap: float
    ar: float
    curve: PrCurve


def label_predictions(
    gt_frames: Sequence[Sequence[Pose]],
    pred_frames: Sequence[Sequence[Pose]],
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
) -> tuple[list[tuple[float, bool]], int]:
    """Label every prediction TP or FP once, by per-frame greedy matching.

    Returns the (score, is_tp) records in deterministic frame-then-pose
    order, plus the total ground-truth pose count.
    """
    if len(gt_frames) != len(pred_frames):
        raise ValueError("ground-truth and prediction frame lists must align")
    total_gt = sum(len(f) for f in gt_frames)
    records: list[tuple[float, bool]] = []
    for gts, preds in zip(gt_frames, pred_frames):
        match = greedy_match(gts, preds, schema, oks_threshold)
        tp_pred = {j for _, j in match.pairs}
        for j, p in enumerate(preds):
            records.append((float(p.score), j in tp_pred))
    return records, total_gt


def _interpolated_ap(precision: np.ndarray, recall: np.ndarray, points: int = 101) -> float:
    # max precision at recall >= r, averaged over evenly spaced recall levels
    if len(precision) == 0:
        return 0.0
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    levels = np.linspace(0.0, 1.0, points)
    idx = np.searchsorted(recall, levels, side="left")
    vals = np.where(idx < len(envelope), envelope[np.minimum(idx, len(envelope) - 1)], 0.0)
    return float(vals.mean())


def ap_from_records(records: Sequence[tuple[float, bool]], total_gt: int) -> ApResult:
    """Precision-recall sweep and 101-point interpolated AP from TP/FP labels."""
    if total_gt == 0:
        if records:
            warnings.warn("no ground-truth poses: average precision is 0 by convention")
        return ApResult(0.0, 0.0, PrCurve((), (), (), 0.0))
    if not records:
        return ApResult(0.0, 0.0, PrCurve((), (), (), 0.0))
    order = sorted(range(len(records)), key=lambda idx: -records[idx][0])
    scores = np.array([records[idx][0] for idx in order])
    tps = np.cumsum([1.0 if records[idx][1] else 0.0 for idx in order])
    fps = np.cumsum([0.0 if records[idx][1] else 1.0 for idx in order])
    precision = tps / (tps + fps)
    recall = tps / total_gt
    ap = _interpolated_ap(precision, recall)
    curve = PrCurve(
        tuple(float(s) for s in scores),
        tuple(float(p) for p in precision),
        tuple(float(r) for r in recall),
        ap,
    )
    return ApResult(ap, float(recall[-1]), curve)


def average_precision(
    gt_frames: Sequence[Sequence[Pose]],
    pred_frames: Sequence[Sequence[Pose]],
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
) -> ApResult:
    """AP and AR over a dataset of aligned frame pairs.

    Every prediction is labeled TP or FP once at the given OKS threshold;
    the precision-recall curve then sweeps the global confidence ordering
    and AP is its 101-point interpolated area. AR is the maximum recall
    attained.
    """
    records, total_gt = label_predictions(gt_frames, pred_frames, schema, oks_threshold)
    return ap_from_records(records, total_gt)


@dataclass(frozen=True)
class TrackEvalResult:
    """CLEAR-style tracking accuracy with identity measures."""

    mota: float
    idf1: float
    idsw: int
    fp: int
    fn: int
    gt_count: int


@dataclass(frozen=True)
class SceneTrackCounts:
    """Raw per-scene tallies; addable across scenes before forming ratios."""

    fp: int
    fn: int
    idsw: int
    gt_count: int
    idtp: int
    gt_detections: int
    pred_detections: int


def _frame_correspondence(
    gts: Sequence[Pose],
    preds: Sequence[Pose],
    schema: KeypointSchema,
    threshold: float,
    carry: dict[int, int],
) -> dict[int, int]:
    """One frame's gt-id to pred-id matches under CLEAR continuity."""
    if not gts or not preds:
        return {}
    sim = oks_matrix(gts, preds, schema)
    gt_ids = [p.track_id for p in gts]
    pred_ids = [p.track_id for p in preds]
    pred_index = {pid: j for j, pid in enumerate(pred_ids)}

    matches: dict[int, int] = {}
    used_gt: set[int] = set()
    used_pred: set[int] = set()
    # keep last frame's pairs that are still above threshold
    for i, gid in enumerate(gt_ids):
        pid = carry.get(gid)
        if pid is None or pid not in pred_index:
            continue
        j = pred_index[pid]
        if j not in used_pred and sim[i, j] >= threshold:
            matches[gid] = pid
            used_gt.add(i)
            used_pred.add(j)
    # optimal assignment over the remainder, restricted to feasible pairs
    rem_gt = [i for i in range(len(gts)) if i not in used_gt]
    rem_pred = [j for j in range(len(preds)) if j not in used_pred]
    if rem_gt and rem_pred:
        block = sim[np.ix_(rem_gt, rem_pred)]
        dist = np.where(block >= threshold, 1.0 - block, _INFEASIBLE)
        for r, c in solve_min_cost(dist).pairs:
            if dist[r, c] >= _INFEASIBLE:
                continue
            matches[gt_ids[rem_gt[r]]] = pred_ids[rem_pred[c]]
    return matches


def _require_track_ids(seq: SequenceSet, side: str) -> None:
    for frame in seq.frames:
        for k, pose in enumerate(frame.poses):
            if pose.track_id is None:
                raise ValueError(
                    f"{side} scene {seq.scene_name!r} frame {frame.frame_id}: "
                    f"pose {k} lacks a track id"
                )


def scene_track_counts(
    gt_seq: SequenceSet,
    pred_seq: SequenceSet,
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
) -> SceneTrackCounts:
    """Frame-by-frame tracking tallies for one scene pair.

    Frames are aligned on the union of frame ids. An identity switch is
    counted whenever a ground-truth track's matched prediction id differs
    from its previous matched frame, gaps included.
    """
    _require_track_ids(gt_seq, "ground-truth")
    _require_track_ids(pred_seq, "prediction")
    gt_by_frame = gt_seq.poses_by_frame()
    pred_by_frame = pred_seq.poses_by_frame()
    frames = sorted(set(gt_by_frame) | set(pred_by_frame))

    fp = fn = idsw = gt_count = 0
    overlap: dict[tuple[int, int], int] = defaultdict(int)
    gt_total: dict[int, int] = defaultdict(int)
    pred_total: dict[int, int] = defaultdict(int)
    last_match: dict[int, int] = {}
    prev_matches: dict[int, int] = {}
    for t in frames:
        gts = list(gt_by_frame.get(t, ()))
        preds = list(pred_by_frame.get(t, ()))
        matches = _frame_correspondence(gts, preds, schema, oks_threshold, prev_matches)
        gt_count += len(gts)
        fn += len(gts) - len(matches)
        fp += len(preds) - len(matches)
        for gid, pid in sorted(matches.items()):
            if gid in last_match and last_match[gid] != pid:
                idsw += 1
            last_match[gid] = pid
        prev_matches = matches

        # identity overlap counts for IDF1: any pair above threshold
        for p in gts:
            gt_total[p.track_id] += 1
        for p in preds:
            pred_total[p.track_id] += 1
        if gts and preds:
            sim = oks_matrix(gts, preds, schema)
            for i, g in enumerate(gts):
                for j, p in enumerate(preds):
                    if sim[i, j] >= oks_threshold:
                        overlap[(g.track_id, p.track_id)] += 1

    idtp = _scene_idtp(overlap, sorted(gt_total), sorted(pred_total))
    return SceneTrackCounts(
        fp=fp,
        fn=fn,
        idsw=idsw,
        gt_count=gt_count,
        idtp=idtp,
        gt_detections=sum(gt_total.values()),
        pred_detections=sum(pred_total.values()),
    )


def _scene_idtp(
    overlap: dict[tuple[int, int], int],
    gt_ids: list[int],
    pred_ids: list[int],
) -> int:
    """Best total identity overlap under a one-to-one id matching."""
    if not gt_ids or not pred_ids:
        return 0
    gt_pos = {gid: i for i, gid in enumerate(gt_ids)}
    pred_pos = {pid: j for j, pid in enumerate(pred_ids)}
    counts = np.zeros((len(gt_ids), len(pred_ids)))
    for (gid, pid), c in overlap.items():
        counts[gt_pos[gid], pred_pos[pid]] = c
    cost = counts.max() - counts  # min-cost assignment maximizes overlap
    total = 0
    for r, c in solve_min_cost(cost).pairs:
        total += int(counts[r, c])
    return total


def result_from_counts(counts: Sequence[SceneTrackCounts]) -> TrackEvalResult:
    """Combine per-scene tallies into the final tracking result."""
    fp = sum(c.fp for c in counts)
    fn = sum(c.fn for c in counts)
    idsw = sum(c.idsw for c in counts)
    gt_count = sum(c.gt_count for c in counts)
    idtp = sum(c.idtp for c in counts)
    dets = sum(c.gt_detections + c.pred_detections for c in counts)
    if gt_count == 0:
        raise ValueError("tracking evaluation needs at least one ground-truth pose")
    mota = 1.0 - (fp + fn + idsw) / gt_count
    idf1 = 2.0 * idtp / dets
    return TrackEvalResult(mota, idf1, idsw, fp, fn, gt_count)


def track_metrics(
    gt_seqs: Sequence[SequenceSet],
    pred_seqs: Sequence[SequenceSet],
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
) -> TrackEvalResult:
    """MOTA, IDF1 and identity switches over paired scenes.

    Scenes are paired positionally. Correspondence per frame is the
    threshold-restricted min-cost assignment on 1 - OKS, keeping the
    previous frame's pairs when still valid; IDF1 matches whole
    identities per scene by maximizing identity-true-positive frames.
    """
    if len(gt_seqs) != len(pred_seqs):
        raise ValueError("ground-truth and prediction scene lists must align")
    counts = [
        scene_track_counts(g, p, schema, oks_threshold)
        for g, p in zip(gt_seqs, pred_seqs)
    ]
    return result_from_counts(counts)
