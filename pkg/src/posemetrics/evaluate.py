"""Dataset-level evaluation reports.

These functions produce the plain nested dicts that the CLI serializes;
the CLI adds formatting only, so every reported number is reachable from
here. Aggregation is deterministic: scenes are processed in name order
and sums run left to right.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from .classic_metrics import (
    SceneTrackCounts,
    ap_from_records,
    label_predictions,
    result_from_counts,
    scene_track_counts,
)
from .model import KeypointSchema, Pose, SequenceSet, Visibility, build_trajectories
from .ospa import loc_breakdown_by_visibility, ospa_pose
from .ospa2 import ospa2_pose

__all__ = ["pose_report", "track_report", "pair_scenes", "MAP_SWEEP_THRESHOLDS"]

MAP_SWEEP_THRESHOLDS = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

_LEVEL_NAMES = {
    int(Visibility.VISIBLE): "visible",
    int(Visibility.OCCLUDED): "occluded",
    int(Visibility.INVISIBLE): "invisible",
}


def pair_scenes(
    gt_seqs: Sequence[SequenceSet],
    pred_seqs: Sequence[SequenceSet],
) -> list[tuple[SequenceSet, SequenceSet]]:
    """Pair scenes by name, sorted by name; the name sets must coincide."""
    gt_by_name = {s.scene_name: s for s in gt_seqs}
    pred_by_name = {s.scene_name: s for s in pred_seqs}
    if len(gt_by_name) != len(gt_seqs):
        raise ValueError("duplicate ground-truth scene names")
    if len(pred_by_name) != len(pred_seqs):
        raise ValueError("duplicate prediction scene names")
    missing = sorted(set(gt_by_name) - set(pred_by_name))
    extra = sorted(set(pred_by_name) - set(gt_by_name))
    if missing or extra:
        raise ValueError(
            f"scene sets differ: missing predictions for {missing}, "
            f"unmatched prediction scenes {extra}"
        )
    return [(gt_by_name[name], pred_by_name[name]) for name in sorted(gt_by_name)]


def _aligned_frames(
    gt_seq: SequenceSet, pred_seq: SequenceSet
) -> list[tuple[tuple[Pose, ...], tuple[Pose, ...]]]:
    gt_by_frame = gt_seq.poses_by_frame()
    pred_by_frame = pred_seq.poses_by_frame()
    ids = sorted(set(gt_by_frame) | set(pred_by_frame))
    return [(gt_by_frame.get(t, ()), pred_by_frame.get(t, ())) for t in ids]


def _pose_scene_worker(task):
    gt_seq, pred_seq, schema, thresholds = task
    frames = _aligned_frames(gt_seq, pred_seq)
    ospa_sum = loc_sum = card_sum = 0.0
    contrib = {lvl: 0.0 for lvl in _LEVEL_NAMES}
    kp_count = {lvl: 0 for lvl in _LEVEL_NAMES}
    n_gt = n_pred = 0
    for gts, preds in frames:
        res = ospa_pose(gts, preds, schema)
        ospa_sum += res.total
        loc_sum += res.loc
        card_sum += res.card
        for lvl, piece in loc_breakdown_by_visibility(gts, preds, schema, res).items():
            contrib[lvl] += piece.contribution
            kp_count[lvl] += piece.gt_keypoint_count
        n_gt += len(gts)
        n_pred += len(preds)
    gt_frames = [g for g, _ in frames]
    pred_frames = [p for _, p in frames]
    records = {
        thr: label_predictions(gt_frames, pred_frames, schema, thr)[0] for thr in thresholds
    }
    return {
        "scene": gt_seq.scene_name,
        "num_frames": len(frames),
        "num_gt_poses": n_gt,
        "num_pred_poses": n_pred,
        "ospa_sum": ospa_sum,
        "loc_sum": loc_sum,
        "card_sum": card_sum,
        "contrib": contrib,
        "kp_count": kp_count,
        "records": records,
    }


def _breakdown_dict(contrib, kp_count, num_frames, num_poses):
    out = {}
    for lvl, name in _LEVEL_NAMES.items():
        c = contrib[lvl]
        k = kp_count[lvl]
        out[name] = {
            "contribution": c,
            "gt_keypoint_count": k,
            "per_keypoint_average": c / k if k else 0.0,
            "per_frame_average": c / num_frames if num_frames else 0.0,
            "per_pose_average": c / num_poses if num_poses else 0.0,
        }
    return out


def _run_scene_tasks(worker, tasks, jobs: int):
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, tasks))
    return [worker(t) for t in tasks]


def pose_report(
    gt_seqs: Sequence[SequenceSet],
    pred_seqs: Sequence[SequenceSet],
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
    map_sweep: bool = False,
    jobs: int = 1,
) -> dict:
    """Per-frame set error plus AP/AR, per scene and dataset-wide.

    The dataset set error is the unweighted mean over all frames of all
    scenes; AP/AR sweep the pooled confidence ordering across scenes.
    """
    pairs = pair_scenes(gt_seqs, pred_seqs)
    thresholds = (oks_threshold,) + (MAP_SWEEP_THRESHOLDS if map_sweep else ())
    thresholds = tuple(dict.fromkeys(thresholds))  # dedupe, keep order
    tasks = [(g, p, schema, thresholds) for g, p in pairs]
    summaries = _run_scene_tasks(_pose_scene_worker, tasks, jobs)

    scenes = {}
    total = {"frames": 0, "gt": 0, "pred": 0, "ospa": 0.0, "loc": 0.0, "card": 0.0}
    contrib = {lvl: 0.0 for lvl in _LEVEL_NAMES}
    kp_count = {lvl: 0 for lvl in _LEVEL_NAMES}
    pooled_records = {thr: [] for thr in thresholds}
    for s in summaries:
        nf = s["num_frames"]
        scene_ap = ap_from_records(s["records"][oks_threshold], s["num_gt_poses"])
        scenes[s["scene"]] = {
            "ospa_pose": s["ospa_sum"] / nf if nf else 0.0,
            "loc": s["loc_sum"] / nf if nf else 0.0,
            "card": s["card_sum"] / nf if nf else 0.0,
            "ap": scene_ap.ap,
            "ar": scene_ap.ar,
            "num_frames": nf,
            "num_gt_poses": s["num_gt_poses"],
            "num_pred_poses": s["num_pred_poses"],
            "visibility_breakdown": _breakdown_dict(
                s["contrib"], s["kp_count"], nf, s["num_gt_poses"]
            ),
        }
        total["frames"] += nf
        total["gt"] += s["num_gt_poses"]
        total["pred"] += s["num_pred_poses"]
        total["ospa"] += s["ospa_sum"]
        total["loc"] += s["loc_sum"]
        total["card"] += s["card_sum"]
        for lvl in _LEVEL_NAMES:
            contrib[lvl] += s["contrib"][lvl]
            kp_count[lvl] += s["kp_count"][lvl]
        for thr in thresholds:
            pooled_records[thr].extend(s["records"][thr])

    nf = total["frames"]
    dataset_ap = ap_from_records(pooled_records[oks_threshold], total["gt"])
    dataset = {
        "ospa_pose": total["ospa"] / nf if nf else 0.0,
        "loc": total["loc"] / nf if nf else 0.0,
        "card": total["card"] / nf if nf else 0.0,
        "ap": dataset_ap.ap,
        "ar": dataset_ap.ar,
        "num_scenes": len(summaries),
        "num_frames": nf,
        "num_gt_poses": total["gt"],
        "num_pred_poses": total["pred"],
        "visibility_breakdown": _breakdown_dict(contrib, kp_count, nf, total["gt"]),
    }
    if map_sweep:
        aps = [
            ap_from_records(pooled_records[thr], total["gt"]).ap
            for thr in MAP_SWEEP_THRESHOLDS
        ]
        dataset["map"] = sum(aps) / len(aps)
        dataset["map_thresholds"] = list(MAP_SWEEP_THRESHOLDS)

    return {
        "command": "eval-pose",
        "oks_mode": schema.oks_mode,
        "scalar_k": schema.scalar_k,
        "oks_threshold": oks_threshold,
        "dataset": dataset,
        "scenes": scenes,
    }


def _track_scene_worker(task):
    gt_seq, pred_seq, schema, oks_threshold = task
    counts = scene_track_counts(gt_seq, pred_seq, schema, oks_threshold)
    gt_tracks = list(build_trajectories(gt_seq).values())
    pred_tracks = list(build_trajectories(pred_seq).values())
    o2 = ospa2_pose(gt_tracks, pred_tracks, schema)
    return gt_seq.scene_name, counts, o2


def _ospa2_dict(o2) -> dict:
    return {
        "total": o2.total,
        "loc": o2.loc,
        "card": o2.card,
        "visible": o2.per_visibility[int(Visibility.VISIBLE)],
        "occluded": o2.per_visibility[int(Visibility.OCCLUDED)],
        "invisible": o2.per_visibility[int(Visibility.INVISIBLE)],
    }


def track_report(
    gt_seqs: Sequence[SequenceSet],
    pred_seqs: Sequence[SequenceSet],
    schema: KeypointSchema,
    oks_threshold: float = 0.5,
    jobs: int = 1,
) -> dict:
    """Tracking accuracy, identity measures and track-set error.

    MOTA/IDF1/IDSW tallies pool across scenes before forming ratios; the
    track-set error is computed per scene and macro-averaged, since
    trajectories never span scenes.
    """
    pairs = pair_scenes(gt_seqs, pred_seqs)
    tasks = [(g, p, schema, oks_threshold) for g, p in pairs]
    results = _run_scene_tasks(_track_scene_worker, tasks, jobs)

    scenes = {}
    all_counts: list[SceneTrackCounts] = []
    o2_sums = {"total": 0.0, "loc": 0.0, "card": 0.0, "visible": 0.0, "occluded": 0.0, "invisible": 0.0}
    for name, counts, o2 in results:
        all_counts.append(counts)
        o2d = _ospa2_dict(o2)
        mota = (
            1.0 - (counts.fp + counts.fn + counts.idsw) / counts.gt_count
            if counts.gt_count
            else None
        )
        denom = counts.gt_detections + counts.pred_detections
        scenes[name] = {
            "mota": mota,
            "idf1": 2.0 * counts.idtp / denom if denom else None,
            "idsw": counts.idsw,
            "fp": counts.fp,
            "fn": counts.fn,
            "gt_count": counts.gt_count,
            "ospa2": o2d,
        }
        for key in o2_sums:
            o2_sums[key] += o2d[key]

    combined = result_from_counts(all_counts)
    n = len(results)
    dataset = {
        "mota": combined.mota,
        "idf1": combined.idf1,
        "idsw": combined.idsw,
        "fp": combined.fp,
        "fn": combined.fn,
        "gt_count": combined.gt_count,
        "ospa2": {key: o2_sums[key] / n for key in o2_sums} if n else dict(o2_sums),
        "num_scenes": n,
    }
    return {
        "command": "eval-track",
        "oks_mode": schema.oks_mode,
        "scalar_k": schema.scalar_k,
        "oks_threshold": oks_threshold,
        "dataset": dataset,
        "scenes": scenes,
    }
