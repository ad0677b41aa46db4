"""Evaluation toolkit for multi-person pose estimation and pose tracking.

Provides keypoint similarity (OKS), optimal sub-pattern assignment metrics
over pose sets and over pose-track sets, OKS-matched AP/MOTA/IDF1/IDSW,
panoramic annotation merging, and dataset statistics, as a library plus a
batch CLI (``posemetrics``).
"""

from .model import (
    FrameAnnotations,
    Keypoint,
    KeypointSchema,
    Pose,
    SequenceSet,
    Trajectory,
    Visibility,
    build_trajectories,
)
from .oks import VisibilityFilter, mean_euclidean, oks, oks_matrix, pose_distance
from .assignment import Assignment, CostMatrix, brute_force_min_cost, solve_min_cost
from .ospa import OspaResult, loc_breakdown_by_visibility, ospa_pose
from .ospa2 import Ospa2Result, ospa2_pose, track_distance
from .classic_metrics import (
    PrCurve,
    TrackEvalResult,
    average_precision,
    greedy_match,
    track_metrics,
)
from .dataio import (
    CameraLayout,
    DatasetStats,
    compute_stats,
    load_annotations,
    load_camera_layout,
    load_schema,
    merge_views,
    save_annotations,
    save_camera_layout,
    save_schema,
)
from .evaluate import pose_report, track_report

__version__ = "0.1.0"

__all__ = [
    "FrameAnnotations",
    "Keypoint",
    "KeypointSchema",
    "Pose",
    "SequenceSet",
    "Trajectory",
    "Visibility",
    "build_trajectories",
    "VisibilityFilter",
    "mean_euclidean",
    "oks",
    "oks_matrix",
    "pose_distance",
    "Assignment",
    "CostMatrix",
    "brute_force_min_cost",
    "solve_min_cost",
    "OspaResult",
    "loc_breakdown_by_visibility",
    "ospa_pose",
    "Ospa2Result",
    "ospa2_pose",
    "track_distance",
    "PrCurve",
    "TrackEvalResult",
    "average_precision",
    "greedy_match",
    "track_metrics",
    "CameraLayout",
    "DatasetStats",
    "compute_stats",
    "load_annotations",
    "load_camera_layout",
    "load_schema",
    "merge_views",
    "save_annotations",
    "save_camera_layout",
    "save_schema",
    "pose_report",
    "track_report",
    "__version__",
]
