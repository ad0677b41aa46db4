"""Thin scripting bindings over the posemetrics evaluator.

Paths in, nested report mappings out: each call runs the ``posemetrics``
command line in a subprocess with the machine-readable report format and
returns the parsed JSON. No metric math happens here, so the numbers are
the evaluator's own, and the interpreter lock is released for the whole
evaluation (the work happens in the child process).
"""

from .reports import EvaluationError, py_eval_pose, py_eval_track, py_stats

__version__ = "0.1.0"

__all__ = ["EvaluationError", "py_eval_pose", "py_eval_track", "py_stats"]
