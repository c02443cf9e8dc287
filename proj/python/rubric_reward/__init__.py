"""Rubric-based rewards for RL training loops.

Rubrics and scoring outputs cross the boundary as JSON text::

    engine = BoundEngine(tau=0.5, max_length=6000)
    for row in engine.score_group(rubric_json, scoring_jsons, lengths):
        row["final"], row["advantage"], row["scores"]
"""

from ._errors import EngineError
from ._core import (
    BoundEngine,
    ReplayTransport,
    group_advantages,
    remap_row,
    request_scoring,
    verify_call,
)

_default = None


def score_group(rubric_json, scoring_jsons, response_lengths, responses=None):
    """score_group on an engine with default settings."""
    global _default
    if _default is None:
        _default = BoundEngine()
    return _default.score_group(rubric_json, list(scoring_jsons), list(response_lengths), responses)


__all__ = [
    "BoundEngine",
    "EngineError",
    "ReplayTransport",
    "group_advantages",
    "remap_row",
    "request_scoring",
    "score_group",
    "verify_call",
]
