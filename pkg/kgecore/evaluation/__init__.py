"""Filtered link-prediction evaluation"""

from kgecore.evaluation.ranking import (
    HITS_AT,
    EvalReport,
    RankResult,
    evaluate,
    metrics_from_ranks,
    rank_triple,
)

__all__ = ["HITS_AT", "RankResult", "EvalReport", "rank_triple", "evaluate", "metrics_from_ranks"]
