"""Filtered link-prediction ranking: per-triple ranks, MRR and Hits@10"""

from dataclasses import dataclass

import numpy as np
from loguru import logger

from kgecore.core.model_registry import build_model
from kgecore.data.filter_index import FilterIndex
from kgecore.data.loader import Triple, as_triple_array
from kgecore.data.sampling import Side
from kgecore.models.base import KGEModel
from kgecore.models.params import ModelParams

HITS_AT = 10


@dataclass(frozen=True)
class RankResult:
    """单个 (三元组, 侧) 的过滤排名"""

    triple: Triple
    side: Side
    rank: int
    ties: int


@dataclass(frozen=True, eq=False)
class EvalReport:
    """一组三元组两侧排名的汇总"""

    mrr: float
    hits10: float
    ranks: np.ndarray
    ties: int
    count: int

    def as_percent(self) -> tuple[float, float]:
        """(MRR×100, H@10×100)，与论文表格同一量纲"""
        return self.mrr * 100.0, self.hits10 * 100.0

    def summary_lines(self, label: str | None = None) -> list[str]:
        mrr, hits = self.as_percent()
        lines = [f"split: {label}"] if label else []
        lines += [
            f"mrr: {mrr:.2f}",
            f"hits@{HITS_AT}: {hits:.2f}",
            f"ranked: {self.count}",
            f"ties: {self.ties}",
        ]
        return lines


def _as_model(params: ModelParams | KGEModel) -> KGEModel:
    return params if isinstance(params, KGEModel) else build_model(params)


def rank_triple(
    params: ModelParams | KGEModel,
    triple: Triple,
    side: Side,
    filter_index: FilterIndex | None,
) -> RankResult:
    """
    对一侧的全部实体替换打分并求过滤排名

    rank = 1 + 过滤后严格优于真实三元组的候选数；与真实三元组得分相同的候选只计入 ties。

    Args:
        params: 模型参数或模型实例
        triple: 待排名的真实三元组
        side: 替换头实体还是尾实体
        filter_index: 全部已知三元组；None 时得到未过滤排名

    Returns:
        排名结果
    """
    model = _as_model(params)
    h, r, t = (int(x) for x in triple)
    entities = np.arange(model.params.num_entities)
    side = Side(side)

    if side is Side.HEAD:
        scores = model.goodness(entities, r, t)
        true_id = h
        known = filter_index.known_heads(r, t) if filter_index is not None else None
    else:
        scores = model.goodness(h, r, entities)
        true_id = t
        known = filter_index.known_tails(h, r) if filter_index is not None else None

    keep = np.ones(len(entities), dtype=bool)
    if known is not None:
        keep[known] = False
    keep[true_id] = False

    target = scores[true_id]
    rivals = scores[keep]
    better = int(np.count_nonzero(rivals > target))
    ties = int(np.count_nonzero(rivals == target))
    return RankResult(triple=Triple(h, r, t), side=side, rank=1 + better, ties=ties)


def metrics_from_ranks(ranks: np.ndarray) -> tuple[float, float]:
    """由排名求 (MRR, H@10)"""
    ranks = np.asarray(ranks, dtype=np.float64)
    if len(ranks) == 0:
        return 0.0, 0.0
    return float(np.mean(1.0 / ranks)), float(np.mean(ranks <= HITS_AT))


def evaluate(
    params: ModelParams | KGEModel,
    triples: np.ndarray,
    filter_index: FilterIndex | None,
) -> EvalReport:
    """
    过滤设置下的链接预测评估，每个三元组的头、尾两侧都参与排名

    Args:
        params: 模型参数或模型实例
        triples: (n, 3) 待评估三元组
        filter_index: 全部已知三元组

    Returns:
        评估报告，ranks 按 (三元组顺序, 先头后尾) 排列
    """
    model = _as_model(params)
    triples = as_triple_array(triples)
    ranks = np.empty(2 * len(triples), dtype=np.int64)
    ties = 0
    for i, row in enumerate(triples):
        triple = Triple(*(int(x) for x in row))
        for j, side in enumerate((Side.HEAD, Side.TAIL)):
            result = rank_triple(model, triple, side, filter_index)
            ranks[2 * i + j] = result.rank
            ties += result.ties
    mrr, hits10 = metrics_from_ranks(ranks)
    if ties:
        logger.debug(f"Evaluation saw {ties} tied competitors over {len(ranks)} rankings")
    return EvalReport(mrr=mrr, hits10=hits10, ranks=ranks, ties=ties, count=len(ranks))


__all__ = [
    "HITS_AT",
    "RankResult",
    "EvalReport",
    "rank_triple",
    "evaluate",
    "metrics_from_ranks",
]
