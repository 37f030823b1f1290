"""Shared mini-batch iteration and validation bookkeeping"""

import math
from typing import Iterator

import numpy as np
from loguru import logger

from kgecore.core.event_bus import EventBus
from kgecore.data.filter_index import FilterIndex
from kgecore.evaluation.ranking import evaluate
from kgecore.models.base import KGEModel
from kgecore.models.params import ModelParams
from kgecore.schemas.config import TrainConfig
from kgecore.training.report import EvalPoint, TrainReport


def batch_size_for(num_triples: int, batches_per_epoch: int) -> int:
    """mini-batch 大小 = ⌈|train| / batches_per_epoch⌉"""
    return max(1, math.ceil(num_triples / batches_per_epoch))


def iter_minibatches(
    train: np.ndarray, batches_per_epoch: int, rng: np.random.Generator
) -> Iterator[np.ndarray]:
    """每轮打乱训练集后切片，覆盖全部训练数据"""
    size = batch_size_for(len(train), batches_per_epoch)
    order = rng.permutation(len(train))
    for start in range(0, len(train), size):
        yield train[order[start : start + size]]


def validation_subset(valid: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    """早停使用的验证三元组；valid_sample 限制数量时用独立的随机流固定抽样"""
    if cfg.valid_sample is None or cfg.valid_sample >= len(valid):
        return valid
    picker = np.random.default_rng(cfg.seed)
    idx = np.sort(picker.choice(len(valid), size=cfg.valid_sample, replace=False))
    return valid[idx]


def should_evaluate(epoch: int, every: int, last_epoch: int) -> bool:
    return epoch % every == 0 or epoch == last_epoch


class ValidationTracker:
    """周期性验证、记录最佳检查点并发布事件"""

    def __init__(
        self,
        report: TrainReport,
        valid: np.ndarray,
        filter_index: FilterIndex,
        event_bus: EventBus | None = None,
    ):
        self.report = report
        self.valid = valid
        self.filter_index = filter_index
        self.event_bus = event_bus
        self.best_params: ModelParams | None = None

    def evaluate(self, model: KGEModel, epoch: int, loss: float) -> EvalPoint:
        """
        在验证集上评估并在 MRR 刷新时复制当前参数

        Args:
            model: 当前模型
            epoch: 轮次
            loss: 该轮平均损失
        """
        result = evaluate(model, self.valid, self.filter_index)
        point = EvalPoint(epoch=epoch, mrr=result.mrr, hits10=result.hits10, loss=loss)
        improved = self.report.record(point)
        mrr, hits = result.as_percent()
        logger.info(
            f"[{self.report.stage}] epoch {epoch}: valid MRR {mrr:.2f}, H@10 {hits:.2f}, loss {loss:.4f}"
        )
        self._emit("train:eval", point)
        if improved:
            self.best_params = model.params.copy()
            logger.info(f"[{self.report.stage}] new best at epoch {epoch} (MRR {mrr:.2f})")
            self._emit("train:best", point)
        return point

    def _emit(self, event_type: str, event) -> None:
        if self.event_bus is not None:
            self.event_bus.emit(event_type, {"stage": self.report.stage, "point": event})


__all__ = [
    "batch_size_for",
    "iter_minibatches",
    "validation_subset",
    "should_evaluate",
    "ValidationTracker",
]
