"""Training progress records"""

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class EvalPoint:
    """一次验证集评估"""

    epoch: int
    mrr: float
    hits10: float
    loss: float


@dataclass
class TrainReport:
    """一次训练的学习曲线与最佳轮次"""

    stage: str
    points: list[EvalPoint] = field(default_factory=list)
    epoch_losses: list[float] = field(default_factory=list)
    best_epoch: int | None = None
    best_mrr: float = -math.inf
    diverged: bool = False

    def record(self, point: EvalPoint) -> bool:
        """
        记录评估点

        Returns:
            是否刷新了最佳验证 MRR（严格大于，平局保留较早的检查点）
        """
        self.points.append(point)
        if point.mrr > self.best_mrr:
            self.best_mrr = point.mrr
            self.best_epoch = point.epoch
            return True
        return False

    @property
    def best_point(self) -> EvalPoint | None:
        for point in self.points:
            if point.epoch == self.best_epoch:
                return point
        return None


__all__ = ["EvalPoint", "TrainReport"]
