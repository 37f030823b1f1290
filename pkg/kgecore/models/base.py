"""Base class for knowledge graph embedding models"""

from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import ModelKind
from kgecore.models.params import ModelParams


def flat_ids(h, r, t, coef=None) -> tuple[np.ndarray, ...]:
    """将可广播的 h / r / t（以及系数）展平为等长一维数组"""
    arrays = [np.asarray(h, dtype=np.int64), np.asarray(r, dtype=np.int64), np.asarray(t, dtype=np.int64)]
    if coef is not None:
        arrays.append(np.asarray(coef, dtype=np.float64))
    return tuple(a.ravel() for a in np.broadcast_arrays(*arrays))


class KGEModel(ABC):
    """知识图谱嵌入模型抽象基类

    所有模型必须继承此类并实现打分与解析梯度。打分函数接受可广播的编号数组，
    对参数只读，因此可以被多个线程同时调用。
    """

    kind: ClassVar[ModelKind]
    constrained_tables: ClassVar[tuple[str, ...]] = ()
    regularized: ClassVar[bool] = False

    def __init__(self, params: ModelParams):
        """
        Args:
            params: 模型参数，kind 必须与模型类一致
        """
        if params.kind != self.kind:
            raise TypeError(f"{type(self).__name__} cannot wrap {params.kind.value} parameters")
        self.params = params

    @property
    def is_distance(self) -> bool:
        return self.kind.is_distance

    @property
    def sign(self) -> float:
        """goodness = sign * score：距离取负，双线性得分取正"""
        return -1.0 if self.is_distance else 1.0

    def table(self, name: str) -> np.ndarray:
        return self.params.tables[name]

    @abstractmethod
    def score(self, h, r, t) -> np.ndarray:
        """
        计算三元组得分

        Args:
            h, r, t: 可互相广播的编号（标量或数组）

        Returns:
            广播形状的得分数组
        """

    @abstractmethod
    def _grad(self, h: np.ndarray, r: np.ndarray, t: np.ndarray, coef: np.ndarray) -> SparseGradient:
        """Σ coef_i · ∂score_i/∂θ，输入均为等长一维数组"""

    def grad_score(self, h, r, t, coef=None) -> SparseGradient:
        """
        得分对参数的稀疏梯度

        Args:
            h, r, t: 可互相广播的编号
            coef: 每个三元组的上游系数，默认为 1

        Returns:
            只涉及这些三元组所用行的稀疏梯度
        """
        if coef is None:
            coef = 1.0
        h, r, t, c = flat_ids(h, r, t, coef)
        return self._grad(h, r, t, c.astype(self.params.dtype, copy=False))

    def goodness(self, h, r, t) -> np.ndarray:
        """方向统一的可信度（越大越可信），用于排序和 softmax"""
        return self.sign * self.score(h, r, t)

    def grad_goodness(self, h, r, t, coef=None) -> SparseGradient:
        if coef is None:
            coef = 1.0
        return self.grad_score(h, r, t, self.sign * np.asarray(coef, dtype=np.float64))

    def project_constraints(self, rows: dict[str, np.ndarray] | None = None) -> None:
        """
        将受约束的行投影回单位 L2 球（原地修改）

        Args:
            rows: {表名: 行号}，只处理这些行；None 表示全部行
        """
        for name in self.constrained_tables:
            table = self.params.tables[name]
            if rows is None:
                idx = np.arange(table.shape[0])
            elif name in rows:
                idx = np.unique(rows[name])
            else:
                continue
            norms = np.linalg.norm(table[idx], axis=1)
            over = norms > 1.0
            if over.any():
                table[idx[over]] /= norms[over, None].astype(table.dtype)

    def l2_reg_gradient(self, touched: dict[str, np.ndarray], lam: float) -> SparseGradient:
        """
        惰性 L2 正则梯度：每出现一次的行加 2λ·row

        Args:
            touched: {表名: 行号（保留重复）}
            lam: 正则权重 λ
        """
        grad = SparseGradient()
        if not self.regularized or lam == 0:
            return grad
        for name, rows in touched.items():
            rows = np.asarray(rows, dtype=np.int64)
            grad.add(name, rows, 2.0 * lam * self.params.tables[name][rows])
        return grad


__all__ = ["KGEModel", "flat_ids"]
