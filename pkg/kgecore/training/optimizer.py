"""Lazy (row-sparse) Adam over named embedding tables"""

from dataclasses import dataclass

import numpy as np

from kgecore.exceptions import NonFiniteGradientError
from kgecore.models.gradient import SparseGradient
from kgecore.models.params import ModelParams
from kgecore.schemas.config import AdamConfig


@dataclass(eq=False)
class AdamState:
    """每个参数表的一阶矩 m、二阶矩 v 与全局步数 t"""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    t: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def for_params(cls, params: ModelParams, config: AdamConfig | None = None) -> "AdamState":
        config = config or AdamConfig()
        return cls(
            m={name: np.zeros_like(arr) for name, arr in params.tables.items()},
            v={name: np.zeros_like(arr) for name, arr in params.tables.items()},
            lr=config.lr,
            beta1=config.beta1,
            beta2=config.beta2,
            eps=config.eps,
        )


def adam_step(
    params: ModelParams,
    state: AdamState,
    grads: SparseGradient,
    maximize: bool = False,
) -> dict[str, np.ndarray]:
    """
    对出现在梯度中的行做一次带偏差校正的 Adam 更新（原地修改 params 与 state）

    未出现的行的矩估计保持不变；步数每次调用（每个 mini-batch）加一。

    Args:
        params: 模型参数
        state: Adam 状态
        grads: 稀疏梯度（同一行的多次出现会先求和）
        maximize: True 时沿梯度上升

    Returns:
        {表名: 被更新的唯一行号}

    Raises:
        NonFiniteGradientError: 梯度含 NaN / Inf，此时参数与状态均不修改
    """
    merged = grads.merged()
    for table, (rows, values) in merged.items():
        if not np.all(np.isfinite(values)):
            raise NonFiniteGradientError(f"non-finite gradient in table {table!r}")

    state.t += 1
    bc1 = 1.0 - state.beta1**state.t
    bc2 = 1.0 - state.beta2**state.t

    for table, (rows, values) in merged.items():
        g = -values if maximize else values
        theta, m, v = params.tables[table], state.m[table], state.v[table]
        m[rows] = state.beta1 * m[rows] + (1.0 - state.beta1) * g
        v[rows] = state.beta2 * v[rows] + (1.0 - state.beta2) * (g * g)
        m_hat = m[rows] / bc1
        v_hat = v[rows] / bc2
        theta[rows] -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(theta.dtype)
    return {table: rows for table, (rows, _) in merged.items()}


__all__ = ["AdamState", "adam_step"]
