"""Margin (hinge) and log-softmax losses with their score-space gradients"""

import numpy as np


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """减去最大值后再取指数，避免双线性得分溢出"""
    x = np.asarray(x, dtype=np.float64)
    z = np.exp(x - np.max(x, axis=axis, keepdims=True))
    return z / z.sum(axis=axis, keepdims=True)


def logsumexp(x: np.ndarray, axis: int = -1) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    top = np.max(x, axis=axis, keepdims=True)
    return (top + np.log(np.exp(x - top).sum(axis=axis, keepdims=True))).squeeze(axis)


def marginal_loss(f_pos, f_neg, gamma: float):
    """[f_pos − f_neg + γ]₊，输入为距离"""
    return np.maximum(np.asarray(f_pos) - np.asarray(f_neg) + gamma, 0.0)


def marginal_loss_grad(f_pos, f_neg, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """
    间隔损失对 (f_pos, f_neg) 的梯度

    Returns:
        (d_pos, d_neg)：铰链激活时为 (1, −1)，否则为 (0, 0)
    """
    active = (np.asarray(f_pos) - np.asarray(f_neg) + gamma > 0).astype(np.float64)
    return active, -active


def log_softmax_loss(goodness_pos, goodness_negs):
    """
    −log(exp g_pos / (exp g_pos + Σ exp g_neg))

    Args:
        goodness_pos: 正样本可信度，标量或形状 (B,)
        goodness_negs: 负样本可信度，形状 (N,) 或 (B, N)，不能为空

    Returns:
        标量或 (B,) 损失
    """
    pos = np.asarray(goodness_pos, dtype=np.float64)
    negs = np.asarray(goodness_negs, dtype=np.float64)
    if negs.shape[-1] == 0:
        raise ValueError("log_softmax_loss needs at least one negative")
    logits = np.concatenate([pos[..., None], negs], axis=-1)
    loss = logsumexp(logits, axis=-1) - pos
    return float(loss) if loss.ndim == 0 else loss


def log_softmax_grad(goodness_pos, goodness_negs) -> tuple[np.ndarray, np.ndarray]:
    """
    log-softmax 损失对可信度的梯度

    Returns:
        (d_pos, d_negs) = (p₀ − 1, p₁..p_N)
    """
    pos = np.asarray(goodness_pos, dtype=np.float64)
    negs = np.asarray(goodness_negs, dtype=np.float64)
    p = softmax(np.concatenate([pos[..., None], negs], axis=-1), axis=-1)
    return p[..., 0] - 1.0, p[..., 1:]


__all__ = [
    "softmax",
    "logsumexp",
    "marginal_loss",
    "marginal_loss_grad",
    "log_softmax_loss",
    "log_softmax_grad",
]
