"""Generator side: softmax over candidate negatives, sampling and the policy gradient"""

from dataclasses import dataclass

import numpy as np

from kgecore.core.model_registry import build_model
from kgecore.data.sampling import CandidateSet
from kgecore.models.base import KGEModel
from kgecore.models.gradient import SparseGradient
from kgecore.models.params import ModelParams
from kgecore.training.losses import softmax


def as_model(model: ModelParams | KGEModel) -> KGEModel:
    return model if isinstance(model, KGEModel) else build_model(model)


@dataclass(frozen=True, eq=False)
class GeneratorDistribution:
    """生成器在一个候选集合上的分布"""

    candidates: np.ndarray
    probs: np.ndarray

    def __len__(self) -> int:
        return len(self.probs)


def generator_probabilities(model: ModelParams | KGEModel, candidates: np.ndarray) -> np.ndarray:
    """
    对候选三元组的生成器可信度做 softmax

    Args:
        model: 生成器
        candidates: (..., N, 3) 候选三元组

    Returns:
        (..., N) 概率，最后一维和为 1
    """
    model = as_model(model)
    candidates = np.asarray(candidates, dtype=np.int64)
    if candidates.shape[-2] == 0:
        raise ValueError("generator distribution needs at least one candidate")
    g = model.goodness(candidates[..., 0], candidates[..., 1], candidates[..., 2])
    return softmax(g, axis=-1)


def generator_distribution(
    gen: ModelParams | KGEModel, cands: CandidateSet | np.ndarray
) -> GeneratorDistribution:
    """p_i = exp g(i) / Σ_j exp g(j)，g 为生成器可信度"""
    candidates = cands.candidates if isinstance(cands, CandidateSet) else np.asarray(cands)
    return GeneratorDistribution(candidates=candidates, probs=generator_probabilities(gen, candidates))


def sample_indices(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    按行逆 CDF 抽样，每行一个均匀随机数

    Args:
        probs: (B, N) 每行一个分布

    Returns:
        (B,) 抽中的下标
    """
    probs = np.atleast_2d(probs)
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(len(probs)) * cdf[:, -1]
    idx = (cdf < u[:, None]).sum(axis=-1)
    return np.minimum(idx, probs.shape[-1] - 1)


def sample_negative(dist: GeneratorDistribution, rng: np.random.Generator) -> tuple[int, float]:
    """从分布中抽一个负样本，返回 (下标, 该下标的概率 p_s)"""
    index = int(sample_indices(dist.probs[None, :], rng)[0])
    return index, float(dist.probs[index])


def batch_generator_gradient(
    model: KGEModel,
    candidates: np.ndarray,
    probs: np.ndarray,
    sampled: np.ndarray,
    advantages: np.ndarray,
) -> SparseGradient:
    """
    一批 (r_i − b) · ∇log p_{s_i} 之和

    ∇log p_s = ∇g(s) − Σ_j p_j ∇g(j)，即候选 j 的系数为 adv · (1[j = s] − p_j)。

    Args:
        model: 生成器
        candidates: (B, N, 3)
        probs: (B, N)
        sampled: (B,) 抽中的下标
        advantages: (B,) 减去基线后的奖励
    """
    onehot = np.zeros_like(probs, dtype=np.float64)
    onehot[np.arange(len(sampled)), sampled] = 1.0
    coef = np.asarray(advantages, dtype=np.float64)[:, None] * (onehot - probs)
    keep = coef != 0
    if not keep.any():
        return SparseGradient()
    cands = candidates[keep]
    return model.grad_goodness(cands[:, 0], cands[:, 1], cands[:, 2], coef[keep])


def grad_log_prob(gen: ModelParams | KGEModel, dist: GeneratorDistribution, sampled: int) -> SparseGradient:
    """∇ log p_sampled 对生成器参数的稀疏梯度"""
    return batch_generator_gradient(
        as_model(gen), dist.candidates[None], dist.probs[None], np.array([sampled]), np.array([1.0])
    )


def generator_step(
    gen: ModelParams | KGEModel,
    dist: GeneratorDistribution,
    sampled: int,
    r: float,
    b: float,
) -> SparseGradient:
    """
    单个正样本的 REINFORCE 梯度 (r − b) · ∇log p_s（需沿梯度上升）

    Args:
        gen: 生成器
        dist: 生成器分布
        sampled: 抽中的下标
        r: 奖励
        b: 基线
    """
    return batch_generator_gradient(
        as_model(gen), dist.candidates[None], dist.probs[None], np.array([sampled]), np.array([r - b])
    )


__all__ = [
    "GeneratorDistribution",
    "generator_probabilities",
    "generator_distribution",
    "sample_indices",
    "sample_negative",
    "batch_generator_gradient",
    "grad_log_prob",
    "generator_step",
]
