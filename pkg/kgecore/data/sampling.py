"""Bern corruption statistics and candidate negative sampling"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from kgecore.exceptions import UnknownRelationError
from kgecore.data.loader import Triple, as_triple_array


class Side(str, Enum):
    """被替换的一侧"""

    HEAD = "head"
    TAIL = "tail"


@dataclass(frozen=True, eq=False)
class BernStats:
    """每个关系的 tph / hpt 以及替换头实体的概率"""

    tph: np.ndarray
    hpt: np.ndarray
    p_replace_head: np.ndarray
    present: np.ndarray
    num_entities: int

    @property
    def num_relations(self) -> int:
        return len(self.present)

    def p_head(self, relation: int) -> float:
        """
        查询单个关系替换头实体的概率

        Raises:
            UnknownRelationError: 关系未在训练集中出现
        """
        self._check(np.asarray([relation]))
        return float(self.p_replace_head[relation])

    def p_head_batch(self, relations: np.ndarray) -> np.ndarray:
        relations = np.asarray(relations, dtype=np.int64)
        self._check(relations)
        return self.p_replace_head[relations]

    def _check(self, relations: np.ndarray) -> None:
        bad = (relations < 0) | (relations >= self.num_relations)
        if not bad.any():
            bad = ~self.present[relations]
        if bad.any():
            raise UnknownRelationError(
                f"relation id {int(relations[bad][0])} does not appear in the training split"
            )


def compute_bern_stats(
    train: np.ndarray, num_entities: int | None = None, num_relations: int | None = None
) -> BernStats:
    """
    计算 bern 采样统计量（只使用训练集）

    tph = 关系下不同 (h, t) 对的数量 / 不同头实体数量，hpt 对称；
    p_replace_head = tph / (tph + hpt)。

    Args:
        train: 训练三元组 (n, 3)
        num_entities: 实体总数（含只出现在 valid/test 中的实体），默认取最大编号 + 1
        num_relations: 关系总数，默认取最大编号 + 1

    Returns:
        bern 统计量
    """
    train = as_triple_array(train)
    if len(train) == 0:
        raise ValueError("cannot compute bern statistics on an empty training split")
    n_rel = num_relations if num_relations is not None else int(train[:, 1].max()) + 1
    n_ent = (
        num_entities
        if num_entities is not None
        else int(max(train[:, 0].max(), train[:, 2].max())) + 1
    )

    distinct = np.unique(train, axis=0)
    n_pairs = np.bincount(distinct[:, 1], minlength=n_rel).astype(np.float64)
    heads = np.unique(distinct[:, [0, 1]], axis=0)
    tails = np.unique(distinct[:, [1, 2]], axis=0)
    n_heads = np.bincount(heads[:, 1], minlength=n_rel).astype(np.float64)
    n_tails = np.bincount(tails[:, 0], minlength=n_rel).astype(np.float64)

    present = n_pairs > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        tph = np.where(present, n_pairs / n_heads, np.nan)
        hpt = np.where(present, n_pairs / n_tails, np.nan)
        p_head = tph / (tph + hpt)
    return BernStats(tph=tph, hpt=hpt, p_replace_head=p_head, present=present, num_entities=n_ent)


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """一个正样本及其 Ns 个只在同一侧被替换的候选负样本"""

    positive: Triple
    side: Side
    candidates: np.ndarray

    def __len__(self) -> int:
        return len(self.candidates)

    @property
    def replacements(self) -> np.ndarray:
        """候选中替换进来的实体编号"""
        col = 0 if self.side is Side.HEAD else 2
        return self.candidates[:, col]


@dataclass(frozen=True, eq=False)
class CandidateBatch:
    """一个 mini-batch 的候选集合，candidates 形状为 (B, Ns, 3)"""

    positives: np.ndarray
    head_side: np.ndarray
    candidates: np.ndarray

    def __len__(self) -> int:
        return len(self.positives)

    @property
    def ns(self) -> int:
        return self.candidates.shape[1]

    def __getitem__(self, i: int) -> CandidateSet:
        return CandidateSet(
            positive=Triple(*(int(x) for x in self.positives[i])),
            side=Side.HEAD if self.head_side[i] else Side.TAIL,
            candidates=self.candidates[i],
        )


def sample_candidate_batch(
    positives: np.ndarray, ns: int, bern: BernStats, rng: np.random.Generator
) -> CandidateBatch:
    """
    对一批正样本按 bern 概率选择替换侧，并均匀独立地抽取 Ns 个替换实体

    候选不与已知真三元组做过滤，原实体也可能被抽到。

    Args:
        positives: 正样本 (B, 3)
        ns: 每个正样本的候选数
        bern: bern 统计量
        rng: NumPy 随机数发生器（保证可重复）
    """
    if ns < 1:
        raise ValueError(f"ns must be >= 1, got {ns}")
    if bern.num_entities < 2:
        raise ValueError("candidate sampling needs at least 2 entities")
    positives = as_triple_array(positives)
    batch = len(positives)

    head_side = rng.random(batch) < bern.p_head_batch(positives[:, 1])
    replacements = rng.integers(0, bern.num_entities, size=(batch, ns), dtype=np.int64)

    candidates = np.repeat(positives[:, None, :], ns, axis=1)
    candidates[head_side, :, 0] = replacements[head_side]
    candidates[~head_side, :, 2] = replacements[~head_side]
    return CandidateBatch(positives=positives, head_side=head_side, candidates=candidates)


def sample_candidates(
    positive: Triple, ns: int, bern: BernStats, rng: np.random.Generator
) -> CandidateSet:
    """为单个正样本抽取候选集合"""
    return sample_candidate_batch(as_triple_array([positive]), ns, bern, rng)[0]


__all__ = [
    "Side",
    "BernStats",
    "CandidateSet",
    "CandidateBatch",
    "compute_bern_stats",
    "sample_candidates",
    "sample_candidate_batch",
]
