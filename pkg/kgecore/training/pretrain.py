"""Pre-training of a single embedding model with early stopping"""

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger

from kgecore.core.event_bus import EventBus
from kgecore.core.model_registry import build_model, initialize_params
from kgecore.data.filter_index import FilterIndex, build_filter_index
from kgecore.data.loader import TripleStore
from kgecore.data.sampling import BernStats, compute_bern_stats, sample_candidate_batch
from kgecore.evaluation.ranking import EvalReport, evaluate
from kgecore.exceptions import NonFiniteGradientError, TrainingDivergedError
from kgecore.models.base import KGEModel
from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import ModelKind
from kgecore.models.params import PRECISION_DTYPES, ModelParams
from kgecore.schemas.config import TrainConfig
from kgecore.training.losses import (
    log_softmax_grad,
    log_softmax_loss,
    marginal_loss,
    marginal_loss_grad,
)
from kgecore.training.loop import (
    ValidationTracker,
    iter_minibatches,
    should_evaluate,
    validation_subset,
)
from kgecore.training.optimizer import AdamState, adam_step
from kgecore.training.report import TrainReport


@dataclass(eq=False)
class PretrainResult:
    """预训练输出：验证集最佳参数、最后一轮参数与学习曲线"""

    best: ModelParams
    final: ModelParams
    report: TrainReport
    test_report: EvalReport | None = None


def margin_batch(
    model: KGEModel, positives: np.ndarray, negatives: np.ndarray, gamma: float
) -> tuple[np.ndarray, SparseGradient]:
    """
    一批 (正, 负) 对的间隔损失及其梯度，只包含铰链激活的三元组

    Returns:
        (每对的损失, 稀疏梯度)
    """
    f_pos = model.score(positives[:, 0], positives[:, 1], positives[:, 2])
    f_neg = model.score(negatives[:, 0], negatives[:, 1], negatives[:, 2])
    losses = marginal_loss(f_pos, f_neg, gamma)
    d_pos, d_neg = marginal_loss_grad(f_pos, f_neg, gamma)

    grad = SparseGradient()
    active = d_pos != 0
    if active.any():
        pos, neg = positives[active], negatives[active]
        grad.extend(model.grad_score(pos[:, 0], pos[:, 1], pos[:, 2], d_pos[active]))
        grad.extend(model.grad_score(neg[:, 0], neg[:, 1], neg[:, 2], d_neg[active]))
    return losses, grad


def softmax_batch(
    model: KGEModel, positives: np.ndarray, candidates: np.ndarray
) -> tuple[np.ndarray, SparseGradient]:
    """
    一批正样本对各自 N 个负样本的 log-softmax 损失及其梯度

    Args:
        positives: (B, 3)
        candidates: (B, N, 3)
    """
    g_pos = model.goodness(positives[:, 0], positives[:, 1], positives[:, 2])
    g_neg = model.goodness(candidates[..., 0], candidates[..., 1], candidates[..., 2])
    losses = log_softmax_loss(g_pos, g_neg)
    d_pos, d_neg = log_softmax_grad(g_pos, g_neg)

    grad = model.grad_goodness(positives[:, 0], positives[:, 1], positives[:, 2], d_pos)
    grad.extend(
        model.grad_goodness(candidates[..., 0], candidates[..., 1], candidates[..., 2], d_neg)
    )
    return np.atleast_1d(losses), grad


def regularization_loss(model: KGEModel, touched: dict[str, np.ndarray], lam: float) -> float:
    """惰性正则项 λ Σ‖row‖²（按行出现次数计），仅用于损失汇报"""
    if not model.regularized or lam == 0:
        return 0.0
    total = 0.0
    for name, rows in touched.items():
        values = model.table(name)[rows]
        total += float((values.astype(np.float64) ** 2).sum())
    return lam * total


class Pretrainer:
    """单模型预训练器

    平移模型使用间隔损失与 1:1 bern 负采样并在每步后投影约束；
    softmax 模型使用 log-softmax 损失、Ns_pretrain 个负样本与惰性 L2 正则。
    """

    def __init__(
        self,
        kind: ModelKind,
        data: TripleStore,
        cfg: TrainConfig,
        rng: np.random.Generator,
        filter_index: FilterIndex | None = None,
        bern: BernStats | None = None,
        event_bus: EventBus | None = None,
        params: ModelParams | None = None,
    ):
        """
        初始化预训练器

        Args:
            kind: 模型类型
            data: 三元组存储
            cfg: 训练超参数
            rng: 随机数发生器（初始化、打乱与采样共用，保证可复现）
            filter_index: 过滤索引，默认由 data 构建
            bern: bern 统计量，默认由训练集计算
            event_bus: 进度事件总线
            params: 初始参数，默认随机初始化
        """
        self.kind = kind
        self.data = data
        self.cfg = cfg
        self.rng = rng
        self.filter_index = filter_index or build_filter_index(data)
        self.bern = bern or compute_bern_stats(
            data.train, num_entities=data.num_entities, num_relations=data.num_relations
        )
        self.event_bus = event_bus

        dtype = PRECISION_DTYPES[cfg.precision]
        if params is None:
            params = initialize_params(
                kind,
                data.num_entities,
                data.num_relations,
                cfg.k,
                cfg.norm if kind.is_distance else None,
                rng,
                dtype,
            )
        self.model = build_model(params)
        self.adam = AdamState.for_params(params, cfg.adam)
        self.report = TrainReport(stage="pretrain")

    @property
    def params(self) -> ModelParams:
        return self.model.params

    def train_batch(self, positives: np.ndarray) -> float:
        """对一个 mini-batch 计算梯度并做一次 Adam 更新，返回损失和"""
        if self.model.is_distance:
            cands = sample_candidate_batch(positives, 1, self.bern, self.rng)
            losses, grad = margin_batch(
                self.model, positives, cands.candidates[:, 0, :], self.cfg.gamma
            )
            loss = float(losses.sum())
        else:
            cands = sample_candidate_batch(positives, self.cfg.ns_pretrain, self.bern, self.rng)
            losses, grad = softmax_batch(self.model, positives, cands.candidates)
            touched = grad.touched()
            grad.extend(self.model.l2_reg_gradient(touched, self.cfg.reg_lambda))
            loss = float(losses.sum()) + regularization_loss(self.model, touched, self.cfg.reg_lambda)

        if not math.isfinite(loss):
            raise TrainingDivergedError("non-finite pre-training loss", self.report)
        if grad.is_empty():
            return loss
        try:
            rows = adam_step(self.params, self.adam, grad)
        except NonFiniteGradientError as e:
            raise TrainingDivergedError(str(e), self.report) from e
        self.model.project_constraints(rows)
        return loss

    def train_epoch(self) -> float:
        """训练一轮，返回每个正样本的平均损失"""
        total = 0.0
        for batch in iter_minibatches(self.data.train, self.cfg.batches_per_epoch, self.rng):
            total += self.train_batch(batch)
        return total / len(self.data.train)

    def run(self) -> PretrainResult:
        """
        执行全部预训练轮次，按验证 MRR 保留最佳参数

        Raises:
            TrainingDivergedError: 损失或梯度非有限，携带已记录的训练报告
        """
        cfg = self.cfg
        tracker = ValidationTracker(
            self.report, validation_subset(self.data.valid, cfg), self.filter_index, self.event_bus
        )
        logger.info(
            f"Pre-training {self.kind.value}: {cfg.pretrain_epochs} epochs x "
            f"{cfg.batches_per_epoch} batches, k={cfg.k}"
        )
        for epoch in range(1, cfg.pretrain_epochs + 1):
            try:
                loss = self.train_epoch()
            except TrainingDivergedError:
                self.report.diverged = True
                logger.error(f"Pre-training diverged at epoch {epoch}")
                raise
            self.report.epoch_losses.append(loss)
            if self.event_bus is not None:
                self.event_bus.emit("train:epoch", {"stage": "pretrain", "epoch": epoch, "loss": loss})
            if should_evaluate(epoch, cfg.eval_every_pretrain, cfg.pretrain_epochs):
                tracker.evaluate(self.model, epoch, loss)

        best = tracker.best_params if tracker.best_params is not None else self.params.copy()
        test_report = None
        if cfg.eval_test:
            test_report = evaluate(best, self.data.test, self.filter_index)
            mrr, hits = test_report.as_percent()
            logger.info(f"Pre-training done: best epoch {self.report.best_epoch}, test MRR {mrr:.2f}, H@10 {hits:.2f}")
        return PretrainResult(
            best=best, final=self.params.copy(), report=self.report, test_report=test_report
        )


def pretrain(
    kind: ModelKind,
    data: TripleStore,
    cfg: TrainConfig,
    rng: np.random.Generator,
    **kwargs,
) -> PretrainResult:
    """预训练一个模型，参见 Pretrainer"""
    return Pretrainer(kind, data, cfg, rng, **kwargs).run()


__all__ = [
    "PretrainResult",
    "Pretrainer",
    "pretrain",
    "margin_batch",
    "softmax_batch",
    "regularization_loss",
]
