"""Adversarial training: a softmax generator proposes negatives for a distance discriminator"""

import math
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from kgecore.adversarial.generator import (
    as_model,
    batch_generator_gradient,
    generator_probabilities,
    sample_indices,
)
from kgecore.core.event_bus import EventBus
from kgecore.core.model_registry import build_model, require_role
from kgecore.data.filter_index import FilterIndex, build_filter_index
from kgecore.data.loader import Triple, TripleStore
from kgecore.data.sampling import BernStats, Side, compute_bern_stats, sample_candidate_batch
from kgecore.evaluation.ranking import EvalReport, evaluate
from kgecore.exceptions import NonFiniteGradientError, TrainingDivergedError
from kgecore.models.base import KGEModel
from kgecore.models.gradient import SparseGradient
from kgecore.models.params import PRECISION_DTYPES, ModelParams
from kgecore.schemas.config import TrainConfig
from kgecore.storage.checkpoint import Checkpoint, check_compatible
from kgecore.training.loop import (
    ValidationTracker,
    iter_minibatches,
    should_evaluate,
    validation_subset,
)
from kgecore.training.optimizer import AdamState, adam_step
from kgecore.training.pretrain import margin_batch
from kgecore.training.report import TrainReport


def discriminator_step(
    dis: ModelParams | KGEModel, positive: Triple, negative: Triple, gamma: float
) -> SparseGradient:
    """单个 (正, 负) 对的铰链损失梯度，铰链未激活时为空"""
    _, grad = margin_batch(
        as_model(dis), np.asarray([positive], dtype=np.int64), np.asarray([negative], dtype=np.int64), gamma
    )
    return grad


def discriminator_batch_gradient(
    dis: KGEModel, positives: np.ndarray, negatives: np.ndarray, gamma: float
) -> tuple[np.ndarray, SparseGradient]:
    """一批 (正, 负) 对的铰链损失与梯度之和"""
    return margin_batch(dis, positives, negatives, gamma)


def reward(dis: ModelParams | KGEModel, negative: Triple) -> float:
    """奖励 = −f_D(负样本)，越大表示负样本越难"""
    h, r, t = negative
    return -float(as_model(dis).score(h, r, t))


def batch_rewards(dis: KGEModel, negatives: np.ndarray) -> np.ndarray:
    return -np.asarray(dis.score(negatives[:, 0], negatives[:, 1], negatives[:, 2]), dtype=np.float64)


def update_baseline(r_sum: float, batch_size: int) -> float:
    """新基线 = 刚结束的 mini-batch 的平均奖励"""
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    return r_sum / batch_size


@dataclass(frozen=True)
class GeneratedNegative:
    """对抗阶段生成器抽中的一个负样本"""

    epoch: int
    positive: Triple
    side: Side
    entity: int
    probability: float
    reward: float


@dataclass(eq=False)
class AdversarialState:
    """生成器与判别器的参数、Adam 状态以及奖励基线"""

    generator: KGEModel
    gen_adam: AdamState
    discriminator: KGEModel
    dis_adam: AdamState
    baseline: float = 0.0
    r_sum: float = 0.0


@dataclass(eq=False)
class AdversarialResult:
    """对抗训练输出"""

    best: ModelParams
    final: ModelParams
    generator: ModelParams
    report: TrainReport
    test_report: EvalReport | None = None
    generated: list[GeneratedNegative] = field(default_factory=list)
    epoch_rewards: list[float] = field(default_factory=list)


def _unwrap(model: Checkpoint | ModelParams, data: TripleStore, what: str, dtype) -> ModelParams:
    if isinstance(model, Checkpoint):
        model.check_vocab(data.vocab, f"{what} checkpoint vs dataset")
        params = model.params
    else:
        check_compatible(model, data.vocab, what)
        params = model
    return params.astype(dtype)


class AdversarialTrainer:
    """对抗训练器

    每个正样本：抽 Ns 个候选，按生成器 softmax 抽一个负样本，累积判别器铰链梯度与
    生成器策略梯度；每个 mini-batch 结束后用 Adam 分别更新（判别器下降、生成器上升），
    投影判别器约束并把基线更新为该批平均奖励。
    """

    def __init__(
        self,
        generator: Checkpoint | ModelParams,
        discriminator: Checkpoint | ModelParams,
        data: TripleStore,
        cfg: TrainConfig,
        rng: np.random.Generator,
        filter_index: FilterIndex | None = None,
        bern: BernStats | None = None,
        event_bus: EventBus | None = None,
    ):
        """
        初始化对抗训练器（输入参数会被复制，不做原地修改）

        Args:
            generator: 预训练生成器（DistMult / ComplEx）
            discriminator: 预训练判别器（TransE / TransD）
            data: 三元组存储
            cfg: 训练超参数，γ 沿用预训练阶段
            rng: 随机数发生器
            filter_index: 过滤索引
            bern: bern 统计量
            event_bus: 进度事件总线

        Raises:
            ModelRoleError: 模型类型不能担任对应角色
            VocabularyMismatchError: 检查点之间或与数据集的词表不一致
        """
        require_role(generator.kind, "generator")
        require_role(discriminator.kind, "discriminator")
        if isinstance(generator, Checkpoint) and isinstance(discriminator, Checkpoint):
            generator.vocab.check_same(discriminator.vocab, "generator vs discriminator checkpoint")

        dtype = PRECISION_DTYPES[cfg.precision]
        gen_params = _unwrap(generator, data, "generator", dtype)
        dis_params = _unwrap(discriminator, data, "discriminator", dtype)

        self.data = data
        self.cfg = cfg
        self.rng = rng
        self.filter_index = filter_index or build_filter_index(data)
        self.bern = bern or compute_bern_stats(
            data.train, num_entities=data.num_entities, num_relations=data.num_relations
        )
        self.event_bus = event_bus
        self.state = AdversarialState(
            generator=build_model(gen_params),
            gen_adam=AdamState.for_params(gen_params, cfg.adam),
            discriminator=build_model(dis_params),
            dis_adam=AdamState.for_params(dis_params, cfg.adam),
        )
        self.report = TrainReport(stage="adversarial")
        self.generated: list[GeneratedNegative] = []
        self.epoch_rewards: list[float] = []

    def _should_log_generated(self, epoch: int) -> bool:
        first = max(1, self.cfg.adv_epochs - self.cfg.log_generated_epochs + 1)
        return epoch >= first and len(self.generated) < self.cfg.log_generated_max

    def train_batch(self, positives: np.ndarray, epoch: int = 0) -> tuple[float, float]:
        """
        处理一个 mini-batch

        Returns:
            (铰链损失和, 奖励和)
        """
        state, cfg = self.state, self.cfg
        gen, dis = state.generator, state.discriminator

        cands = sample_candidate_batch(positives, cfg.ns, self.bern, self.rng)
        probs = generator_probabilities(gen, cands.candidates)
        sampled = sample_indices(probs, self.rng)
        rows = np.arange(len(positives))
        negatives = cands.candidates[rows, sampled]

        losses, d_grad = discriminator_batch_gradient(dis, positives, negatives, cfg.gamma)
        rewards = batch_rewards(dis, negatives)
        state.r_sum = float(rewards.sum())
        g_grad = batch_generator_gradient(gen, cands.candidates, probs, sampled, rewards - state.baseline)

        loss = float(losses.sum())
        if not (math.isfinite(loss) and math.isfinite(state.r_sum)):
            raise TrainingDivergedError("non-finite adversarial loss or reward", self.report)
        try:
            if not d_grad.is_empty():
                touched = adam_step(dis.params, state.dis_adam, d_grad)
                dis.project_constraints(touched)
            if not g_grad.is_empty():
                adam_step(gen.params, state.gen_adam, g_grad, maximize=True)
        except NonFiniteGradientError as e:
            raise TrainingDivergedError(str(e), self.report) from e

        state.baseline = update_baseline(state.r_sum, len(positives))

        if self._should_log_generated(epoch):
            self._record_generated(epoch, cands, sampled, probs[rows, sampled], rewards)
        return loss, state.r_sum

    def _record_generated(self, epoch, cands, sampled, p_s, rewards) -> None:
        room = self.cfg.log_generated_max - len(self.generated)
        batch = []
        for i in range(min(room, len(sampled))):
            side = Side.HEAD if cands.head_side[i] else Side.TAIL
            neg = cands.candidates[i, sampled[i]]
            batch.append(
                GeneratedNegative(
                    epoch=epoch,
                    positive=Triple(*(int(x) for x in cands.positives[i])),
                    side=side,
                    entity=int(neg[0] if side is Side.HEAD else neg[2]),
                    probability=float(p_s[i]),
                    reward=float(rewards[i]),
                )
            )
        self.generated.extend(batch)
        if batch and self.event_bus is not None:
            self.event_bus.emit("adv:generated", {"epoch": epoch, "records": batch})

    def train_epoch(self, epoch: int) -> tuple[float, float]:
        """返回 (每个正样本平均损失, 平均奖励)"""
        loss_total = reward_total = 0.0
        for batch in iter_minibatches(self.data.train, self.cfg.batches_per_epoch, self.rng):
            loss, r_sum = self.train_batch(batch, epoch)
            loss_total += loss
            reward_total += r_sum
        n = len(self.data.train)
        return loss_total / n, reward_total / n

    def run(self) -> AdversarialResult:
        """
        执行 adv_epochs 轮对抗训练，第 0 轮记录预训练判别器的验证结果作为起点

        Raises:
            TrainingDivergedError: 损失、奖励或梯度非有限
        """
        cfg = self.cfg
        dis = self.state.discriminator
        tracker = ValidationTracker(
            self.report, validation_subset(self.data.valid, cfg), self.filter_index, self.event_bus
        )
        logger.info(
            f"Adversarial training: generator {self.state.generator.kind.value}, "
            f"discriminator {dis.kind.value}, {cfg.adv_epochs} epochs, Ns={cfg.ns}"
        )
        tracker.evaluate(dis, 0, float("nan"))

        for epoch in range(1, cfg.adv_epochs + 1):
            try:
                loss, mean_reward = self.train_epoch(epoch)
            except TrainingDivergedError:
                self.report.diverged = True
                logger.error(f"Adversarial training diverged at epoch {epoch}")
                raise
            self.report.epoch_losses.append(loss)
            self.epoch_rewards.append(mean_reward)
            if self.event_bus is not None:
                self.event_bus.emit(
                    "train:epoch",
                    {"stage": "adversarial", "epoch": epoch, "loss": loss, "reward": mean_reward},
                )
            logger.debug(f"[adversarial] epoch {epoch}: loss {loss:.4f}, mean reward {mean_reward:.4f}")
            if should_evaluate(epoch, cfg.eval_every_adv, cfg.adv_epochs):
                tracker.evaluate(dis, epoch, loss)

        best = tracker.best_params if tracker.best_params is not None else dis.params.copy()
        test_report = None
        if cfg.eval_test:
            test_report = evaluate(best, self.data.test, self.filter_index)
            mrr, hits = test_report.as_percent()
            logger.info(
                f"Adversarial training done: best epoch {self.report.best_epoch}, "
                f"test MRR {mrr:.2f}, H@10 {hits:.2f}"
            )
        return AdversarialResult(
            best=best,
            final=dis.params.copy(),
            generator=self.state.generator.params.copy(),
            report=self.report,
            test_report=test_report,
            generated=list(self.generated),
            epoch_rewards=list(self.epoch_rewards),
        )


def adversarial_train(
    gen_ckpt: Checkpoint | ModelParams,
    dis_ckpt: Checkpoint | ModelParams,
    data: TripleStore,
    cfg: TrainConfig,
    rng: np.random.Generator,
    **kwargs,
) -> AdversarialResult:
    """对抗训练一个判别器，参见 AdversarialTrainer"""
    return AdversarialTrainer(gen_ckpt, dis_ckpt, data, cfg, rng, **kwargs).run()


__all__ = [
    "discriminator_step",
    "discriminator_batch_gradient",
    "reward",
    "batch_rewards",
    "update_baseline",
    "GeneratedNegative",
    "AdversarialState",
    "AdversarialResult",
    "AdversarialTrainer",
    "adversarial_train",
]
