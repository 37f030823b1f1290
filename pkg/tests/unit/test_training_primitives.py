"""Unit tests for losses, lazy Adam and training bookkeeping"""

import math

import numpy as np
import pytest

from kgecore.exceptions import NonFiniteGradientError
from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import ModelKind
from kgecore.models.params import ModelParams
from kgecore.schemas.config import AdamConfig, TrainConfig
from kgecore.training.losses import (
    log_softmax_grad,
    log_softmax_loss,
    marginal_loss,
    marginal_loss_grad,
    softmax,
)
from kgecore.training.loop import batch_size_for, iter_minibatches, should_evaluate, validation_subset
from kgecore.training.optimizer import AdamState, adam_step
from kgecore.training.report import EvalPoint, TrainReport

pytestmark = pytest.mark.unit


def _scalar_params(value: float = 0.0) -> ModelParams:
    return ModelParams(
        kind=ModelKind.DISTMULT,
        k=1,
        tables={"entity": np.array([[value], [value]]), "relation": np.array([[value]])},
    )


def _grad(value: float, row: int = 0) -> SparseGradient:
    g = SparseGradient()
    g.add("entity", np.array([row]), np.array([[value]]))
    return g


# ---------- 间隔损失 ----------


@pytest.mark.parametrize(
    "f_pos, f_neg, gamma, expected",
    [(0.0, 2.0, 3.0, 1.0), (0.0, 5.0, 3.0, 0.0), (1.5, 1.5, 2.0, 2.0)],
)
def test_marginal_loss(f_pos, f_neg, gamma, expected):
    """测试间隔损失"""
    assert float(marginal_loss(f_pos, f_neg, gamma)) == pytest.approx(expected)


def test_marginal_loss_gradient_flows_only_when_active():
    """测试只有铰链激活时有梯度"""
    d_pos, d_neg = marginal_loss_grad(np.array([0.0, 0.0]), np.array([2.0, 5.0]), 3.0)
    assert d_pos.tolist() == [1.0, 0.0]
    assert d_neg.tolist() == [-1.0, 0.0]


def test_marginal_loss_nonnegative(rng):
    """测试间隔损失非负且仅在 f_neg ≥ f_pos + γ 时为 0"""
    f_pos, f_neg = rng.random(1000) * 5, rng.random(1000) * 5
    loss = marginal_loss(f_pos, f_neg, 1.0)
    assert np.all(loss >= 0)
    assert np.array_equal(loss == 0, f_neg >= f_pos + 1.0)


# ---------- log-softmax ----------


def test_log_softmax_loss_values():
    """测试 log-softmax 损失取值"""
    assert log_softmax_loss(0.0, np.array([0.0])) == pytest.approx(math.log(2))
    assert log_softmax_loss(1.0, np.array([0.0, 0.0])) == pytest.approx(
        -math.log(math.e / (math.e + 2)), abs=1e-6
    )
    assert log_softmax_loss(1000.0, np.array([0.0, 0.0])) == pytest.approx(0.0, abs=1e-12)


def test_log_softmax_no_overflow():
    """测试大得分不会溢出"""
    loss = log_softmax_loss(5000.0, np.array([4999.0]))
    assert math.isfinite(loss)
    assert loss == pytest.approx(math.log(1 + math.exp(-1)))


def test_log_softmax_shift_invariant(rng):
    """测试所有得分加常数后损失不变"""
    pos, negs = rng.normal(), rng.normal(size=7)
    assert abs(log_softmax_loss(pos + 3.7, negs + 3.7) - log_softmax_loss(pos, negs)) <= 1e-12


def test_log_softmax_requires_negatives():
    """测试负样本不能为空"""
    with pytest.raises(ValueError):
        log_softmax_loss(0.0, np.array([]))


def test_log_softmax_gradient_matches_finite_differences(rng):
    """测试 log-softmax 梯度与中心差分一致（100 个随机实例）"""
    eps = 1e-5
    for _ in range(100):
        pos, negs = rng.normal(), rng.normal(size=5)
        d_pos, d_negs = log_softmax_grad(pos, negs)
        num_pos = (log_softmax_loss(pos + eps, negs) - log_softmax_loss(pos - eps, negs)) / (2 * eps)
        assert float(d_pos) == pytest.approx(num_pos, rel=1e-4, abs=1e-8)
        for j in range(5):
            up, down = negs.copy(), negs.copy()
            up[j] += eps
            down[j] -= eps
            num = (log_softmax_loss(pos, up) - log_softmax_loss(pos, down)) / (2 * eps)
            assert float(d_negs[j]) == pytest.approx(num, rel=1e-4, abs=1e-8)


def test_log_softmax_batched():
    """测试批量形式与逐个计算一致"""
    pos = np.array([0.5, -1.0])
    negs = np.array([[0.0, 1.0], [2.0, -3.0]])
    batched = log_softmax_loss(pos, negs)
    assert batched.shape == (2,)
    for i in range(2):
        assert batched[i] == pytest.approx(log_softmax_loss(pos[i], negs[i]))


def test_softmax_sums_to_one(rng):
    """测试 softmax 和为 1"""
    p = softmax(rng.normal(size=(4, 20)) * 50)
    np.testing.assert_allclose(p.sum(axis=-1), 1.0, atol=1e-12)


# ---------- Adam ----------


def test_adam_first_step_moves_by_lr():
    """测试第一步更新量约为 −α"""
    params = _scalar_params()
    state = AdamState.for_params(params)
    adam_step(params, state, _grad(1.0))
    assert params.tables["entity"][0, 0] == pytest.approx(-0.001, rel=1e-6)
    assert state.t == 1


def test_adam_first_step_sign():
    """测试第一步方向为 −sign(g)"""
    params = _scalar_params()
    state = AdamState.for_params(params)
    adam_step(params, state, _grad(-250.0))
    assert params.tables["entity"][0, 0] > 0


def test_adam_untouched_rows_unchanged():
    """测试未出现的行及其矩估计不变"""
    params = _scalar_params(0.5)
    state = AdamState.for_params(params)
    adam_step(params, state, _grad(1.0, row=0))
    assert params.tables["entity"][1, 0] == 0.5
    assert state.m["entity"][1, 0] == 0.0
    assert state.v["entity"][1, 0] == 0.0
    assert params.tables["relation"][0, 0] == 0.5


def test_adam_zero_gradient_no_change():
    """测试零梯度在零矩上不改变参数"""
    params = _scalar_params(0.5)
    state = AdamState.for_params(params)
    adam_step(params, state, _grad(0.0))
    assert params.tables["entity"][0, 0] == 0.5


def test_adam_constant_gradient_monotone_decrease():
    """测试恒定梯度下参数单调下降"""
    params = _scalar_params()
    state = AdamState.for_params(params)
    values = []
    for _ in range(1000):
        adam_step(params, state, _grad(1.0))
        values.append(params.tables["entity"][0, 0])
    assert np.all(np.diff(values) < 0)
    assert np.all(state.v["entity"] >= 0)


def test_adam_maximize_ascends():
    """测试 maximize=True 时沿梯度上升"""
    params = _scalar_params()
    state = AdamState.for_params(params)
    adam_step(params, state, _grad(1.0), maximize=True)
    assert params.tables["entity"][0, 0] == pytest.approx(0.001, rel=1e-6)


def test_adam_merges_repeated_rows():
    """测试同一行多次出现时先求和"""
    params = _scalar_params()
    state = AdamState.for_params(params, AdamConfig(lr=0.1))
    g = _grad(1.0)
    g.extend(_grad(2.0))
    rows = adam_step(params, state, g)
    assert rows["entity"].tolist() == [0]
    assert state.m["entity"][0, 0] == pytest.approx(0.1 * 3.0)


def test_adam_rejects_non_finite_without_mutation():
    """测试非有限梯度报错且不修改状态"""
    params = _scalar_params(0.5)
    state = AdamState.for_params(params)
    with pytest.raises(NonFiniteGradientError):
        adam_step(params, state, _grad(float("nan")))
    assert state.t == 0
    assert params.tables["entity"][0, 0] == 0.5


# ---------- 训练记录与批次 ----------


def test_report_tracks_best_epoch():
    """测试最佳轮次为最大验证 MRR，平局保留较早的轮次"""
    report = TrainReport(stage="pretrain")
    assert report.record(EvalPoint(10, 0.2, 0.4, 1.0))
    assert report.record(EvalPoint(20, 0.3, 0.5, 0.8))
    assert not report.record(EvalPoint(30, 0.3, 0.6, 0.7))
    assert not report.record(EvalPoint(40, 0.1, 0.2, 0.6))
    assert report.best_epoch == 20
    assert report.best_point.mrr == max(p.mrr for p in report.points)


def test_minibatches_cover_training_set(rng):
    """测试每轮的 mini-batch 恰好覆盖训练集"""
    train = np.arange(30).repeat(3).reshape(-1, 3)
    batches = list(iter_minibatches(train, 4, rng))
    assert batch_size_for(30, 4) == 8
    assert [len(b) for b in batches] == [8, 8, 8, 6]
    assert sorted(np.concatenate(batches)[:, 0].tolist()) == list(range(30))


def test_should_evaluate():
    """测试验证时机：间隔整除或最后一轮"""
    assert should_evaluate(50, 50, 1000)
    assert not should_evaluate(51, 50, 1000)
    assert should_evaluate(7, 50, 7)


def test_validation_subset():
    """测试验证集抽样上限"""
    valid = np.arange(60).reshape(-1, 3)
    assert len(validation_subset(valid, TrainConfig())) == 20
    sub = validation_subset(valid, TrainConfig(valid_sample=5))
    assert len(sub) == 5
    assert np.array_equal(sub, validation_subset(valid, TrainConfig(valid_sample=5)))
