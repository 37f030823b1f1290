"""Unit tests for filtered ranking and metrics"""

import numpy as np
import pytest

from kgecore.core.model_registry import build_model, initialize_params
from kgecore.data.filter_index import FilterIndex
from kgecore.data.loader import Triple
from kgecore.data.sampling import Side
from kgecore.evaluation.ranking import evaluate, metrics_from_ranks, rank_triple
from kgecore.models.kinds import DistanceNorm, ModelKind
from kgecore.models.params import ModelParams

pytestmark = pytest.mark.unit


def brute_force_ranks(params: ModelParams, test: np.ndarray, known: set) -> list[int]:
    """逐个候选打分的参考实现"""
    model = build_model(params)
    n = params.num_entities
    ranks = []
    for h, r, t in test.tolist():
        for side in ("head", "tail"):
            target = float(model.goodness(h, r, t))
            better = 0
            for e in range(n):
                cand = (e, r, t) if side == "head" else (h, r, e)
                if cand == (h, r, t) or cand in known:
                    continue
                if float(model.goodness(*cand)) > target:
                    better += 1
            ranks.append(1 + better)
    return ranks


def synthetic_kg(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    triples = np.unique(
        np.column_stack([rng.integers(0, 20, 120), rng.integers(0, 3, 120), rng.integers(0, 20, 120)]),
        axis=0,
    )
    rng.shuffle(triples)
    return triples[:-15], triples[-15:]


@pytest.mark.parametrize(
    "kind, norm",
    [
        (ModelKind.TRANSE, DistanceNorm.L1),
        (ModelKind.TRANSD, DistanceNorm.L2),
        (ModelKind.DISTMULT, None),
        (ModelKind.COMPLEX, None),
    ],
)
def test_evaluate_matches_brute_force(kind, norm):
    """测试 20 实体、3 关系合成图谱上与暴力枚举完全一致"""
    rng = np.random.default_rng(17)
    train, test = synthetic_kg(rng)
    params = initialize_params(kind, 20, 3, 5, norm, rng, np.float64)
    index = FilterIndex(np.concatenate([train, test]))
    known = {tuple(x) for x in np.concatenate([train, test]).tolist()}

    report = evaluate(params, test, index)
    expected = brute_force_ranks(params, test, known)

    assert report.ranks.tolist() == expected
    assert report.count == 2 * len(test)
    mrr, hits = metrics_from_ranks(np.array(expected))
    assert report.mrr == mrr
    assert report.hits10 == hits


def _line_model() -> ModelParams:
    # 尾实体可信度 = e_t：实体 2 最好，实体 1 其次
    return ModelParams(
        kind=ModelKind.DISTMULT,
        k=1,
        tables={"entity": np.array([[1.0], [2.0], [3.0], [0.5]]), "relation": np.array([[1.0]])},
    )


def test_unique_best_tail_ranks_first():
    """测试真实尾实体唯一最优时排名为 1"""
    result = rank_triple(_line_model(), Triple(0, 0, 2), Side.TAIL, FilterIndex(np.array([[0, 0, 2]])))
    assert result.rank == 1
    assert result.ties == 0


def test_filter_removes_known_better_candidate():
    """测试唯一更优候选是已知三元组时过滤排名为 1"""
    index = FilterIndex(np.array([[0, 0, 1], [0, 0, 2]]))
    assert rank_triple(_line_model(), Triple(0, 0, 1), Side.TAIL, None).rank == 2
    assert rank_triple(_line_model(), Triple(0, 0, 1), Side.TAIL, index).rank == 1


def test_all_tied_candidates_rank_first_with_tie_count():
    """测试全部得分相同时排名为 1 并计入 ties"""
    params = ModelParams(
        kind=ModelKind.DISTMULT,
        k=2,
        tables={"entity": np.zeros((5, 2)), "relation": np.zeros((1, 2))},
    )
    result = rank_triple(params, Triple(0, 0, 1), Side.TAIL, FilterIndex(np.array([[0, 0, 1]])))
    assert result.rank == 1
    assert result.ties == 4


def test_filtered_rank_not_above_raw(rng):
    """测试过滤排名不超过未过滤排名"""
    train, test = synthetic_kg(rng)
    params = initialize_params(ModelKind.DISTMULT, 20, 3, 4, None, rng, np.float64)
    index = FilterIndex(np.concatenate([train, test]))
    for row in test.tolist():
        for side in (Side.HEAD, Side.TAIL):
            filtered = rank_triple(params, Triple(*row), side, index).rank
            raw = rank_triple(params, Triple(*row), side, None).rank
            assert 1 <= filtered <= raw <= 20


def test_rank_invariant_under_monotone_rescaling(rng):
    """测试可信度经严格单调变换（实体表乘 c>0 即可信度乘 c²）后排名不变"""
    train, test = synthetic_kg(rng)
    params = initialize_params(ModelKind.DISTMULT, 20, 3, 4, None, rng, np.float64)
    scaled = params.copy()
    scaled.tables["entity"] *= 2.0
    index = FilterIndex(np.concatenate([train, test]))
    assert evaluate(params, test, index).ranks.tolist() == evaluate(scaled, test, index).ranks.tolist()


def test_metrics_permutation_invariant(rng):
    """测试测试集顺序不影响 MRR / H@10"""
    train, test = synthetic_kg(rng)
    params = initialize_params(ModelKind.TRANSE, 20, 3, 4, DistanceNorm.L1, rng, np.float64)
    index = FilterIndex(np.concatenate([train, test]))
    a = evaluate(params, test, index)
    b = evaluate(params, test[::-1], index)
    assert a.mrr == pytest.approx(b.mrr, abs=1e-15)
    assert a.hits10 == b.hits10


def test_report_reproducible(rng):
    """测试相同参数得到完全相同的报告"""
    train, test = synthetic_kg(rng)
    params = initialize_params(ModelKind.COMPLEX, 20, 3, 4, None, rng, np.float64)
    index = FilterIndex(np.concatenate([train, test]))
    a, b = evaluate(params, test, index), evaluate(params.copy(), test, index)
    assert np.array_equal(a.ranks, b.ranks)
    assert a.mrr == b.mrr and a.ties == b.ties


@pytest.mark.parametrize(
    "ranks, mrr, hits",
    [([1, 2, 4], (1 + 0.5 + 0.25) / 3, 1.0), ([1, 11], (1 + 1 / 11) / 2, 0.5), ([10], 0.1, 1.0)],
)
def test_metrics_from_ranks(ranks, mrr, hits):
    """测试 MRR 与 H@10（阈值 10 含端点）"""
    got_mrr, got_hits = metrics_from_ranks(np.array(ranks))
    assert got_mrr == pytest.approx(mrr)
    assert got_hits == pytest.approx(hits)


def test_report_percent_and_summary():
    """测试百分制输出与 key: value 行"""
    index = FilterIndex(np.array([[0, 0, 2]]))
    report = evaluate(_line_model(), np.array([[0, 0, 2]]), index)
    mrr, hits = report.as_percent()
    assert hits == pytest.approx(100.0)
    lines = report.summary_lines("test")
    assert lines[0] == "split: test"
    assert lines[1] == f"mrr: {mrr:.2f}"
    assert any(line.startswith("hits@10: ") for line in lines)


def test_random_model_mrr_sanity(rng):
    """测试随机初始化模型的 MRR 处于随机排名量级"""
    train, test = synthetic_kg(rng)
    params = initialize_params(ModelKind.TRANSE, 20, 3, 8, DistanceNorm.L1, rng, np.float64)
    report = evaluate(params, test, FilterIndex(np.concatenate([train, test])))
    assert 1 / 20 <= report.mrr <= 0.8
