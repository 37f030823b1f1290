"""Unit tests for triple loading, filter index and bern sampling"""

from pathlib import Path

import numpy as np
import pytest

from kgecore.data.filter_index import FilterIndex, build_filter_index
from kgecore.data.loader import Triple, TripleStore, load_dataset, load_triples
from kgecore.data.sampling import Side, compute_bern_stats, sample_candidate_batch, sample_candidates
from kgecore.data.vocabulary import Vocabulary, VocabularyBuilder
from kgecore.exceptions import (
    DatasetNotFoundError,
    EmptyTripleFileError,
    TripleFormatError,
    UnknownRelationError,
    VocabularyMismatchError,
)

pytestmark = pytest.mark.unit


def _write(path: Path, text: str) -> Path:
    path.write_text(text, encoding="utf-8")
    return path


def test_load_single_line_assigns_first_appearance_ids(tmp_path: Path):
    """测试首次出现顺序分配编号"""
    builder = VocabularyBuilder()
    triples = load_triples(_write(tmp_path / "t.txt", "a\tr\tb\n"), builder)

    assert triples.tolist() == [[0, 0, 1]]
    vocab = builder.build()
    assert vocab.entity_names == ("a", "b")
    assert vocab.relation_names == ("r",)


def test_load_skips_blank_lines(tmp_path: Path):
    """测试空行不计入三元组"""
    builder = VocabularyBuilder()
    triples = load_triples(_write(tmp_path / "t.txt", "a\tr\tb\n\n  \nb\tr\tc\n"), builder)
    assert len(triples) == 2


def test_malformed_line_reports_line_number(tmp_path: Path):
    """测试字段数错误时给出行号"""
    path = _write(tmp_path / "bad.txt", "a\tb\n")
    with pytest.raises(TripleFormatError) as exc:
        load_triples(path, VocabularyBuilder())
    assert exc.value.line_no == 1
    assert ":1:" in str(exc.value)


def test_malformed_later_line(tmp_path: Path):
    """测试第三行出错"""
    path = _write(tmp_path / "bad.txt", "a\tr\tb\nb\tr\tc\na\tr\tb\tx\n")
    with pytest.raises(TripleFormatError) as exc:
        load_triples(path, VocabularyBuilder())
    assert exc.value.line_no == 3


def test_empty_file_rejected(tmp_path: Path):
    """测试空文件报错"""
    with pytest.raises(EmptyTripleFileError):
        load_triples(_write(tmp_path / "empty.txt", "\n\n"), VocabularyBuilder())


def test_missing_dataset_dir(tmp_path: Path):
    """测试数据集目录不存在"""
    with pytest.raises(DatasetNotFoundError):
        load_dataset(tmp_path / "nope")


def test_missing_split_file(tmp_path: Path):
    """测试缺少划分文件"""
    d = tmp_path / "ds"
    d.mkdir()
    _write(d / "train.txt", "a\tr\tb\n")
    _write(d / "valid.txt", "a\tr\tb\n")
    with pytest.raises(DatasetNotFoundError):
        load_dataset(d)


def test_dataset_sizes_and_dense_ids(toy_store: TripleStore):
    """测试划分大小与编号稠密"""
    assert toy_store.sizes() == {"train": 48, "valid": 6, "test": 6}
    assert toy_store.num_entities == 20
    assert toy_store.num_relations == 3
    all_triples = np.concatenate([toy_store.train, toy_store.valid, toy_store.test])
    assert set(all_triples[:, [0, 2]].ravel().tolist()) == set(range(20))
    assert set(all_triples[:, 1].tolist()) == set(range(3))


def test_vocabulary_round_trip(toy_store: TripleStore):
    """测试名称与编号互相转换"""
    vocab = toy_store.vocab
    for i, name in enumerate(vocab.entity_names):
        assert vocab.entity_id(name) == i
        assert vocab.entity_name(i) == name
    for i, name in enumerate(vocab.relation_names):
        assert vocab.relation_id(vocab.relation_name(i)) == i


def test_splits_are_read_only(toy_store: TripleStore):
    """测试划分数组不可写"""
    with pytest.raises(ValueError):
        toy_store.train[0, 0] = 5


def test_frozen_vocabulary_rejects_new_names(tmp_path: Path):
    """测试冻结词表遇到新名称报错"""
    base = Vocabulary.from_names(["a", "b"], ["r"])
    builder = VocabularyBuilder(base=base, frozen=True)
    with pytest.raises(VocabularyMismatchError):
        load_triples(_write(tmp_path / "t.txt", "a\tr\tc\n"), builder)


def test_vocabulary_check_same():
    """测试词表一致性检查"""
    a = Vocabulary.from_names(["x", "y"], ["r"])
    a.check_same(Vocabulary.from_names(["x", "y"], ["r"]))
    with pytest.raises(VocabularyMismatchError):
        a.check_same(Vocabulary.from_names(["y", "x"], ["r"]))


def test_filter_index_union():
    """测试过滤索引为各划分的并集"""
    store = TripleStore(
        train=np.array([[0, 0, 1]]),
        valid=np.zeros((0, 3), dtype=np.int64),
        test=np.array([[0, 0, 2]]),
        vocab=Vocabulary.from_names(["a", "b", "c", "d"], ["r"]),
    )
    index = build_filter_index(store)
    assert (0, 0, 1) in index
    assert (0, 0, 2) in index
    assert (0, 0, 3) not in index
    assert len(index) == 2
    assert index.known_tails(0, 0).tolist() == [1, 2]
    assert index.known_heads(0, 2).tolist() == [0]
    assert index.known_heads(0, 3).tolist() == []


def test_filter_index_agrees_with_linear_scan(toy_store: TripleStore, rng):
    """测试随机探测与线性扫描一致"""
    index = build_filter_index(toy_store)
    known = {
        tuple(row)
        for split in (toy_store.train, toy_store.valid, toy_store.test)
        for row in split.tolist()
    }
    probes = np.column_stack(
        [rng.integers(0, 20, 1000), rng.integers(0, 3, 1000), rng.integers(0, 20, 1000)]
    )
    for probe in probes.tolist():
        assert (tuple(probe) in index) == (tuple(probe) in known)


@pytest.mark.parametrize(
    "triples, tph, hpt, p",
    [
        ([(0, 0, 10), (0, 0, 11), (1, 0, 10)], 1.5, 1.5, 0.5),
        ([(0, 0, 10), (0, 0, 11), (0, 0, 12)], 3.0, 1.0, 0.75),
        ([(0, 0, 1), (2, 0, 3), (4, 0, 5)], 1.0, 1.0, 0.5),
    ],
)
def test_bern_statistics(triples, tph, hpt, p):
    """测试 bern 统计量"""
    stats = compute_bern_stats(np.array(triples))
    assert stats.tph[0] == pytest.approx(tph)
    assert stats.hpt[0] == pytest.approx(hpt)
    assert stats.p_head(0) == pytest.approx(p)


def test_bern_ignores_duplicate_triples():
    """测试重复三元组不影响统计"""
    stats = compute_bern_stats(np.array([(0, 0, 1), (0, 0, 1), (0, 0, 2)]))
    assert stats.tph[0] == pytest.approx(2.0)


def test_bern_unknown_relation():
    """测试查询训练集中不存在的关系"""
    stats = compute_bern_stats(np.array([(0, 1, 1)]), num_entities=2, num_relations=3)
    with pytest.raises(UnknownRelationError):
        stats.p_head(0)
    with pytest.raises(UnknownRelationError):
        stats.p_head(5)


def test_candidates_share_relation_and_kept_side(rng):
    """测试候选只在替换侧不同"""
    stats = compute_bern_stats(np.array([(0, 0, 1), (1, 0, 2), (2, 0, 3)]), num_entities=10)
    cands = sample_candidates(Triple(0, 0, 1), 20, stats, rng)
    assert len(cands) == 20
    assert np.all(cands.candidates[:, 1] == 0)
    if cands.side is Side.HEAD:
        assert np.all(cands.candidates[:, 2] == 1)
    else:
        assert np.all(cands.candidates[:, 0] == 0)
    assert cands.replacements.min() >= 0 and cands.replacements.max() < 10


def test_two_entity_graph_allows_repeats(rng):
    """测试 |E|=2 时候选可以重复"""
    stats = compute_bern_stats(np.array([(0, 0, 1)]), num_entities=2)
    cands = sample_candidates(Triple(0, 0, 1), 3, stats, rng)
    assert set(cands.replacements.tolist()) <= {0, 1}


def test_candidate_sampling_deterministic():
    """测试固定种子可复现"""
    stats = compute_bern_stats(np.array([(0, 0, 1), (1, 0, 2)]), num_entities=5)
    positives = np.array([(0, 0, 1), (1, 0, 2)])
    a = sample_candidate_batch(positives, 4, stats, np.random.default_rng(3))
    b = sample_candidate_batch(positives, 4, stats, np.random.default_rng(3))
    assert np.array_equal(a.candidates, b.candidates)
    assert np.array_equal(a.head_side, b.head_side)


def test_head_side_frequency():
    """测试 p_replace_head=0.75 时头侧替换频率在 3σ 内"""
    stats = compute_bern_stats(np.array([(0, 0, 10), (0, 0, 11), (0, 0, 12)]), num_entities=13)
    positives = np.tile(np.array([[0, 0, 10]]), (10_000, 1))
    batch = sample_candidate_batch(positives, 1, stats, np.random.default_rng(0))
    freq = batch.head_side.mean()
    assert 0.72 <= freq <= 0.78


def test_sampling_rejects_bad_ns(rng):
    """测试 Ns 必须为正"""
    stats = compute_bern_stats(np.array([(0, 0, 1)]), num_entities=3)
    with pytest.raises(ValueError):
        sample_candidates(Triple(0, 0, 1), 0, stats, rng)


def test_filter_index_accepts_duplicates():
    """测试跨划分重复三元组只计一次"""
    index = FilterIndex(np.array([(0, 0, 1), (0, 0, 1)]))
    assert len(index) == 1
