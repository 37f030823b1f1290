"""Triple file loading and the split store"""

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from loguru import logger

from kgecore.exceptions import DatasetNotFoundError, EmptyTripleFileError, TripleFormatError
from kgecore.data.vocabulary import Vocabulary, VocabularyBuilder

SPLITS = ("train", "valid", "test")


class Triple(NamedTuple):
    """(头实体编号, 关系编号, 尾实体编号)"""

    h: int
    r: int
    t: int


def as_triple_array(triples) -> np.ndarray:
    """将三元组序列规范为 (n, 3) 的 int64 数组"""
    arr = np.asarray(triples, dtype=np.int64)
    return arr.reshape(-1, 3)


def load_triples(path: str | Path, vocab: VocabularyBuilder) -> np.ndarray:
    """
    读取 UTF-8 制表符分隔的三元组文件

    Args:
        path: 文件路径，每个非空行为 head<TAB>relation<TAB>tail
        vocab: 词表构建器，新名称按首次出现顺序分配编号

    Returns:
        (n, 3) int64 数组，n 等于非空行数

    Raises:
        DatasetNotFoundError: 文件不存在
        TripleFormatError: 某行字段数不为 3
        EmptyTripleFileError: 文件没有非空行
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetNotFoundError(f"Triple file not found: {path}")

    rows: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise TripleFormatError(path, line_no, line)
            head, rel, tail = (x.strip() for x in fields)
            rows.append((vocab.entity(head), vocab.relation(rel), vocab.entity(tail)))

    if not rows:
        raise EmptyTripleFileError(f"No triples in {path}")
    return np.asarray(rows, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class TripleStore:
    """train / valid / test 三个划分及其共享词表"""

    train: np.ndarray
    valid: np.ndarray
    test: np.ndarray
    vocab: Vocabulary

    def __post_init__(self) -> None:
        for name in SPLITS:
            arr = as_triple_array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_entities(self) -> int:
        return self.vocab.num_entities

    @property
    def num_relations(self) -> int:
        return self.vocab.num_relations

    def split(self, name: str) -> np.ndarray:
        if name not in SPLITS:
            raise ValueError(f"unknown split {name!r}, expected one of {SPLITS}")
        return getattr(self, name)

    def sizes(self) -> dict[str, int]:
        return {name: len(self.split(name)) for name in SPLITS}


def load_dataset(
    directory: str | Path, vocab: Vocabulary | None = None, frozen: bool = False
) -> TripleStore:
    """
    加载数据集目录下的 train.txt / valid.txt / test.txt

    Args:
        directory: 数据集目录
        vocab: 预置词表（如来自检查点），None 表示从零构建
        frozen: 为 True 时数据集出现预置词表之外的名称即报错

    Returns:
        三个划分的三元组存储
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetNotFoundError(f"Dataset directory not found: {directory}")
    missing = [s for s in SPLITS if not (directory / f"{s}.txt").is_file()]
    if missing:
        raise DatasetNotFoundError(f"Missing split files in {directory}: {missing}")

    builder = VocabularyBuilder(base=vocab, frozen=frozen)
    splits = {s: load_triples(directory / f"{s}.txt", builder) for s in SPLITS}
    store = TripleStore(vocab=builder.build(), **splits)
    logger.info(
        f"Loaded {directory}: {store.num_entities} entities, {store.num_relations} relations, "
        f"splits {store.sizes()}"
    )
    return store


__all__ = ["Triple", "TripleStore", "SPLITS", "as_triple_array", "load_triples", "load_dataset"]
