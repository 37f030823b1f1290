"""Test configuration"""

from pathlib import Path

import numpy as np
import pytest

from kgecore.core.event_bus import EventBus
from kgecore.core.model_registry import initialize_params
from kgecore.data.loader import TripleStore, load_dataset
from kgecore.models.kinds import DistanceNorm, ModelKind
from kgecore.schemas.config import TrainConfig


def planted_triples(num_entities: int = 20, num_relations: int = 3) -> np.ndarray:
    """关系 r 把实体 h 映射到 (h + r + 1) mod |E|，每个 (h, r) 恰有一个尾实体"""
    rows = [
        (h, r, (h + r + 1) % num_entities)
        for r in range(num_relations)
        for h in range(num_entities)
    ]
    return np.asarray(rows, dtype=np.int64)


def write_split(path: Path, triples: np.ndarray) -> None:
    lines = [f"e{h}\tr{r}\te{t}" for h, r, t in triples.tolist()]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_dataset(directory: Path, triples: np.ndarray, n_valid: int = 6, n_test: int = 6) -> Path:
    """按固定顺序切分并写出 train / valid / test 三个文件"""
    directory.mkdir(parents=True, exist_ok=True)
    order = np.random.default_rng(7).permutation(len(triples))
    shuffled = triples[order]
    valid = shuffled[:n_valid]
    test = shuffled[n_valid : n_valid + n_test]
    train = shuffled[n_valid + n_test :]
    write_split(directory / "train.txt", train)
    write_split(directory / "valid.txt", valid)
    write_split(directory / "test.txt", test)
    return directory


def planted_type_triples(
    num_types: int = 4, per_type: int = 50, num_relations: int = 8, tails_per_head: int = 5, seed: int = 0
) -> np.ndarray:
    """实体分为若干类型；关系 r 只把类型 r mod T 的实体连到类型 (r + 1 + r // T) mod T 的实体"""
    rng = np.random.default_rng(seed)
    rows = []
    for r in range(num_relations):
        src = r % num_types
        dst = (r + 1 + r // num_types) % num_types
        for h in range(src * per_type, (src + 1) * per_type):
            tails = rng.choice(per_type, size=tails_per_head, replace=False) + dst * per_type
            rows.extend((h, r, int(t)) for t in tails)
    return np.asarray(rows, dtype=np.int64)


@pytest.fixture
def rng() -> np.random.Generator:
    """固定种子的随机数发生器"""
    return np.random.default_rng(1234)


@pytest.fixture
def toy_dataset_dir(tmp_path: Path) -> Path:
    """20 实体、3 关系的合成数据集目录"""
    return write_dataset(tmp_path / "toy", planted_triples())


@pytest.fixture
def toy_store(toy_dataset_dir: Path) -> TripleStore:
    """已加载的合成数据集"""
    return load_dataset(toy_dataset_dir)


@pytest.fixture
def tiny_config() -> TrainConfig:
    """快速训练用的超参数"""
    return TrainConfig(
        k=8,
        gamma=1.0,
        ns=5,
        ns_pretrain=5,
        pretrain_epochs=4,
        adv_epochs=3,
        batches_per_epoch=3,
        eval_every_pretrain=2,
        eval_every_adv=1,
        precision="f64",
        seed=11,
        adam={"lr": 0.01},
    )


@pytest.fixture
def event_bus() -> EventBus:
    return EventBus()


@pytest.fixture
def make_params():
    """按类型创建 64 位随机参数"""

    def factory(kind: ModelKind, num_entities: int = 6, num_relations: int = 3, k: int = 4, seed: int = 0, norm=None):
        if kind.is_distance and norm is None:
            norm = DistanceNorm.L2
        return initialize_params(
            kind,
            num_entities,
            num_relations,
            k,
            norm if kind.is_distance else None,
            np.random.default_rng(seed),
            np.float64,
        )

    return factory


@pytest.fixture
def planted_type_store(tmp_path: Path) -> TripleStore:
    """200 实体、8 关系、2000 个三元组的类型结构数据集"""
    return load_dataset(write_dataset(tmp_path / "typed", planted_type_triples(), n_valid=100, n_test=100))
