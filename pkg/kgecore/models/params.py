"""Embedding parameter tables and their per-model layout"""

from dataclasses import dataclass, field

import numpy as np

from kgecore.models.kinds import DistanceNorm, ModelKind

ENTITY = "entity"
RELATION = "relation"

# 每种模型的参数表：(表名, 行索引的是实体还是关系)，顺序即检查点中的写入顺序
TABLE_LAYOUT: dict[ModelKind, tuple[tuple[str, str], ...]] = {
    ModelKind.TRANSE: (("entity", ENTITY), ("relation", RELATION)),
    ModelKind.TRANSD: (
        ("entity", ENTITY),
        ("entity_proj", ENTITY),
        ("relation", RELATION),
        ("relation_proj", RELATION),
    ),
    ModelKind.DISTMULT: (("entity", ENTITY), ("relation", RELATION)),
    ModelKind.COMPLEX: (
        ("entity_re", ENTITY),
        ("entity_im", ENTITY),
        ("relation_re", RELATION),
        ("relation_im", RELATION),
    ),
}

PRECISION_DTYPES = {"f32": np.float32, "f64": np.float64}


@dataclass(eq=False)
class ModelParams:
    """一个模型的全部嵌入表及其元数据"""

    kind: ModelKind
    k: int
    tables: dict[str, np.ndarray]
    norm: DistanceNorm | None = None
    layout: tuple[tuple[str, str], ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.layout = TABLE_LAYOUT[self.kind]
        if self.kind.is_distance and self.norm is None:
            raise ValueError(f"{self.kind.value} requires a distance norm")
        if not self.kind.is_distance and self.norm is not None:
            raise ValueError(f"{self.kind.value} does not take a distance norm")

        expected = [name for name, _ in self.layout]
        if sorted(self.tables) != sorted(expected):
            raise ValueError(f"{self.kind.value} expects tables {expected}, got {sorted(self.tables)}")
        for name, owner in self.layout:
            table = self.tables[name]
            rows = self.num_entities if owner == ENTITY else self.num_relations
            if table.ndim != 2 or table.shape != (rows, self.k):
                raise ValueError(f"table {name} has shape {table.shape}, expected {(rows, self.k)}")

    @property
    def num_entities(self) -> int:
        return self._rows(ENTITY)

    @property
    def num_relations(self) -> int:
        return self._rows(RELATION)

    def _rows(self, owner: str) -> int:
        name = next(n for n, o in self.layout if o == owner)
        return int(self.tables[name].shape[0])

    @property
    def dtype(self) -> np.dtype:
        return self.tables[self.layout[0][0]].dtype

    @property
    def table_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.layout)

    def owner(self, table: str) -> str:
        """参数表按实体还是按关系索引"""
        return dict(self.layout)[table]

    def copy(self) -> "ModelParams":
        return ModelParams(
            kind=self.kind,
            k=self.k,
            tables={name: arr.copy() for name, arr in self.tables.items()},
            norm=self.norm,
        )

    def astype(self, dtype) -> "ModelParams":
        return ModelParams(
            kind=self.kind,
            k=self.k,
            tables={name: arr.astype(dtype) for name, arr in self.tables.items()},
            norm=self.norm,
        )

    def allclose(self, other: "ModelParams", exact: bool = False) -> bool:
        """参数表逐项相等（exact=True 时要求逐位相同）"""
        if self.kind != other.kind or self.k != other.k or self.norm != other.norm:
            return False
        for name in self.table_names:
            a, b = self.tables[name], other.tables[name]
            if a.shape != b.shape:
                return False
            if exact and not np.array_equal(a, b):
                return False
            if not exact and not np.allclose(a, b):
                return False
        return True


__all__ = ["ModelParams", "TABLE_LAYOUT", "PRECISION_DTYPES", "ENTITY", "RELATION"]
