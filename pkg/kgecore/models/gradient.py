"""Row-sparse gradients over named parameter tables"""

from typing import Iterator

import numpy as np


class SparseGradient:
    """按 (参数表, 行号, 梯度向量) 记录的稀疏梯度，同一行可多次出现，合并时求和"""

    def __init__(self) -> None:
        self._parts: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}

    def add(self, table: str, rows: np.ndarray, values: np.ndarray) -> None:
        """
        追加若干行的梯度

        Args:
            table: 参数表名
            rows: 一维行号数组
            values: (len(rows), k) 梯度
        """
        rows = np.asarray(rows, dtype=np.int64).ravel()
        values = np.asarray(values)
        if values.ndim == 1:
            values = values[None, :]
        if len(rows) != len(values):
            raise ValueError(f"{len(rows)} rows but {len(values)} gradient vectors for {table}")
        if len(rows):
            self._parts.setdefault(table, []).append((rows, values))

    def extend(self, other: "SparseGradient", scale: float = 1.0) -> "SparseGradient":
        for table, parts in other._parts.items():
            for rows, values in parts:
                self.add(table, rows, values if scale == 1.0 else values * scale)
        return self

    def scaled(self, scale: float) -> "SparseGradient":
        return SparseGradient().extend(self, scale)

    @property
    def tables(self) -> set[str]:
        return set(self._parts)

    def is_empty(self) -> bool:
        return not self._parts

    def touched(self) -> dict[str, np.ndarray]:
        """每个参数表中出现过的行号（按出现次数保留重复）"""
        return {t: np.concatenate([rows for rows, _ in parts]) for t, parts in self._parts.items()}

    def merged(self) -> dict[str, tuple[np.ndarray, np.ndarray]]:
        """合并同一行的梯度，返回 {表名: (唯一行号, 梯度和)}"""
        out: dict[str, tuple[np.ndarray, np.ndarray]] = {}
        for table, parts in self._parts.items():
            rows = np.concatenate([r for r, _ in parts])
            values = np.concatenate([v for _, v in parts], axis=0)
            unique, inverse = np.unique(rows, return_inverse=True)
            summed = np.zeros((len(unique), values.shape[1]), dtype=values.dtype)
            np.add.at(summed, inverse.ravel(), values)
            out[table] = (unique, summed)
        return out

    def entries(self) -> Iterator[tuple[str, int, np.ndarray]]:
        for table, (rows, values) in self.merged().items():
            for row, vec in zip(rows.tolist(), values):
                yield table, row, vec

    def row(self, table: str, row: int, k: int | None = None) -> np.ndarray:
        """某一行的合并梯度，未出现的行返回零向量（需给出 k）"""
        merged = self.merged()
        if table in merged:
            rows, values = merged[table]
            hit = np.flatnonzero(rows == row)
            if len(hit):
                return values[hit[0]]
            k = values.shape[1]
        if k is None:
            raise KeyError(f"no gradient for {table}[{row}] and dimension unknown")
        return np.zeros(k)

    def to_dense(self, shapes: dict[str, tuple[int, int]]) -> dict[str, np.ndarray]:
        """展开为稠密梯度（测试用）"""
        dense = {name: np.zeros(shape) for name, shape in shapes.items()}
        for table, (rows, values) in self.merged().items():
            dense[table][rows] += values
        return dense


__all__ = ["SparseGradient"]
