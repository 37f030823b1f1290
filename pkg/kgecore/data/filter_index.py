"""Index of all known triples for the filtered ranking protocol"""

from collections import defaultdict

import numpy as np

from kgecore.data.loader import SPLITS, TripleStore, as_triple_array


class FilterIndex:
    """train ∪ valid ∪ test 中全部已知三元组的索引"""

    def __init__(self, triples: np.ndarray):
        """
        Args:
            triples: (n, 3) 数组，可含跨划分的重复三元组
        """
        triples = as_triple_array(triples)
        self._triples: set[tuple[int, int, int]] = set()
        tails: dict[tuple[int, int], set[int]] = defaultdict(set)
        heads: dict[tuple[int, int], set[int]] = defaultdict(set)
        for h, r, t in triples.tolist():
            self._triples.add((h, r, t))
            tails[(h, r)].add(t)
            heads[(r, t)].add(h)
        self._tails = {key: np.fromiter(sorted(v), dtype=np.int64) for key, v in tails.items()}
        self._heads = {key: np.fromiter(sorted(v), dtype=np.int64) for key, v in heads.items()}

    def __contains__(self, triple) -> bool:
        h, r, t = (int(x) for x in triple)
        return (h, r, t) in self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def known_tails(self, h: int, r: int) -> np.ndarray:
        """已知为真的 (h, r, ?) 尾实体"""
        return self._tails.get((int(h), int(r)), _EMPTY)

    def known_heads(self, r: int, t: int) -> np.ndarray:
        """已知为真的 (?, r, t) 头实体"""
        return self._heads.get((int(r), int(t)), _EMPTY)


_EMPTY = np.zeros(0, dtype=np.int64)


def build_filter_index(store: TripleStore) -> FilterIndex:
    """由全部划分构建过滤索引"""
    return FilterIndex(np.concatenate([store.split(s) for s in SPLITS], axis=0))


__all__ = ["FilterIndex", "build_filter_index"]
