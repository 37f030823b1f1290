"""Entity / relation vocabularies with dense ids"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from kgecore.exceptions import VocabularyMismatchError


@dataclass(frozen=True)
class Vocabulary:
    """实体与关系的 名称 <-> 稠密编号 双向映射（构造后不可变）"""

    entity_names: tuple[str, ...]
    relation_names: tuple[str, ...]
    entity_ids: Mapping[str, int] = field(init=False, repr=False, compare=False)
    relation_ids: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entity_ids", _index(self.entity_names, "entity"))
        object.__setattr__(self, "relation_ids", _index(self.relation_names, "relation"))

    @classmethod
    def from_names(cls, entities: Iterable[str], relations: Iterable[str]) -> "Vocabulary":
        return cls(tuple(entities), tuple(relations))

    @property
    def num_entities(self) -> int:
        return len(self.entity_names)

    @property
    def num_relations(self) -> int:
        return len(self.relation_names)

    def entity_id(self, name: str) -> int:
        return self.entity_ids[name]

    def relation_id(self, name: str) -> int:
        return self.relation_ids[name]

    def entity_name(self, entity_id: int) -> str:
        return self.entity_names[entity_id]

    def relation_name(self, relation_id: int) -> str:
        return self.relation_names[relation_id]

    def check_same(self, other: "Vocabulary", what: str = "vocabulary") -> None:
        """
        检查两个词表完全一致

        Raises:
            VocabularyMismatchError: 实体或关系列表不同
        """
        if self.entity_names != other.entity_names:
            raise VocabularyMismatchError(
                f"{what}: entity lists differ ({self.num_entities} vs {other.num_entities} entities)"
            )
        if self.relation_names != other.relation_names:
            raise VocabularyMismatchError(
                f"{what}: relation lists differ "
                f"({self.num_relations} vs {other.num_relations} relations)"
            )


def _index(names: tuple[str, ...], what: str) -> Mapping[str, int]:
    mapping: dict[str, int] = {}
    for i, name in enumerate(names):
        if name in mapping:
            raise ValueError(f"duplicate {what} name {name!r}")
        mapping[name] = i
    return MappingProxyType(mapping)


class VocabularyBuilder:
    """加载三元组文件时按首次出现顺序分配编号"""

    def __init__(self, base: Vocabulary | None = None, frozen: bool = False):
        """
        初始化词表构建器

        Args:
            base: 预置词表（如检查点中的词表），其编号保持不变
            frozen: 为 True 时遇到新名称直接报错，用于检查“词表覆盖数据集”
        """
        self._entities: dict[str, int] = dict(base.entity_ids) if base else {}
        self._relations: dict[str, int] = dict(base.relation_ids) if base else {}
        self.frozen = frozen

    def entity(self, name: str) -> int:
        return self._get_or_add(self._entities, name, "entity")

    def relation(self, name: str) -> int:
        return self._get_or_add(self._relations, name, "relation")

    def _get_or_add(self, table: dict[str, int], name: str, what: str) -> int:
        idx = table.get(name)
        if idx is None:
            if self.frozen:
                raise VocabularyMismatchError(f"{what} {name!r} is not in the vocabulary")
            idx = len(table)
            table[name] = idx
        return idx

    @property
    def num_entities(self) -> int:
        return len(self._entities)

    @property
    def num_relations(self) -> int:
        return len(self._relations)

    def build(self) -> Vocabulary:
        # dict 保持插入顺序，编号即位置
        return Vocabulary(tuple(self._entities), tuple(self._relations))


__all__ = ["Vocabulary", "VocabularyBuilder"]
