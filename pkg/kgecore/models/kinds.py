"""Model kind and distance norm enumerations"""

from enum import Enum


class ModelKind(str, Enum):
    """支持的四种嵌入模型"""

    TRANSE = "TransE"
    TRANSD = "TransD"
    DISTMULT = "DistMult"
    COMPLEX = "ComplEx"

    @property
    def is_distance(self) -> bool:
        """平移类模型的得分是距离（越小越可信）"""
        return self in (ModelKind.TRANSE, ModelKind.TRANSD)

    @property
    def code(self) -> int:
        """检查点头部使用的模型编号"""
        return _KIND_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "ModelKind":
        for kind, value in _KIND_CODES.items():
            if value == code:
                return kind
        raise ValueError(f"unknown model kind id: {code}")

    @classmethod
    def parse(cls, value: "str | ModelKind") -> "ModelKind":
        """大小写不敏感地解析模型名，如 transe / TransE"""
        if isinstance(value, ModelKind):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).lower():
                return kind
        raise ValueError(f"unknown model kind: {value!r}, expected one of {[k.value for k in cls]}")


class DistanceNorm(str, Enum):
    """平移模型的距离范数"""

    L1 = "l1"
    L2 = "l2"

    @property
    def code(self) -> int:
        return 1 if self is DistanceNorm.L1 else 2

    @classmethod
    def from_code(cls, code: int) -> "DistanceNorm | None":
        if code == 0:
            return None
        if code == 1:
            return cls.L1
        if code == 2:
            return cls.L2
        raise ValueError(f"unknown norm flag: {code}")


_KIND_CODES = {
    ModelKind.TRANSE: 1,
    ModelKind.TRANSD: 2,
    ModelKind.DISTMULT: 3,
    ModelKind.COMPLEX: 4,
}

__all__ = ["ModelKind", "DistanceNorm"]
