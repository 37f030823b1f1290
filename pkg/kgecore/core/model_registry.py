"""Model registry: kind -> implementation class, plus parameter initialization"""

import math

import numpy as np
from loguru import logger

from kgecore.exceptions import ModelRoleError
from kgecore.models.base import KGEModel
from kgecore.models.kinds import DistanceNorm, ModelKind
from kgecore.models.params import ENTITY, TABLE_LAYOUT, ModelParams


class ModelRegistry:
    """模型注册表 - 负责模型类的注册、查找与参数初始化"""

    def __init__(self) -> None:
        self._model_classes: dict[ModelKind, type[KGEModel]] = {}

    def register(self, kind: ModelKind, model_class: type[KGEModel]) -> None:
        """
        注册模型类

        Args:
            kind: 模型类型
            model_class: 模型类，必须继承自 KGEModel
        """
        if not issubclass(model_class, KGEModel):
            raise TypeError(f"{model_class} must inherit from KGEModel")
        self._model_classes[kind] = model_class
        logger.debug(f"Registered model class for kind: {kind.value}")

    def get(self, kind: ModelKind) -> type[KGEModel]:
        cls = self._model_classes.get(kind)
        if cls is None:
            raise ValueError(f"No model class registered for kind: {kind.value}")
        return cls

    def kinds(self) -> list[ModelKind]:
        return list(self._model_classes)

    def create(self, params: ModelParams) -> KGEModel:
        """为已有参数创建模型实例（只持有引用，不复制参数）"""
        return self.get(params.kind)(params)

    def initialize(
        self,
        kind: ModelKind,
        num_entities: int,
        num_relations: int,
        k: int,
        norm: DistanceNorm | None,
        rng: np.random.Generator,
        dtype=np.float64,
    ) -> ModelParams:
        """
        按 uniform(−6/√k, 6/√k) 初始化所有参数表，随后做一次约束投影

        Args:
            kind: 模型类型
            num_entities: 实体数
            num_relations: 关系数
            k: 嵌入维度
            norm: 距离范数（仅平移模型）
            rng: 随机数发生器
            dtype: 参数浮点类型

        Returns:
            初始化后的参数
        """
        bound = 6.0 / math.sqrt(k)
        tables = {}
        for name, owner in TABLE_LAYOUT[kind]:
            rows = num_entities if owner == ENTITY else num_relations
            tables[name] = rng.uniform(-bound, bound, size=(rows, k)).astype(dtype)
        params = ModelParams(kind=kind, k=k, tables=tables, norm=norm if kind.is_distance else None)
        self.create(params).project_constraints()
        logger.debug(f"Initialized {kind.value} parameters: |E|={num_entities}, |R|={num_relations}, k={k}")
        return params


def require_role(kind: ModelKind, role: str) -> None:
    """
    检查模型能否担任生成器 / 判别器

    Raises:
        ModelRoleError: 生成器必须是 softmax 模型，判别器必须是距离模型
    """
    if role == "generator" and kind.is_distance:
        raise ModelRoleError(f"{kind.value} cannot be a generator; use DistMult or ComplEx")
    if role == "discriminator" and not kind.is_distance:
        raise ModelRoleError(f"{kind.value} cannot be a discriminator; use TransE or TransD")


# 全局模型注册表实例
_registry: ModelRegistry | None = None


def get_model_registry() -> ModelRegistry:
    """获取全局模型注册表，首次调用时注册内置模型"""
    global _registry
    if _registry is None:
        from kgecore.models.bilinear import ComplEx, DistMult
        from kgecore.models.translation import TransD, TransE

        _registry = ModelRegistry()
        for cls in (TransE, TransD, DistMult, ComplEx):
            _registry.register(cls.kind, cls)
    return _registry


def build_model(params: ModelParams) -> KGEModel:
    return get_model_registry().create(params)


def initialize_params(
    kind: ModelKind,
    num_entities: int,
    num_relations: int,
    k: int,
    norm: DistanceNorm | None,
    rng: np.random.Generator,
    dtype=np.float64,
) -> ModelParams:
    return get_model_registry().initialize(kind, num_entities, num_relations, k, norm, rng, dtype)


__all__ = [
    "ModelRegistry",
    "get_model_registry",
    "build_model",
    "initialize_params",
    "require_role",
]
