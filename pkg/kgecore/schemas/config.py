"""Configuration schemas using Pydantic"""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from kgecore.exceptions import ConfigError
from kgecore.models.kinds import DistanceNorm, ModelKind


class AdamConfig(BaseModel):
    """Adam 优化器超参数（默认即推荐设置）"""

    lr: float = Field(default=0.001, gt=0, description="学习率 α")
    beta1: float = Field(default=0.9, ge=0, lt=1, description="一阶矩衰减率 β₁")
    beta2: float = Field(default=0.999, ge=0, lt=1, description="二阶矩衰减率 β₂")
    eps: float = Field(default=1e-8, gt=0, description="数值稳定项 ε")


class TrainConfig(BaseModel):
    """训练超参数（预训练与对抗训练共用）"""

    model_config = ConfigDict(populate_by_name=True)

    k: int = Field(default=50, ge=1, description="嵌入维度（ComplEx 为实部/虚部各自的维度）")
    gamma: float = Field(default=3.0, gt=0, description="间隔 γ")
    norm: DistanceNorm = Field(default=DistanceNorm.L1, description="平移模型距离范数")
    reg_lambda: float = Field(default=0.1, ge=0, alias="lambda", description="L2 正则权重 λ")
    ns: int = Field(default=20, ge=1, description="对抗阶段候选负样本数 Ns")
    ns_pretrain: int = Field(default=20, ge=1, description="log-softmax 预训练每个正样本的负样本数")
    pretrain_epochs: int = Field(default=1000, ge=1, description="预训练轮数")
    adv_epochs: int = Field(default=5000, ge=0, description="对抗训练轮数")
    batches_per_epoch: int = Field(default=100, ge=1, description="每轮的 mini-batch 数")
    eval_every_pretrain: int = Field(default=50, ge=1, description="预训练验证间隔（轮）")
    eval_every_adv: int = Field(default=100, ge=1, description="对抗训练验证间隔（轮）")
    seed: int = Field(default=0, ge=0, description="随机种子")
    precision: Literal["f32", "f64"] = Field(default="f32", description="参数浮点精度")
    valid_sample: int | None = Field(default=None, ge=1, description="早停时最多使用的验证三元组数")
    log_generated_epochs: int = Field(default=5, ge=0, description="记录生成负样本的最后若干轮")
    log_generated_max: int = Field(default=2000, ge=0, description="记录生成负样本的上限")
    eval_test: bool = Field(default=True, description="训练结束后在测试集上评估所选检查点")
    adam: AdamConfig = Field(default_factory=AdamConfig)

    @field_validator("norm", mode="before")
    @classmethod
    def normalize_norm(cls, v: Any) -> Any:
        if isinstance(v, str):
            return v.lower()
        return v


class LoggingConfig(BaseModel):
    """日志配置"""

    level: str = Field(default="INFO", description="日志级别")
    file: str = Field(default="kgecore.log", description="输出目录内的日志文件名")
    rotation: str = Field(default="10 MB", description="日志轮转大小")
    retention: str = Field(default="30 days", description="日志保留时间")


class RunConfig(BaseSettings):
    """一次 CLI 运行的完整配置（支持从环境变量和 YAML 文件加载）"""

    model_config = SettingsConfigDict(
        env_prefix="KGE_",  # 环境变量前缀
        env_nested_delimiter="__",
        case_sensitive=False,
        populate_by_name=True,
    )

    dataset: Path | None = Field(default=None, description="数据集目录（含 train/valid/test.txt）")
    preset: str | None = Field(default=None, description="超参数预设名")
    model: ModelKind | None = Field(default=None, description="被训练/评估的模型（对抗阶段为判别器）")
    generator: ModelKind | None = Field(default=None, description="对抗阶段的生成器模型")
    gen_ckpt: Path | None = Field(default=None, description="生成器检查点（advtrain / inspect-negatives）")
    dis_ckpt: Path | None = Field(default=None, description="判别器检查点（advtrain / inspect-negatives）")
    out: Path = Field(default=Path("runs/latest"), description="输出目录")
    train: TrainConfig = Field(default_factory=TrainConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    @field_validator("model", "generator", mode="before")
    @classmethod
    def parse_kind(cls, v: Any) -> Any:
        if v is None or isinstance(v, ModelKind):
            return v
        return ModelKind.parse(v)

    @model_validator(mode="after")
    def check_roles(self) -> "RunConfig":
        if self.generator is not None and self.generator.is_distance:
            raise ValueError(f"generator must be DistMult or ComplEx, got {self.generator.value}")
        return self


_DATASET_LAMBDA = {"fb15k237": 1.0, "wn18": 0.1, "wn18rr": 0.1}


def _build_presets() -> dict[str, dict[str, Any]]:
    presets: dict[str, dict[str, Any]] = {}
    for dataset, lam in _DATASET_LAMBDA.items():
        presets[f"{dataset}-transe"] = {
            "model": ModelKind.TRANSE,
            "train": {"norm": DistanceNorm.L1, "k": 50, "gamma": 3.0},
        }
        presets[f"{dataset}-transd"] = {
            "model": ModelKind.TRANSD,
            "train": {"norm": DistanceNorm.L1, "k": 50, "gamma": 3.0},
        }
        presets[f"{dataset}-distmult"] = {
            "model": ModelKind.DISTMULT,
            "train": {"k": 50, "reg_lambda": lam},
        }
        # 2k=50：实部、虚部各 25 维
        presets[f"{dataset}-complex"] = {
            "model": ModelKind.COMPLEX,
            "train": {"k": 25, "reg_lambda": lam},
        }
    return presets


PRESETS: dict[str, dict[str, Any]] = _build_presets()


def get_preset(name: str) -> dict[str, Any]:
    """
    获取超参数预设

    Args:
        name: 预设名，如 wn18rr-transe

    Returns:
        可与 RunConfig 字典合并的局部配置（深拷贝）

    Raises:
        ConfigError: 预设不存在
    """
    key = name.lower()
    if key not in PRESETS:
        raise ConfigError(f"Unknown preset {name!r}; known presets: {sorted(PRESETS)}")
    preset = PRESETS[key]
    return {"model": preset["model"], "train": dict(preset["train"])}


__all__ = [
    "AdamConfig",
    "TrainConfig",
    "LoggingConfig",
    "RunConfig",
    "PRESETS",
    "get_preset",
]
