"""Exception hierarchy shared by all kgecore layers"""

from pathlib import Path
from typing import Any


class KGECoreError(Exception):
    """kgecore 所有业务异常的基类，CLI 将其映射为退出码 1"""


class DatasetNotFoundError(KGECoreError):
    """数据集目录或划分文件不存在"""


class TripleFormatError(KGECoreError):
    """三元组文件中存在格式错误的行"""

    def __init__(self, path: Path | str, line_no: int, line: str):
        self.path = Path(path)
        self.line_no = line_no
        self.line = line
        super().__init__(
            f"{self.path}:{line_no}: expected 3 tab-separated fields, got {line!r}"
        )


class EmptyTripleFileError(KGECoreError):
    """三元组文件没有任何非空行"""


class UnknownRelationError(KGECoreError):
    """查询了训练集中从未出现过的关系"""


class VocabularyMismatchError(KGECoreError):
    """检查点与数据集（或两个检查点之间）的词表不一致"""


class ModelRoleError(KGECoreError):
    """模型类型不能担任所请求的角色（生成器 / 判别器）"""


class ConfigError(KGECoreError):
    """配置无效或预设不存在"""


class NonFiniteGradientError(KGECoreError):
    """梯度中出现 NaN / Inf"""


class TrainingDivergedError(KGECoreError):
    """训练发散（损失非有限），携带中止前的训练报告"""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class CheckpointError(KGECoreError):
    """检查点读写错误的基类"""


class CheckpointFormatError(CheckpointError):
    """魔数或头部字段非法"""

    def __init__(self, detail: str):
        super().__init__(f"bad format: {detail}")


class CheckpointTruncatedError(CheckpointError):
    """文件长度不足以容纳头部声明的内容"""

    def __init__(self, detail: str):
        super().__init__(f"truncated: {detail}")


class CheckpointCountMismatchError(CheckpointError):
    """头部计数与词表或参数表形状不一致"""


__all__ = [
    "KGECoreError",
    "DatasetNotFoundError",
    "TripleFormatError",
    "EmptyTripleFileError",
    "UnknownRelationError",
    "VocabularyMismatchError",
    "ModelRoleError",
    "ConfigError",
    "NonFiniteGradientError",
    "TrainingDivergedError",
    "CheckpointError",
    "CheckpointFormatError",
    "CheckpointTruncatedError",
    "CheckpointCountMismatchError",
]
