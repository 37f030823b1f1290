"""Log module using loguru"""

import sys
from pathlib import Path

from loguru import logger as _logger

_CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
_FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"


class LogConfig:
    """日志配置"""

    def __init__(
        self,
        log_dir: str | Path | None = None,
        level: str = "INFO",
        file_name: str = "kgecore.log",
        rotation: str = "10 MB",
        retention: str = "30 days",
    ):
        """
        初始化日志配置

        Args:
            log_dir: 日志文件目录，None 表示不写文件
            level: 日志级别
            file_name: 普通日志文件名
            rotation: 日志轮转大小
            retention: 日志保留时间
        """
        self.log_dir = Path(log_dir) if log_dir else None
        self.level = level
        self.file_name = file_name
        self.rotation = rotation
        self.retention = retention

    def setup(self) -> None:
        """配置日志输出"""
        # 移除默认处理器
        _logger.remove()

        # 控制台输出（stderr，保持 stdout 只输出评估结果与表格）
        _logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=self.level, colorize=True)

        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)

            _logger.add(
                self.log_dir / self.file_name,
                rotation=self.rotation,
                retention=self.retention,
                level=self.level,
                format=_FILE_FORMAT,
            )

            # 错误日志文件
            _logger.add(
                self.log_dir / "error.log",
                rotation=self.rotation,
                retention=self.retention,
                level="ERROR",
                format=_FILE_FORMAT,
            )


# 创建默认日志实例
logger = _logger

__all__ = ["logger", "LogConfig"]
