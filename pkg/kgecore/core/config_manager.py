"""Configuration manager with YAML files, presets and config echo"""

import copy
from pathlib import Path
from typing import Any

import yaml
from loguru import logger
from pydantic import ValidationError

from kgecore.exceptions import ConfigError
from kgecore.schemas.config import RunConfig, TrainConfig, get_preset

ECHO_FILE_NAME = "config.txt"


def _deep_merge(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    """递归合并字典，update 中的值覆盖 base"""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _normalize_aliases(data: dict[str, Any]) -> dict[str, Any]:
    """把 train.lambda 统一为字段名 reg_lambda，避免别名与字段名同时出现"""
    train = data.get("train")
    if isinstance(train, dict) and "lambda" in train:
        train = dict(train)
        train["reg_lambda"] = train.pop("lambda")
        data = {**data, "train": train}
    return data


def _flatten(data: dict[str, Any], prefix: str = "") -> dict[str, str]:
    flat: dict[str, str] = {}
    for key, value in data.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{name}."))
        else:
            flat[name] = "none" if value is None else str(value)
    return flat


class ConfigManager:
    """配置管理器 - 合并预设、YAML 文件与命令行参数并完成验证"""

    def __init__(self, config_path: str | Path | None = None):
        """
        初始化配置管理器

        Args:
            config_path: YAML 配置文件路径，None 表示只使用预设与命令行参数
        """
        self.config_path = Path(config_path) if config_path else None
        self.version: int = 0
        self._config: RunConfig | None = None
        self._raw_config: dict[str, Any] = {}
        self._overrides: dict[str, Any] = {}

    def load(self, overrides: dict[str, Any] | None = None) -> RunConfig:
        """
        加载配置

        优先级：预设 < YAML 文件 < 命令行参数。

        Args:
            overrides: 命令行显式给出的字段（嵌套字典，未给出的字段不要出现）

        Returns:
            验证后的运行配置

        Raises:
            ConfigError: 预设不存在、YAML 无法解析或字段验证失败
        """
        self._overrides = copy.deepcopy(overrides or {})
        file_config = self._read_file()

        preset_name = self._overrides.get("preset") or file_config.get("preset")
        merged: dict[str, Any] = get_preset(preset_name) if preset_name else {}
        merged = _deep_merge(merged, _normalize_aliases(file_config))
        merged = _deep_merge(merged, _normalize_aliases(self._overrides))

        try:
            self._config = RunConfig(**merged)
        except ValidationError as e:
            raise ConfigError(f"Invalid configuration: {e}") from e

        self._raw_config = merged
        self.version += 1
        logger.debug(f"Config loaded (version {self.version}, preset={preset_name})")
        return self._config

    def _read_file(self) -> dict[str, Any]:
        if self.config_path is None:
            return {}
        if not self.config_path.exists():
            logger.warning(f"Config file not found: {self.config_path}, using defaults")
            return {}
        logger.info(f"Loading config from: {self.config_path}")
        try:
            with open(self.config_path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse {self.config_path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{self.config_path} must contain a mapping at top level")
        return data

    def reload(self) -> RunConfig:
        """使用上一次的命令行参数重新加载配置"""
        logger.info("Reloading config...")
        return self.load(self._overrides)

    @property
    def config(self) -> RunConfig:
        if self._config is None:
            raise RuntimeError("Config not loaded.")
        return self._config

    @property
    def train(self) -> TrainConfig:
        return self.config.train

    def to_dict(self) -> dict[str, Any]:
        return self._config.model_dump(mode="json") if self._config else {}

    def flatten(self) -> dict[str, str]:
        """将生效配置展平为 key -> value 字符串"""
        return _flatten(self.to_dict())

    def write_echo(self, out_dir: str | Path) -> Path:
        """
        写出配置回显文件，每行一个 `key = value`，足以复现本次运行

        Args:
            out_dir: 输出目录（必须已存在）

        Returns:
            回显文件路径
        """
        path = Path(out_dir) / ECHO_FILE_NAME
        lines = [f"{key} = {value}" for key, value in sorted(self.flatten().items())]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        logger.info(f"Effective configuration written to {path}")
        return path


def read_echo(path: str | Path) -> dict[str, str]:
    """读取配置回显文件为扁平字典"""
    result: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if " = " in line:
            key, value = line.split(" = ", 1)
            result[key.strip()] = value.strip()
    return result


_config_manager: ConfigManager | None = None


def get_config_manager(config_path: str | Path | None = None) -> ConfigManager:
    global _config_manager
    if _config_manager is None or (
        config_path is not None and _config_manager.config_path != Path(config_path)
    ):
        _config_manager = ConfigManager(config_path)
    return _config_manager


def get_config() -> RunConfig:
    return get_config_manager().config


__all__ = ["ConfigManager", "get_config_manager", "get_config", "read_echo", "ECHO_FILE_NAME"]
