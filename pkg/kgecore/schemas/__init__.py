"""Configuration schemas module"""

from kgecore.schemas.config import (
    PRESETS,
    AdamConfig,
    LoggingConfig,
    RunConfig,
    TrainConfig,
    get_preset,
)

__all__ = [
    "AdamConfig",
    "TrainConfig",
    "LoggingConfig",
    "RunConfig",
    "PRESETS",
    "get_preset",
]
