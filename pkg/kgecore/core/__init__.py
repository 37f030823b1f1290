"""Core service layer module"""

from kgecore.core.config_manager import ConfigManager, get_config, get_config_manager
from kgecore.core.event_bus import EventBus, get_event_bus
from kgecore.core.model_registry import (
    ModelRegistry,
    build_model,
    get_model_registry,
    initialize_params,
    require_role,
)

__all__ = [
    "EventBus",
    "get_event_bus",
    "ConfigManager",
    "get_config_manager",
    "get_config",
    "ModelRegistry",
    "get_model_registry",
    "build_model",
    "initialize_params",
    "require_role",
]
