"""Synchronous event bus for training progress notifications"""

from typing import Any, Callable

from loguru import logger

Handler = Callable[[Any], None]


class EventBus:
    """事件总线 - 训练循环发布进度事件，CLI 订阅曲线写入与日志"""

    def __init__(self) -> None:
        self._handlers: dict[str, list[Handler]] = {}

    def on(self, event_type: str, handler: Handler) -> None:
        """
        注册事件处理器

        Args:
            event_type: 事件类型，支持末尾通配符如 "train:*"
            handler: 处理函数，签名为 handler(event: Any) -> None
        """
        self._handlers.setdefault(event_type, []).append(handler)
        logger.debug(f"Registered handler for event: {event_type}")

    def off(self, event_type: str, handler: Handler) -> None:
        """
        移除事件处理器

        Args:
            event_type: 注册时使用的事件类型
            handler: 处理函数
        """
        if event_type in self._handlers:
            self._handlers[event_type].remove(handler)
            if not self._handlers[event_type]:
                del self._handlers[event_type]
            logger.debug(f"Removed handler for event: {event_type}")

    def emit(self, event_type: str, event: Any) -> None:
        """
        触发事件，依次调用精确匹配与通配符匹配的处理器

        处理器抛出的异常只记录日志，不会中断训练。

        Args:
            event_type: 事件类型
            event: 事件数据
        """
        for pattern, handlers in list(self._handlers.items()):
            if not self._match_pattern(event_type, pattern):
                continue
            for handler in list(handlers):
                try:
                    handler(event)
                except Exception as e:
                    logger.error(f"Error in event handler for {event_type}: {e}")

    def clear(self) -> None:
        """清空所有处理器"""
        self._handlers.clear()

    def _match_pattern(self, value: str, pattern: str) -> bool:
        """
        匹配通配符模式

        Args:
            value: 实际值
            pattern: 模式（仅支持末尾 *）
        """
        if not pattern.endswith("*"):
            return value == pattern
        return value.startswith(pattern[:-1])

    @property
    def handler_count(self) -> int:
        return sum(len(h) for h in self._handlers.values())


# 全局事件总线实例
_event_bus: EventBus | None = None


def get_event_bus() -> EventBus:
    """获取全局事件总线实例"""
    global _event_bus
    if _event_bus is None:
        _event_bus = EventBus()
    return _event_bus


__all__ = ["EventBus", "get_event_bus"]
