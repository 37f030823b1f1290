"""Storage: logging setup, checkpoints and curve files"""

from kgecore.storage.checkpoint import (
    Checkpoint,
    CheckpointHeader,
    load_checkpoint,
    save_checkpoint,
)
from kgecore.storage.curves import CurveWriter, read_curve, write_curve, write_generated
from kgecore.storage.logger import LogConfig, logger

__all__ = [
    "logger",
    "LogConfig",
    "Checkpoint",
    "CheckpointHeader",
    "save_checkpoint",
    "load_checkpoint",
    "CurveWriter",
    "write_curve",
    "read_curve",
    "write_generated",
]
