"""Tab-separated learning curves and generated-negative dumps"""

import math
from pathlib import Path
from typing import Iterable

from loguru import logger

from kgecore.training.report import EvalPoint

CURVE_COLUMNS = ("epoch", "mrr", "hits10", "loss")
GENERATED_COLUMNS = ("epoch", "head", "relation", "tail", "side", "entity", "probability", "reward")


def _fmt(value: float) -> str:
    # repr 保证浮点数可逐位还原
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(float(value))


class CurveWriter:
    """学习曲线写入器：每次评估追加一行并立即刷新，训练中断时曲线仍然完整"""

    def __init__(self, path: Path | str):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8") as f:
            f.write("\t".join(CURVE_COLUMNS) + "\n")
        self.rows = 0

    def append(self, point: EvalPoint) -> None:
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(f"{point.epoch}\t{_fmt(point.mrr)}\t{_fmt(point.hits10)}\t{_fmt(point.loss)}\n")
        self.rows += 1

    def on_eval(self, event: dict) -> None:
        """事件总线处理器，订阅 train:eval"""
        self.append(event["point"])


def write_curve(path: Path | str, points: Iterable[EvalPoint]) -> Path:
    writer = CurveWriter(path)
    for point in points:
        writer.append(point)
    logger.info(f"Wrote {writer.rows} curve points to {writer.path}")
    return writer.path


def read_curve(path: Path | str) -> list[EvalPoint]:
    """读取曲线文件"""
    points = []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().rstrip("\n").split("\t")
        if tuple(header) != CURVE_COLUMNS:
            raise ValueError(f"{path}: unexpected curve header {header}")
        for line in f:
            if not line.strip():
                continue
            epoch, mrr, hits, loss = line.rstrip("\n").split("\t")
            points.append(EvalPoint(int(epoch), float(mrr), float(hits), float(loss)))
    return points


def write_generated(path: Path | str, records: Iterable, vocab=None) -> Path:
    """
    写出对抗阶段记录的生成负样本

    Args:
        path: 输出文件
        records: GeneratedNegative 序列
        vocab: 词表，给出时写实体 / 关系名称，否则写编号
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def ent(i: int) -> str:
        return vocab.entity_name(i) if vocab is not None else str(i)

    def rel(i: int) -> str:
        return vocab.relation_name(i) if vocab is not None else str(i)

    count = 0
    with open(path, "w", encoding="utf-8") as f:
        f.write("\t".join(GENERATED_COLUMNS) + "\n")
        for rec in records:
            h, r, t = rec.positive
            f.write(
                f"{rec.epoch}\t{ent(h)}\t{rel(r)}\t{ent(t)}\t{rec.side.value}\t{ent(rec.entity)}\t"
                f"{rec.probability:.6g}\t{rec.reward:.6g}\n"
            )
            count += 1
    logger.info(f"Wrote {count} generated negatives to {path}")
    return path


__all__ = [
    "CURVE_COLUMNS",
    "GENERATED_COLUMNS",
    "CurveWriter",
    "write_curve",
    "read_curve",
    "write_generated",
]
