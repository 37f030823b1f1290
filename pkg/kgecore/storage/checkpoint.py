"""KGE1 binary checkpoints: header, vocabulary and float32 embedding tables"""

import io
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, BinaryIO

import numpy as np
from loguru import logger

from kgecore import __version__
from kgecore.data.vocabulary import Vocabulary
from kgecore.exceptions import (
    CheckpointCountMismatchError,
    CheckpointError,
    CheckpointFormatError,
    CheckpointTruncatedError,
    VocabularyMismatchError,
)
from kgecore.models.kinds import DistanceNorm, ModelKind
from kgecore.models.params import ENTITY, RELATION, TABLE_LAYOUT, ModelParams

MAGIC = b"KGE1"
CHECKPOINT_SUFFIX = ".kge"

# 头部固定字段：模型类型编号 u8, k u32, |E| u32, |R| u32, 范数标记 u8（0 表示无）
_HEADER_FIXED = struct.Struct("<BIIIB")
_U32 = struct.Struct("<I")
_TABLE_DTYPE = np.dtype("<f4")


@dataclass(frozen=True)
class CheckpointHeader:
    """检查点头部"""

    kind: ModelKind
    k: int
    num_entities: int
    num_relations: int
    norm: DistanceNorm | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    @classmethod
    def for_params(cls, params: ModelParams, metadata: dict[str, Any] | None = None) -> "CheckpointHeader":
        meta = {
            "format": "KGE1",
            "kgecore_version": __version__,
        }
        meta.update(metadata or {})
        return cls(
            kind=params.kind,
            k=params.k,
            num_entities=params.num_entities,
            num_relations=params.num_relations,
            norm=params.norm,
            metadata=meta,
        )


@dataclass(eq=False)
class Checkpoint:
    """一个已保存模型：头部、词表与参数"""

    header: CheckpointHeader
    vocab: Vocabulary
    params: ModelParams

    @classmethod
    def create(
        cls, params: ModelParams, vocab: Vocabulary, metadata: dict[str, Any] | None = None
    ) -> "Checkpoint":
        return cls(header=CheckpointHeader.for_params(params, metadata), vocab=vocab, params=params)

    @property
    def kind(self) -> ModelKind:
        return self.header.kind

    def check_vocab(self, vocab: Vocabulary, what: str = "checkpoint") -> None:
        """检查点词表必须与数据集词表完全一致"""
        self.vocab.check_same(vocab, what)


class _Reader:
    """按偏移读取字节，越界统一报告为截断"""

    def __init__(self, data: bytes, path: Path):
        self.data = data
        self.pos = 0
        self.path = path

    @property
    def remaining(self) -> int:
        return len(self.data) - self.pos

    def take(self, n: int, what: str) -> bytes:
        if n > self.remaining:
            raise CheckpointTruncatedError(
                f"{self.path}: need {n} bytes for {what}, only {self.remaining} left"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self, what: str) -> int:
        return _U32.unpack(self.take(_U32.size, what))[0]

    def text(self, what: str) -> str:
        raw = self.take(self.u32(what), what)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointFormatError(f"{self.path}: {what} is not valid UTF-8") from e


def _write_text(out: BinaryIO, text: str) -> None:
    raw = text.encode("utf-8")
    out.write(_U32.pack(len(raw)))
    out.write(raw)


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    """
    序列化检查点

    Raises:
        CheckpointCountMismatchError: 词表大小与参数表行数不一致
    """
    params, vocab = ckpt.params, ckpt.vocab
    if vocab.num_entities != params.num_entities or vocab.num_relations != params.num_relations:
        raise CheckpointCountMismatchError(
            f"vocabulary has {vocab.num_entities}/{vocab.num_relations} entities/relations, "
            f"parameters have {params.num_entities}/{params.num_relations}"
        )
    header = ckpt.header
    norm_code = header.norm.code if header.norm is not None else 0
    meta = json.dumps(header.metadata, sort_keys=True).encode("utf-8")
    header_bytes = (
        _HEADER_FIXED.pack(header.kind.code, header.k, header.num_entities, header.num_relations, norm_code)
        + _U32.pack(len(meta))
        + meta
    )

    out = io.BytesIO()
    out.write(MAGIC)
    out.write(_U32.pack(len(header_bytes)))
    out.write(header_bytes)

    out.write(_U32.pack(vocab.num_entities))
    for name in vocab.entity_names:
        _write_text(out, name)
    out.write(_U32.pack(vocab.num_relations))
    for name in vocab.relation_names:
        _write_text(out, name)

    for name, _ in TABLE_LAYOUT[params.kind]:
        out.write(np.ascontiguousarray(params.tables[name], dtype=_TABLE_DTYPE).tobytes(order="C"))
    return out.getvalue()


def _decode_header(raw: bytes, path: Path) -> CheckpointHeader:
    if len(raw) < _HEADER_FIXED.size + _U32.size:
        raise CheckpointFormatError(f"{path}: header too short ({len(raw)} bytes)")
    kind_code, k, n_ent, n_rel, norm_code = _HEADER_FIXED.unpack_from(raw, 0)
    try:
        kind = ModelKind.from_code(kind_code)
        norm = DistanceNorm.from_code(norm_code)
    except ValueError as e:
        raise CheckpointFormatError(f"{path}: {e}") from e
    if kind.is_distance != (norm is not None):
        raise CheckpointFormatError(f"{path}: norm flag {norm_code} invalid for {kind.value}")
    if k < 1:
        raise CheckpointFormatError(f"{path}: embedding dimension must be positive")

    (meta_len,) = _U32.unpack_from(raw, _HEADER_FIXED.size)
    meta_raw = raw[_HEADER_FIXED.size + _U32.size :]
    if len(meta_raw) != meta_len:
        raise CheckpointFormatError(f"{path}: metadata length {meta_len} does not match header")
    try:
        metadata = json.loads(meta_raw.decode("utf-8")) if meta_len else {}
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise CheckpointFormatError(f"{path}: unreadable metadata") from e
    return CheckpointHeader(kind, k, n_ent, n_rel, norm, metadata)


def decode_checkpoint(data: bytes, path: Path | str = "<bytes>") -> Checkpoint:
    """
    反序列化检查点

    Raises:
        CheckpointFormatError: 魔数错误或头部字段非法
        CheckpointTruncatedError: 数据长度不足
        CheckpointCountMismatchError: 词表计数与头部不符，或有多余字节
    """
    path = Path(path)
    reader = _Reader(data, path)
    if reader.remaining < len(MAGIC) or reader.take(len(MAGIC), "magic") != MAGIC:
        raise CheckpointFormatError(f"{path}: missing KGE1 magic")

    header = _decode_header(reader.take(reader.u32("header length"), "header"), path)

    n_ent = reader.u32("entity count")
    entities = [reader.text("entity name") for _ in range(n_ent)]
    n_rel = reader.u32("relation count")
    relations = [reader.text("relation name") for _ in range(n_rel)]

    layout = TABLE_LAYOUT[header.kind]
    rows_of = {ENTITY: header.num_entities, RELATION: header.num_relations}
    expected = sum(rows_of[owner] * header.k * _TABLE_DTYPE.itemsize for _, owner in layout)
    if reader.remaining < expected:
        raise CheckpointTruncatedError(
            f"{path}: header declares {expected} bytes of tables, only {reader.remaining} present"
        )
    if n_ent != header.num_entities or n_rel != header.num_relations:
        raise CheckpointCountMismatchError(
            f"{path}: header declares {header.num_entities}/{header.num_relations} "
            f"entities/relations, vocabulary has {n_ent}/{n_rel}"
        )
    if reader.remaining > expected:
        raise CheckpointCountMismatchError(
            f"{path}: {reader.remaining - expected} unexpected trailing bytes"
        )

    tables = {}
    for name, owner in layout:
        shape = (rows_of[owner], header.k)
        raw = reader.take(shape[0] * shape[1] * _TABLE_DTYPE.itemsize, f"table {name}")
        tables[name] = np.frombuffer(raw, dtype=_TABLE_DTYPE).reshape(shape).astype(np.float32)

    try:
        vocab = Vocabulary.from_names(entities, relations)
    except ValueError as e:
        raise CheckpointFormatError(f"{path}: {e}") from e
    params = ModelParams(kind=header.kind, k=header.k, tables=tables, norm=header.norm)
    return Checkpoint(header=header, vocab=vocab, params=params)


def save_checkpoint(
    path: Path | str,
    params: ModelParams,
    vocab: Vocabulary,
    metadata: dict[str, Any] | None = None,
) -> Checkpoint:
    """
    保存检查点（参数表以 32 位小端浮点写入）

    Args:
        path: 输出文件
        params: 模型参数
        vocab: 词表
        metadata: 写入头部的附加信息（JSON 可序列化）

    Returns:
        写入的检查点
    """
    path = Path(path)
    ckpt = Checkpoint.create(params, vocab, metadata)
    data = encode_checkpoint(ckpt)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Saved {params.kind.value} checkpoint to {path} ({len(data)} bytes)")
    return ckpt


def load_checkpoint(path: Path | str) -> Checkpoint:
    """
    读取检查点

    Raises:
        CheckpointError: 文件不存在或无法读取
        CheckpointFormatError / CheckpointTruncatedError / CheckpointCountMismatchError
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    ckpt = decode_checkpoint(data, path)
    logger.info(
        f"Loaded {ckpt.kind.value} checkpoint {path}: k={ckpt.header.k}, "
        f"|E|={ckpt.header.num_entities}, |R|={ckpt.header.num_relations}"
    )
    return ckpt


def check_compatible(params: ModelParams, vocab: Vocabulary, what: str = "parameters") -> None:
    """裸参数没有词表时，只能检查行数是否与数据集词表一致"""
    if params.num_entities != vocab.num_entities or params.num_relations != vocab.num_relations:
        raise VocabularyMismatchError(
            f"{what}: {params.num_entities}/{params.num_relations} entities/relations, "
            f"dataset has {vocab.num_entities}/{vocab.num_relations}"
        )


__all__ = [
    "MAGIC",
    "CHECKPOINT_SUFFIX",
    "CheckpointHeader",
    "Checkpoint",
    "encode_checkpoint",
    "decode_checkpoint",
    "save_checkpoint",
    "load_checkpoint",
    "check_compatible",
]
