"""Embedding models: TransE, TransD, DistMult, ComplEx"""

from kgecore.models.base import KGEModel
from kgecore.models.bilinear import ComplEx, DistMult
from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import DistanceNorm, ModelKind
from kgecore.models.params import PRECISION_DTYPES, TABLE_LAYOUT, ModelParams
from kgecore.models.translation import TransD, TransE

__all__ = [
    "KGEModel",
    "TransE",
    "TransD",
    "DistMult",
    "ComplEx",
    "SparseGradient",
    "ModelKind",
    "DistanceNorm",
    "ModelParams",
    "TABLE_LAYOUT",
    "PRECISION_DTYPES",
]
