"""Single-triple model operations on plain parameter records"""

import numpy as np

from kgecore.core.model_registry import build_model
from kgecore.data.loader import Triple
from kgecore.models.gradient import SparseGradient
from kgecore.models.params import ModelParams


def score(params: ModelParams, triple: Triple) -> float:
    h, r, t = triple
    return float(build_model(params).score(h, r, t))


def grad_score(params: ModelParams, triple: Triple) -> SparseGradient:
    h, r, t = triple
    return build_model(params).grad_score([h], [r], [t])


def goodness(params: ModelParams, triple: Triple) -> float:
    h, r, t = triple
    return float(build_model(params).goodness(h, r, t))


def project_constraints(
    params: ModelParams, rows: dict[str, np.ndarray] | None = None
) -> ModelParams:
    """原地投影并返回同一个参数对象；DistMult / ComplEx 无约束，直接返回"""
    build_model(params).project_constraints(rows)
    return params


def l2_reg_gradient(
    params: ModelParams, touched: dict[str, np.ndarray] | SparseGradient, lam: float
) -> SparseGradient:
    if isinstance(touched, SparseGradient):
        touched = touched.touched()
    return build_model(params).l2_reg_gradient(touched, lam)


__all__ = ["score", "grad_score", "goodness", "project_constraints", "l2_reg_gradient"]
