"""Translation-based models: TransE and TransD"""

import numpy as np

from kgecore.models.base import KGEModel
from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import DistanceNorm, ModelKind


class TranslationModel(KGEModel):
    """以 ‖·‖₁ 或 ‖·‖₂ 距离为得分的平移模型"""

    def _distance(self, diff: np.ndarray) -> np.ndarray:
        if self.params.norm is DistanceNorm.L1:
            return np.abs(diff).sum(axis=-1)
        return np.sqrt((diff * diff).sum(axis=-1))

    def _distance_grad(self, diff: np.ndarray) -> np.ndarray:
        """距离对差向量的（次）梯度，L1 在 0 处取 0，L2 在原点取 0"""
        if self.params.norm is DistanceNorm.L1:
            return np.sign(diff)
        norm = np.sqrt((diff * diff).sum(axis=-1, keepdims=True))
        safe = np.where(norm > 0, norm, 1.0)
        return np.where(norm > 0, diff / safe, 0.0)


class TransE(TranslationModel):
    """score = ‖h + r − t‖"""

    kind = ModelKind.TRANSE
    constrained_tables = ("entity", "relation")

    def _diff(self, h, r, t) -> np.ndarray:
        ent, rel = self.table("entity"), self.table("relation")
        return ent[h] + rel[r] - ent[t]

    def score(self, h, r, t) -> np.ndarray:
        return self._distance(self._diff(np.asarray(h), np.asarray(r), np.asarray(t)))

    def _grad(self, h, r, t, coef) -> SparseGradient:
        g = self._distance_grad(self._diff(h, r, t)) * coef[:, None]
        grad = SparseGradient()
        grad.add("entity", h, g)
        grad.add("entity", t, -g)
        grad.add("relation", r, g)
        return grad


class TransD(TranslationModel):
    """score = ‖h⊥ + r − t⊥‖，其中 e⊥ = e + r_p (e_p · e)

    这是 (I + r_p e_pᵀ) e 的秩一形式，不构造 k×k 矩阵。
    """

    kind = ModelKind.TRANSD
    constrained_tables = ("entity", "entity_proj", "relation", "relation_proj")

    def _project(self, e, r) -> np.ndarray:
        ent, ent_p = self.table("entity")[e], self.table("entity_proj")[e]
        rel_p = self.table("relation_proj")[r]
        return ent + rel_p * (ent_p * ent).sum(axis=-1, keepdims=True)

    def _diff(self, h, r, t) -> np.ndarray:
        return self._project(h, r) + self.table("relation")[r] - self._project(t, r)

    def score(self, h, r, t) -> np.ndarray:
        return self._distance(self._diff(np.asarray(h), np.asarray(r), np.asarray(t)))

    def _grad(self, h, r, t, coef) -> SparseGradient:
        g = self._distance_grad(self._diff(h, r, t)) * coef[:, None]
        ent, ent_p = self.table("entity"), self.table("entity_proj")
        h_e, h_p, t_e, t_p = ent[h], ent_p[h], ent[t], ent_p[t]
        r_p = self.table("relation_proj")[r]

        g_rp = (g * r_p).sum(axis=1, keepdims=True)
        h_dot = (h_p * h_e).sum(axis=1, keepdims=True)
        t_dot = (t_p * t_e).sum(axis=1, keepdims=True)

        grad = SparseGradient()
        grad.add("entity", h, g + h_p * g_rp)
        grad.add("entity", t, -(g + t_p * g_rp))
        grad.add("entity_proj", h, g_rp * h_e)
        grad.add("entity_proj", t, -g_rp * t_e)
        grad.add("relation", r, g)
        grad.add("relation_proj", r, g * (h_dot - t_dot))
        return grad


__all__ = ["TranslationModel", "TransE", "TransD"]
