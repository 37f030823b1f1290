"""Bilinear softmax models: DistMult and ComplEx"""

import numpy as np

from kgecore.models.base import KGEModel
from kgecore.models.gradient import SparseGradient
from kgecore.models.kinds import ModelKind


class DistMult(KGEModel):
    """score = Σ hᵢ rᵢ tᵢ"""

    kind = ModelKind.DISTMULT
    regularized = True

    def score(self, h, r, t) -> np.ndarray:
        ent, rel = self.table("entity"), self.table("relation")
        return (ent[np.asarray(h)] * rel[np.asarray(r)] * ent[np.asarray(t)]).sum(axis=-1)

    def _grad(self, h, r, t, coef) -> SparseGradient:
        ent, rel = self.table("entity"), self.table("relation")
        e_h, e_r, e_t = ent[h], rel[r], ent[t]
        c = coef[:, None]
        grad = SparseGradient()
        grad.add("entity", h, c * e_r * e_t)
        grad.add("entity", t, c * e_h * e_r)
        grad.add("relation", r, c * e_h * e_t)
        return grad


class ComplEx(KGEModel):
    """score = Re(Σ hᵢ rᵢ conj(tᵢ))，实部与虚部分表存储"""

    kind = ModelKind.COMPLEX
    regularized = True

    def _parts(self, h, r, t):
        a, b = self.table("entity_re")[h], self.table("entity_im")[h]
        c, d = self.table("relation_re")[r], self.table("relation_im")[r]
        e, f = self.table("entity_re")[t], self.table("entity_im")[t]
        return a, b, c, d, e, f

    def score(self, h, r, t) -> np.ndarray:
        a, b, c, d, e, f = self._parts(np.asarray(h), np.asarray(r), np.asarray(t))
        return (a * c * e - b * d * e + a * d * f + b * c * f).sum(axis=-1)

    def _grad(self, h, r, t, coef) -> SparseGradient:
        a, b, c, d, e, f = self._parts(h, r, t)
        k = coef[:, None]
        grad = SparseGradient()
        grad.add("entity_re", h, k * (c * e + d * f))
        grad.add("entity_im", h, k * (c * f - d * e))
        grad.add("relation_re", r, k * (a * e + b * f))
        grad.add("relation_im", r, k * (a * f - b * e))
        grad.add("entity_re", t, k * (a * c - b * d))
        grad.add("entity_im", t, k * (a * d + b * c))
        return grad


__all__ = ["DistMult", "ComplEx"]
