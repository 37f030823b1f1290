"""Losses, Adam and the pre-training loop"""

from kgecore.training.losses import (
    log_softmax_grad,
    log_softmax_loss,
    logsumexp,
    marginal_loss,
    marginal_loss_grad,
    softmax,
)
from kgecore.training.optimizer import AdamState, adam_step
from kgecore.training.pretrain import Pretrainer, PretrainResult, pretrain
from kgecore.training.report import EvalPoint, TrainReport

__all__ = [
    "softmax",
    "logsumexp",
    "marginal_loss",
    "marginal_loss_grad",
    "log_softmax_loss",
    "log_softmax_grad",
    "AdamState",
    "adam_step",
    "EvalPoint",
    "TrainReport",
    "Pretrainer",
    "PretrainResult",
    "pretrain",
]
