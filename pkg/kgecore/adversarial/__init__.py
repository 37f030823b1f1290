"""Adversarial negative generation and discriminator training"""

from kgecore.adversarial.generator import (
    GeneratorDistribution,
    batch_generator_gradient,
    generator_distribution,
    generator_probabilities,
    generator_step,
    grad_log_prob,
    sample_indices,
    sample_negative,
)
from kgecore.adversarial.trainer import (
    AdversarialResult,
    AdversarialState,
    AdversarialTrainer,
    GeneratedNegative,
    adversarial_train,
    discriminator_batch_gradient,
    discriminator_step,
    reward,
    update_baseline,
)

__all__ = [
    "GeneratorDistribution",
    "generator_distribution",
    "generator_probabilities",
    "sample_indices",
    "sample_negative",
    "grad_log_prob",
    "generator_step",
    "batch_generator_gradient",
    "discriminator_step",
    "discriminator_batch_gradient",
    "reward",
    "update_baseline",
    "GeneratedNegative",
    "AdversarialState",
    "AdversarialResult",
    "AdversarialTrainer",
    "adversarial_train",
]
