"""Discrete choice layer: turn per-candidate scores into label probabilities."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScoredCandidates:
    labels: tuple
    phi: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        phi = np.array(self.phi, dtype=float).reshape(-1)
        if len(labels) == 0:
            raise ValueError("at least one candidate is required")
        if len(labels) != phi.shape[0]:
            raise ValueError(f"{len(labels)} labels but {phi.shape[0]} scores")
        if not np.all(np.isfinite(phi)):
            raise ValueError("scores must be finite")
        phi.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class LabelDistribution:
    labels: tuple
    prob: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        prob = np.array(self.prob, dtype=float).reshape(-1)
        if len(labels) != prob.shape[0] or not labels:
            raise ValueError("labels and probabilities must be non-empty and aligned")
        if np.any(prob < 0) or np.any(prob > 1) or abs(prob.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must lie in [0, 1] and sum to 1")
        prob.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "prob", prob)

    def __getitem__(self, label):
        return float(self.prob[self.labels.index(label)])


def softmax_distribution(scored: ScoredCandidates) -> LabelDistribution:
    """Multinomial logit over the candidates' scores."""
    z = scored.phi - scored.phi.max()
    e = np.exp(z)
    p = e / e.sum()
    return LabelDistribution(scored.labels, p)


def binary_choice_prob(phi_a: float, phi_b: float) -> float:
    """Probability that ``a`` is chosen over ``b``: ``1 / (1 + exp(phi_b - phi_a))``."""
    d = float(phi_b) - float(phi_a)
    if d >= 0:
        ed = math.exp(-d) if d < 745 else 0.0
        return ed / (1.0 + ed)
    return 1.0 / (1.0 + math.exp(d))


def argmax_label(dist: LabelDistribution):
    """Most probable label; the first one wins ties."""
    return dist.labels[int(np.argmax(dist.prob))]
