"""Latent Cognitive Social Spaces: sentiment, trait and association deflection.

The extended fundamental ``f*`` concatenates the 9-slot ACT fundamental with
actor/object positions on trait dimensions and on association dimensions.
When sentiment, traits and associations change independently the
coefficient matrix ``Z*`` is block diagonal, and the full deflection splits
into three separately weighted deflections, each divided by its block
length.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .affect import CoefficientModel, TermModel, deflection
from .choice import binary_choice_prob
from .errors import DataFormatError, MalformedModelError, UnknownConceptError
from .pcs import BetaScores
from .vignettes import ActContext, VignetteQuestion

SENTIMENT_LENGTH = 9
# Divisor for the scalar, hand-coded trait and association deflections.
SCALAR_BLOCK_LENGTH = 1


@dataclass(frozen=True)
class ExtendedFundamental:
    sentiment: np.ndarray
    traits: np.ndarray = None
    associations: np.ndarray = None

    def __post_init__(self):
        parts = {}
        for name in ("sentiment", "traits", "associations"):
            v = getattr(self, name)
            arr = np.zeros(0) if v is None else np.array(getattr(v, "values", v), dtype=float)
            arr = arr.reshape(-1)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} entries must be finite")
            arr.setflags(write=False)
            parts[name] = arr
        if parts["sentiment"].shape[0] != SENTIMENT_LENGTH:
            raise ValueError("sentiment block must have length 9")
        for name in ("traits", "associations"):
            if parts[name].shape[0] % 2:
                raise ValueError(f"{name} block holds actor and object values; length must be even")
        for name, arr in parts.items():
            object.__setattr__(self, name, arr)

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.sentiment, self.traits, self.associations])

    @property
    def lengths(self) -> tuple[int, int, int]:
        return (len(self.sentiment), len(self.traits), len(self.associations))


@dataclass(frozen=True)
class BlockCoefficientModel:
    """``Z*`` stored as its three diagonal blocks."""

    sentiment_block: CoefficientModel
    trait_block: TermModel | None = None
    association_block: TermModel | None = None

    def __post_init__(self):
        for name in ("trait_block", "association_block"):
            block = getattr(self, name)
            if block is not None and block.n_outputs != block.n_slots:
                raise MalformedModelError(f"{name} must map its slots onto themselves")

    def _blocks(self):
        return (self.sentiment_block, self.trait_block, self.association_block)

    def check(self, f_star: ExtendedFundamental) -> None:
        for block, n in zip(self._blocks(), f_star.lengths):
            have = 0 if block is None else block.n_slots
            if have != n:
                raise MalformedModelError(f"block of size {have} for a fundamental block of {n}")

    def covariates(self, f_star: ExtendedFundamental) -> np.ndarray:
        """``g*(f*)``: each block's covariates from its own slots, concatenated."""
        self.check(f_star)
        parts = (f_star.sentiment, f_star.traits, f_star.associations)
        gs = [b.covariates(x) for b, x in zip(self._blocks(), parts) if b is not None]
        return np.concatenate(gs)

    def matrix(self) -> np.ndarray:
        """The assembled ``Z*`` with its structural zeros."""
        blocks = [b.coefficients for b in self._blocks() if b is not None]
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        Z = np.zeros((rows, cols))
        r = c = 0
        for b in blocks:
            Z[r : r + b.shape[0], c : c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return Z


@dataclass(frozen=True)
class ComponentDeflections:
    d_sentiment: float
    d_trait: float
    d_assoc: float
    lengths: tuple = (SENTIMENT_LENGTH, SCALAR_BLOCK_LENGTH, SCALAR_BLOCK_LENGTH)

    def __post_init__(self):
        for name in ("d_sentiment", "d_trait", "d_assoc"):
            v = float(getattr(self, name))
            if not v >= 0:
                raise ValueError(f"{name} must be non-negative, got {v}")
            object.__setattr__(self, name, v)
        lengths = tuple(int(n) for n in self.lengths)
        if len(lengths) != 3 or any(n < 0 for n in lengths):
            raise ValueError("lengths must be three non-negative integers")
        object.__setattr__(self, "lengths", lengths)

    def scaled(self) -> np.ndarray:
        """Each component divided by its block length (0 for empty blocks)."""
        d = np.array([self.d_sentiment, self.d_trait, self.d_assoc])
        n = np.array(self.lengths, dtype=float)
        return np.divide(d, n, out=np.zeros(3), where=n > 0)


@dataclass(frozen=True)
class LcssWeights:
    w_f: float
    w_ft: float
    w_fk: float

    def __post_init__(self):
        for name in ("w_f", "w_ft", "w_fk"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.w_f, self.w_ft, self.w_fk])


def lcss_deflection_full(f_star: ExtendedFundamental, model: BlockCoefficientModel, w_star) -> float:
    """``sum_j w*_j (f*_j - (Z* g*(f*))_j)^2`` with ``Z*`` assembled in full."""
    x = f_star.values
    w_star = np.asarray(w_star, dtype=float).reshape(-1)
    if w_star.shape != x.shape:
        raise MalformedModelError(f"{w_star.shape[0]} weights for {x.shape[0]} slots")
    tau = model.matrix() @ model.covariates(f_star)
    return float(np.sum(w_star * (x - tau) ** 2))


def per_slot_weights(weights: LcssWeights, lengths) -> np.ndarray:
    """Slot weights under which the full deflection equals the decomposed one."""
    out = []
    for w, n in zip(weights.as_array(), lengths):
        out.extend([w / n] * n)
    return np.array(out)


def lcss_deflection_decomposed(
    f_star: ExtendedFundamental, model: BlockCoefficientModel, weights: LcssWeights
) -> tuple[float, ComponentDeflections]:
    """Weighted sum of the three block deflections, and the blocks themselves."""
    model.check(f_star)
    d_f = deflection(f_star.sentiment, model.sentiment_block)
    comps = []
    for block, x in ((model.trait_block, f_star.traits), (model.association_block, f_star.associations)):
        comps.append(0.0 if block is None else float(np.sum((x - block.predict(x)) ** 2)))
    parts = ComponentDeflections(d_f, comps[0], comps[1], f_star.lengths)
    return float(weights.as_array() @ parts.scaled()), parts


def scored_component_deflections(
    question: VignetteQuestion,
    candidate: str,
    act_context: ActContext | None,
    score_tables: Mapping[tuple[int, str], BetaScores],
    sentiment: float | None = None,
) -> ComponentDeflections:
    """Component deflections of a vignette answer from hand-coded scores.

    Trait (Task 1) and association (Task 2) deflection is the largest score
    in that task's table minus the cue/candidate score, so the best-matching
    identity has zero deflection. Components the question does not specify,
    including every "someone" question, are zero. ``sentiment`` may be
    passed to reuse an already computed ACT deflection.
    """
    if candidate not in question.answers:
        raise ValueError(f"{candidate!r} is not an answer to {question.question_id}")
    if sentiment is None:
        if act_context is None:
            raise ValueError("an ACT context or a precomputed sentiment deflection is required")
        sentiment = act_context.deflection(question, candidate)

    semantic = 0.0
    if question.cued:
        table = score_tables.get((question.task, question.cue))
        if table is None:
            raise UnknownConceptError(question.cue, f"Task {question.task} score table")
        top = task_max_score(score_tables, question.task)
        semantic = top - table[candidate]
    if question.task == 1:
        return ComponentDeflections(sentiment, semantic, 0.0)
    return ComponentDeflections(sentiment, 0.0, semantic)


def task_max_score(score_tables: Mapping[tuple[int, str], BetaScores], task: int) -> float:
    values = [v for (t, _), b in score_tables.items() if t == task for v in b.scores.values()]
    if not values:
        raise UnknownConceptError(f"task {task}", "score table")
    return max(values)


def lcss_probability_from_components(
    comp_a: ComponentDeflections, comp_b: ComponentDeflections, weights: LcssWeights
) -> float:
    w = weights.as_array()
    return binary_choice_prob(-(w @ comp_a.scaled()), -(w @ comp_b.scaled()))


def lcss_probability(
    question: VignetteQuestion,
    weights: LcssWeights,
    act_context: ActContext | None,
    score_tables: Mapping[tuple[int, str], BetaScores],
) -> float:
    """Probability of the first answer under LCSS."""
    comp_a, comp_b = (
        scored_component_deflections(question, c, act_context, score_tables)
        for c in question.answers
    )
    return lcss_probability_from_components(comp_a, comp_b, weights)


def write_lcss_weights(weights: LcssWeights, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("w_f,w_ft,w_fk\n")
        fh.write(",".join(repr(float(v)) for v in weights.as_array()) + "\n")


def read_lcss_weights(path) -> LcssWeights:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows or [c.strip() for c in rows[0]] != ["w_f", "w_ft", "w_fk"]:
        raise DataFormatError("expected header w_f,w_ft,w_fk", path, 1)
    if len(rows) != 2 or len(rows[1]) != 3:
        raise DataFormatError("expected exactly one row of three weights", path, 2)
    try:
        return LcssWeights(*(float(v) for v in rows[1]))
    except ValueError as exc:
        raise DataFormatError(str(exc), path, 2) from None
