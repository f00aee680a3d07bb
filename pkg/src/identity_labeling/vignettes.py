"""Vignette questions and the ACT reading of each question.

Task 1 questions show a (possibly named) actor doing something to an
object-person and ask which identity the actor holds; the name enters ACT
as a modifier on the candidate identity. Task 2 questions show a cue
identity doing something to someone and ask which identity that someone
holds, so the candidate fills the object slot.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .affect import (
    CoefficientModel,
    DeflectionWeights,
    EpaDictionary,
    EpaVector,
    EventFundamental,
    ModifierModel,
    apply_modifier,
    deflection,
)
from .choice import binary_choice_prob
from .errors import DataFormatError, UnknownConceptError

SOMEONE = "someone"
NAMES = ("Ethel", "Harold", "Brittany", "Johnny")

TRAIT_CONDITIONS = ("Old,Female", "Old,Male", "Young,Female", "Young,Male", "No trait")
DEFLECTION_CONDITIONS = ("High", "Low")
ASSOCIATION_CONDITIONS = (
    "High (Role Pair)",
    "Medium (Same Institution)",
    "Low (Different Institution)",
    "None",
)

VIGNETTES_PATH = Path(__file__).parent / "data" / "vignettes.csv"

_COLUMNS = [
    "question_id",
    "task",
    "cue",
    "behavior",
    "object",
    "answer_a",
    "answer_b",
    "trait_condition",
    "deflection_condition",
    "association_condition",
]


@dataclass(frozen=True)
class VignetteQuestion:
    question_id: str
    task: int
    cue: str
    behavior: str
    answers: tuple
    deflection_condition: str
    object: str | None = None
    trait_condition: str | None = None
    association_condition: str | None = None

    def __post_init__(self):
        answers = tuple(self.answers)
        if len(answers) != 2 or answers[0] == answers[1]:
            raise ValueError(f"{self.question_id}: need exactly two distinct answers")
        object.__setattr__(self, "answers", answers)
        if self.task not in (1, 2):
            raise ValueError(f"{self.question_id}: task must be 1 or 2")
        if self.deflection_condition not in DEFLECTION_CONDITIONS:
            raise ValueError(
                f"{self.question_id}: unknown deflection condition {self.deflection_condition!r}"
            )
        if self.task == 1:
            if not self.object:
                raise ValueError(f"{self.question_id}: Task 1 questions need an object")
            if self.trait_condition not in TRAIT_CONDITIONS:
                raise ValueError(
                    f"{self.question_id}: unknown trait condition {self.trait_condition!r}"
                )
        else:
            if self.association_condition not in ASSOCIATION_CONDITIONS:
                raise ValueError(
                    f"{self.question_id}: unknown association condition "
                    f"{self.association_condition!r}"
                )

    @property
    def answer_a(self) -> str:
        return self.answers[0]

    @property
    def answer_b(self) -> str:
        return self.answers[1]

    @property
    def cued(self) -> bool:
        """True when the cue carries trait or association information."""
        return self.cue != SOMEONE

    @property
    def text(self) -> str:
        a, b = self.answers
        if self.task == 1:
            return f"{self.cue} {self.behavior} {self.object}: {a} or {b}?"
        return f"{self.cue} {self.behavior} someone: {a} or {b}?"


def load_vignettes(path=None) -> list[VignetteQuestion]:
    """Read the vignette CSV (defaults to the shipped 40 questions)."""
    path = Path(path) if path is not None else VIGNETTES_PATH
    questions = []
    seen = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != _COLUMNS:
            raise DataFormatError(f"expected header {','.join(_COLUMNS)}", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != len(_COLUMNS):
                raise DataFormatError(
                    f"expected {len(_COLUMNS)} fields, got {len(row)}", path, lineno
                )
            rec = dict(zip(_COLUMNS, (c.strip() for c in row)))
            qid = rec["question_id"]
            if qid in seen:
                raise DataFormatError(
                    f"duplicate question id {qid!r} (first seen on line {seen[qid]})",
                    path,
                    lineno,
                )
            seen[qid] = lineno
            try:
                questions.append(
                    VignetteQuestion(
                        question_id=qid,
                        task=int(rec["task"]),
                        cue=rec["cue"],
                        behavior=rec["behavior"],
                        object=rec["object"] or None,
                        answers=(rec["answer_a"], rec["answer_b"]),
                        trait_condition=rec["trait_condition"] or None,
                        deflection_condition=rec["deflection_condition"],
                        association_condition=rec["association_condition"] or None,
                    )
                )
            except ValueError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
    return questions


def load_name_epa(path, required=NAMES) -> dict[str, EpaVector]:
    """Read a ``name,E,P,A`` CSV of the sentiments of the Task 1 names."""
    path = Path(path)
    names = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["name", "E", "P", "A"]:
            raise DataFormatError("expected header name,E,P,A", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataFormatError(f"expected 4 fields, got {len(row)}", path, lineno)
            try:
                names[row[0].strip()] = EpaVector(*(float(v) for v in row[1:]))
            except ValueError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
    for name in required:
        if name not in names:
            raise UnknownConceptError(name, f"name EPA file {path}")
    return names


@dataclass(frozen=True)
class ActContext:
    """Everything ACT needs to score a vignette question."""

    dictionary: EpaDictionary
    impression: CoefficientModel
    modifier: ModifierModel | None = None
    names: Mapping[str, EpaVector] = field(default_factory=dict)
    weights: DeflectionWeights | None = None

    def event(self, question: VignetteQuestion, candidate: str) -> EventFundamental:
        """The event fundamental with ``candidate`` filling the unknown slot."""
        lookup = self.dictionary.lookup
        cand = lookup(candidate, "identity")
        behavior = lookup(question.behavior, "behavior")
        if question.task == 1:
            if question.cued:
                if question.cue not in self.names:
                    raise UnknownConceptError(question.cue, "name")
                if self.modifier is None:
                    raise UnknownConceptError(question.cue, "modifier equations")
                cand = apply_modifier(self.names[question.cue], cand, self.modifier)
            return EventFundamental.from_parts(cand, behavior, lookup(question.object, "identity"))
        actor = lookup(question.cue, "identity")
        return EventFundamental.from_parts(actor, behavior, cand)

    def deflection(self, question: VignetteQuestion, candidate: str) -> float:
        return deflection(self.event(question, candidate), self.impression, self.weights)

    def probability(self, question: VignetteQuestion) -> float:
        """ACT's probability of the first answer: logistic in negated deflections."""
        d_a, d_b = (self.deflection(question, c) for c in question.answers)
        return binary_choice_prob(-d_a, -d_b)
