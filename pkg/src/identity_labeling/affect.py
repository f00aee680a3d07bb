"""Affect control theory core: EPA space, impression change and deflection.

An event is an actor, a behavior and an object-person, each located in
Evaluation/Potency/Activity space. The nine numbers are laid out as::

    [a_e, a_p, a_a, b_e, b_p, b_a, o_e, o_p, o_a]

Impression change is a linear regression on products of those slots,
``tau = Z @ g(f)``, where each covariate in ``g`` is the product of a
multiset of slots (the empty product is the constant term). Deflection is
the weighted squared distance between the fundamental ``f`` and ``tau``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import ClassVar, Iterable, Mapping, Sequence

import numpy as np

from .errors import DataFormatError, MalformedModelError, UnknownConceptError

EVENT_SLOTS = ("AE", "AP", "AA", "BE", "BP", "BA", "OE", "OP", "OA")
MODIFIER_SLOTS = ("VE", "VP", "VA", "IE", "IP", "IA")
CONCEPT_TYPES = ("identity", "behavior", "modifier")


@dataclass(frozen=True)
class EpaVector:
    """A concept's position in Evaluation/Potency/Activity space."""

    e: float
    p: float
    a: float

    def __post_init__(self):
        for name in ("e", "p", "a"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"EPA component {name} must be finite, got {v}")
            object.__setattr__(self, name, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.e, self.p, self.a], dtype=float)

    @classmethod
    def from_array(cls, values) -> "EpaVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (3,):
            raise ValueError(f"expected 3 EPA values, got shape {values.shape}")
        return cls(*values)


def _as_vector(values, length: int, what: str) -> np.ndarray:
    arr = np.asarray(getattr(values, "values", values), dtype=float)
    if arr.shape != (length,):
        raise ValueError(f"{what} must have length {length}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} entries must be finite")
    return arr


@dataclass(frozen=True)
class EventFundamental:
    """The 9-slot fundamental sentiment vector of an event."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values, 9, "event fundamental")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_parts(cls, actor: EpaVector, behavior: EpaVector, obj: EpaVector):
        return cls(np.concatenate([actor.as_array(), behavior.as_array(), obj.as_array()]))


@dataclass(frozen=True)
class TransientImpression:
    """Post-event transient impressions, same layout as the fundamental."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values, 9, "transient impression")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


@dataclass(frozen=True)
class TermModel:
    """Linear model over products of input slots.

    Attributes:
        terms: one tuple of slot indices per covariate; ``()`` is the
            constant term, ``(0, 3)`` the product of slots 0 and 3.
        coefficients: matrix of shape ``(n_outputs, len(terms))``.
        n_slots: length of the input vector the terms index into.
    """

    terms: tuple
    coefficients: np.ndarray
    n_slots: int

    def __post_init__(self):
        terms = tuple(tuple(int(i) for i in t) for t in self.terms)
        for t in terms:
            for i in t:
                if not 0 <= i < self.n_slots:
                    raise MalformedModelError(
                        f"term index {i} out of range 0..{self.n_slots - 1}"
                    )
        coef = np.array(self.coefficients, dtype=float)
        if coef.ndim != 2:
            raise MalformedModelError("coefficient matrix must be 2-dimensional")
        if coef.shape[1] != len(terms):
            raise MalformedModelError(
                f"coefficient matrix has {coef.shape[1]} columns for {len(terms)} terms"
            )
        if not np.all(np.isfinite(coef)):
            raise MalformedModelError("coefficients must be finite")
        coef.setflags(write=False)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "coefficients", coef)

    @property
    def n_outputs(self) -> int:
        return self.coefficients.shape[0]

    def covariates(self, x) -> np.ndarray:
        """Evaluate ``g(x)``: one product per term."""
        x = _as_vector(x, self.n_slots, "model input")
        return np.array([np.prod(x[list(t)]) if t else 1.0 for t in self.terms])

    def predict(self, x) -> np.ndarray:
        return self.coefficients @ self.covariates(x)

    @classmethod
    def identity(cls, n: int) -> "TermModel":
        """Model whose output copies its input (one linear term per slot)."""
        return cls(tuple((i,) for i in range(n)), np.eye(n), n)


@dataclass(frozen=True)
class CoefficientModel(TermModel):
    """Impression-change equations for a 9-slot event (``tau = Z g(f)``)."""

    n_slots: int = 9
    SLOT_TOKENS: ClassVar[tuple] = EVENT_SLOTS
    N_OUTPUTS: ClassVar[int] = 9

    def __post_init__(self):
        if self.n_slots != len(self.SLOT_TOKENS):
            raise MalformedModelError(
                f"{type(self).__name__} must index {len(self.SLOT_TOKENS)} slots"
            )
        super().__post_init__()
        if self.n_outputs != self.N_OUTPUTS:
            raise MalformedModelError(
                f"{type(self).__name__} needs {self.N_OUTPUTS} output rows, "
                f"got {self.n_outputs}"
            )

    @classmethod
    def identity(cls, n=None):
        """Selection model passing the last ``N_OUTPUTS`` slots through.

        For events this is ``tau = f``; for modifiers it returns the
        unmodified identity EPA.
        """
        n = len(cls.SLOT_TOKENS)
        coef = np.zeros((cls.N_OUTPUTS, n))
        coef[:, n - cls.N_OUTPUTS :] = np.eye(cls.N_OUTPUTS)
        return cls(tuple((i,) for i in range(n)), coef)


@dataclass(frozen=True)
class ModifierModel(CoefficientModel):
    """Modifier-identity amalgamation over ``[v_e, v_p, v_a, i_e, i_p, i_a]``."""

    n_slots: int = 6
    SLOT_TOKENS: ClassVar[tuple] = MODIFIER_SLOTS
    N_OUTPUTS: ClassVar[int] = 3


@dataclass(frozen=True)
class DeflectionWeights:
    w: np.ndarray = None

    def __post_init__(self):
        w = np.ones(9) if self.w is None else _as_vector(self.w, 9, "deflection weights")
        if np.any(w < 0):
            raise ValueError("deflection weights must be non-negative")
        w = np.array(w, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "w", w)


def expand_covariates(f, model: TermModel) -> np.ndarray:
    """Covariate vector ``g(f)`` for ``model``'s terms."""
    return model.covariates(f)


def apply_modifier(modifier: EpaVector, identity: EpaVector, model: ModifierModel) -> EpaVector:
    """EPA of the identity as qualified by ``modifier`` (e.g. an old man)."""
    x = np.concatenate([modifier.as_array(), identity.as_array()])
    return EpaVector.from_array(model.predict(x))


def impression_change(f, model: CoefficientModel) -> TransientImpression:
    return TransientImpression(model.predict(f))


def deflection(f, model: CoefficientModel, w: DeflectionWeights | None = None) -> float:
    """Weighted squared distance between fundamentals and transients."""
    f = _as_vector(f, 9, "event fundamental")
    tau = model.predict(f)
    weights = np.ones(9) if w is None else w.w
    return float(np.sum(weights * (f - tau) ** 2))


def act_phi(
    candidate: EpaVector,
    behavior: EpaVector,
    other: EpaVector,
    role: str,
    model: CoefficientModel,
    w: DeflectionWeights | None = None,
    modifier: tuple[EpaVector, ModifierModel] | None = None,
) -> float:
    """Score of a candidate identity: the negated deflection of its event.

    ``role`` is ``"actor"`` when the candidate performs the behavior on
    ``other`` and ``"object"`` when ``other`` performs it on the candidate.
    A ``(modifier_epa, modifier_model)`` pair is applied to the candidate
    before the event is assembled.
    """
    if modifier is not None:
        mod_epa, mod_model = modifier
        candidate = apply_modifier(mod_epa, candidate, mod_model)
    if role == "actor":
        f = EventFundamental.from_parts(candidate, behavior, other)
    elif role == "object":
        f = EventFundamental.from_parts(other, behavior, candidate)
    else:
        raise ValueError(f"role must be 'actor' or 'object', got {role!r}")
    return -deflection(f, model, w)


# ---------------------------------------------------------------------------
# File formats


class EpaDictionary(Mapping):
    """EPA ratings keyed by ``(term, type)``."""

    def __init__(self, entries: Mapping[tuple[str, str], EpaVector]):
        self._entries = dict(entries)

    def __getitem__(self, key):
        return self._entries[key]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def lookup(self, term: str, kind: str) -> EpaVector:
        try:
            return self._entries[(term, kind)]
        except KeyError:
            raise UnknownConceptError(term, kind) from None


def load_epa_dictionary(path) -> EpaDictionary:
    """Read a ``term,type,E,P,A`` CSV."""
    path = Path(path)
    entries = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["term", "type", "E", "P", "A"]:
            raise DataFormatError("expected header term,type,E,P,A", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 5:
                raise DataFormatError(f"expected 5 fields, got {len(row)}", path, lineno)
            term, kind = row[0].strip(), row[1].strip()
            if kind not in CONCEPT_TYPES:
                raise DataFormatError(f"unknown concept type {kind!r}", path, lineno)
            try:
                epa = EpaVector(*(float(v) for v in row[2:]))
            except ValueError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
            if (term, kind) in entries:
                raise DataFormatError(f"duplicate entry {term!r} ({kind})", path, lineno)
            entries[(term, kind)] = epa
    return EpaDictionary(entries)


def parse_term(token: str, slots: Sequence[str]) -> tuple[int, ...]:
    """``"1"`` -> ``()``, ``"AE*BE"`` -> ``(0, 3)``."""
    token = token.strip().upper()
    if token == "1":
        return ()
    lookup = {s: i for i, s in enumerate(slots)}
    idx = []
    for part in token.split("*"):
        part = part.strip()
        if part not in lookup:
            raise MalformedModelError(f"unknown slot token {part!r} in term {token!r}")
        idx.append(lookup[part])
    return tuple(idx)


def format_term(term: Iterable[int], slots: Sequence[str]) -> str:
    term = tuple(term)
    return "*".join(slots[i] for i in term) if term else "1"


def _read_term_file(path, slots, n_out):
    path = Path(path)
    terms, columns = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != n_out + 1:
                raise DataFormatError(
                    f"expected a term and {n_out} coefficients, got {len(fields)} fields",
                    path,
                    lineno,
                )
            try:
                terms.append(parse_term(fields[0], slots))
                columns.append([float(v) for v in fields[1:]])
            except (MalformedModelError, ValueError) as exc:
                raise DataFormatError(str(exc), path, lineno) from None
    if not terms:
        raise DataFormatError("no coefficient lines found", path)
    return tuple(terms), np.array(columns).T


def load_coefficients(path) -> CoefficientModel:
    """Read impression-change equations: ``TERM z_ae z_ap ... z_oa`` per line."""
    terms, coef = _read_term_file(path, EVENT_SLOTS, 9)
    return CoefficientModel(terms, coef)


def load_modifier_coefficients(path) -> ModifierModel:
    """Read modifier equations: ``TERM z_e z_p z_a`` per line."""
    terms, coef = _read_term_file(path, MODIFIER_SLOTS, 3)
    return ModifierModel(terms, coef)


def write_coefficients(model: CoefficientModel, path) -> None:
    slots = type(model).SLOT_TOKENS
    with open(path, "w", encoding="utf-8") as fh:
        for j, term in enumerate(model.terms):
            values = " ".join(repr(float(v)) for v in model.coefficients[:, j])
            fh.write(f"{format_term(term, slots)} {values}\n")
