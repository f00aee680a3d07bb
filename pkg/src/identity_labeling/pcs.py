"""Parallel constraint satisfaction (PCS) models of identity labeling.

Two pieces live here:

* a generic spreading-activation network whose settled activations give a
  score for each identity node, and
* the reduced score model used on the vignette data, where each identity's
  settled activation (its beta score) is either written down by hand or
  estimated, and the choice between two answers is a logistic function of
  the difference in betas.

The network update rule is interactive-activation-and-competition style.
It stands in for the face-perception dynamics of Freeman and Ambady, whose
exact equations and parameters are not reproduced here; all constants are
configuration on :class:`ActivationParams`.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .choice import binary_choice_prob
from .errors import DataFormatError, MalformedModelError, UnknownConceptError

NODE_ROLES = ("identity", "trait", "setting", "cue", "other")

_DATA_DIR = Path(__file__).parent / "data"
TABLE3_PATH = _DATA_DIR / "table3_betas.csv"
TABLE3_SUPPLEMENT_PATH = _DATA_DIR / "table3_supplement.csv"


@dataclass(frozen=True)
class Node:
    token: str
    role: str = "identity"
    resting: float | None = None

    def __post_init__(self):
        if self.role not in NODE_ROLES:
            raise MalformedModelError(f"unknown node role {self.role!r}")


@dataclass(frozen=True)
class SemanticNetwork:
    """Concepts joined by signed, undirected constraint links.

    A node's ``resting`` of ``None`` means the network-wide resting level
    from :class:`ActivationParams`.
    """

    nodes: tuple
    edges: tuple = ()

    def __post_init__(self):
        nodes = tuple(
            n if isinstance(n, Node) else Node(n) if isinstance(n, str) else Node(*n)
            for n in self.nodes
        )
        tokens = [n.token for n in nodes]
        if len(set(tokens)) != len(tokens):
            raise MalformedModelError("duplicate node tokens")
        known = set(tokens)
        edges = []
        for u, v, w in self.edges:
            if u == v:
                raise MalformedModelError(f"self-loop on {u!r}")
            for t in (u, v):
                if t not in known:
                    raise MalformedModelError(f"edge endpoint {t!r} is not a node")
            w = float(w)
            if not np.isfinite(w):
                raise MalformedModelError(f"non-finite weight on edge {u!r}-{v!r}")
            edges.append((u, v, w))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def tokens(self) -> list[str]:
        return [n.token for n in self.nodes]

    def weight_matrix(self) -> np.ndarray:
        index = {t: i for i, t in enumerate(self.tokens)}
        W = np.zeros((len(self.nodes), len(self.nodes)))
        for u, v, w in self.edges:
            W[index[u], index[v]] += w
            W[index[v], index[u]] += w
        return W


@dataclass(frozen=True)
class ActivationParams:
    floor: float = -0.2
    ceiling: float = 1.0
    resting: float = -0.1
    decay: float = 0.1
    step: float = 0.1
    tolerance: float = 1e-6
    max_iterations: int = 10_000
    cue_level: float | None = None  # defaults to ceiling

    def __post_init__(self):
        if not self.floor <= self.resting <= self.ceiling:
            raise ValueError("need floor <= resting <= ceiling")


@dataclass
class ActivationState:
    tokens: list
    activation: np.ndarray
    iterations: int
    converged: bool

    def __getitem__(self, token: str) -> float:
        try:
            return float(self.activation[self.tokens.index(token)])
        except ValueError:
            raise UnknownConceptError(token, "network node") from None


def activation_step(a, W, rest, params: ActivationParams, clamped) -> np.ndarray:
    """One synchronous update of every node.

    Net input is the weighted sum of neighbours' positive activation. Positive
    input drives a node toward the ceiling, negative input toward the floor,
    and every node decays toward its resting level.
    """
    net = W @ np.maximum(a, 0.0)
    drive = np.where(net > 0, net * (params.ceiling - a), net * (a - params.floor))
    new = a + params.step * (drive - params.decay * (a - rest))
    new = np.clip(new, params.floor, params.ceiling)
    new[clamped] = a[clamped]
    return new


def spread_activation(
    net: SemanticNetwork, cues: Iterable[str], params: ActivationParams | None = None
) -> ActivationState:
    """Clamp the cue nodes high and iterate until the network settles."""
    params = params or ActivationParams()
    tokens = net.tokens
    index = {t: i for i, t in enumerate(tokens)}
    clamped = np.zeros(len(tokens), dtype=bool)
    for c in cues:
        if c not in index:
            raise UnknownConceptError(c, "cue")
        clamped[index[c]] = True

    rest = np.array(
        [params.resting if n.resting is None else n.resting for n in net.nodes], dtype=float
    )
    a = rest.copy()
    a[clamped] = params.ceiling if params.cue_level is None else params.cue_level
    W = net.weight_matrix()

    converged = False
    it = 0
    while it < params.max_iterations:
        new = activation_step(a, W, rest, params, clamped)
        it += 1
        change = np.max(np.abs(new - a)) if len(a) else 0.0
        a = new
        if change < params.tolerance:
            converged = True
            break
    return ActivationState(tokens, a, it, converged)


@dataclass(frozen=True)
class BetaScores:
    """Settled activation (beta) for each identity under one cue."""

    scenario: str
    scores: Mapping[str, float]
    task: int | None = None

    def __post_init__(self):
        scores = {str(k): float(v) for k, v in dict(self.scores).items()}
        for k, v in scores.items():
            if not np.isfinite(v):
                raise ValueError(f"beta for {k!r} must be finite")
        object.__setattr__(self, "scores", scores)

    def __getitem__(self, identity: str) -> float:
        try:
            return self.scores[identity]
        except KeyError:
            raise UnknownConceptError(identity, f"beta score under cue {self.scenario!r}") from None

    def __contains__(self, identity) -> bool:
        return identity in self.scores


def beta_from_activation(
    state: ActivationState, identities: Sequence[str], scenario: str = ""
) -> BetaScores:
    return BetaScores(scenario, {i: state[i] for i in identities})


def pcs_probability(beta: BetaScores, answer_a: str, answer_b: str) -> float:
    """Probability of choosing ``answer_a`` over ``answer_b``."""
    return binary_choice_prob(beta[answer_a], beta[answer_b])


# ---------------------------------------------------------------------------
# File formats


def load_handcoded_betas(*paths) -> list[BetaScores]:
    """Read ``task,cue,identity,beta`` tables into one BetaScores per (task, cue).

    Several files may be given; they are merged. A key repeated with the
    same value is accepted, a conflicting value is an error.
    """
    if not paths:
        paths = (TABLE3_PATH, TABLE3_SUPPLEMENT_PATH)
    grouped: dict[tuple[int, str], dict[str, float]] = defaultdict(dict)
    for path in paths:
        path = Path(path)
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["task", "cue", "identity", "beta"]:
                raise DataFormatError("expected header task,cue,identity,beta", path, 1)
            for lineno, row in enumerate(reader, start=2):
                if not row or not any(c.strip() for c in row):
                    continue
                if len(row) != 4:
                    raise DataFormatError(f"expected 4 fields, got {len(row)}", path, lineno)
                try:
                    task = int(row[0])
                    beta = float(row[3])
                except ValueError as exc:
                    raise DataFormatError(str(exc), path, lineno) from None
                if not np.isfinite(beta):
                    raise DataFormatError("beta must be finite", path, lineno)
                cue, identity = row[1].strip(), row[2].strip()
                scores = grouped[(task, cue)]
                if identity in scores and scores[identity] != beta:
                    raise DataFormatError(
                        f"conflicting beta for {identity!r} under {cue!r}", path, lineno
                    )
                scores[identity] = beta
    return [BetaScores(cue, scores, task) for (task, cue), scores in grouped.items()]


def beta_table(scores: Iterable[BetaScores]) -> dict[tuple[int, str], BetaScores]:
    """Index BetaScores by ``(task, cue)``."""
    return {(b.task, b.scenario): b for b in scores}


def write_betas(scores: Iterable[BetaScores], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["task", "cue", "identity", "beta"])
        for b in scores:
            for identity, value in b.scores.items():
                writer.writerow([b.task, b.scenario, identity, repr(value)])


def load_network(path) -> SemanticNetwork:
    """Read a network file with ``[nodes]`` and ``[edges]`` CSV sections.

    ::

        [nodes]
        token,role,resting
        soccer coach,cue,
        soccer player,identity,-0.1
        [edges]
        from,to,weight
        soccer coach,soccer player,0.5
    """
    path = Path(path)
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not any(c.strip() for c in row):
                continue
            first = row[0].strip()
            if first.startswith("[") and first.endswith("]"):
                current = first[1:-1].lower()
                if current not in ("nodes", "edges"):
                    raise DataFormatError(f"unknown section {first}", path, lineno)
                sections[current] = []
                continue
            if current is None:
                raise DataFormatError("data before any section header", path, lineno)
            sections[current].append((lineno, [c.strip() for c in row]))

    expected = {"nodes": ["token", "role", "resting"], "edges": ["from", "to", "weight"]}
    for name, header in expected.items():
        rows = sections.get(name)
        if not rows or rows[0][1] != header:
            raise DataFormatError(f"section [{name}] needs header {','.join(header)}", path)

    nodes = []
    for lineno, row in sections["nodes"][1:]:
        if len(row) != 3:
            raise DataFormatError("node rows need 3 fields", path, lineno)
        try:
            resting = float(row[2]) if row[2] else None
            nodes.append(Node(row[0], row[1], resting))
        except (ValueError, MalformedModelError) as exc:
            raise DataFormatError(str(exc), path, lineno) from None
    edges = []
    for lineno, row in sections["edges"][1:]:
        if len(row) != 3:
            raise DataFormatError("edge rows need 3 fields", path, lineno)
        try:
            edges.append((row[0], row[1], float(row[2])))
        except ValueError as exc:
            raise DataFormatError(str(exc), path, lineno) from None
    try:
        return SemanticNetwork(tuple(nodes), tuple(edges))
    except MalformedModelError as exc:
        raise DataFormatError(str(exc), path) from None
