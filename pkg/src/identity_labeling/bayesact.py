"""BayesACT's potential over fundamental/transient pairs, point-mass case.

BayesACT treats ``exp(-(f' - tau')^T Sigma^{-1} (f' - tau'))`` as an
unnormalised potential. When the fundamentals and transients are points
rather than distributions, normalising that potential over candidate
identities is a multinomial logit whose scores are the log-potentials, and
with ``Sigma^{-1} = diag(w)`` those scores are exactly negated ACT
deflections.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .choice import LabelDistribution, ScoredCandidates, softmax_distribution
from .errors import DataFormatError, MalformedModelError


@dataclass(frozen=True)
class PotentialConfig:
    sigma_inverse: np.ndarray = None

    def __post_init__(self):
        m = np.eye(9) if self.sigma_inverse is None else np.array(self.sigma_inverse, dtype=float)
        if m.shape != (9, 9):
            raise MalformedModelError(f"Sigma^-1 must be 9x9, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise MalformedModelError("Sigma^-1 entries must be finite")
        if np.max(np.abs(m - m.T)) > 1e-10:
            raise MalformedModelError("Sigma^-1 must be symmetric")
        try:
            np.linalg.cholesky(m)
        except np.linalg.LinAlgError:
            raise MalformedModelError("Sigma^-1 must be positive definite") from None
        m.setflags(write=False)
        object.__setattr__(self, "sigma_inverse", m)

    @classmethod
    def diagonal(cls, w) -> "PotentialConfig":
        return cls(np.diag(np.asarray(w, dtype=float)))


def _vec9(x):
    v = np.asarray(getattr(x, "values", x), dtype=float).reshape(-1)
    if v.shape != (9,):
        raise ValueError(f"expected a length-9 vector, got shape {v.shape}")
    return v


def log_potential(f_prime, tau_prime, cfg: PotentialConfig | None = None) -> float:
    cfg = cfg or PotentialConfig()
    d = _vec9(f_prime) - _vec9(tau_prime)
    return -float(d @ cfg.sigma_inverse @ d)


def bayesact_potential(f_prime, tau_prime, cfg: PotentialConfig | None = None) -> float:
    return float(np.exp(log_potential(f_prime, tau_prime, cfg)))


def bayesact_choice(
    candidates: Sequence[tuple], cfg: PotentialConfig | None = None, labels: Sequence | None = None
) -> LabelDistribution:
    """Normalise potentials over candidates given as ``(f', tau')`` pairs."""
    if not candidates:
        raise ValueError("at least one candidate is required")
    labels = list(labels) if labels is not None else list(range(len(candidates)))
    phi = [log_potential(f, t, cfg) for f, t in candidates]
    return softmax_distribution(ScoredCandidates(labels, phi))


def load_sigma_inverse(path) -> PotentialConfig:
    """Read ``Sigma^-1`` from a headerless CSV of 9 rows of 9 numbers."""
    path = Path(path)
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 9:
                raise DataFormatError(f"expected 9 values, got {len(row)}", path, lineno)
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
    if len(rows) != 9:
        raise DataFormatError(f"expected 9 rows, got {len(rows)}", path)
    try:
        return PotentialConfig(np.array(rows))
    except MalformedModelError as exc:
        raise DataFormatError(str(exc), path) from None
