"""Estimation and evaluation on vignette response data.

Binary logistic regression fitted by Newton-Raphson underlies both the
estimated PCS model (identity scores from answer-indicator differences) and
the LCSS weights (from component-deflection differences). This module also
holds the error metrics and interval estimates used to compare models.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from statistics import NormalDist
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DataFormatError, FitError, UnknownConceptError
from .lcss import ComponentDeflections
from .vignettes import VignetteQuestion

MAX_ITER = 100
GRAD_TOL = 1e-8
DIVERGENCE_NORM = 50.0
SEPARATION_RIDGE = 1e-4
# Curvature collapse relative to the start: fitted probabilities pinned at 0/1.
CURVATURE_COLLAPSE = 1e-8
SINGULAR_COND = 1e12


@dataclass(frozen=True)
class Response:
    respondent_id: str
    task: int
    question_id: str
    choice: int  # index into the question's answers


@dataclass
class ResponseDataset:
    records: list
    questions: dict

    def __post_init__(self):
        if not isinstance(self.questions, dict):
            self.questions = {q.question_id: q for q in self.questions}
        for r in self.records:
            if r.question_id not in self.questions:
                raise UnknownConceptError(r.question_id, "question registry")
            if r.choice not in (0, 1):
                raise ValueError(f"choice must be 0 or 1, got {r.choice!r}")

    @property
    def respondents(self) -> list[str]:
        return sorted({r.respondent_id for r in self.records})

    def counts(self) -> dict[str, tuple[int, int]]:
        """Per question: (number choosing the first answer, number answering)."""
        out = {}
        for r in self.records:
            k, n = out.get(r.question_id, (0, 0))
            out[r.question_id] = (k + (r.choice == 0), n + 1)
        return out

    def empirical(self) -> dict[str, float]:
        return {q: k / n for q, (k, n) in self.counts().items()}

    def choice_matrix(self, question_ids: Sequence[str]):
        """Respondents x questions matrix of 1.0 (first answer), 0.0, or NaN if missing."""
        resp = self.respondents
        ri = {r: i for i, r in enumerate(resp)}
        qi = {q: j for j, q in enumerate(question_ids)}
        M = np.full((len(resp), len(question_ids)), np.nan)
        for r in self.records:
            if r.question_id in qi:
                M[ri[r.respondent_id], qi[r.question_id]] = 1.0 if r.choice == 0 else 0.0
        return resp, M

    def subset(self, respondent_ids: Sequence[str]) -> "ResponseDataset":
        """Dataset built from the given respondents; repeats get distinct ids."""
        by_resp: dict[str, list[Response]] = {}
        for r in self.records:
            by_resp.setdefault(r.respondent_id, []).append(r)
        records = []
        for i, rid in enumerate(respondent_ids):
            for r in by_resp.get(rid, []):
                records.append(Response(f"{rid}#{i}", r.task, r.question_id, r.choice))
        return ResponseDataset(records, self.questions)


def load_responses(path, questions: Sequence[VignetteQuestion]) -> ResponseDataset:
    """Read ``respondent_id,task,question_id,choice``; blank choices count as missing."""
    path = Path(path)
    registry = {q.question_id: q for q in questions}
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != [
            "respondent_id",
            "task",
            "question_id",
            "choice",
        ]:
            raise DataFormatError("expected header respondent_id,task,question_id,choice", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or not any(c.strip() for c in row):
                continue
            if len(row) != 4:
                raise DataFormatError(f"expected 4 fields, got {len(row)}", path, lineno)
            rid, task, qid, choice = (c.strip() for c in row)
            if choice == "" or choice.upper() == "NA":
                continue
            if qid not in registry:
                raise DataFormatError(f"unknown question id {qid!r}", path, lineno)
            try:
                task, choice = int(task), int(choice)
            except ValueError as exc:
                raise DataFormatError(str(exc), path, lineno) from None
            if choice not in (0, 1):
                raise DataFormatError(f"choice must be 0 or 1, got {choice}", path, lineno)
            if task != registry[qid].task:
                raise DataFormatError(f"question {qid} belongs to task {registry[qid].task}", path, lineno)
            records.append(Response(rid, task, qid, choice))
    return ResponseDataset(records, registry)


def write_responses(data: ResponseDataset, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["respondent_id", "task", "question_id", "choice"])
        for r in data.records:
            w.writerow([r.respondent_id, r.task, r.question_id, r.choice])


def simulate_responses(
    questions: Sequence[VignetteQuestion],
    prob_first: Mapping[str, float],
    n_respondents: int = 78,
    seed: int = 0,
) -> ResponseDataset:
    """Draw every respondent's answer to every question from ``prob_first``."""
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n_respondents):
        rid = f"R{i + 1:03d}"
        for q in questions:
            chose_first = rng.random() < prob_first[q.question_id]
            records.append(Response(rid, q.task, q.question_id, 0 if chose_first else 1))
    return ResponseDataset(records, {q.question_id: q for q in questions})


# ---------------------------------------------------------------------------
# Logistic regression


@dataclass(frozen=True)
class DesignRow:
    features: np.ndarray
    outcome: int
    question_id: str | None = None

    def __post_init__(self):
        x = np.array(self.features, dtype=float).reshape(-1)
        x.setflags(write=False)
        object.__setattr__(self, "features", x)
        if self.outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")


@dataclass
class FitResult:
    estimates: np.ndarray
    log_likelihood: float
    converged: bool
    iterations: int
    separation_flag: bool = False
    singular_flag: bool = False
    std_errors: np.ndarray = None
    names: list = field(default_factory=list)
    ridge: float = 0.0

    def __getitem__(self, name):
        return float(self.estimates[self.names.index(name)])


def _loglik(theta, X, y):
    eta = X @ theta
    # log p = -log(1+exp(-eta)), log(1-p) = -log(1+exp(eta))
    return float(np.sum(y * -np.logaddexp(0.0, -eta) + (1 - y) * -np.logaddexp(0.0, eta)))


def _sigmoid(eta):
    return np.exp(-np.logaddexp(0.0, -eta))


def log_likelihood(theta, X, y) -> float:
    return _loglik(np.asarray(theta, float), np.asarray(X, float), np.asarray(y, float))


def gradient(theta, X, y) -> np.ndarray:
    """Score vector of the unpenalised log-likelihood."""
    X = np.asarray(X, float)
    return X.T @ (np.asarray(y, float) - _sigmoid(X @ np.asarray(theta, float)))


def hessian(theta, X) -> np.ndarray:
    """Negative Hessian (observed information) of the log-likelihood."""
    X = np.asarray(X, float)
    p = _sigmoid(X @ np.asarray(theta, float))
    return (X * (p * (1 - p))[:, None]).T @ X


def _newton(X, y, ridge):
    """Penalised Newton-Raphson with step halving; the objective never decreases."""
    k = X.shape[1]
    theta = np.zeros(k)

    def objective(t):
        return _loglik(t, X, y) - 0.5 * ridge * float(t @ t)

    def score(t):
        return gradient(t, X, y) - ridge * t

    H0 = hessian(theta, X)
    lam0 = np.linalg.eigvalsh(H0)[0] if k else 0.0
    tr0 = float(np.trace(H0))
    obj = objective(theta)
    steps = 0
    while steps < MAX_ITER and k:
        g = score(theta)
        if np.max(np.abs(g)) < GRAD_TOL:
            break
        H = hessian(theta, X) + ridge * np.eye(k)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(H, g, rcond=None)[0]
        t = 1.0
        for _ in range(50):
            cand = theta + t * step
            new_obj = objective(cand)
            if new_obj >= obj:
                break
            t *= 0.5
        else:
            break  # no ascent left at working precision
        theta, obj = cand, new_obj
        steps += 1
        if ridge == 0 and np.linalg.norm(theta) > DIVERGENCE_NORM:
            break
    converged = bool(k == 0 or np.max(np.abs(score(theta))) < GRAD_TOL)

    # Rank-deficient designs have lam0 == 0, so also watch the total curvature.
    collapsed = False
    if ridge == 0 and tr0 > 0:
        H = hessian(theta, X)
        collapsed = float(np.trace(H)) / tr0 < CURVATURE_COLLAPSE
        if lam0 > 0:
            collapsed |= np.linalg.eigvalsh(H)[0] / lam0 < CURVATURE_COLLAPSE
    return theta, converged, steps, collapsed


def fit_logistic(
    rows: Sequence[DesignRow],
    ridge: float = 0.0,
    reference: int | None = None,
    names: Sequence[str] | None = None,
) -> FitResult:
    """Maximum-likelihood fit of ``P(outcome=1) = 1 / (1 + exp(-theta . x))``.

    No intercept is added. ``reference`` pins one coordinate to zero, which
    is how difference designs are made identifiable. Coordinates whose
    feature is zero in every row cannot be estimated; they are held at zero
    and ``singular_flag`` is set, as it is when the information matrix is
    numerically singular. If the estimates run off to infinity (separated
    data) the fit is repeated with a small ridge penalty and
    ``separation_flag`` is set.
    """
    if not rows:
        raise FitError("no rows to fit")
    X = np.vstack([r.features for r in rows])
    y = np.array([r.outcome for r in rows], dtype=float)
    k = X.shape[1]
    if k < 1:
        raise FitError("feature dimension must be at least 1")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    names = list(names) if names is not None else [f"x{j}" for j in range(k)]

    free = np.ones(k, dtype=bool)
    if reference is not None:
        free[reference] = False
    unidentified = free & np.all(X == 0, axis=0)
    free &= ~unidentified
    Xf = X[:, free]

    separation = False
    theta_f, converged, iters, collapsed = _newton(Xf, y, ridge)
    if ridge == 0 and ((np.linalg.norm(theta_f) > DIVERGENCE_NORM and not converged) or collapsed):
        separation = True
        ridge = SEPARATION_RIDGE
        theta_f, converged, iters, _ = _newton(Xf, y, ridge)

    theta = np.zeros(k)
    theta[free] = theta_f
    info = hessian(theta_f, Xf) + ridge * np.eye(Xf.shape[1])
    singular = bool(unidentified.any())
    se = np.full(k, np.nan)
    if Xf.shape[1]:
        if np.linalg.cond(info) > SINGULAR_COND:
            singular = True
            cov = np.linalg.pinv(info)
        else:
            cov = np.linalg.inv(info)
        se[free] = np.sqrt(np.clip(np.diag(cov), 0, None))
    return FitResult(
        estimates=theta,
        log_likelihood=_loglik(theta, X, y),
        converged=converged,
        iterations=iters,
        separation_flag=separation,
        singular_flag=singular,
        std_errors=se,
        names=names,
        ridge=ridge,
    )


def write_fit(fit: FitResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["parameter", "estimate", "std_error", "converged", "separation", "singular"])
        for name, est, se in zip(fit.names, fit.estimates, fit.std_errors):
            w.writerow(
                [name, repr(float(est)), repr(float(se)), int(fit.converged),
                 int(fit.separation_flag), int(fit.singular_flag)]
            )


# ---------------------------------------------------------------------------
# Model-specific designs


def build_pcs_design(
    data: ResponseDataset,
    scenario: str,
    identity_index: Sequence[str],
    prior_scores: Mapping[str, float] | None = None,
    task: int | None = None,
) -> list[DesignRow]:
    """Design rows for the questions cued by ``scenario``.

    Without ``prior_scores`` each row's features are ``b - a``, the
    difference of answer indicators over ``identity_index``. With them the
    row has one feature, ``prior[b] - prior[a]``. The outcome is 1 when the
    respondent chose the first answer.
    """
    index = {ident: i for i, ident in enumerate(identity_index)}
    rows = []
    for r in data.records:
        q = data.questions[r.question_id]
        if q.cue != scenario or (task is not None and q.task != task):
            continue
        a, b = q.answers
        if prior_scores is not None:
            for ident in (a, b):
                if ident not in prior_scores:
                    raise UnknownConceptError(ident, f"prior scores for {scenario!r}")
            x = np.array([prior_scores[b] - prior_scores[a]])
        else:
            x = np.zeros(len(identity_index))
            for ident in (a, b):
                if ident not in index:
                    raise UnknownConceptError(ident, f"identity index for {scenario!r}")
            x[index[b]] += 1.0
            x[index[a]] -= 1.0
        rows.append(DesignRow(x, int(r.choice == 0), r.question_id))
    return rows


def scenario_identities(questions: Sequence[VignetteQuestion], scenario: str, task: int | None = None):
    """Identities appearing as answers under a cue, in order of first appearance."""
    seen = []
    for q in questions:
        if q.cue == scenario and (task is None or q.task == task):
            for a in q.answers:
                if a not in seen:
                    seen.append(a)
    return seen


def pcs_betas_from_fit(fit: FitResult) -> dict[str, float]:
    """Identity scores from a ``b - a`` fit (the fitted coefficient is ``-beta``)."""
    return {name: -float(v) + 0.0 for name, v in zip(fit.names, fit.estimates)}


def lcss_design(
    data: ResponseDataset,
    components: Mapping[str, tuple[ComponentDeflections, ComponentDeflections]],
) -> list[DesignRow]:
    rows = []
    for r in data.records:
        try:
            comp_a, comp_b = components[r.question_id]
        except KeyError:
            raise UnknownConceptError(r.question_id, "component deflections") from None
        x = comp_b.scaled() - comp_a.scaled()
        rows.append(DesignRow(x, int(r.choice == 0), r.question_id))
    return rows


def fit_lcss_weights(
    data: ResponseDataset,
    components: Mapping[str, tuple[ComponentDeflections, ComponentDeflections]],
    ridge: float = 0.0,
) -> FitResult:
    """Estimate ``(w_f, w_ft, w_fk)`` from choices and component deflections.

    ``components`` maps each question id to the deflections of its first and
    second answer. Features are the second-minus-first differences of the
    length-scaled components, so the coefficients are the weights themselves.
    """
    return fit_logistic(lcss_design(data, components), ridge=ridge, names=["w_f", "w_ft", "w_fk"])


# ---------------------------------------------------------------------------
# Evaluation


def mean_absolute_error(predicted: Mapping[str, float], empirical: Mapping[str, float]) -> float:
    if set(predicted) != set(empirical):
        missing = sorted(set(predicted) ^ set(empirical))
        raise ValueError(f"question sets differ: {missing[:5]}")
    if not predicted:
        raise ValueError("no questions to compare")
    keys = sorted(predicted)
    return float(np.mean([abs(predicted[k] - empirical[k]) for k in keys]))


def agresti_coull_interval(k: int, n: int, confidence: float = 0.95) -> tuple[float, float]:
    """Agresti-Coull interval for a binomial proportion, clipped to [0, 1]."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n and n >= 1, got k={k}, n={n}")
    if not 0 < confidence < 1:
        raise ValueError("confidence must be in (0, 1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    n_adj = n + z * z
    p_adj = (k + z * z / 2) / n_adj
    half = z * math.sqrt(p_adj * (1 - p_adj) / n_adj)
    return max(0.0, p_adj - half), min(1.0, p_adj + half)


def _replicate_rngs(seed: int, replicates: int):
    for child in np.random.SeedSequence(seed).spawn(replicates):
        yield np.random.default_rng(child)


def bootstrap_mae_replicates(
    data: ResponseDataset,
    predictions: Mapping[str, float] | Callable[[ResponseDataset], Mapping[str, float]],
    replicates: int = 10_000,
    seed: int = 0,
    question_ids: Sequence[str] | None = None,
) -> np.ndarray:
    """MAE of each bootstrap replicate, resampling respondents with replacement.

    ``predictions`` is either fixed per-question probabilities or a callable
    that refits the model on each resampled dataset. Replicate ``i`` always
    draws from the ``i``-th child of ``SeedSequence(seed)``.
    """
    qids = list(question_ids) if question_ids is not None else sorted(data.counts())
    resp, M = data.choice_matrix(qids)
    if not resp:
        raise ValueError("no respondents")
    out = np.empty(replicates)
    fixed = None if callable(predictions) else np.array([predictions[q] for q in qids])
    for b, rng in enumerate(_replicate_rngs(seed, replicates)):
        idx = rng.integers(0, len(resp), len(resp))
        if fixed is not None:
            sample = M[idx]
            answered = np.sum(~np.isnan(sample), axis=0)
            share = np.divide(
                np.nansum(sample, axis=0), answered, out=np.full(len(qids), np.nan), where=answered > 0
            )
            err = np.abs(fixed - share)
            out[b] = np.mean(err[answered > 0])
        else:
            boot = data.subset([resp[i] for i in idx])
            pred = predictions(boot)
            emp = boot.empirical()
            keys = [q for q in qids if q in emp]
            out[b] = mean_absolute_error({q: pred[q] for q in keys}, {q: emp[q] for q in keys})
    return out


def bootstrap_mae_ci(
    data: ResponseDataset,
    predictions,
    replicates: int = 10_000,
    seed: int = 0,
    confidence: float = 0.95,
    question_ids: Sequence[str] | None = None,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the MAE."""
    reps = bootstrap_mae_replicates(data, predictions, replicates, seed, question_ids)
    alpha = (1 - confidence) / 2
    lo, hi = np.quantile(reps, [alpha, 1 - alpha])
    return float(lo), float(hi)
