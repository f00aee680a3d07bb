"""Run the four identity labeling models on the vignettes and compare them.

Models, by report column:

``act``       negated ACT deflection fed to a binary logit
``pcs_hand``  hand-coded identity scores from the vignette study
``pcs_est``   identity scores estimated from the responses
``lcss``      weighted sentiment/trait/association deflection, weights fitted
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .choice import binary_choice_prob
from .errors import FitError, IdentityLabelingError
from .estimation import (
    ResponseDataset,
    agresti_coull_interval,
    bootstrap_mae_ci,
    build_pcs_design,
    fit_lcss_weights,
    fit_logistic,
    mean_absolute_error,
    pcs_betas_from_fit,
    scenario_identities,
    write_fit,
)
from .lcss import (
    LcssWeights,
    lcss_probability_from_components,
    scored_component_deflections,
    write_lcss_weights,
)
from .pcs import BetaScores, beta_table, pcs_probability
from .vignettes import ActContext, VignetteQuestion

MODELS = ("act", "pcs_hand", "pcs_est", "lcss")
FITTED_MODELS = ("pcs_est", "lcss")
MODEL_NAMES = {
    "act": "ACT",
    "pcs_hand": "Hand-coded PCS-FA",
    "pcs_est": "Estimated PCS-FA",
    "lcss": "LCSS",
}

EXIT_OK, EXIT_INPUT, EXIT_FIT, EXIT_PARTIAL = 0, 1, 2, 3


def low_deflection_cued(q: VignetteQuestion) -> bool:
    """Low deflection difference with a trait cue (Task 1) or medium/high association (Task 2)."""
    if q.deflection_condition != "Low" or not q.cued:
        return False
    if q.task == 1:
        return True
    return q.association_condition in ("High (Role Pair)", "Medium (Same Institution)")


def uncued(q: VignetteQuestion) -> bool:
    """No trait and no association information: the "someone" questions."""
    return not q.cued


CONTRASTS = {"low_deflection_cued": low_deflection_cued, "uncued": uncued}


@dataclass
class ConditionMae:
    model: str
    task: int | None
    factor: str
    level: str
    n_questions: int
    mae: float


@dataclass
class PredictionReport:
    questions: list
    predictions: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    counts: dict | None = None
    intervals: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    estimated_betas: dict = field(default_factory=dict)
    lcss_weights: LcssWeights | None = None
    overall: dict = field(default_factory=dict)
    conditions: list = field(default_factory=list)
    seed: int = 0
    replicates: int = 0

    @property
    def models(self) -> list[str]:
        return [m for m in MODELS if m in self.predictions]

    @property
    def empirical(self) -> dict[str, float] | None:
        if self.counts is None:
            return None
        return {q: k / n for q, (k, n) in self.counts.items()}

    def mae(self, model: str, select=None) -> float:
        emp = self.empirical
        qids = [q.question_id for q in self.questions if (select is None or select(q)) and q.question_id in emp]
        pred = self.predictions[model]
        return mean_absolute_error({q: pred[q] for q in qids}, {q: emp[q] for q in qids})

    def exit_code(self, expected: Sequence[str] = MODELS) -> int:
        if any(isinstance(self.errors.get(m), FitFailure) for m in expected):
            return EXIT_FIT
        if any(m not in self.predictions for m in expected):
            return EXIT_PARTIAL
        return EXIT_OK


class FitFailure(str):
    """Error text for a model whose fit failed (as opposed to missing inputs)."""


def handcoded_predictions(questions, tables) -> dict[str, float]:
    out = {}
    for q in questions:
        scores = tables.get((q.task, q.cue))
        if scores is None:
            raise IdentityLabelingError(f"{q.question_id}: no hand-coded scores for cue {q.cue!r}")
        out[q.question_id] = pcs_probability(scores, *q.answers)
    return out


def fit_estimated_pcs(responses: ResponseDataset, questions, tables):
    """Estimated PCS predictions, the fits behind them, and the identity scores.

    Each cued Task 2 scenario gets its own indicator-difference fit with the
    first identity pinned at zero. Task 1 gets one coefficient shared by all
    cues, applied to the hand-coded score differences. Uncued Task 2
    questions carry no semantic information and are predicted at 0.5.
    """
    preds, fits, betas = {}, {}, {}

    task1 = [q for q in questions if q.task == 1]
    if task1:
        rows = []
        for cue in dict.fromkeys(q.cue for q in task1):
            prior = tables[(1, cue)].scores
            rows += build_pcs_design(responses, cue, [], prior_scores=prior, task=1)
        fit = fit_logistic(rows, names=["task1_trait_beta"])
        fits["pcs_est_task1"] = fit
        beta = pcs_betas_from_fit(fit)["task1_trait_beta"]
        betas[(1, "*")] = {"task1_trait_beta": beta}
        for q in task1:
            prior = tables[(1, q.cue)]
            a, b = q.answers
            preds[q.question_id] = binary_choice_prob(beta * prior[a], beta * prior[b])

    task2 = [q for q in questions if q.task == 2]
    for cue in dict.fromkeys(q.cue for q in task2 if q.cued):
        ids = scenario_identities(questions, cue, task=2)
        rows = build_pcs_design(responses, cue, ids, task=2)
        fit = fit_logistic(rows, reference=0, names=ids)
        fits[f"pcs_est_task2_{cue}"] = fit
        scores = pcs_betas_from_fit(fit)
        betas[(2, cue)] = scores
        beta = BetaScores(cue, scores, 2)
        for q in task2:
            if q.cue == cue:
                preds[q.question_id] = pcs_probability(beta, *q.answers)
    for q in task2:
        if not q.cued:
            preds[q.question_id] = 0.5
    return preds, fits, betas


def lcss_components(questions, tables, act_deflections):
    return {
        q.question_id: tuple(
            scored_component_deflections(q, c, None, tables, sentiment=act_deflections[(q.question_id, c)])
            for c in q.answers
        )
        for q in questions
    }


def run_comparison(
    questions: Sequence[VignetteQuestion],
    betas: Sequence[BetaScores],
    act: ActContext | None = None,
    responses: ResponseDataset | None = None,
    seed: int = 0,
    replicates: int = 10_000,
) -> PredictionReport:
    """Score every question with every model that its inputs allow.

    A model that cannot be run gets an entry in ``report.errors`` and the
    others carry on.
    """
    questions = list(questions)
    tables = beta_table(betas)
    report = PredictionReport(questions, seed=seed, replicates=replicates)

    act_defl = None
    if act is None:
        report.errors["act"] = "no ACT dictionary and coefficients supplied"
    else:
        try:
            act_defl = {
                (q.question_id, c): act.deflection(q, c) for q in questions for c in q.answers
            }
            report.predictions["act"] = {
                q.question_id: binary_choice_prob(
                    -act_defl[(q.question_id, q.answer_a)], -act_defl[(q.question_id, q.answer_b)]
                )
                for q in questions
            }
        except IdentityLabelingError as exc:
            report.errors["act"] = str(exc)
            act_defl = None

    try:
        report.predictions["pcs_hand"] = handcoded_predictions(questions, tables)
    except (IdentityLabelingError, KeyError) as exc:
        report.errors["pcs_hand"] = str(exc)

    if responses is None:
        for m in FITTED_MODELS:
            report.errors[m] = "unavailable: no response data"
        return report

    try:
        preds, fits, est = fit_estimated_pcs(responses, questions, tables)
        report.predictions["pcs_est"] = preds
        report.fits.update(fits)
        report.estimated_betas = est
    except (FitError, IdentityLabelingError, KeyError) as exc:
        report.errors["pcs_est"] = FitFailure(str(exc))

    if act_defl is None:
        report.errors["lcss"] = "unavailable: needs ACT deflections"
    else:
        try:
            comps = lcss_components(questions, tables, act_defl)
            fit = fit_lcss_weights(responses, comps)
            report.fits["lcss"] = fit
            weights = LcssWeights(*fit.estimates)
            report.lcss_weights = weights
            report.predictions["lcss"] = {
                qid: lcss_probability_from_components(a, b, weights) for qid, (a, b) in comps.items()
            }
        except (FitError, IdentityLabelingError, KeyError) as exc:
            report.errors["lcss"] = FitFailure(str(exc))

    _evaluate(report, responses)
    return report


def _condition_groups(questions):
    groups = []
    for task, factor, attr in (
        (1, "trait", "trait_condition"),
        (1, "deflection", "deflection_condition"),
        (2, "association", "association_condition"),
        (2, "deflection", "deflection_condition"),
    ):
        levels = dict.fromkeys(getattr(q, attr) for q in questions if q.task == task)
        for level in levels:
            groups.append(
                (task, factor, level, lambda q, t=task, a=attr, v=level: q.task == t and getattr(q, a) == v)
            )
    for task, attr in ((1, "trait_condition"), (2, "association_condition")):
        cells = dict.fromkeys((getattr(q, attr), q.deflection_condition) for q in questions if q.task == task)
        for sem, dfl in cells:
            groups.append(
                (
                    task,
                    "cell",
                    f"{sem} | {dfl}",
                    lambda q, t=task, a=attr, s=sem, d=dfl: q.task == t
                    and getattr(q, a) == s
                    and q.deflection_condition == d,
                )
            )
    for name, select in CONTRASTS.items():
        groups.append((None, "contrast", name, select))
    return groups


def _evaluate(report: PredictionReport, responses: ResponseDataset) -> None:
    counts = responses.counts()
    qids = [q.question_id for q in report.questions]
    missing = [q for q in qids if q not in counts]
    if missing:
        raise IdentityLabelingError(f"no responses for questions {missing[:5]}")
    report.counts = {q: counts[q] for q in qids}
    report.intervals = {q: agresti_coull_interval(*counts[q]) for q in qids}

    groups = _condition_groups(report.questions)
    for model in report.models:
        pred = report.predictions[model]
        mae = report.mae(model)
        lo = hi = float("nan")
        if report.replicates:
            lo, hi = bootstrap_mae_ci(
                responses, {q: pred[q] for q in qids}, replicates=report.replicates,
                seed=report.seed, question_ids=qids,
            )
        report.overall[model] = (mae, lo, hi)
        for task, factor, level, select in groups:
            n = sum(1 for q in report.questions if select(q))
            if n:
                report.conditions.append(
                    ConditionMae(model, task, factor, level, n, report.mae(model, select))
                )


# ---------------------------------------------------------------------------
# Output


def _f(v) -> str:
    return "" if v is None else f"{float(v):.6f}"


def _write_csv(path: Path, header, rows) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def prediction_rows(report: PredictionReport):
    has_emp = report.counts is not None
    header = ["question_id"] + (["empirical", "ci_lo", "ci_hi"] if has_emp else []) + report.models
    rows = []
    emp = report.empirical
    for q in report.questions:
        qid = q.question_id
        row = [qid]
        if has_emp:
            row += [_f(emp[qid]), _f(report.intervals[qid][0]), _f(report.intervals[qid][1])]
        row += [_f(report.predictions[m][qid]) for m in report.models]
        rows.append(row)
    return header, rows


def format_report(report: PredictionReport) -> str:
    """Plain-text summary of predictions, errors and fits."""
    lines = []
    header, rows = prediction_rows(report)
    lines.append("Predicted probability of the first answer")
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines.append("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for row in rows:
        lines.append("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))

    if report.overall:
        lines.append("")
        lines.append(f"Overall MAE (95% bootstrap CI, {report.replicates} replicates, seed {report.seed})")
        for m in report.models:
            mae, lo, hi = report.overall[m]
            lines.append(f"  {MODEL_NAMES[m]:<20} {100 * mae:5.1f}%  [{100 * lo:5.1f}%, {100 * hi:5.1f}%]")
        lines.append("")
        lines.append("Contrasts")
        for c in report.conditions:
            if c.factor == "contrast":
                lines.append(f"  {c.level:<20} {MODEL_NAMES[c.model]:<20} n={c.n_questions:<3d} {100 * c.mae:5.1f}%")
    if report.lcss_weights is not None:
        w = report.lcss_weights
        lines.append("")
        lines.append(f"LCSS weights: w_f={w.w_f:.4f} w_ft={w.w_ft:.4f} w_fk={w.w_fk:.4f}")
    if report.estimated_betas:
        lines.append("")
        lines.append("Estimated PCS-FA scores")
        for (task, cue), scores in report.estimated_betas.items():
            vals = ", ".join(f"{k}={v:.4f}" for k, v in scores.items())
            lines.append(f"  task {task} {cue}: {vals}")
    flagged = [(n, f) for n, f in report.fits.items() if f.separation_flag or f.singular_flag or not f.converged]
    for name, fit in flagged:
        lines.append(
            f"  note: fit {name} converged={fit.converged} separation={fit.separation_flag} "
            f"singular={fit.singular_flag}"
        )
    if report.errors:
        lines.append("")
        lines.append("Unavailable models")
        for m in MODELS:
            if m in report.errors:
                lines.append(f"  {MODEL_NAMES[m]}: {report.errors[m]}")
    return "\n".join(lines) + "\n"


def _figure_rows(report: PredictionReport, task: int):
    emp = report.empirical
    panel_attr = "trait_condition" if task == 1 else "association_condition"
    rows = []
    for q in report.questions:
        if q.task != task:
            continue
        qid = q.question_id
        lo, hi = report.intervals[qid]
        rows.append(
            [qid, q.text, getattr(q, panel_attr), q.deflection_condition, _f(emp[qid]), _f(lo), _f(hi)]
            + [_f(report.predictions[m][qid]) if m in report.predictions else "" for m in MODELS]
        )
    return rows


def emit_report(report: PredictionReport, out_dir) -> list[Path]:
    """Write the text report, machine CSVs and plot-ready CSVs into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    (out / "report.txt").write_text(format_report(report), encoding="utf-8")
    written.append(out / "report.txt")
    header, rows = prediction_rows(report)
    written.append(_write_csv(out / "predictions.csv", header, rows))

    if report.counts is not None:
        written.append(
            _write_csv(
                out / "overall_mae.csv",
                ["model", "mae", "ci_lo", "ci_hi"],
                [[m, *(_f(v) for v in report.overall[m])] for m in report.models],
            )
        )
        written.append(
            _write_csv(
                out / "condition_mae.csv",
                ["model", "task", "factor", "level", "n_questions", "mae"],
                [[c.model, "" if c.task is None else c.task, c.factor, c.level, c.n_questions, _f(c.mae)]
                 for c in report.conditions],
            )
        )
        fig_header = ["question_id", "question", "panel", "deflection_condition",
                      "empirical", "ci_lo", "ci_hi", *MODELS]
        written.append(_write_csv(out / "fig2_task1.csv", fig_header, _figure_rows(report, 1)))
        written.append(_write_csv(out / "fig3_task2.csv", fig_header, _figure_rows(report, 2)))
        err_rows = []
        emp = report.empirical
        for q in report.questions:
            lo, hi = report.intervals[q.question_id]
            panel = q.trait_condition if q.task == 1 else q.association_condition
            for m in ("act", "lcss", "pcs_est"):
                if m not in report.predictions:
                    continue
                p = report.predictions[m][q.question_id]
                err_rows.append([q.question_id, q.task, panel, q.deflection_condition, m,
                                 _f(p - emp[q.question_id]), _f(p - hi), _f(p - lo)])
        written.append(
            _write_csv(out / "fig4_errors.csv",
                       ["question_id", "task", "panel", "deflection_condition", "model",
                        "error", "ci_lo", "ci_hi"], err_rows)
        )
    for name, fit in report.fits.items():
        path = out / f"fit_{name.replace(' ', '_')}.csv"
        write_fit(fit, path)
        written.append(path)
    if report.lcss_weights is not None:
        write_lcss_weights(report.lcss_weights, out / "lcss_weights.csv")
        written.append(out / "lcss_weights.csv")
    return written
