"""Command-line harness for the vignette model comparison.

Subcommands:

  predict   ACT and hand-coded PCS-FA predictions (no response data needed)
  fit       fit Estimated PCS-FA and LCSS to responses, write estimates
  evaluate  all four models against responses, print MAEs
  report    everything, written to --out

Exit codes: 0 success, 1 input error, 2 fit failure, 3 some models unavailable.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .affect import load_coefficients, load_epa_dictionary, load_modifier_coefficients
from .errors import IdentityLabelingError
from .estimation import load_responses, write_fit
from .experiment import (
    EXIT_INPUT,
    FITTED_MODELS,
    MODEL_NAMES,
    MODELS,
    emit_report,
    format_report,
    prediction_rows,
    run_comparison,
)
from .lcss import write_lcss_weights
from .pcs import load_handcoded_betas
from .vignettes import ActContext, load_name_epa, load_vignettes

log = logging.getLogger("identity_labeling")


def _add_inputs(p: argparse.ArgumentParser, responses_required: bool) -> None:
    p.add_argument("--dict", dest="dictionary", help="EPA dictionary CSV (term,type,E,P,A)")
    p.add_argument("--coeff", help="impression-change coefficient file")
    p.add_argument("--modifier-coeff", help="modifier coefficient file")
    p.add_argument("--names", help="EPA ratings of the Task 1 names (name,E,P,A)")
    p.add_argument("--vignettes", help="vignette CSV (default: the shipped 40 questions)")
    p.add_argument("--betas", nargs="+", help="hand-coded score tables (default: the shipped scores)")
    p.add_argument("--responses", required=responses_required, help="response CSV")
    p.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    p.add_argument("--replicates", type=int, default=10_000, help="bootstrap replicates")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="identity-labeling", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_inputs(sub.add_parser("predict", help="ACT and hand-coded PCS-FA predictions"), False)
    _add_inputs(sub.add_parser("fit", help="fit Estimated PCS-FA and LCSS"), True)
    _add_inputs(sub.add_parser("evaluate", help="MAE of every model against responses"), True)
    _add_inputs(sub.add_parser("report", help="full report written to --out"), True)
    return parser


def _load(args):
    questions = load_vignettes(args.vignettes)
    betas = load_handcoded_betas(*(args.betas or ()))
    act = None
    if args.dictionary and args.coeff:
        act = ActContext(
            dictionary=load_epa_dictionary(args.dictionary),
            impression=load_coefficients(args.coeff),
            modifier=load_modifier_coefficients(args.modifier_coeff) if args.modifier_coeff else None,
            names=load_name_epa(args.names) if args.names else {},
        )
    elif args.dictionary or args.coeff:
        raise IdentityLabelingError("--dict and --coeff must be given together")
    responses = load_responses(args.responses, questions) if args.responses else None
    return questions, betas, act, responses


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    replicates = args.replicates if args.command in ("evaluate", "report") else 0
    try:
        questions, betas, act, responses = _load(args)
        report = run_comparison(questions, betas, act, responses, seed=args.seed, replicates=replicates)
    except (IdentityLabelingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    expected = {
        "predict": ("act", "pcs_hand"),
        "fit": FITTED_MODELS,
    }.get(args.command, MODELS)
    for model, msg in report.errors.items():
        if model in expected:
            log.warning("%s: %s", MODEL_NAMES[model], msg)

    if args.command == "predict":
        header, rows = prediction_rows(report)
        if args.out:
            emit_report(report, args.out)
        else:
            print(",".join(header))
            for row in rows:
                print(",".join(row))
    elif args.command == "fit":
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            for name, fit in report.fits.items():
                write_fit(fit, out / f"fit_{name.replace(' ', '_')}.csv")
            if report.lcss_weights is not None:
                write_lcss_weights(report.lcss_weights, out / "lcss_weights.csv")
        for name, fit in report.fits.items():
            est = ", ".join(f"{n}={v:.4f}" for n, v in zip(fit.names, fit.estimates))
            print(f"{name}: {est}")
    elif args.command == "evaluate":
        for m in report.models:
            mae, lo, hi = report.overall[m]
            print(f"{m},{mae:.6f},{lo:.6f},{hi:.6f}")
    else:
        if args.out:
            emit_report(report, args.out)
        else:
            sys.stdout.write(format_report(report))

    return report.exit_code(expected)


if __name__ == "__main__":
    sys.exit(main())
