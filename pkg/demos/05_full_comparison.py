"""
Comparing the four models on simulated survey data
===================================================

The real responses are not bundled, so this script invents a population
whose choices mix sentiment and association cues, draws 78 respondents
from it, and runs the whole comparison: ACT, hand-coded and estimated
PCS-FA, and LCSS, scored by mean absolute error with bootstrap intervals.
The same run is available from the command line as
``identity-labeling report``.
"""

from importlib.resources import files

from identity_labeling import (
    ActContext,
    load_coefficients,
    load_epa_dictionary,
    load_handcoded_betas,
    load_modifier_coefficients,
    load_name_epa,
    load_vignettes,
    run_comparison,
    simulate_responses,
)
from identity_labeling.choice import binary_choice_prob
from identity_labeling.experiment import format_report
from identity_labeling.pcs import beta_table

data = files("identity_labeling") / "data" / "illustrative"
act = ActContext(
    dictionary=load_epa_dictionary(data / "dictionary.csv"),
    impression=load_coefficients(data / "impression.coef"),
    modifier=load_modifier_coefficients(data / "modifier.coef"),
    names=load_name_epa(data / "names.csv"),
)
questions = load_vignettes()
betas = load_handcoded_betas()
tables = beta_table(betas)

###############################################################################
# A population that weighs sentiment and hand-coded association equally.


def population(q):
    a, b = q.answers
    d_a, d_b = act.deflection(q, a), act.deflection(q, b)
    s = tables[(q.task, q.cue)]
    return binary_choice_prob(-d_a / 9 + 0.6 * s[a], -d_b / 9 + 0.6 * s[b])


truth = {q.question_id: population(q) for q in questions}
responses = simulate_responses(questions, truth, n_respondents=78, seed=2024)

report = run_comparison(questions, betas, act, responses, seed=0, replicates=2000)
print(format_report(report))
