"""
The LCSS deflection splits into three independent parts
========================================================

LCSS stacks sentiment, trait and association positions into one extended
fundamental. Because the three kinds of meaning change independently, the
coefficient matrix is block diagonal and the weighted deflection over the
whole vector equals a weighted sum of three separate deflections. This
script checks that identity numerically and then recovers the three
weights from simulated choices.
"""

import numpy as np

from identity_labeling import (
    BlockCoefficientModel,
    ComponentDeflections,
    CoefficientModel,
    ExtendedFundamental,
    LcssWeights,
    TermModel,
    VignetteQuestion,
    fit_lcss_weights,
    lcss_deflection_decomposed,
    lcss_deflection_full,
    simulate_responses,
)
from identity_labeling.lcss import per_slot_weights

rng = np.random.default_rng(0)

model = BlockCoefficientModel(
    CoefficientModel(((),) + tuple((i,) for i in range(9)), rng.normal(0, 0.4, (9, 10))),
    TermModel(((), (0,), (1,), (0, 1)), rng.normal(0, 0.4, (2, 4)), 2),
    TermModel(((), (0,), (1,), (2,), (3,)), rng.normal(0, 0.4, (4, 5)), 4),
)
f_star = ExtendedFundamental(rng.normal(size=9), rng.normal(size=2), rng.normal(size=4))
weights = LcssWeights(1.0, 0.5, 0.8)

value, parts = lcss_deflection_decomposed(f_star, model, weights)
full = lcss_deflection_full(f_star, model, per_slot_weights(weights, f_star.lengths))
print(f"block lengths       {f_star.lengths}")
print(f"components          {parts.d_sentiment:.4f}, {parts.d_trait:.4f}, {parts.d_assoc:.4f}")
print(f"decomposed          {value:.12f}")
print(f"full matrix         {full:.12f}")
print("zero pattern of Z*:")
print((model.matrix() != 0).astype(int))

###############################################################################
# Recovering the weights from choices
# -----------------------------------
#
# Simulate 500 respondents answering 40 binary questions whose answers
# differ in all three components, then fit the weights by maximum
# likelihood.

truth = weights.as_array()
components, prob, questions = {}, {}, []
for i in range(40):
    qid = f"S{i:02d}"
    questions.append(
        VignetteQuestion(qid, 2, "someone", "greeting", ("x", "y"), "Low", association_condition="None")
    )
    a = ComponentDeflections(rng.uniform(0, 18), *rng.uniform(0, 4, 2))
    b = ComponentDeflections(rng.uniform(0, 18), *rng.uniform(0, 4, 2))
    components[qid] = (a, b)
    prob[qid] = 1 / (1 + np.exp(-truth @ (b.scaled() - a.scaled())))

data = simulate_responses(questions, prob, n_respondents=500, seed=1)
fit = fit_lcss_weights(data, components)
for name, est, se, t in zip(fit.names, fit.estimates, fit.std_errors, truth):
    print(f"{name:>5}: {est:.3f} (se {se:.3f}), true {t}")
