"""
Hand-coded PCS-FA predictions for every vignette
=================================================

The vignette study scored each cue/identity pair by hand: role partners get
5, identities from the same institution 3, unrelated ones 1, and the empty
"someone" cue scores every identity 0. Feeding those scores to the logit
gives a prediction for each question that needs no survey data at all.
"""

from identity_labeling import load_handcoded_betas, load_vignettes
from identity_labeling.experiment import handcoded_predictions
from identity_labeling.pcs import beta_table

questions = load_vignettes()
tables = beta_table(load_handcoded_betas())
pred = handcoded_predictions(questions, tables)

for q in questions:
    print(f"{q.question_id}  {pred[q.question_id]:.4f}  {q.text}")

###############################################################################
# Without a cue the scores tie and the model is indifferent.

uncued = [pred[q.question_id] for q in questions if not q.cued]
print(f"\n{len(uncued)} uncued questions, all at {set(uncued)}")
