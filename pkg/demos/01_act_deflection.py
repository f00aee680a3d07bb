"""
Deflection and the ACT choice between two identities
=====================================================

An event pairs an actor, a behavior and an object, each located in EPA
space. Impression-change equations turn the out-of-context meaning of the
event into a situated impression, and deflection measures how far the two
sit apart. Lower deflection means a more culturally expected event, so the
identity that produces it should be the likelier label.

The coefficient and dictionary files used here are small illustrative
stand-ins shipped with the package, not a published ACT data set.
"""

from importlib.resources import files

import numpy as np

from identity_labeling import (
    EventFundamental,
    act_phi,
    binary_choice_prob,
    deflection,
    impression_change,
    load_coefficients,
    load_epa_dictionary,
)

data = files("identity_labeling") / "data" / "illustrative"
dictionary = load_epa_dictionary(data / "dictionary.csv")
impression = load_coefficients(data / "impression.coef")

###############################################################################
# Who attacks an enemy, a grandmother or a bully?

behavior = dictionary.lookup("attacking", "behavior")
enemy = dictionary.lookup("enemy", "identity")

for candidate in ("grandmother", "bully"):
    f = EventFundamental.from_parts(dictionary.lookup(candidate, "identity"), behavior, enemy)
    tau = impression_change(f, impression)
    print(f"{candidate:>12}: fundamental {np.round(f.values, 2)}")
    print(f"{'':>12}  transient   {np.round(tau.values, 2)}")
    print(f"{'':>12}  deflection  {deflection(f, impression):.3f}")

###############################################################################
# The choice model turns negated deflections into a probability.

phi = {
    c: act_phi(dictionary.lookup(c, "identity"), behavior, enemy, "actor", impression)
    for c in ("grandmother", "bully")
}
p = binary_choice_prob(phi["grandmother"], phi["bully"])
print(f"\nP(grandmother) = {p:.3f}   P(bully) = {1 - p:.3f}")
