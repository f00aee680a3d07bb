"""
Parallel constraint satisfaction on a small semantic network
=============================================================

Concepts are nodes joined by exciting (positive) or inhibiting (negative)
links. Clamping a cue node at full activation and letting the network
settle gives every identity a level of activation, its beta score. The
choice between two identities is then a logit in the difference of betas.
"""

from identity_labeling import SemanticNetwork, pcs_probability, spread_activation
from identity_labeling.pcs import Node, beta_from_activation

net = SemanticNetwork(
    nodes=[
        Node("doctor", "cue"),
        Node("hospital", "setting"),
        Node("patient"),
        Node("paramedic"),
        Node("cousin"),
    ],
    edges=[
        ("doctor", "patient", 0.6),
        ("doctor", "hospital", 0.5),
        ("hospital", "paramedic", 0.4),
        ("hospital", "patient", 0.3),
        ("patient", "cousin", -0.2),
    ],
)

state = spread_activation(net, cues=["doctor"])
print(f"settled after {state.iterations} iterations (converged={state.converged})")
for token, a in zip(state.tokens, state.activation):
    print(f"  {token:>10}  {a:+.4f}")

###############################################################################
# Role partners are the most active, institutional neighbours come next.

beta = beta_from_activation(state, ["patient", "paramedic", "cousin"], "doctor")
for a, b in (("patient", "cousin"), ("paramedic", "cousin"), ("patient", "paramedic")):
    print(f"P({a} over {b}) = {pcs_probability(beta, a, b):.3f}")
