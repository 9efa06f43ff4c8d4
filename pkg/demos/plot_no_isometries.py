"""
No isometries into or out of the Lipschitz space
================================================

Any isometry would have to satisfy a chain of equalities on characteristic
functions.  We build the only symbols that survive the first equalities and
watch the chain break further down.
"""

from treemult import TreeSpec, build, weight_preset
from treemult.harness import isometry_candidate, no_isometry_demo

t = build(TreeSpec.homogeneous(2), 50)
mu = weight_preset("constant", {}, t)

# L -> L_mu: mu|psi| = 1 off the root, so mu(v)|v||psi(v)| = |v| is unbounded.
demo = no_isometry_demo("L->Lmu", isometry_candidate("L->Lmu", mu), mu)
vals = demo["divergence"]["values"]
print("mu|v||psi| at depths 1, 10, 50:", vals[0], vals[9], vals[49])

# L_mu -> L: |psi| = mu off the root and |psi(o)| = mu(o)/2.
small = build(TreeSpec.homogeneous(2), 6)
mu6 = weight_preset("geometric", {"ratio": 0.5}, small)
demo = no_isometry_demo("Lmu->L", isometry_candidate("Lmu->L", mu6), mu6)
for step in demo["steps"]:
    if step["step"] != "chi_v":
        print(f"  {step['step']:18s} ||f|| = {step['lhs']:.3f}   ||M f|| = {step['rhs']:.3f}")
# f = 1/mu keeps the norm (the value is 1, not 1/2), but pairing the root
# with a child in opposite phase doubles it.
print("first failed equality:", demo["first_failure"]["step"])
