"""
Compact and non-compact multiplication operators
================================================

A symbol that decays along the tree gives a compact operator.  We watch the
witness sequences from the compactness proofs shrink to zero, and compare
with a constant symbol whose sequence stays put.
"""

from treemult import MultOperator, TreeFunction, TreeSpec, build, is_compact_Lmu, weight_preset
from treemult.harness import compactness_trend, default_anchors, make_witness

# The binary tree cut at depth 60.  Vertex ids are integers in BFS order and
# nothing is materialized: the truncation has 2^61 - 1 vertices.
t = build(TreeSpec.homogeneous(2), 60)
mu = weight_preset("constant", {}, t)
print(f"vertices in the truncation: {t.size}")

# psi(v) = 2^-|v| on the weighted space L_mu.
decay = MultOperator(TreeFunction.from_expr(t, "2^-n"), mu)
print("compact?", is_compact_Lmu(decay).verdict.value)

# The witnesses f_n = chi_{v_n} / mu(v_n) have norm one; their images
# shrink like 2^-n.
family = make_witness("scaled-char", t, mu, default_anchors(t))
trend = compactness_trend(decay, family)
for depth, a in list(zip(trend.depths, trend.values))[::10]:
    print(f"  depth {depth:2d}  ||M f_n|| = {a:.3e}")
print("trend:", trend.verdict)

# A constant symbol: the images never shrink.
flat = MultOperator(TreeFunction.from_expr(t, "1"), mu)
print("constant symbol compact?", is_compact_Lmu(flat).verdict.value,
      "| trend floor", compactness_trend(flat, family).floor)
