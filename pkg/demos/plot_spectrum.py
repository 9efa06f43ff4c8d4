"""
Spectrum of a multiplication operator
=====================================

On L_mu the spectrum of M_psi is the closure of the range of psi.  For
psi(v) = 1/(1+|v|) the range is {1, 1/2, 1/3, ...} and 0 is the only extra
limit point.
"""

from treemult import MultOperator, TailSettings, TreeFunction, TreeSpec, build, spectrum
from treemult import apply, char_fn, weight_preset

t = build(TreeSpec.homogeneous(2), 200)
op = MultOperator(TreeFunction.from_expr(t, "1/(1+n)"), weight_preset("constant", {}, t),
                  settings=TailSettings(tol=1e-2))

sp = spectrum(op, delta=1e-9)
print(f"{len(sp.points)} distinct values, first few:",
      [round(z.real, 4) for z, _, _ in sp.points[:5]])
print("accumulation candidates:", sp.accumulation_candidates)

# Every value is an eigenvalue: chi_w is an eigenvector for psi(w).
value, count, w = sp.points[3]
chi = char_fn(t, w)
print(f"M chi_w == {value.real:.4f} chi_w:", apply(op, chi).equals(chi * value),
      f"(eigenspace meets {count} vertices at that depth)")
