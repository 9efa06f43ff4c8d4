"""
Norm estimates between L_mu and the Lipschitz space
===================================================

Between different spaces the norm is only pinned down up to a factor.  The
extremal oracle computes the exact value on a finite tree and certifies it
with a unit-norm function attaining it.
"""

import numpy as np

from treemult import MultOperator, TreeFunction, Weight, norm_bounds_L_to_Lmu, norm_bounds_Lmu_to_L
from treemult.oracle import brute_norm, check_certificate, oracle_norm, random_fixture

rng = np.random.default_rng(2021)
t, mu, psi = random_fixture(rng, max_depth=4, max_branching=3, max_vertices=30)
print(f"random tree with {t.size} vertices and height {t.height}")

for config, bounds in (("L->Lmu", norm_bounds_L_to_Lmu), ("Lmu->L", norm_bounds_Lmu_to_L)):
    op = MultOperator(psi, mu, config)
    iv = bounds(op)
    cert = oracle_norm(op)
    in_ball, reproduces = check_certificate(op, cert)
    print(f"{config}: bounds [{iv.lo:.4f}, {iv.hi:.4f}]  exact {cert.norm_value:.4f}  "
          f"brute force {brute_norm(op):.4f}  witness ok: {in_ball and reproduces}")
