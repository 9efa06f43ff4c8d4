"""Exact operator norms on finite truncations, computed independently of the
norm formulas in :mod:`treemult.analysis`.

Two tiers.  The closed forms maximize over the domain unit ball vertex by
vertex and return a witness attaining the value.  The brute-force tier
assumes only convexity: it solves a small LP for point evaluations on the
Lipschitz unit ball, and searches phases on a grid, refined locally, for the
weighted unit ball.  The two tiers are compared on small trees.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.optimize import linprog, minimize

from .analysis import (
    Config,
    MultOperator,
    apply,
    norm_bounds_L_to_Lmu,
    norm_bounds_Lmu_to_L,
)
from .functions import TreeFunction, Weight, lipschitz_norm, sup_norm, weighted_norm
from .tree import Truncation, TreeError, TreeSpec, build

__all__ = [
    "ExtremalCertificate",
    "oracle_norm",
    "oracle_norm_Lmu_to_Lmu",
    "oracle_norm_L_to_Lmu",
    "oracle_norm_Lmu_to_L",
    "lipschitz_ball_bound",
    "brute_norm",
    "brute_norm_Lmu_to_Lmu",
    "brute_norm_L_to_Lmu",
    "brute_norm_Lmu_to_L",
    "domain_norm",
    "codomain_norm",
    "check_certificate",
    "random_tree",
    "random_fixture",
    "run_trial",
    "oracle_random_suite",
    "dump_fixture",
    "load_fixture",
]

PHASE_GRID = 64


@dataclass(frozen=True)
class ExtremalCertificate:
    norm_value: float
    witness: TreeFunction
    method: str
    config: Config
    argmax: Optional[int] = None


def _dense(f: TreeFunction) -> np.ndarray:
    return f.values()


def _require_finite(t: Truncation) -> None:
    if not t.materializable:
        raise TreeError("the extremal oracle needs a truncation small enough to enumerate")


def domain_norm(config: Config, f: TreeFunction, mu: Weight) -> float:
    return lipschitz_norm(f).value if config is Config.L_LMU else weighted_norm(f, mu).value


def codomain_norm(config: Config, g: TreeFunction, mu: Weight) -> float:
    return lipschitz_norm(g).value if config is Config.LMU_L else weighted_norm(g, mu).value


# -- closed forms ----------------------------------------------------------------

def oracle_norm_Lmu_to_Lmu(op: MultOperator) -> ExtremalCertificate:
    """Exhaustive vertex scan: the norm is ``max |psi(v)|``, attained by
    ``chi_w / mu(w)`` at the first maximizing vertex ``w``."""
    t = op.tree
    _require_finite(t)
    psi, mu = _dense(op.symbol), _dense(op.weight).real
    best, arg = -1.0, 0
    for v in range(t.size):
        a = abs(psi[v])
        if a > best:
            best, arg = a, v
    w = TreeFunction(t, np.zeros(t.height + 1), {arg: 1.0 / mu[arg]})
    return ExtremalCertificate(float(best), w, "closed-form-per-vertex", Config.LMU_LMU, arg)


def oracle_norm_L_to_Lmu(op: MultOperator) -> ExtremalCertificate:
    """``max_w mu(w)|psi(w)| B(w)`` where ``B(w) = max |f(w)|`` over the
    Lipschitz unit ball: 1 at the root and ``|w|`` elsewhere."""
    t = op.tree
    _require_finite(t)
    psi, mu, depth = _dense(op.symbol), _dense(op.weight).real, t.depths()
    best, arg = -1.0, 0
    for v in range(t.size):
        b = 1.0 if v == 0 else max(1.0, float(depth[v]))
        val = mu[v] * abs(psi[v]) * b
        if val > best:
            best, arg = val, v
    if arg == 0:
        witness = TreeFunction.radial(t, np.ones(t.height + 1))
    else:
        k = int(depth[arg])
        witness = TreeFunction.radial(t, np.minimum(np.arange(t.height + 1), k))
    return ExtremalCertificate(float(best), witness, "closed-form-per-vertex", Config.L_LMU, arg)


def oracle_norm_Lmu_to_L(op: MultOperator) -> ExtremalCertificate:
    """``r(o) + max_{v != o} (r(v) + r(v^-))`` with ``r = |psi| / mu``.

    Witness: ``|f| = 1/mu`` everywhere, phases making ``psi f`` nonnegative
    except at the maximizing vertex, where it is flipped.
    """
    t = op.tree
    _require_finite(t)
    psi, mu, par = _dense(op.symbol), _dense(op.weight).real, t.parents()
    r = np.abs(psi) / mu
    best, arg = 0.0, None
    for v in range(1, t.size):
        val = r[v] + r[par[v]]
        if arg is None or val > best:
            best, arg = val, v
    phase = np.array([cmath.rect(1.0, -cmath.phase(z)) if z != 0 else 1.0 for z in psi])
    f = phase / mu
    if arg is not None:
        f[arg] = -f[arg]
    witness = TreeFunction.from_array(t, f)
    return ExtremalCertificate(float(r[0] + best), witness, "closed-form-per-vertex",
                               Config.LMU_L, arg)


def oracle_norm(op: MultOperator) -> ExtremalCertificate:
    return {Config.LMU_LMU: oracle_norm_Lmu_to_Lmu, Config.L_LMU: oracle_norm_L_to_Lmu,
            Config.LMU_L: oracle_norm_Lmu_to_L}[op.config](op)


# -- brute force -------------------------------------------------------------------

def lipschitz_ball_bound(t: Truncation, w: int) -> float:
    """``max |f(w)|`` over the Lipschitz unit ball, by linear programming.

    Rotating ``f`` makes ``f(w)`` real and taking real parts does not
    increase the norm, so the real LP over ``(f, a, d)`` with ``|f(o)| <= a``,
    ``|f(v) - f(v^-)| <= d``, ``a + d <= 1`` is exact.
    """
    _require_finite(t)
    n = t.size
    par = t.parents()
    nvar = n + 2
    ia, idd = n, n + 1
    rows, rhs = [], []
    for s in (1.0, -1.0):
        row = np.zeros(nvar)
        row[0], row[ia] = s, -1.0
        rows.append(row)
        rhs.append(0.0)
    for v in range(1, n):
        for s in (1.0, -1.0):
            row = np.zeros(nvar)
            row[v] += s
            row[par[v]] -= s
            row[idd] = -1.0
            rows.append(row)
            rhs.append(0.0)
    row = np.zeros(nvar)
    row[ia] = row[idd] = 1.0
    rows.append(row)
    rhs.append(1.0)
    c = np.zeros(nvar)
    c[w] = -1.0
    bounds = [(None, None)] * n + [(0, None), (0, None)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"LP failed at vertex {w}: {res.message}")
    return float(-res.fun)


def brute_norm_Lmu_to_Lmu(op: MultOperator) -> float:
    """Evaluate every extreme-point candidate ``chi_v / mu(v)`` and ``1/mu``
    through the generic operator path."""
    t = op.tree
    _require_finite(t)
    mu = op.weight
    cands = [TreeFunction(t, np.zeros(t.height + 1), {v: 1.0 / mu(v).real})
             for v in range(t.size)]
    cands.append(TreeFunction.from_array(t, 1.0 / _dense(mu).real))
    return max(weighted_norm(apply(op, f), mu).value for f in cands)


def brute_norm_L_to_Lmu(op: MultOperator) -> float:
    """``max_w mu(w)|psi(w)| * LP(w)``, cross-checked against the candidates
    ``a + b min(|v|, |w|)`` with ``(a, b)`` on the simplex edge."""
    t = op.tree
    _require_finite(t)
    psi, mu = _dense(op.symbol), _dense(op.weight).real
    lp = max(mu[w] * abs(psi[w]) * lipschitz_ball_bound(t, w) for w in range(t.size))
    cand = 0.0
    n = np.arange(t.height + 1)
    for k in range(t.height + 1):
        for a in np.linspace(0.0, 1.0, 5):
            f = TreeFunction.radial(t, a + (1.0 - a) * np.minimum(n, k))
            cand = max(cand, weighted_norm(apply(op, f), op.weight).value)
    return max(lp, cand)


def _max_pair(a: complex, b: complex, root: float) -> float:
    """``max over phases of root + |a e^{i s} - b e^{i t}|`` by grid + local refinement."""
    if a == 0 and b == 0:
        return root
    th = np.linspace(0.0, 2 * np.pi, PHASE_GRID, endpoint=False)
    grid = np.abs(a * np.exp(1j * th)[:, None] - b * np.exp(1j * th)[None, :])
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)

    def neg(x):
        return -abs(a * cmath.exp(1j * x[0]) - b * cmath.exp(1j * x[1]))

    res = minimize(neg, x0=[th[i], th[j]], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
    return root + max(float(grid[i, j]), -float(res.fun))


def brute_norm_Lmu_to_L(op: MultOperator) -> float:
    """Maximize ``||psi f||_L`` over ``|f| = 1/mu`` (extreme points of the
    polydisc; the objective is convex).  The sup over edges decouples, and each
    edge involves at most the phases at the root, ``v`` and ``v^-``."""
    t = op.tree
    _require_finite(t)
    psi, mu, par = _dense(op.symbol), _dense(op.weight).real, t.parents()
    root = abs(psi[0]) / mu[0]
    if t.size == 1:
        return float(root)
    return max(_max_pair(psi[v] / mu[v], psi[par[v]] / mu[par[v]], root)
               for v in range(1, t.size))


def brute_norm(op: MultOperator) -> float:
    return {Config.LMU_LMU: brute_norm_Lmu_to_Lmu, Config.L_LMU: brute_norm_L_to_Lmu,
            Config.LMU_L: brute_norm_Lmu_to_L}[op.config](op)


def check_certificate(op: MultOperator, cert: ExtremalCertificate,
                      atol: float = 1e-9) -> tuple:
    """(witness in unit ball, witness reproduces the norm) re-evaluated
    through ``apply`` and the codomain norm."""
    dn = domain_norm(op.config, cert.witness, op.weight)
    cn = codomain_norm(op.config, apply(op, cert.witness), op.weight)
    return bool(dn <= 1 + 1e-12), bool(abs(cn - cert.norm_value) <= atol)


# -- random fixtures and the suite ----------------------------------------------

def random_tree(rng: np.random.Generator, max_depth: int, max_branching: int,
                max_vertices: Optional[int] = None) -> Truncation:
    """Random edge-list tree: the root gets 1..b children, others 0..b."""
    edges = []
    frontier = [0]
    count = 1
    for depth in range(max_depth):
        nxt = []
        for u in frontier:
            lo = 1 if u == 0 else 0
            k = int(rng.integers(lo, max_branching + 1))
            if max_vertices is not None:
                k = min(k, max_vertices - count)
            for _ in range(k):
                edges.append((u, count))
                nxt.append(count)
                count += 1
        frontier = nxt
        if not frontier:
            break
    return build(TreeSpec.edge_list(0, edges), max_depth)


def random_fixture(rng: np.random.Generator, max_depth: int = 5, max_branching: int = 3,
                   max_vertices: Optional[int] = None) -> tuple:
    """(tree, mu in [0.1, 10], psi with |psi| <= 10)."""
    t = random_tree(rng, max_depth, max_branching, max_vertices)
    mu = rng.uniform(0.1, 10.0, t.size)
    psi = rng.uniform(0.0, 10.0, t.size) * np.exp(1j * rng.uniform(0, 2 * np.pi, t.size))
    return t, Weight.of(TreeFunction.from_array(t, mu)), TreeFunction.from_array(t, psi)


def run_trial(t: Truncation, mu: Weight, psi: TreeFunction, brute_limit: int = 40,
              inject_bug: bool = False) -> dict:
    """Run every oracle invariant on one fixture; returns a JSON-ready record."""
    checks = {}
    observed = {}
    bug = 1e-3 if inject_bug else 0.0

    op = MultOperator(psi, mu, Config.LMU_LMU)
    c1 = oracle_norm_Lmu_to_Lmu(op)
    s = sup_norm(psi).value
    observed["Lmu->Lmu"] = {"oracle": c1.norm_value + bug, "sup_norm": s}
    checks["norm_identity"] = bool(abs(c1.norm_value + bug - s) <= 1e-12)

    op2 = MultOperator(psi, mu, Config.L_LMU)
    c2 = oracle_norm_L_to_Lmu(op2)
    iv2 = norm_bounds_L_to_Lmu(op2)
    observed["L->Lmu"] = {"oracle": c2.norm_value, "lo": iv2.lo, "hi": iv2.hi}
    checks["sandwich_L_to_Lmu"] = bool(iv2.contains(c2.norm_value, 1e-9))

    op3 = MultOperator(psi, mu, Config.LMU_L)
    c3 = oracle_norm_Lmu_to_L(op3)
    iv3 = norm_bounds_Lmu_to_L(op3)
    observed["Lmu->L"] = {"oracle": c3.norm_value, "lo": iv3.lo, "hi": iv3.hi}
    checks["sandwich_Lmu_to_L"] = bool(iv3.contains(c3.norm_value, 1e-9))

    for name, o, c in (("Lmu->Lmu", op, c1), ("L->Lmu", op2, c2), ("Lmu->L", op3, c3)):
        in_ball, reproduces = check_certificate(o, c)
        checks[f"witness_{name}"] = bool(in_ball and reproduces)

    if t.size <= brute_limit:
        for name, o, c in (("Lmu->Lmu", op, c1), ("L->Lmu", op2, c2), ("Lmu->L", op3, c3)):
            b = brute_norm(o)
            observed[name]["brute"] = float(b)
            checks[f"brute_{name}"] = bool(abs(b - c.norm_value) <= 1e-6)
        depth = t.depths()
        checks["lipschitz_ball_bound"] = bool(all(
            abs(lipschitz_ball_bound(t, w) - (1.0 if w == 0 else max(1.0, float(depth[w]))))
            <= 1e-6 for w in range(t.size)))
    return {"size": t.size, "height": t.height, "checks": checks, "observed": observed,
            "passed": bool(all(checks.values()))}


def dump_fixture(path, t: Truncation, mu: Weight, psi: TreeFunction, record: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "tree": {"root": 0, "edges": [[p, c] for p, c in t.edges()],
                 "depth_cap": t.depth_cap},
        "mu": [float(x) for x in mu.values().real],
        "psi": [[float(z.real), float(z.imag)] for z in psi.values()],
        "configs": [c.value for c in Config],
        "expected": {k: True for k in record["checks"]},
        "observed": record,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_fixture(path) -> tuple:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    tr = doc["tree"]
    t = build(TreeSpec.edge_list(tr["root"], [tuple(e) for e in tr["edges"]]),
              tr.get("depth_cap", 10**6))
    mu = Weight.of(TreeFunction.from_array(t, np.array(doc["mu"])))
    psi = TreeFunction.from_array(t, np.array([complex(a, b) for a, b in doc["psi"]]))
    return t, mu, psi


def oracle_random_suite(trials: int = 100, max_depth: int = 5, max_branching: int = 3,
                        seed: int = 42, brute_limit: int = 40, inject_bug: bool = False,
                        dump_dir=None, max_vertices: Optional[int] = None) -> dict:
    """Random fixtures checked against every oracle invariant.

    Trial ``i`` draws from ``default_rng([seed, i])`` so results do not depend
    on execution order.  Failing trials are dumped as JSON fixtures when
    ``dump_dir`` is given.
    """
    rows = []
    dumps = []
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        t, mu, psi = random_fixture(rng, max_depth, max_branching, max_vertices)
        rec = run_trial(t, mu, psi, brute_limit, inject_bug)
        rec["trial"] = i
        if not rec["passed"] and dump_dir is not None:
            dumps.append(str(dump_fixture(Path(dump_dir) / f"fixture_seed{seed}_trial{i}.json",
                                          t, mu, psi, rec)))
        rows.append(rec)
    return {
        "suite": "oracle_random_suite",
        "seed": seed,
        "trials": trials,
        "max_depth": max_depth,
        "max_branching": max_branching,
        "passed": all(r["passed"] for r in rows),
        "failures": [r["trial"] for r in rows if not r["passed"]],
        "fixture_dumps": dumps,
        "rows": rows,
    }
