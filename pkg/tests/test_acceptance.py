"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line, printed at the end of the
pytest run.  Run this file directly to print the lines without pytest.
"""

import random
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from treemult.analysis import (
    Config,
    MultOperator,
    Verdict,
    apply,
    is_compact_L_to_Lmu,
    is_compact_Lmu,
    is_compact_Lmu_to_L,
    is_isometry_Lmu,
    spectrum,
)
from treemult.cli import main as cli_main
from treemult.functions import TreeFunction, Weight, char_fn, weight_preset, weighted_norm
from treemult.harness import (
    FAMILY_FOR_CONFIG,
    compactness_trend,
    default_anchors,
    isometry_candidate,
    make_witness,
    no_isometry_demo,
)
from treemult.oracle import oracle_random_suite
from treemult.tail import TailSettings
from treemult.tree import TreeSpec, build


def record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


@pytest.fixture(scope="module")
def random_suite():
    t0 = time.perf_counter()
    r = oracle_random_suite(200, max_depth=5, max_branching=3, seed=42, brute_limit=0)
    return r, time.perf_counter() - t0


def test_c1_norm_identity(random_suite):
    r, secs = random_suite
    ok = all(row["checks"]["norm_identity"] for row in r["rows"]) and len(r["rows"]) == 200
    worst = max(abs(row["observed"]["Lmu->Lmu"]["oracle"] - row["observed"]["Lmu->Lmu"]["sup_norm"])
                for row in r["rows"])
    record(1, ok and secs < 10, f"200 trials, max deviation {worst:.1e}, {secs:.1f} s")
    assert ok and worst <= 1e-12
    assert secs < 10


def test_c2_sandwich_bounds(random_suite):
    r, secs = random_suite
    ok = all(row["checks"]["sandwich_L_to_Lmu"] and row["checks"]["sandwich_Lmu_to_L"]
             for row in r["rows"])
    record(2, ok and secs < 30, f"200 trials within 1e-9 of both intervals, {secs:.1f} s")
    assert ok and secs < 30


def test_c3_brute_force_agreement():
    r = oracle_random_suite(50, max_depth=5, max_branching=3, seed=7, brute_limit=40,
                            max_vertices=40)
    keys = ("brute_Lmu->Lmu", "brute_L->Lmu", "brute_Lmu->L")
    ok = all(row["size"] <= 40 and all(row["checks"][k] for k in keys) for row in r["rows"])
    worst = max(abs(row["observed"][k[6:]]["brute"] - row["observed"][k[6:]]["oracle"])
                for row in r["rows"] for k in keys)
    record(3, ok, f"50 trials on <= 40 vertices, max |brute - closed form| {worst:.1e}")
    assert ok and worst <= 1e-6


def test_c4_spectrum():
    t = build(TreeSpec.homogeneous(2), 200)
    one = weight_preset("constant", {}, t)
    op = MultOperator(TreeFunction.from_expr(t, "1/(1+n)"), one,
                      settings=TailSettings(tol=1e-2))
    sp = spectrum(op, 1e-9)
    pts = sorted(z.real for z in sp.point_spectrum)
    expected = sorted(1 / (k + 1) for k in range(201))
    same = len(pts) == 201 and all(abs(a - b) <= 1e-9 for a, b in zip(pts, expected))
    acc = sp.accumulation_candidates == (0,)
    rnd = random.Random(4)
    eig = True
    for _ in range(20):
        k = rnd.randrange(201)
        lv = t.level(k)
        w = lv.start + rnd.randrange(lv.stop - lv.start)
        chi = char_fn(t, w)
        eig &= apply(op, chi).equals(chi * op.symbol(w))
    ok = same and acc and eig
    record(4, ok, f"{len(pts)} points, candidates {[complex(z) for z in sp.accumulation_candidates]}, "
                  f"20 eigen-checks {'exact' if eig else 'failed'}")
    assert ok


def _trend(t, psi, mu, cfg):
    op = MultOperator(TreeFunction.from_expr(t, psi), mu, cfg)
    fam = make_witness(FAMILY_FOR_CONFIG[op.config], t, mu, default_anchors(t))
    verdict = {Config.LMU_LMU: is_compact_Lmu, Config.L_LMU: is_compact_L_to_Lmu,
               Config.LMU_L: is_compact_Lmu_to_L}[op.config](op).verdict
    return verdict, compactness_trend(op, fam)


def test_c5_compactness():
    t = build(TreeSpec.homogeneous(2), 60)
    one = weight_preset("constant", {}, t)
    geo = Weight.of(TreeFunction.from_expr(t, "2^-n"))
    details = []
    ok = True
    for psi, mu, cfg in (("2^-n", one, "Lmu->Lmu"), ("2^-n", one, "L->Lmu"),
                         ("4^-n", geo, "Lmu->L")):
        verdict, tr = _trend(t, psi, mu, cfg)
        vals = np.array(tr.values)
        depths = np.array(tr.depths)
        fine = (verdict is Verdict.YES and np.all(np.diff(vals) <= 0)
                and np.all(vals[depths >= 40] < 1e-6))
        ok &= bool(fine)
        details.append(f"{cfg} {psi}: {verdict.value}, a(40)={vals[depths == 40][0]:.2e}")
    for cfg in Config:
        verdict, tr = _trend(t, "1", one, cfg)
        floor = min(tr.values)
        ok &= verdict is Verdict.NO and floor >= 0.5
        details.append(f"{cfg.value} 1: {verdict.value}, floor {floor:g}")
    record(5, ok, "; ".join(details))
    assert ok


def test_c6_isometry():
    t = build(TreeSpec.homogeneous(2), 6)
    mu = weight_preset("geometric", {"ratio": 0.5}, t)
    op = MultOperator(TreeFunction.from_expr(t, "cis(3*n)"), mu)
    yes = is_isometry_Lmu(op).verdict is Verdict.YES
    worst = max(abs(weighted_norm(apply(op, char_fn(t, w)), mu).value
                    - weighted_norm(char_fn(t, w), mu).value) for w in range(t.size))
    r = is_isometry_Lmu(MultOperator(TreeFunction.from_expr(t, "2*cis(n)"), mu))
    no = r.verdict is Verdict.NO and r.witness is not None
    ok = yes and worst <= 1e-12 and no
    record(6, ok, f"cis(3n) yes, max deviation {worst:.1e} over {t.size} vertices; "
                  f"2cis(n) {r.verdict.value} at vertex {r.witness}")
    assert ok


def test_c7_witness_norms():
    t = build(TreeSpec.homogeneous(2), 20)
    anchors = default_anchors(t, 2, 20)
    ok = True
    seen = {}
    for mu in (weight_preset("constant", {}, t), weight_preset("geometric", {"ratio": 0.5}, t)):
        for kind, target in (("scaled-char", 1.0), ("ramp", 2.0), ("tail-reciprocal", 1.0)):
            norms = make_witness(kind, t, mu, anchors).domain_norms(mu)
            ok &= len(norms) == 19 and all(x == target for x in norms)
            seen.setdefault(kind, set()).update(norms)
    record(7, ok, ", ".join(f"{k} {sorted(v)}" for k, v in seen.items()) + " for depths 2..20")
    assert ok


CRIT8_REASON = (
    "the claimed value 1/2 drops the root edge term: with |psi| = mu on T* and "
    "|psi(o)| = mu(o)/2 the ratio psi/mu has modulus 1/2 at o and 1 at every child, so "
    "||M_psi(1/mu)||_L >= 1/2 + (1 - 1/2) = 1 on any tree of depth >= 1"
)


@pytest.mark.xfail(strict=True, reason=CRIT8_REASON)
def test_c8_no_isometry_demos():
    t = build(TreeSpec.homogeneous(2), 50)
    mu = weight_preset("constant", {}, t)
    d = no_isometry_demo("L->Lmu", isometry_candidate("L->Lmu", mu), mu)
    levels = d["divergence"]["levels"]
    values = d["divergence"]["values"]
    linear = levels == list(range(1, 51)) and values == [float(k) for k in levels]

    small = build(TreeSpec.homogeneous(2), 6)
    mu6 = weight_preset("geometric", {"ratio": 0.5}, small)
    d = no_isometry_demo("Lmu->L", isometry_candidate("Lmu->L", mu6), mu6)
    recip = next(s for s in d["steps"] if s["step"] == "reciprocal-weight")["rhs"]
    half = recip == 0.5
    record(8, linear and half,
           f"L->Lmu levels 1..50 linear: {linear}; f = 1/mu gives {recip!r}, expected 0.5; "
           f"non-isometry shown instead by {d['first_failure']['step']} "
           f"({d['first_failure']['lhs']} != {d['first_failure']['rhs']})")
    assert linear
    assert recip == 0.5


def test_c9_determinism(tmp_path):
    out = tmp_path / "verify.json"
    codes = []
    blobs = []
    for _ in range(2):
        codes.append(cli_main(["verify", "--seed", "42", "--out", str(out)]))
        blobs.append(out.read_bytes())
    ok = codes == [0, 0] and blobs[0] == blobs[1]
    record(9, ok, f"exit codes {codes}, {len(blobs[0])} bytes, identical: {blobs[0] == blobs[1]}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
