import numpy as np
import pytest

from treemult.analysis import Config, ConfigError, MultOperator
from treemult.functions import (
    D,
    FunctionError,
    TreeFunction,
    Weight,
    lipschitz_norm,
    weight_preset,
    weighted_norm,
)
from treemult.harness import (
    compactness_trend,
    default_anchors,
    isometry_candidate,
    make_witness,
    no_isometry_demo,
    suite_csv,
    theorem_suite,
)
from treemult.tree import TreeSpec, build

PATH = build(TreeSpec.homogeneous(1), 8)


def test_scaled_char_example():
    t = build(TreeSpec.homogeneous(2), 4)
    mu = weight_preset("constant", {"c": 4}, t)
    fam = make_witness("scaled-char", t, mu, [5])
    f = fam.members[0]
    assert f(5) == 0.25 and f.sup_abs()[0] == 0.25
    assert weighted_norm(f, mu).value == 1


def test_ramp_example_on_path():
    mu = weight_preset("constant", {}, PATH)
    f = make_witness("ramp", PATH, mu, [4]).members[0]
    assert [f(v).real for v in range(9)] == [0, 0, 0, 2, 4, 4, 4, 4, 4]
    assert lipschitz_norm(f).value == 2


@pytest.mark.parametrize("m", range(2, 9))
def test_ramp_D_values(m):
    mu = weight_preset("constant", {}, PATH)
    f = make_witness("ramp", PATH, mu, [m]).members[0]
    for v in range(1, 9):
        d = D(f, v)
        if m / 2 <= v - 1 and v <= m:
            assert d == 2
        elif v - 1 < m / 2 <= v:
            assert d <= 2
        else:
            assert d == 0


def test_tail_reciprocal_example():
    mu = weight_preset("geometric", {"ratio": 0.5}, PATH)
    f = make_witness("tail-reciprocal", PATH, mu, [3]).members[0]
    assert [f(v).real for v in range(5)] == [0, 0, 0, 8, 16]
    assert weighted_norm(f, mu).value == 1


def test_anchor_errors():
    mu = weight_preset("constant", {}, PATH)
    with pytest.raises(FunctionError):
        make_witness("ramp", PATH, mu, [3, 99])
    with pytest.raises(FunctionError):
        make_witness("ramp", PATH, mu, [4, 3])
    with pytest.raises(ValueError):
        make_witness("spiral", PATH, mu, [3])


def test_trend_examples():
    t = build(TreeSpec.homogeneous(2), 30)
    one = weight_preset("constant", {}, t)
    anchors = [t.level(k).start for k in range(1, 31)]
    fam = make_witness("scaled-char", t, one, anchors)
    tr = compactness_trend(MultOperator(TreeFunction.from_expr(t, "2^-n"), one), fam)
    assert tr.values == tuple(2.0 ** -k for k in range(1, 31))
    tr = compactness_trend(MultOperator(TreeFunction.from_expr(t, "1"), one), fam)
    assert set(tr.values) == {1.0} and tr.verdict == "consistent-with-noncompact"
    ramp = make_witness("ramp", t, one, default_anchors(t))
    tr = compactness_trend(MultOperator(TreeFunction.from_expr(t, "1"), one, "L->Lmu"), ramp)
    assert all(a >= d for a, d in zip(tr.values, tr.depths))
    with pytest.raises(ConfigError):
        compactness_trend(MultOperator(TreeFunction.from_expr(t, "1"), one, "Lmu->L"), ramp)


def test_no_isometry_demo_chains():
    t = build(TreeSpec.homogeneous(2), 6)
    mu = weight_preset("geometric", {"ratio": 0.5}, t)
    d = no_isometry_demo("Lmu->L", isometry_candidate("Lmu->L", mu), mu)
    steps = {s["step"]: s for s in d["steps"]}
    assert steps["chi_o"]["holds"]
    assert steps["reciprocal-weight"]["rhs"] == pytest.approx(1.0)
    assert d["first_failure"]["step"] == "anti-phase"
    assert d["first_failure"]["rhs"] == pytest.approx(2.0)
    d = no_isometry_demo("L->Lmu", isometry_candidate("L->Lmu", mu), mu)
    assert d["divergence"]["values"] == pytest.approx(list(range(1, 7)))
    psi = TreeFunction.from_expr(t, "3")
    d = no_isometry_demo("L->Lmu", psi, mu)
    assert d["first_failure"]["step"] == "chi_v" and d["first_failure"]["vertex"] == 1
    with pytest.raises(ConfigError):
        no_isometry_demo("Lmu->Lmu", psi, mu)


def test_theorem_suite():
    t = build(TreeSpec.homogeneous(2), 5)
    mu = weight_preset("constant", {}, t)
    r = theorem_suite(t, mu, ["0", "1", "2^-n"], random_symbols=5, seed=1)
    assert r["passed"] and len(r["rows"]) == 8 * 3
    zero = [row for row in r["rows"] if row["symbol"] == "0"]
    assert all(row["hi"] == 0 and row["verdict"] == "yes" for row in zero)
    assert all(row["checks"]["eigen_check"] for row in r["rows"] if row["config"] == "Lmu->Lmu")
    lines = suite_csv(r).splitlines()
    assert lines[0] == "config,symbol,verdict,quantity,lo,hi,oracle"
    assert len(lines) == 25
    with pytest.raises(ConfigError):
        theorem_suite(t, mu, [])
