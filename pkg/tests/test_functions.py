import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from treemult.functions import (
    D,
    FunctionError,
    TreeFunction,
    Weight,
    char_fn,
    depth_fn,
    iterated_log,
    lipschitz_growth_bound,
    lipschitz_norm,
    point_eval_bound,
    read_function_csv,
    read_weight_csv,
    sup_norm,
    weight_preset,
    weighted_norm,
    write_function_csv,
    write_weight_csv,
)
from treemult.tree import TreeSpec, build


def dense_lipschitz(t, vals):
    """Reference: |f(o)| + max |f(v) - f(parent)| over an explicit vertex loop."""
    best = 0.0
    for v in range(1, t.size):
        best = max(best, abs(vals[v] - vals[t.parent(v)]))
    return abs(vals[0]) + best


T4 = build(TreeSpec.homogeneous(2), 4)
T6 = build(TreeSpec.homogeneous(2), 6)


def test_sup_norm_examples():
    assert sup_norm(TreeFunction.zeros(T4)).value == 0
    assert sup_norm(char_fn(T4, 9)).value == 1
    nv = sup_norm(TreeFunction.from_expr(T4, "1/(1+n)"))
    assert nv.value == 1 and nv.witness == 0


def test_weighted_norm_examples():
    mu = Weight.of(TreeFunction.from_expr(T6, "2^-n"))
    assert weighted_norm(char_fn(T6, 5), mu).value == mu(5).real
    assert weighted_norm(1.0 / mu, mu).value == 1.0
    assert weighted_norm(depth_fn(T6), mu).value == 0.5


def test_D_examples():
    f = TreeFunction.radial(T4, [3] * 5)
    assert all(D(f, v) == 0 for v in range(1, T4.size))
    g = depth_fn(T4)
    assert all(D(g, v) == 1 for v in range(1, T4.size))
    assert D(char_fn(T4, 6), 6) == 1
    with pytest.raises(FunctionError):
        D(g, 0)


def test_lipschitz_examples():
    assert lipschitz_norm(char_fn(T4, 0)).value == 2
    assert lipschitz_norm(char_fn(T4, 3)).value == 1
    assert lipschitz_norm(char_fn(T4, T4.size - 1)).value == 1
    assert lipschitz_norm(depth_fn(T4)).value == 1


def test_lazy_tree_norms():
    t = build(TreeSpec.homogeneous(2), 200)
    f = TreeFunction.from_expr(t, "1/(1+n)")
    assert sup_norm(f).value == 1
    assert lipschitz_norm(f).value == 1.5
    g = f * char_fn(t, t.size - 1)
    assert sup_norm(g).value == pytest.approx(1 / 201)
    assert lipschitz_norm(g).value == pytest.approx(1 / 201)


def test_point_eval_and_growth_bounds():
    rng = np.random.default_rng(7)
    mu = Weight.of(TreeFunction.from_array(T4, rng.uniform(0.1, 10, T4.size)))
    f = TreeFunction.from_array(T4, rng.normal(size=T4.size) + 1j * rng.normal(size=T4.size))
    f = f * (1.0 / weighted_norm(f, mu).value)
    assert all(point_eval_bound(f, mu, v) for v in range(T4.size))
    assert point_eval_bound(char_fn(T4, 3), mu, 3)
    t5 = build(TreeSpec.homogeneous(2), 5)
    for seed in range(10):
        r = np.random.default_rng(seed)
        g = TreeFunction.from_array(t5, r.normal(size=t5.size))
        g = g * (1.0 / lipschitz_norm(g).value)
        assert all(lipschitz_growth_bound(g, v) for v in range(t5.size))
        assert all(abs(g(v)) <= t5.depth(v) + 1e-12 for v in range(1, t5.size))
    assert lipschitz_growth_bound(TreeFunction.radial(t5, [2.0] * 6), 9)


def test_weight_presets():
    w = weight_preset("constant", {"c": 3}, T4)
    assert w(7) == 3
    g = weight_preset("geometric", {"ratio": 0.5}, T4)
    assert g(T4.size - 1) == 0.0625
    r = weight_preset("reciprocal-depth", None, T4)
    assert r(0) == 1 and r(1) == 0.5
    il = weight_preset("iterated-log", {"k": 2}, T4)
    assert il(T4.level(4).start).real == pytest.approx(1 + np.log(4))
    with pytest.raises(FunctionError):
        weight_preset("constant", {"c": 0}, T4)
    with pytest.raises(FunctionError):
        weight_preset("bogus", None, T4)


def test_iterated_log():
    assert iterated_log(0, 5) == 1
    assert iterated_log(1, np.e) == pytest.approx(2)
    assert iterated_log(2, np.e) == pytest.approx(1 + np.log(2))
    with pytest.raises(ValueError):
        iterated_log(1, 0.5)


def test_weight_must_be_positive():
    with pytest.raises(FunctionError):
        Weight(T4, [1, 0, 1, 1, 1])


def test_csv_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    f = TreeFunction.from_array(T4, rng.normal(size=T4.size) + 1j * rng.normal(size=T4.size))
    write_function_csv(f, tmp_path / "f.csv")
    g = read_function_csv(T4, tmp_path / "f.csv")
    assert f.equals(g)
    mu = Weight.of(TreeFunction.from_array(T4, rng.uniform(0.5, 2, T4.size)))
    write_weight_csv(mu, tmp_path / "w.csv")
    assert read_weight_csv(T4, tmp_path / "w.csv").equals(mu)
    (tmp_path / "bad.csv").write_text("id,re,im\n0,1,0\n", encoding="utf-8")
    with pytest.raises(FunctionError):
        read_function_csv(T4, tmp_path / "bad.csv")


vals = st.lists(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
                min_size=T4.size, max_size=T4.size)


@settings(max_examples=80, deadline=None)
@given(vals, vals, st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_norm_axioms(a, b, c):
    mu = weight_preset("geometric", {"ratio": 0.7}, T4)
    f = TreeFunction.from_array(T4, a)
    g = TreeFunction.from_array(T4, b)
    for norm in (sup_norm, lambda h: weighted_norm(h, mu), lipschitz_norm):
        nf, ng = norm(f).value, norm(g).value
        assert norm(f + g).value <= nf + ng + 1e-9 * (1 + nf + ng)
        assert norm(f * c).value == pytest.approx(abs(c) * nf, rel=1e-9, abs=1e-9)
        assert (norm(f).value == 0) == all(x == 0 for x in a)


@settings(max_examples=80, deadline=None)
@given(vals)
def test_lipschitz_matches_reference(a):
    f = TreeFunction.from_array(T4, a)
    assert lipschitz_norm(f).value == pytest.approx(dense_lipschitz(T4, np.array(a)),
                                                    rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=5, max_size=5),
       st.dictionaries(st.integers(0, T4.size - 1), st.floats(-10, 10), max_size=6))
def test_sparse_matches_dense(levels, points):
    f = TreeFunction(T4, levels, points)
    dense = TreeFunction.from_array(T4, f.values())
    assert sup_norm(f).value == sup_norm(dense).value
    assert lipschitz_norm(f).value == pytest.approx(lipschitz_norm(dense).value, abs=1e-12)
    assert sup_norm(f).witness == sup_norm(dense).witness
