"""Functions and weights on a truncated tree, and the three norms.

A :class:`TreeFunction` is stored as a per-level base value plus a sparse map
of per-vertex overrides.  Radial functions have no overrides, characteristic
functions have a single one, and tabulated functions override every vertex.
This keeps every norm exact on the truncation while letting radial data live
on trees far too large to enumerate.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Union

import numpy as np

from .expr import Node, eval_levels, parse
from .tail import TailClass, TailSettings, classify_tail
from .tree import Truncation, TreeError, VertexLike, _vid

__all__ = [
    "FunctionError",
    "TreeFunction",
    "Weight",
    "NormValue",
    "sup_norm",
    "weighted_norm",
    "D",
    "lipschitz_norm",
    "point_eval_bound",
    "lipschitz_growth_bound",
    "char_fn",
    "depth_fn",
    "iterated_log",
    "weight_preset",
    "read_function_csv",
    "write_function_csv",
    "read_weight_csv",
    "write_weight_csv",
]

Scalar = Union[int, float, complex]


class FunctionError(ValueError):
    """Invalid function data, or functions living on different truncations."""


@dataclass(frozen=True)
class NormValue:
    value: float
    exact_on_truncation: bool = True
    tail_note: Optional[TailClass] = None
    witness: Optional[int] = None

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        out = {"value": self.value, "exact_on_truncation": self.exact_on_truncation}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.tail_note is not None:
            out["tail"] = self.tail_note.to_dict()
        return out


class TreeFunction:
    """Complex-valued function on the vertices of a truncation."""

    def __init__(self, tree: Truncation, levels, points: Optional[dict] = None,
                 source: str = "tabulated", expr: Optional[Node] = None):
        levels = np.asarray(levels, dtype=complex)
        if levels.shape != (tree.height + 1,):
            raise FunctionError(
                f"expected {tree.height + 1} level values, got shape {levels.shape}")
        self.tree = tree
        self.levels = levels
        self.points = {}
        for v, x in (points or {}).items():
            vid = tree._check(v)
            self.points[vid] = complex(x)
        self.source = source
        self.expr = expr

    # -- constructors ------------------------------------------------------

    @classmethod
    def radial(cls, tree: Truncation, values) -> "TreeFunction":
        """Function of the depth only; ``values`` is a sequence or a callable of n."""
        if callable(values):
            values = [values(n) for n in range(tree.height + 1)]
        return cls(tree, values, source="radial")

    @classmethod
    def from_expr(cls, tree: Truncation, expr: Union[str, Node]) -> "TreeFunction":
        node = parse(expr) if isinstance(expr, str) else expr
        return cls(tree, eval_levels(node, tree.height), source="radial-expression",
                   expr=node)

    @classmethod
    def from_array(cls, tree: Truncation, values) -> "TreeFunction":
        values = np.asarray(values, dtype=complex)
        if values.shape != (tree.size,):
            raise FunctionError(f"expected {tree.size} vertex values, got {values.shape}")
        return cls(tree, np.zeros(tree.height + 1), dict(enumerate(values.tolist())))

    @classmethod
    def zeros(cls, tree: Truncation) -> "TreeFunction":
        return cls(tree, np.zeros(tree.height + 1), source="radial")

    # -- bookkeeping -------------------------------------------------------

    @cached_property
    def _point_depths(self) -> dict:
        return {v: self.tree.depth(v) for v in self.points}

    @cached_property
    def _level_override_counts(self) -> Counter:
        return Counter(self._point_depths.values())

    @property
    def dense(self) -> bool:
        return len(self.points) == self.tree.size

    @property
    def is_radial(self) -> bool:
        return not self.points

    def base_present(self, k: int) -> bool:
        """Whether some depth-``k`` vertex takes the level's base value."""
        return self._level_override_counts.get(k, 0) < self.tree.level_sizes[k]

    def first_base_id(self, k: int) -> Optional[int]:
        if not self.base_present(k):
            return None
        for v in self.tree.level(k):
            if v not in self.points:
                return v
        return None

    def max_override_depth(self) -> int:
        return max(self._point_depths.values(), default=-1)

    def _same_tree(self, other: "TreeFunction") -> None:
        if other.tree is not self.tree:
            raise FunctionError("functions live on different truncations")

    def __call__(self, v: VertexLike) -> complex:
        vid = _vid(v)
        if vid in self.points:
            return self.points[vid]
        return complex(self.levels[self.tree.depth(vid)])

    def values(self) -> np.ndarray:
        """Dense value array in BFS order (materializable truncations only)."""
        out = self.levels[self.tree.depths()].astype(complex)
        if self.points:
            ids = np.fromiter(self.points.keys(), dtype=np.int64, count=len(self.points))
            out[ids] = np.fromiter(self.points.values(), dtype=complex, count=len(self.points))
        return out

    # -- pointwise algebra ---------------------------------------------------

    def map(self, fn: Callable) -> "TreeFunction":
        """Apply a vectorized elementwise function."""
        levels = np.asarray(fn(self.levels), dtype=complex)
        pts = {}
        if self.points:
            keys = list(self.points)
            vals = np.asarray(fn(np.array([self.points[k] for k in keys])), dtype=complex)
            pts = dict(zip(keys, vals.tolist()))
        return TreeFunction(self.tree, levels, pts)

    def combine(self, other: Union["TreeFunction", Scalar], fn: Callable) -> "TreeFunction":
        if not isinstance(other, TreeFunction):
            c = complex(other)
            return self.map(lambda a: fn(a, c))
        self._same_tree(other)
        with np.errstate(divide="ignore", invalid="ignore"):
            levels = np.asarray(fn(self.levels, other.levels), dtype=complex)
        pts = {}
        keys = list(self.points.keys() | other.points.keys())
        if keys:
            sd, od = self._point_depths, other._point_depths
            a = np.array([self.points[k] if k in sd else self.levels[od[k]] for k in keys],
                         dtype=complex)
            b = np.array([other.points[k] if k in od else other.levels[sd[k]] for k in keys],
                         dtype=complex)
            pts = dict(zip(keys, np.asarray(fn(a, b), dtype=complex).tolist()))
        return TreeFunction(self.tree, levels, pts)

    def __add__(self, other):
        return self.combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self.combine(other, np.subtract)

    def __rsub__(self, other):
        return self.combine(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self.combine(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.combine(other, np.divide)

    def __rtruediv__(self, other):
        return self.combine(other, lambda a, b: b / a)

    def __neg__(self):
        return self.map(np.negative)

    def __abs__(self):
        return self.map(np.abs)

    def restrict_depth(self, lo: int = 0, hi: Optional[int] = None) -> "TreeFunction":
        """Zero outside the depth band ``lo <= |v| <= hi``."""
        hi = self.tree.height if hi is None else hi
        k = np.arange(self.tree.height + 1)
        keep = (k >= lo) & (k <= hi)
        pts = {v: (x if lo <= self._point_depths[v] <= hi else 0j)
               for v, x in self.points.items()}
        return TreeFunction(self.tree, np.where(keep, self.levels, 0), pts)

    def equals(self, other: "TreeFunction", atol: float = 0.0) -> bool:
        """Vertexwise comparison (exact when ``atol`` is 0)."""
        diff = abs(self - other)
        return diff.sup_abs()[0] <= atol

    # -- level statistics ----------------------------------------------------

    def level_sup_abs(self) -> np.ndarray:
        """``M_k = max over depth-k vertices of |f|``."""
        return self._level_reduce(np.maximum, -np.inf)

    def level_inf_abs(self) -> np.ndarray:
        return self._level_reduce(np.minimum, np.inf)

    def _level_reduce(self, op, empty) -> np.ndarray:
        out = np.full(self.tree.height + 1, empty)
        for k in range(self.tree.height + 1):
            if self.base_present(k):
                out[k] = abs(self.levels[k])
        for v, x in self.points.items():
            k = self._point_depths[v]
            out[k] = op(out[k], abs(x))
        return out

    def level_values(self) -> np.ndarray:
        """Per-level values for functions that are radial on every level.

        Raises for functions with overrides, whose levels are not single-valued.
        """
        if self.points:
            raise FunctionError("function is not radial")
        return self.levels.copy()

    def sup_abs(self) -> tuple:
        """(max |f|, smallest BFS id attaining it)."""
        if self.dense and self.tree.materializable:
            a = np.abs(self.values())
            i = int(np.argmax(a))
            return float(a[i]), i
        best, arg = -1.0, None
        for k in range(self.tree.height + 1):
            if self.base_present(k):
                val = abs(self.levels[k])
                if val > best:
                    best, arg = val, self.first_base_id(k)
                elif val == best and arg is not None:
                    arg = min(arg, self.first_base_id(k))
        for v, x in self.points.items():
            val = abs(x)
            if val > best or (val == best and (arg is None or v < arg)):
                best, arg = val, v
        return float(best), arg

    def sup_D(self) -> tuple:
        """(max over realized non-root v of |f(v) - f(v^-)|, smallest witness id)."""
        t = self.tree
        if t.size == 1:
            return 0.0, None
        if self.dense and t.materializable:
            vals = self.values()
            par = t.parents()
            d = np.abs(vals[1:] - vals[par[1:]])
            i = int(np.argmax(d))
            return float(d[i]), i + 1
        cands = []
        pts = self.points
        pdepth = self._point_depths
        ovr_children = Counter()
        for v in pts:
            if v != 0:
                p = t.parent(v)
                ovr_children[p] += 1
                cands.append((abs(pts[v] - self(p)), v))
        # base-valued children of overridden parents
        for p in pts:
            kids = t.children(p)
            if len(kids) > ovr_children.get(p, 0):
                child = next(c for c in kids if c not in pts)
                cands.append((abs(self.levels[pdepth[p] + 1] - pts[p]), child))
        # base-valued children of base-valued parents
        by_level = Counter()
        kids_of_ovr = Counter()
        for v in pts:
            if v != 0 and t.parent(v) not in pts:
                by_level[pdepth[v]] += 1
        for p in pts:
            kids_of_ovr[pdepth[p] + 1] += len(t.children(p))
        for k in range(1, t.height + 1):
            n_free = t.level_sizes[k] - kids_of_ovr.get(k, 0) - by_level.get(k, 0)
            if n_free > 0:
                cands.append((abs(self.levels[k] - self.levels[k - 1]),
                              self._first_free_edge(k)))
        best = max(c[0] for c in cands)
        return float(best), min(v for val, v in cands if val == best)

    def _first_free_edge(self, k: int) -> int:
        for v in self.tree.level(k):
            if v not in self.points and self.tree.parent(v) not in self.points:
                return v
        raise AssertionError("no base-valued edge at level %d" % k)

    def __repr__(self) -> str:
        return (f"TreeFunction(size={self.tree.size}, height={self.tree.height}, "
                f"overrides={len(self.points)}, source={self.source!r})")


class Weight(TreeFunction):
    """Strictly positive real function on the vertices."""

    def __init__(self, tree, levels, points=None, source="tabulated", expr=None):
        super().__init__(tree, levels, points, source, expr)
        bad = [k for k in range(tree.height + 1)
               if self.base_present(k) and not _positive(self.levels[k])]
        if bad:
            raise FunctionError(f"weight must be positive; level {bad[0]} has value "
                                f"{self.levels[bad[0]]}")
        for v, x in self.points.items():
            if not _positive(x):
                raise FunctionError(f"weight must be positive; vertex {v} has value {x}")

    @classmethod
    def of(cls, f: TreeFunction, source: Optional[str] = None) -> "Weight":
        return cls(f.tree, f.levels, f.points, source or f.source, f.expr)


def _positive(x: complex) -> bool:
    return x.imag == 0 and x.real > 0 and math.isfinite(x.real)


def _tail_note(f: TreeFunction, series: np.ndarray,
               settings: TailSettings = TailSettings()) -> Optional[TailClass]:
    if f.expr is None or len(series) < settings.window:
        return None
    return classify_tail(series, window=settings.window, tol=settings.tol,
                         burn_in=settings.burn_in)


def sup_norm(f: TreeFunction) -> NormValue:
    value, arg = f.sup_abs()
    return NormValue(value, True, _tail_note(f, f.level_sup_abs()), arg)


def weighted_norm(f: TreeFunction, mu: Weight) -> NormValue:
    if f.tree is not mu.tree:
        raise FunctionError("function and weight live on different truncations")
    g = mu * f
    value, arg = g.sup_abs()
    return NormValue(value, True, _tail_note(f, g.level_sup_abs()), arg)


def D(f: TreeFunction, v: VertexLike) -> float:
    vid = f.tree._check(v)
    if vid == 0:
        raise FunctionError("D is undefined at the root")
    return abs(f(vid) - f(f.tree.parent(vid)))


def lipschitz_norm(f: TreeFunction) -> NormValue:
    d, arg = f.sup_D()
    return NormValue(abs(f(0)) + d, True, None, arg)


def point_eval_bound(f: TreeFunction, mu: Weight, v: VertexLike, atol: float = 1e-9) -> bool:
    """Check ``|f(v)| <= ||f||_mu / mu(v)``."""
    vid = f.tree._check(v)
    return abs(f(vid)) <= weighted_norm(f, mu).value / mu(vid).real + atol


def lipschitz_growth_bound(f: TreeFunction, v: VertexLike, atol: float = 1e-9) -> bool:
    """Check ``|f(v)| <= |f(o)| + |v| sup Df``, and ``|f(v)| <= |v|`` when
    ``||f||_L <= 1`` and ``v`` is not the root."""
    vid = f.tree._check(v)
    depth = f.tree.depth(vid)
    d, _ = f.sup_D()
    ok = abs(f(vid)) <= abs(f(0)) + depth * d + atol
    if vid != 0 and abs(f(0)) + d <= 1.0:
        ok = ok and abs(f(vid)) <= depth + atol
    return ok


def char_fn(tree: Truncation, w: VertexLike) -> TreeFunction:
    wid = tree._check(w)
    return TreeFunction(tree, np.zeros(tree.height + 1), {wid: 1.0})


def depth_fn(tree: Truncation) -> TreeFunction:
    """``f(v) = |v|``."""
    return TreeFunction(tree, np.arange(tree.height + 1), source="radial")


def iterated_log(j: int, x: float) -> float:
    """``l_0 = 1``, ``l_1 = 1 + log x``, ``l_j = 1 + log l_{j-1}(x)`` for ``x >= 1``."""
    if x < 1:
        raise ValueError(f"iterated logarithm needs x >= 1, got {x}")
    if j < 0:
        raise ValueError(f"order must be nonnegative, got {j}")
    val = 1.0
    for i in range(1, j + 1):
        val = 1.0 + math.log(x if i == 1 else val)
    return val


def weight_preset(name: str, params: Optional[dict], tree: Truncation) -> Weight:
    """Named weights: ``constant`` (c), ``geometric`` (ratio), ``reciprocal-depth``,
    ``iterated-log`` (k)."""
    params = dict(params or {})
    n = np.arange(tree.height + 1, dtype=float)
    if name == "constant":
        c = float(params.get("c", 1.0))
        if c <= 0:
            raise FunctionError(f"constant weight needs c > 0, got {c}")
        levels = np.full_like(n, c)
    elif name == "geometric":
        r = float(params.get("ratio", params.get("c", 0.5)))
        if r <= 0:
            raise FunctionError(f"geometric weight needs ratio > 0, got {r}")
        levels = np.array([r ** k for k in range(tree.height + 1)])
    elif name == "reciprocal-depth":
        levels = 1.0 / (1.0 + n)
    elif name == "iterated-log":
        k = int(params.get("k", 1))
        if k <= 0:
            raise FunctionError(f"iterated-log weight needs k >= 1, got {k}")
        levels = np.array([math.prod(iterated_log(j, max(m, 1)) for j in range(k))
                           for m in range(tree.height + 1)])
    else:
        raise FunctionError(f"unknown weight preset {name!r}")
    return Weight(tree, levels, source="preset")


# -- CSV files ---------------------------------------------------------------

def _read_rows(path, header: list) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(row for row in fh if not row.lstrip().startswith("#"))
        rows = list(reader)
    if not rows or [h.strip() for h in rows[0]] != header:
        raise FunctionError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def _check_ids(tree: Truncation, ids: list, path) -> None:
    seen = Counter(ids)
    dup = [v for v, c in seen.items() if c > 1]
    if dup:
        raise FunctionError(f"{path}: vertex {dup[0]} listed more than once")
    missing = set(range(tree.size)) - seen.keys()
    if missing:
        raise FunctionError(f"{path}: missing vertex {min(missing)}")
    extra = [v for v in seen if not 0 <= v < tree.size]
    if extra:
        raise FunctionError(f"{path}: vertex {extra[0]} not in the truncation")


def read_function_csv(tree: Truncation, path) -> TreeFunction:
    rows = _read_rows(path, ["id", "re", "im"])
    ids = [int(r[0]) for r in rows]
    _check_ids(tree, ids, path)
    vals = np.zeros(tree.size, dtype=complex)
    for v, r in zip(ids, rows):
        vals[v] = complex(float(r[1]), float(r[2]))
    return TreeFunction.from_array(tree, vals)


def write_function_csv(f: TreeFunction, path) -> None:
    vals = f.values()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "re", "im"])
        for v, x in enumerate(vals):
            w.writerow([v, repr(float(x.real)), repr(float(x.imag))])


def read_weight_csv(tree: Truncation, path) -> Weight:
    rows = _read_rows(path, ["id", "value"])
    ids = [int(r[0]) for r in rows]
    _check_ids(tree, ids, path)
    vals = np.zeros(tree.size)
    for v, r in zip(ids, rows):
        vals[v] = float(r[1])
    return Weight.of(TreeFunction.from_array(tree, vals))


def write_weight_csv(mu: Weight, path) -> None:
    vals = mu.values().real
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "value"])
        for v, x in enumerate(vals):
            w.writerow([v, repr(float(x))])
