"""Boundedness, norm, compactness, spectrum and isometry criteria for
multiplication operators ``M_psi f = psi f`` in three configurations:

* ``Lmu->Lmu``: on the weighted sup-norm space;
* ``L->Lmu``:   from the Lipschitz space into the weighted space;
* ``Lmu->L``:   from the weighted space into the Lipschitz space.

Every criterion quantified over the infinite tree is answered on the
truncation plus a tail classification, so verdicts are tri-state and carry
their evidence.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .functions import (
    FunctionError,
    NormValue,
    TreeFunction,
    Weight,
    char_fn,
    depth_fn,
    lipschitz_norm,
    sup_norm,
    weighted_norm,
)
from .tail import TailClass, TailKind, TailSettings, classify_tail
from .tree import Truncation

__all__ = [
    "Config",
    "Verdict",
    "VerdictResult",
    "NormInterval",
    "SpectrumApprox",
    "CrossIsometry",
    "AnalysisReport",
    "MultOperator",
    "ConfigError",
    "apply",
    "governing_function",
    "sup_tail",
    "is_bounded",
    "norm_Lmu_to_Lmu",
    "is_compact_Lmu",
    "spectrum",
    "bounded_below",
    "is_isometry_Lmu",
    "eta",
    "norm_bounds_L_to_Lmu",
    "is_compact_L_to_Lmu",
    "varpi",
    "norm_bounds_Lmu_to_L",
    "is_compact_Lmu_to_L",
    "isometry_cross_verdict",
    "first_vertex",
    "analyze",
]


class Config(str, enum.Enum):
    LMU_LMU = "Lmu->Lmu"
    L_LMU = "L->Lmu"
    LMU_L = "Lmu->L"

    @classmethod
    def parse(cls, text: Union[str, "Config"]) -> "Config":
        if isinstance(text, Config):
            return text
        key = text.strip().replace(" ", "").replace("→", "->").lower()
        aliases = {
            "lmu->lmu": cls.LMU_LMU, "lmu": cls.LMU_LMU,
            "l->lmu": cls.L_LMU, "lip->lmu": cls.L_LMU,
            "lmu->l": cls.LMU_L, "lmu->lip": cls.LMU_L,
        }
        if key not in aliases:
            raise ConfigError(f"unknown operator configuration {text!r}")
        return aliases[key]

    @property
    def domain(self) -> str:
        return "L" if self is Config.L_LMU else "Lmu"

    @property
    def codomain(self) -> str:
        return "L" if self is Config.LMU_L else "Lmu"


class ConfigError(ValueError):
    """Operation called on an operator of the wrong configuration."""


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VerdictResult:
    verdict: Verdict
    basis: str
    source: str = "observed"
    quantity: Optional[float] = None
    witness: Optional[int] = None
    tail: Optional[TailClass] = None

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "basis": self.basis, "source": self.source}
        if self.quantity is not None:
            out["quantity"] = self.quantity
        if self.witness is not None:
            out["witness"] = self.witness
        if self.tail is not None:
            out["tail"] = self.tail.to_dict()
        return out


@dataclass(frozen=True)
class NormInterval:
    lo: float
    hi: float
    bounded: VerdictResult
    quantity: NormValue

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"bad norm interval [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains(self, x: float, atol: float = 1e-9) -> bool:
        return self.lo - atol <= x <= self.hi + atol

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class SpectrumApprox:
    points: tuple            # (value, count, first vertex id), first-seen order
    accumulation_candidates: tuple
    resolution: float
    closure_complete: bool
    tail: Optional[TailClass] = None

    @property
    def point_spectrum(self) -> list:
        return [p[0] for p in self.points]

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "closure_complete": self.closure_complete,
            "points": [{"re": z.real, "im": z.imag, "count": c, "vertex": v}
                       for z, c, v in self.points],
            "accumulation_candidates": [{"re": z.real, "im": z.imag}
                                        for z in self.accumulation_candidates],
            "tail": None if self.tail is None else self.tail.to_dict(),
        }


@dataclass(frozen=True)
class CrossIsometry:
    verdict: Verdict
    reason: str
    witness: Optional[int]
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "reason": self.reason,
                "witness": self.witness, "data": self.data}


@dataclass(frozen=True)
class MultOperator:
    symbol: TreeFunction
    weight: Weight
    config: Config = Config.LMU_LMU
    declared_tail: Optional[TailClass] = None
    settings: TailSettings = TailSettings()

    def __post_init__(self):
        if self.symbol.tree is not self.weight.tree:
            raise FunctionError("symbol and weight live on different truncations")
        object.__setattr__(self, "config", Config.parse(self.config))
        if not isinstance(self.weight, Weight):
            object.__setattr__(self, "weight", Weight.of(self.weight))

    @property
    def tree(self) -> Truncation:
        return self.symbol.tree


def _require(op: MultOperator, *configs: Config) -> None:
    if op.config not in configs:
        names = ", ".join(c.value for c in configs)
        raise ConfigError(f"operation needs configuration {names}, got {op.config.value}")


def apply(op: MultOperator, f: TreeFunction) -> TreeFunction:
    if f.tree is not op.tree:
        raise FunctionError("function lives on a different truncation than the operator")
    return op.symbol * f


# -- tails -------------------------------------------------------------------

def _observe(series, settings: TailSettings) -> TailClass:
    """Classify with the window shrunk to the levels available (at least 3)."""
    series = np.asarray(series)
    if len(series) < 3:
        return TailClass(TailKind.INCONCLUSIVE)
    return classify_tail(series, window=min(settings.window, len(series)),
                         tol=settings.tol, burn_in=settings.burn_in)


def governing_function(op: MultOperator) -> TreeFunction:
    """The nonnegative function whose supremum and tail decide the criteria:
    ``|psi|``, ``mu |v| |psi|`` or ``|psi| / mu`` by configuration."""
    if op.config is Config.LMU_LMU:
        return abs(op.symbol)
    if op.config is Config.L_LMU:
        return op.weight * abs(op.symbol) * depth_fn(op.tree)
    return abs(op.symbol) / op.weight


def sup_tail(op: MultOperator) -> TailClass:
    """Tail of the level-sup series of the governing function."""
    if op.declared_tail is not None:
        return op.declared_tail.modulus()
    return _observe(governing_function(op).level_sup_abs(), op.settings)


def _window_floor(tail: TailClass, tol: float) -> bool:
    """Window nondecreasing (up to tol) and bounded away from zero."""
    m = np.abs(np.asarray(tail.evidence, dtype=complex))
    return len(m) >= 3 and bool(np.all(np.diff(m) >= -tol)) and m.min() > tol


def is_bounded(op: MultOperator) -> VerdictResult:
    tail = sup_tail(op)
    name = {Config.LMU_LMU: "sup|psi|", Config.L_LMU: "eta",
            Config.LMU_L: "varpi"}[op.config]
    q, _ = governing_function(op).sup_abs()
    if tail.kind in (TailKind.TENDS_TO_ZERO, TailKind.TENDS_TO_LIMIT, TailKind.BOUNDED):
        return VerdictResult(Verdict.YES, f"{name} finite: level-sup tail {tail}",
                             tail.source, q, tail=tail)
    if tail.kind is TailKind.UNBOUNDED:
        return VerdictResult(Verdict.NO, f"{name} infinite: level-sup tail unbounded",
                             tail.source, q, tail=tail)
    return VerdictResult(Verdict.INCONCLUSIVE,
                         f"{name} finite on the truncation but tail {tail}",
                         tail.source, q, tail=tail)


def _compact_from_tail(op: MultOperator, what: str, tail: Optional[TailClass]) -> VerdictResult:
    bounded = is_bounded(op)
    tail = tail if tail is not None else sup_tail(op)
    tol = op.settings.tol
    if bounded.verdict is Verdict.NO:
        return VerdictResult(Verdict.NO, "operator is unbounded, hence not compact",
                             bounded.source, bounded.quantity, tail=tail)
    if tail.kind is TailKind.TENDS_TO_ZERO:
        return VerdictResult(Verdict.YES, f"{what} tends to zero", tail.source, tail=tail)
    if tail.kind is TailKind.TENDS_TO_LIMIT and abs(tail.limit) > tol:
        return VerdictResult(Verdict.NO, f"{what} tends to {abs(tail.limit):g} != 0",
                             tail.source, tail=tail)
    if not tail.declared and _window_floor(tail, tol):
        return VerdictResult(Verdict.NO, f"{what} stays bounded away from zero",
                             tail.source, tail=tail)
    return VerdictResult(Verdict.INCONCLUSIVE, f"{what}: tail {tail}", tail.source, tail=tail)


# -- L_mu -> L_mu --------------------------------------------------------------

def norm_Lmu_to_Lmu(op: MultOperator) -> NormValue:
    """``||M_psi|| = ||psi||_inf``, evaluated on the truncation."""
    _require(op, Config.LMU_LMU)
    nv = sup_norm(op.symbol)
    return NormValue(nv.value, True, sup_tail(op), nv.witness)


def is_compact_Lmu(op: MultOperator, tail: Optional[TailClass] = None) -> VerdictResult:
    _require(op, Config.LMU_LMU)
    return _compact_from_tail(op, "|psi(v)|", tail)


def _complex_tail(op: MultOperator) -> Optional[TailClass]:
    """Tail of psi itself when its tail window is radial (or declared)."""
    if op.declared_tail is not None:
        return op.declared_tail
    sym = op.symbol
    n = op.tree.height + 1
    if n < 3:
        return None
    w = min(op.settings.window, n)
    start = max(n - w, min(op.settings.burn_in, n - 3))
    if sym.max_override_depth() >= start:
        return None
    return _observe(sym.levels, op.settings)


def spectrum(op: MultOperator, delta: float = 1e-9) -> SpectrumApprox:
    """Point spectrum ``psi(T_N)`` clustered at resolution ``delta`` plus
    accumulation candidates read off the tail of ``psi``."""
    _require(op, Config.LMU_LMU)
    if not delta > 0:
        raise ValueError(f"resolution must be positive, got {delta}")
    sym, t = op.symbol, op.tree
    items = []
    for k in range(t.height + 1):
        if sym.base_present(k):
            count = t.level_sizes[k] - sym._level_override_counts.get(k, 0)
            items.append((sym.first_base_id(k), complex(sym.levels[k]), count))
    items += [(v, x, 1) for v, x in sym.points.items()]
    items.sort(key=lambda it: it[0])

    reps: list = []
    for vid, z, count in items:
        for r in reps:
            if abs(r[0] - z) <= delta:
                r[1] += count
                break
        else:
            reps.append([z, count, vid])
    points = tuple((z, c, v) for z, c, v in reps)

    if t.complete:
        return SpectrumApprox(points, (), delta, True, None)
    tail = _complex_tail(op)
    cands: tuple = ()
    if tail is not None:
        if tail.kind is TailKind.TENDS_TO_ZERO:
            cands = (0j,)
        elif tail.kind is TailKind.TENDS_TO_LIMIT:
            cands = (complex(tail.limit),)
    return SpectrumApprox(points, cands, delta, bool(cands), tail)


def _argmin_abs(f: TreeFunction) -> tuple:
    inf = f.level_inf_abs()
    k = int(np.argmin(inf))
    m = inf[k]
    cands = [v for v, x in f.points.items() if f._point_depths[v] == k and abs(x) == m]
    b = f.first_base_id(k)
    if b is not None and abs(f.levels[k]) == m:
        cands.append(b)
    return float(m), min(cands)


def bounded_below(op: MultOperator) -> VerdictResult:
    """Bounded below iff ``inf |psi| > 0``."""
    _require(op, Config.LMU_LMU)
    tol = op.settings.tol
    if is_bounded(op).verdict is Verdict.NO:
        return VerdictResult(Verdict.INCONCLUSIVE, "operator is unbounded; not applicable")
    m, arg = _argmin_abs(op.symbol)
    if m == 0.0:
        return VerdictResult(Verdict.NO, "psi vanishes at a vertex, so 0 is an eigenvalue",
                             "truncation", 0.0, arg)
    if op.declared_tail is not None:
        tail = op.declared_tail.modulus()
    else:
        tail = _observe(op.symbol.level_inf_abs(), op.settings)
    if tail.kind is TailKind.TENDS_TO_ZERO:
        return VerdictResult(Verdict.NO, "inf |psi| = 0 in the limit", tail.source, 0.0,
                             tail=tail)
    if tail.kind is TailKind.TENDS_TO_LIMIT and abs(tail.limit) > tol:
        return VerdictResult(Verdict.YES, f"|psi| tends to {abs(tail.limit):g} > 0",
                             tail.source, min(m, abs(tail.limit)), arg, tail)
    if not tail.declared and _window_floor(tail, tol):
        return VerdictResult(Verdict.YES, "level-inf of |psi| bounded away from zero",
                             tail.source, m, arg, tail)
    return VerdictResult(Verdict.INCONCLUSIVE, f"inf |psi| tail {tail}", tail.source, m,
                         arg, tail)


def is_isometry_Lmu(op: MultOperator, tol: Optional[float] = None) -> VerdictResult:
    """Isometry iff ``|psi| = 1`` everywhere; witness is the worst vertex."""
    _require(op, Config.LMU_LMU)
    tol = op.settings.tol if tol is None else tol
    dev = abs(abs(op.symbol) - 1.0)
    worst, arg = dev.sup_abs()
    if worst > tol:
        return VerdictResult(Verdict.NO, f"| |psi(v)| - 1 | = {worst:g} at vertex {arg}",
                             "truncation", worst, arg)
    if op.declared_tail is not None:
        tail = op.declared_tail
        if tail.kind is TailKind.TENDS_TO_LIMIT and abs(abs(tail.limit) - 1) <= tol:
            return VerdictResult(Verdict.YES, "modulus 1 on the truncation, declared tail "
                                 "of modulus 1", "declared", worst, tail=tail)
        if tail.kind is TailKind.TENDS_TO_ZERO:
            return VerdictResult(Verdict.NO, "declared tail tends to zero", "declared",
                                 worst, tail=tail)
        return VerdictResult(Verdict.INCONCLUSIVE, f"declared tail {tail}", "declared",
                             worst, tail=tail)
    tail = _observe(dev.level_sup_abs(), op.settings)
    if tail.kind is TailKind.TENDS_TO_ZERO:
        return VerdictResult(Verdict.YES, "psi has modulus 1 on the truncation and tail",
                             "observed", worst, tail=tail)
    return VerdictResult(Verdict.INCONCLUSIVE, f"modulus deviation tail {tail}",
                         "observed", worst, tail=tail)


# -- L -> L_mu ------------------------------------------------------------------

def eta(op: MultOperator) -> NormValue:
    """``sup mu(v) |v| |psi(v)|`` over the truncation."""
    _require(op, Config.L_LMU)
    value, arg = governing_function(op).sup_abs()
    return NormValue(value, True, sup_tail(op), arg)


def norm_bounds_L_to_Lmu(op: MultOperator) -> NormInterval:
    """``max(mu(o)|psi(o)|/2, eta) <= ||M_psi|| <= max(mu(o)|psi(o)|, eta)``."""
    _require(op, Config.L_LMU)
    e = eta(op)
    root = op.weight(0).real * abs(op.symbol(0))
    return NormInterval(max(0.5 * root, e.value), max(root, e.value), is_bounded(op), e)


def is_compact_L_to_Lmu(op: MultOperator, tail: Optional[TailClass] = None) -> VerdictResult:
    _require(op, Config.L_LMU)
    return _compact_from_tail(op, "mu(v)|v||psi(v)|", tail)


# -- L_mu -> L ------------------------------------------------------------------

def varpi(op: MultOperator) -> NormValue:
    """``sup |psi(v)| / mu(v)`` over the truncation."""
    _require(op, Config.LMU_L)
    value, arg = governing_function(op).sup_abs()
    return NormValue(value, True, sup_tail(op), arg)


def norm_bounds_Lmu_to_L(op: MultOperator) -> NormInterval:
    """``varpi <= ||M_psi|| <= 3 varpi``."""
    _require(op, Config.LMU_L)
    w = varpi(op)
    return NormInterval(w.value, 3.0 * w.value, is_bounded(op), w)


def is_compact_Lmu_to_L(op: MultOperator, tail: Optional[TailClass] = None) -> VerdictResult:
    _require(op, Config.LMU_L)
    return _compact_from_tail(op, "|psi(v)|/mu(v)", tail)


# -- no isometries between L and L_mu -------------------------------------------

def first_vertex(f: TreeFunction, pred: Callable, min_depth: int = 0) -> Optional[int]:
    """Smallest BFS id ``v`` with ``|v| >= min_depth`` and ``pred(f(v))``."""
    by_level: dict = {}
    for v, x in f.points.items():
        by_level.setdefault(f._point_depths[v], []).append((v, x))
    for k in range(min_depth, f.tree.height + 1):
        hits = [v for v, x in by_level.get(k, ()) if pred(x)]
        b = f.first_base_id(k)
        if b is not None and pred(complex(f.levels[k])):
            hits.append(b)
        if hits:
            return min(hits)
    return None


def isometry_cross_verdict(op: MultOperator) -> CrossIsometry:
    """Always "no", with a concrete counterexample on the truncation."""
    _require(op, Config.L_LMU, Config.LMU_L)
    tol = op.settings.tol
    t = op.tree
    if t.height == 0:
        return CrossIsometry(Verdict.NO, "truncation has no non-root vertex to test", None)

    if op.config is Config.L_LMU:
        # ||M chi_v||_mu = mu(v)|psi(v)| must equal ||chi_v||_L = 1 on T*
        g = op.weight * abs(op.symbol)
        v = first_vertex(g, lambda x: abs(x - 1.0) > tol, 1)
        if v is not None:
            return CrossIsometry(Verdict.NO, "norm-of-characteristic", v,
                                 {"vertex": v, "lhs_Mchi_mu": g(v).real, "rhs_chi_L": 1.0})
        series = governing_function(op).level_sup_abs()[1:]
        last = t.level(t.height).start
        return CrossIsometry(Verdict.NO, "eta-divergence", last, {
            "levels": list(range(1, t.height + 1)),
            "mu_depth_psi": [float(x) for x in series],
            "eta_truncation": float(series.max()),
        })

    # Lmu -> L
    chi_o = lipschitz_norm(apply(op, char_fn(t, 0))).value
    mu_o = op.weight(0).real
    if abs(chi_o - mu_o) > tol:
        return CrossIsometry(Verdict.NO, "root-characteristic", 0,
                             {"lhs_chi_mu": mu_o, "rhs_Mchi_L": chi_o})
    diff = abs(op.symbol) - op.weight
    v = first_vertex(diff, lambda x: abs(x) > tol, 1)
    if v is not None:
        return CrossIsometry(Verdict.NO, "norm-of-characteristic", v, {
            "vertex": v, "lhs_chi_mu": op.weight(v).real,
            "rhs_Mchi_L": lipschitz_norm(apply(op, char_fn(t, v))).value})
    recip = lipschitz_norm(op.symbol / op.weight).value
    if abs(recip - 1.0) > tol:
        return CrossIsometry(Verdict.NO, "reciprocal-weight", None,
                             {"f": "1/mu", "lhs_f_mu": 1.0, "rhs_Mf_L": recip})
    f, value = _antiphase_witness(op)
    return CrossIsometry(Verdict.NO, "anti-phase", 1, {
        "f": "chi_o e^{i theta}/mu(o) + chi_v/mu(v)", "vertex": 1,
        "lhs_f_mu": weighted_norm(f, op.weight).value, "rhs_Mf_L": value,
        "reciprocal_weight_value": recip})


def _antiphase_witness(op: MultOperator) -> tuple:
    """Unit-norm f on {o, v} (v the first child) with psi f of opposite phases."""
    t = op.tree
    v = 1
    theta = cmath.phase(op.symbol(v) or 1) - cmath.phase(op.symbol(0) or 1) + math.pi
    f = TreeFunction(t, np.zeros(t.height + 1), {
        0: cmath.rect(1.0 / op.weight(0).real, theta),
        v: 1.0 / op.weight(v).real,
    })
    return f, lipschitz_norm(apply(op, f)).value


# -- report --------------------------------------------------------------------

@dataclass
class AnalysisReport:
    config: Config
    bounded: VerdictResult
    norm: Union[NormValue, NormInterval]
    compact: VerdictResult
    isometry: Union[VerdictResult, CrossIsometry]
    bounded_below: Optional[VerdictResult] = None
    spectrum: Optional[SpectrumApprox] = None
    quantity: Optional[NormValue] = None

    def to_dict(self) -> dict:
        out = {
            "config": self.config.value,
            "bounded": self.bounded.to_dict(),
            "compact": self.compact.to_dict(),
            "isometry": self.isometry.to_dict(),
            "bounded_below": None if self.bounded_below is None else self.bounded_below.to_dict(),
            "spectrum": None if self.spectrum is None else self.spectrum.to_dict(),
        }
        if isinstance(self.norm, NormInterval):
            out["norm"] = {"interval": self.norm.to_dict()}
            key = "eta" if self.config is Config.L_LMU else "varpi"
            out[key] = self.quantity.to_dict()
        else:
            out["norm"] = {"value": self.norm.value, "witness": self.norm.witness}
        return out


def analyze(op: MultOperator, delta: float = 1e-9) -> AnalysisReport:
    bounded = is_bounded(op)
    if op.config is Config.LMU_LMU:
        spec = spectrum(op, delta) if bounded.verdict is not Verdict.NO else None
        return AnalysisReport(op.config, bounded, norm_Lmu_to_Lmu(op), is_compact_Lmu(op),
                              is_isometry_Lmu(op), bounded_below(op), spec)
    if op.config is Config.L_LMU:
        iv = norm_bounds_L_to_Lmu(op)
        return AnalysisReport(op.config, bounded, iv, is_compact_L_to_Lmu(op),
                              isometry_cross_verdict(op), quantity=iv.quantity)
    iv = norm_bounds_Lmu_to_L(op)
    return AnalysisReport(op.config, bounded, iv, is_compact_Lmu_to_L(op),
                          isometry_cross_verdict(op), quantity=iv.quantity)
