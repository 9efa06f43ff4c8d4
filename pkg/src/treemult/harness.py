"""Proof-witness families and theorem verification suites."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .analysis import (
    Config,
    ConfigError,
    MultOperator,
    Verdict,
    _observe,
    apply,
    is_bounded,
    is_compact_L_to_Lmu,
    is_compact_Lmu,
    is_compact_Lmu_to_L,
    isometry_cross_verdict,
    norm_Lmu_to_Lmu,
    norm_bounds_L_to_Lmu,
    norm_bounds_Lmu_to_L,
    spectrum,
    _antiphase_witness,
)
from .functions import (
    FunctionError,
    TreeFunction,
    Weight,
    char_fn,
    lipschitz_norm,
    weighted_norm,
)
from .oracle import check_certificate, codomain_norm, oracle_norm
from .tail import TailClass, TailKind, TailSettings
from .tree import Truncation

__all__ = [
    "WitnessKind",
    "WitnessFamily",
    "TrendReport",
    "FAMILY_FOR_CONFIG",
    "default_anchors",
    "make_witness",
    "compactness_trend",
    "isometry_candidate",
    "no_isometry_demo",
    "theorem_suite",
    "suite_csv",
]

WitnessKind = str
KINDS = ("scaled-char", "ramp", "tail-reciprocal")
FAMILY_FOR_CONFIG = {Config.LMU_LMU: "scaled-char", Config.L_LMU: "ramp",
                     Config.LMU_L: "tail-reciprocal"}


@dataclass(frozen=True)
class WitnessFamily:
    kind: str
    anchors: tuple
    depths: tuple
    members: tuple

    @property
    def domain(self) -> str:
        return "L" if self.kind == "ramp" else "Lmu"

    def domain_norms(self, mu: Weight) -> list:
        if self.kind == "ramp":
            return [lipschitz_norm(f).value for f in self.members]
        return [weighted_norm(f, mu).value for f in self.members]


def default_anchors(t: Truncation, lo: int = 2, hi: Optional[int] = None) -> list:
    """One vertex per level, the smallest BFS id, depths ``lo..hi``."""
    hi = t.height if hi is None else min(hi, t.height)
    return [t.level(k).start for k in range(lo, hi + 1)]


def _ramp_levels(height: int, m: int) -> np.ndarray:
    k = np.arange(height + 1, dtype=float)
    out = np.where(k < m / 2, 0.0, 2 * k - m)
    return np.where(k >= m, float(m), out)


def make_witness(kind: str, t: Truncation, mu: Weight, anchors: Sequence[int]) -> WitnessFamily:
    """Realize ``f_n`` for each anchor ``v_n``.

    * scaled-char: ``chi_{v_n} / mu(v_n)``
    * ramp: ``0`` for ``|v| < |v_n|/2``, ``2|v| - |v_n|`` up to ``|v_n|``,
      then ``|v_n|`` (real-valued threshold, no rounding)
    * tail-reciprocal: ``1/mu`` on ``|v| >= |v_n|``, zero above
    """
    if kind not in KINDS:
        raise ValueError(f"unknown witness kind {kind!r}; expected one of {', '.join(KINDS)}")
    anchors = [int(v) for v in anchors]
    for v in anchors:
        if v not in t:
            raise FunctionError(f"anchor {v} lies outside the truncation")
    depths = [t.depth(v) for v in anchors]
    if any(b <= a for a, b in zip(depths, depths[1:])):
        raise FunctionError("anchors must be strictly increasing in depth")
    members = []
    zeros = np.zeros(t.height + 1)
    for v, m in zip(anchors, depths):
        if kind == "scaled-char":
            members.append(TreeFunction(t, zeros, {v: 1.0 / mu(v).real}))
        elif kind == "ramp":
            members.append(TreeFunction.radial(t, _ramp_levels(t.height, m)))
        else:
            members.append((1.0 / mu).restrict_depth(m))
    return WitnessFamily(kind, tuple(anchors), tuple(depths), tuple(members))


@dataclass(frozen=True)
class TrendReport:
    kind: str
    depths: tuple
    domain_norms: tuple
    values: tuple
    tail: TailClass
    floor: float
    verdict: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "depths": list(self.depths),
                "domain_norms": list(self.domain_norms), "values": list(self.values),
                "tail": self.tail.to_dict(), "floor": self.floor, "verdict": self.verdict}


def compactness_trend(op: MultOperator, family: WitnessFamily) -> TrendReport:
    """``a_n = ||M_psi f_n||`` in the codomain, classified with the tail machinery.

    Verdicts: ``consistent-with-compact`` (tends to zero),
    ``consistent-with-noncompact`` (window floor above ``tol``),
    ``diverges`` (unbounded) or ``inconclusive``.
    """
    if FAMILY_FOR_CONFIG[op.config] != family.kind:
        raise ConfigError(f"witness kind {family.kind} does not match configuration "
                          f"{op.config.value} (expected {FAMILY_FOR_CONFIG[op.config]})")
    a = [codomain_norm(op.config, apply(op, f), op.weight) for f in family.members]
    tail = _observe(np.array(a), op.settings)
    window = np.abs(np.asarray(tail.evidence, dtype=complex)) if tail.evidence else np.array(a)
    floor = float(window.min()) if len(window) else float("nan")
    tol = op.settings.tol
    if tail.kind is TailKind.TENDS_TO_ZERO:
        verdict = "consistent-with-compact"
    elif tail.kind is TailKind.UNBOUNDED:
        verdict = "diverges"
    elif len(window) and floor > tol:
        verdict = "consistent-with-noncompact"
    else:
        verdict = "inconclusive"
    return TrendReport(family.kind, family.depths, tuple(family.domain_norms(op.weight)),
                       tuple(float(x) for x in a), tail, floor, verdict)


def isometry_candidate(config: Union[str, Config], mu: Weight) -> TreeFunction:
    """The symbol forced by the characteristic-function equalities.

    L->Lmu: ``mu|psi| = 1`` on ``T*`` and ``mu(o)|psi(o)| = ||chi_o||_L = 2``.
    Lmu->L: ``|psi| = mu`` on ``T*`` and ``|psi(o)| = mu(o)/2``.
    """
    config = Config.parse(config)
    t = mu.tree
    if config is Config.L_LMU:
        psi = 1.0 / mu
        return psi.combine(char_fn(t, 0), lambda a, b: a * (1 + b))
    if config is Config.LMU_L:
        return mu.combine(char_fn(t, 0), lambda a, b: a * (1 - b / 2))
    raise ConfigError("no-isometry demos cover L->Lmu and Lmu->L only")


def no_isometry_demo(config: Union[str, Config], psi: TreeFunction, mu: Weight,
                     t: Optional[Truncation] = None) -> dict:
    """Walk the witness chain and report every equality with the first failure.

    For Lmu->L the chain is ``chi_o``, ``chi_v`` on ``T*``, ``f = 1/mu``, then
    an anti-phase pair on the root and its first child.  For L->Lmu it is
    ``chi_v`` on ``T*``, then the level series ``mu(v)|v||psi(v)|``.
    """
    config = Config.parse(config)
    op = MultOperator(psi, mu, config)
    t = op.tree
    steps = []
    if config is Config.L_LMU:
        for v in range(1, t.size) if t.materializable else ():
            lhs = weighted_norm(apply(op, char_fn(t, v)), mu).value
            steps.append({"step": "chi_v", "vertex": v, "lhs": lhs, "rhs": 1.0})
            if abs(lhs - 1.0) > op.settings.tol:
                break
        levels = list(range(1, t.height + 1))
        series = (mu * abs(psi)).level_sup_abs()[1:] * np.array(levels, dtype=float)
        steps.append({"step": "eta-levels", "levels": levels,
                      "values": [float(x) for x in series]})
    elif config is Config.LMU_L:
        lhs = mu(0).real
        rhs = lipschitz_norm(apply(op, char_fn(t, 0))).value
        steps.append({"step": "chi_o", "vertex": 0, "lhs": lhs, "rhs": rhs})
        for v in range(1, t.size) if t.materializable else ():
            lhs = mu(v).real
            rhs = lipschitz_norm(apply(op, char_fn(t, v))).value
            steps.append({"step": "chi_v", "vertex": v, "lhs": lhs, "rhs": rhs})
            if abs(lhs - rhs) > op.settings.tol:
                break
        f = 1.0 / mu
        steps.append({"step": "reciprocal-weight", "lhs": weighted_norm(f, mu).value,
                      "rhs": lipschitz_norm(apply(op, f)).value})
        if t.height >= 1:
            g, value = _antiphase_witness(op)
            steps.append({"step": "anti-phase", "vertex": 1,
                          "lhs": weighted_norm(g, mu).value, "rhs": value})
    else:
        raise ConfigError("no-isometry demos cover L->Lmu and Lmu->L only")

    tol = op.settings.tol
    for s in steps:
        if "lhs" in s:
            s["holds"] = bool(abs(s["lhs"] - s["rhs"]) <= tol)
    first = next((s for s in steps if s.get("holds") is False), None)
    out = {"config": config.value, "steps": steps,
           "first_failure": first, "verdict": isometry_cross_verdict(op).to_dict()}
    if config is Config.L_LMU:
        out["divergence"] = steps[-1]
    return out


# -- theorem suite ------------------------------------------------------------------

def _label(sym) -> str:
    return sym if isinstance(sym, str) else (sym.source or "tabulated")


def _random_symbols(t: Truncation, count: int, seed: int) -> list:
    out = []
    for i in range(count):
        rng = np.random.default_rng([seed, 1_000_003, i])
        z = rng.uniform(0.0, 10.0, t.size) * np.exp(1j * rng.uniform(0, 2 * np.pi, t.size))
        f = TreeFunction.from_array(t, z)
        f.source = f"random[{i}]"
        out.append(f)
    return out


def _suite_row(t: Truncation, mu: Weight, psi: TreeFunction, label: str,
               config: Config, settings: TailSettings) -> dict:
    op = MultOperator(psi, mu, config, settings=settings)
    checks = {}
    row = {"config": config.value, "symbol": label}
    zero = psi.sup_abs()[0] == 0
    if config is Config.LMU_LMU:
        nv = norm_Lmu_to_Lmu(op)
        lo = hi = nv.value
        quantity = nv.value
        compact = is_compact_Lmu(op)
        spec = spectrum(op)
        eig = []
        for z, _, w in spec.points:
            chi = char_fn(t, w)
            eig.append(apply(op, chi).equals(chi * complex(z)))
        checks["eigen_check"] = all(eig)
        row["spectrum_points"] = len(spec.points)
    else:
        iv = norm_bounds_L_to_Lmu(op) if config is Config.L_LMU else norm_bounds_Lmu_to_L(op)
        lo, hi, quantity = iv.lo, iv.hi, iv.quantity.value
        compact = is_compact_L_to_Lmu(op) if config is Config.L_LMU else is_compact_Lmu_to_L(op)
        checks["cross_isometry_no"] = isometry_cross_verdict(op).verdict is Verdict.NO
    oracle = None
    if t.materializable:
        cert = oracle_norm(op)
        oracle = cert.norm_value
        checks["oracle_in_bounds"] = lo - 1e-9 <= oracle <= hi + 1e-9
        in_ball, reproduces = check_certificate(op, cert)
        checks["witness_certificate"] = in_ball and reproduces
    if zero:
        checks["zero_symbol"] = hi == 0 and compact.verdict is Verdict.YES
    bounded = is_bounded(op)
    row.update({
        "verdict": compact.verdict.value,
        "bounded": bounded.verdict.value,
        "quantity": quantity,
        "lo": lo,
        "hi": hi,
        "oracle": oracle,
        "checks": {k: bool(v) for k, v in checks.items()},
        "passed": all(bool(v) for v in checks.values()),
    })
    return row


def theorem_suite(t: Truncation, mu: Weight, symbols: Sequence = (),
                  configs: Sequence = tuple(Config), seed: int = 42,
                  random_symbols: int = 0, settings: TailSettings = TailSettings(),
                  dump_dir=None) -> dict:
    """Run every analysis and oracle invariant over ``symbols x configs``.

    ``symbols`` holds expressions or functions; ``random_symbols`` extra dense
    complex symbols are drawn from ``seed``.  Rows follow input order.
    """
    syms = [TreeFunction.from_expr(t, s) if isinstance(s, str) else s for s in symbols]
    labels = [_label(s) for s in symbols]
    rnd = _random_symbols(t, random_symbols, seed)
    syms += rnd
    labels += [f.source for f in rnd]
    if not syms:
        raise ConfigError("theorem suite needs at least one symbol")
    configs = [Config.parse(c) for c in configs]
    rows = []
    dumps = []
    for psi, label in zip(syms, labels):
        for config in configs:
            row = _suite_row(t, mu, psi, label, config, settings)
            if not row["passed"] and dump_dir is not None and t.materializable:
                dumps.append(str(_dump_row(Path(dump_dir), t, mu, psi, row, len(rows))))
            rows.append(row)
    return {
        "suite": "theorem_suite",
        "seed": seed,
        "tree": {"kind": t.spec.kind, "depth": t.depth_cap, "size": t.size},
        "passed": all(r["passed"] for r in rows),
        "failures": [i for i, r in enumerate(rows) if not r["passed"]],
        "fixture_dumps": dumps,
        "rows": rows,
    }


def _dump_row(d: Path, t: Truncation, mu: Weight, psi: TreeFunction, row: dict,
              index: int) -> Path:
    d.mkdir(parents=True, exist_ok=True)
    path = d / f"theorem_row{index}.json"
    doc = {
        "tree": {"root": 0, "edges": [[p, c] for p, c in t.edges()], "depth_cap": t.depth_cap},
        "mu": [float(x) for x in mu.values().real],
        "psi": [[float(z.real), float(z.imag)] for z in psi.values()],
        "configs": [row["config"]],
        "expected": {k: True for k in row["checks"]},
        "observed": row,
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def suite_csv(report: dict) -> str:
    """Per-row summary ``config,symbol,verdict,quantity,lo,hi,oracle``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["config", "symbol", "verdict", "quantity", "lo", "hi", "oracle"])
    for r in report["rows"]:
        w.writerow([r["config"], r["symbol"], r["verdict"], repr(r["quantity"]),
                    repr(r["lo"]), repr(r["hi"]), "" if r["oracle"] is None else repr(r["oracle"])])
    return buf.getvalue()
