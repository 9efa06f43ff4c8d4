"""Command-line front end: ``treemult {analyze,spectrum,verify,witness}``.

Settings come from defaults, then an optional JSON file (``--config``), then
command-line flags.  Every report embeds the resolved settings.  Exit codes:
0 success, 1 verification failure, 2 invalid configuration or input,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional

from .analysis import Config, ConfigError, MultOperator, analyze, spectrum
from .expr import ExprError
from .functions import (
    FunctionError,
    TreeFunction,
    Weight,
    read_function_csv,
    read_weight_csv,
    weight_preset,
)
from .harness import (
    FAMILY_FOR_CONFIG,
    compactness_trend,
    default_anchors,
    make_witness,
    suite_csv,
    theorem_suite,
)
from .oracle import oracle_random_suite
from .tail import TailSettings, declared_tail
from .tree import TreeError, TreeSpec, build

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INTERNAL = 0, 1, 2, 3

COMMON_DEFAULTS = {
    "tree": {"kind": "homogeneous", "q": 2},
    "weight": {"preset": "constant", "params": {}},
    "symbol": None,
    "operator": Config.LMU_LMU.value,
    "tail": None,
    "depth": 50,
    "tol": 1e-6,
    "delta": 1e-9,
    "window": None,
    "burn_in": 5,
    "seed": 42,
    "out": None,
}
COMMAND_DEFAULTS = {
    "analyze": {},
    "spectrum": {},
    "witness": {"kind": None, "anchors": None},
    "verify": {
        "depth": 5,
        "symbols": ["0", "1", "2^-n", "1/(1+n)", "cis(n)"],
        "configs": [c.value for c in Config],
        "random_symbols": 50,
        "trials": 200,
        "max_depth": 5,
        "max_branching": 3,
        "brute_limit": 40,
        "inject_bug": False,
        "csv": None,
        "fixtures": None,
    },
}


class CliError(ValueError):
    """Invalid configuration; maps to exit code 2."""


# -- parsing flags ------------------------------------------------------------------

def _tree_arg(text: str) -> dict:
    kind, _, rest = text.partition(":")
    if kind == "homogeneous":
        return {"kind": "homogeneous", "q": int(rest or 2)}
    if kind == "radial":
        return {"kind": "radial", "profile": [int(x) for x in rest.split(",") if x]}
    if kind == "file":
        return {"kind": "file", "path": rest}
    raise CliError(f"bad --tree {text!r}; use homogeneous:<q>, radial:<a,b,...> or file:<path>")


def _params(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        k, sep, v = item.partition("=")
        if not sep:
            raise CliError(f"bad weight parameter {item!r}; use key=value")
        out[k.strip()] = float(v)
    return out


def _weight_arg(text: str) -> dict:
    head, _, rest = text.partition(":")
    if head == "expr":
        return {"expr": rest}
    if head == "file":
        return {"file": rest}
    return {"preset": head, "params": _params(rest)}


def _symbol_arg(text: str):
    if text.startswith("file:"):
        return {"file": text[5:]}
    return text


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--config", help="JSON settings file (flags override it)")
    g.add_argument("--depth", type=int, help="truncation depth N")
    g.add_argument("--tol", type=float, help="tail tolerance")
    g.add_argument("--seed", type=int, help="random seed")
    g.add_argument("--out", help="output path (default: stdout)")
    g.add_argument("--tree", type=_tree_arg,
                   help="homogeneous:<q>, radial:<a,b,...> or file:<edge list>")
    g.add_argument("--weight", type=_weight_arg,
                   help="preset[:k=v,...] (constant, geometric, reciprocal-depth, "
                        "iterated-log), expr:<expression> or file:<csv>")
    g.add_argument("--symbol", type=_symbol_arg, help="expression in n, or file:<csv>")
    g.add_argument("--operator", help="Lmu->Lmu, L->Lmu or Lmu->L")
    g.add_argument("--tail", help="declared tail: zero, bounded, unbounded or limit:<c>")
    g.add_argument("--delta", type=float, help="spectrum clustering resolution")
    g.add_argument("--window", type=int, help="tail window length")
    g.add_argument("--burn-in", type=int, dest="burn_in", help="levels ignored by the tail test")

    p = argparse.ArgumentParser(prog="treemult", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="write an analysis report (JSON)")
    sub.add_parser("spectrum", parents=[common], help="write spectrum points (CSV)")
    w = sub.add_parser("witness", parents=[common], help="write a witness table (CSV)")
    w.add_argument("--kind", choices=("scaled-char", "ramp", "tail-reciprocal"))
    w.add_argument("--anchors", type=lambda s: [int(x) for x in s.split(",") if x],
                   help="comma-separated anchor vertex ids")
    v = sub.add_parser("verify", parents=[common], help="run the verification suites")
    v.add_argument("--symbols", type=lambda s: [x for x in s.split(";") if x.strip()],
                   help="semicolon-separated symbol expressions")
    v.add_argument("--trials", type=int)
    v.add_argument("--random-symbols", type=int, dest="random_symbols")
    v.add_argument("--brute-limit", type=int, dest="brute_limit")
    v.add_argument("--inject-bug", action="store_true", default=None, dest="inject_bug",
                   help="perturb an oracle norm by 1e-3 (self-test; must fail)")
    v.add_argument("--csv", help="also write the per-row CSV summary here")
    v.add_argument("--fixtures", help="directory for failing-trial fixtures")
    return p


def resolve(args: argparse.Namespace) -> dict:
    """Defaults < JSON file < flags."""
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(COMMAND_DEFAULTS[args.command])
    if args.config:
        try:
            doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise CliError(f"{args.config}: invalid JSON at line {e.lineno} column {e.colno}")
        if not isinstance(doc, dict):
            raise CliError(f"{args.config}: top level must be an object")
        unknown = set(doc) - set(cfg)
        if unknown:
            raise CliError(f"{args.config}: unknown keys {', '.join(sorted(unknown))}")
        cfg.update(doc)
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None:
            cfg[k] = v
    if cfg["window"] is None:
        cfg["window"] = min(20, cfg["depth"])
    _validate(cfg)
    return cfg


def _validate(cfg: dict) -> None:
    if not isinstance(cfg["depth"], int) or cfg["depth"] < 0:
        raise CliError(f"depth must be a nonnegative integer, got {cfg['depth']!r}")
    for k in ("tol", "delta"):
        if not cfg[k] > 0:
            raise CliError(f"{k} must be positive, got {cfg[k]!r}")
    if cfg["window"] < 3:
        raise CliError(f"window must be at least 3, got {cfg['window']}")
    if cfg["window"] > cfg["depth"]:
        raise CliError(f"window {cfg['window']} exceeds depth {cfg['depth']}")
    Config.parse(cfg["operator"])


# -- building objects ---------------------------------------------------------------

def load_tree(cfg: dict):
    spec = cfg["tree"]
    kind = spec.get("kind")
    if kind == "homogeneous":
        ts = TreeSpec.homogeneous(int(spec.get("q", 2)))
    elif kind == "radial":
        ts = TreeSpec.radial(list(spec["profile"]))
    elif kind in ("file", "edge-list"):
        ts = TreeSpec.from_file(spec["path"])
    else:
        raise CliError(f"unknown tree kind {kind!r}")
    return build(ts, cfg["depth"])


def load_weight(cfg: dict, t) -> Weight:
    w = cfg["weight"]
    if "expr" in w:
        return Weight.of(TreeFunction.from_expr(t, w["expr"]), "expression")
    if "file" in w:
        return read_weight_csv(t, w["file"])
    return weight_preset(w.get("preset", "constant"), w.get("params"), t)


def load_symbol(spec, t) -> TreeFunction:
    if spec is None:
        raise CliError("no symbol given (use --symbol)")
    if isinstance(spec, dict):
        if "file" in spec:
            return read_function_csv(t, spec["file"])
        spec = spec["expr"]
    return TreeFunction.from_expr(t, spec)


def _settings(cfg: dict) -> TailSettings:
    return TailSettings(window=cfg["window"], tol=cfg["tol"], burn_in=cfg["burn_in"])


def _operator(cfg: dict, t, mu) -> MultOperator:
    tail = declared_tail(cfg["tail"]) if cfg["tail"] else None
    return MultOperator(load_symbol(cfg["symbol"], t), mu, Config.parse(cfg["operator"]),
                        tail, _settings(cfg))


# -- output -------------------------------------------------------------------------

def write_atomic(path: Optional[str], text: str) -> None:
    """Write through a temporary file and rename, so failures leave nothing behind."""
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _clean(x):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def dumps(doc: dict) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- commands -----------------------------------------------------------------------

def cmd_analyze(cfg: dict) -> int:
    t = load_tree(cfg)
    op = _operator(cfg, t, load_weight(cfg, t))
    report = analyze(op, cfg["delta"])
    write_atomic(cfg["out"], dumps({"command": "analyze", "resolved_config": cfg,
                                    "report": report.to_dict()}))
    return EXIT_OK


def cmd_spectrum(cfg: dict) -> int:
    if Config.parse(cfg["operator"]) is not Config.LMU_LMU:
        raise CliError("spectrum needs operator Lmu->Lmu")
    t = load_tree(cfg)
    sp = spectrum(_operator(cfg, t, load_weight(cfg, t)), cfg["delta"])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["re", "im", "count"])
    for z, count, _ in sp.points:
        w.writerow([repr(z.real), repr(z.imag), count])
    buf.write("# accumulation_candidates\n")
    buf.write(f"# closure_complete={str(sp.closure_complete).lower()}\n")
    for z in sp.accumulation_candidates:
        buf.write(f"# {z.real!r},{z.imag!r}\n")
    write_atomic(cfg["out"], buf.getvalue())
    return EXIT_OK


def cmd_witness(cfg: dict) -> int:
    t = load_tree(cfg)
    mu = load_weight(cfg, t)
    op = _operator(cfg, t, mu)
    kind = cfg["kind"] or FAMILY_FOR_CONFIG[op.config]
    anchors = cfg["anchors"] if cfg["anchors"] is not None else default_anchors(t)
    fam = make_witness(kind, t, mu, anchors)
    trend = compactness_trend(op, fam)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "depth", "domain_norm", "codomain_norm"])
    for i, (d, dn, cn) in enumerate(zip(trend.depths, trend.domain_norms, trend.values)):
        w.writerow([i, d, repr(dn), repr(cn)])
    buf.write(f"# trend={trend.verdict} tail={trend.tail} floor={trend.floor!r}\n")
    write_atomic(cfg["out"], buf.getvalue())
    return EXIT_OK


def cmd_verify(cfg: dict) -> int:
    if not cfg["symbols"]:
        raise CliError("symbol list is empty")
    if not cfg["configs"]:
        raise CliError("configuration list is empty")
    t = load_tree(cfg)
    if cfg["random_symbols"] and not t.materializable:
        raise CliError("random symbols need a truncation small enough to enumerate")
    mu = load_weight(cfg, t)
    fixtures = cfg["fixtures"]
    if fixtures is None:
        base = Path(cfg["out"]).parent if cfg["out"] else Path.cwd()
        fixtures = str(base / "treemult-fixtures")
    oracle = oracle_random_suite(cfg["trials"], cfg["max_depth"], cfg["max_branching"],
                                 cfg["seed"], cfg["brute_limit"], bool(cfg["inject_bug"]),
                                 fixtures)
    theorems = theorem_suite(t, mu, cfg["symbols"], cfg["configs"], cfg["seed"],
                             cfg["random_symbols"], _settings(cfg), fixtures)
    passed = oracle["passed"] and theorems["passed"]
    doc = {"command": "verify", "resolved_config": cfg, "passed": passed,
           "oracle_random_suite": oracle, "theorem_suite": theorems}
    write_atomic(cfg["out"], dumps(doc))
    if cfg["csv"]:
        write_atomic(cfg["csv"], suite_csv(theorems))
    if not passed:
        for p in oracle["fixture_dumps"] + theorems["fixture_dumps"]:
            print(f"fixture: {p}", file=sys.stderr)
        print(f"verification failed: {len(oracle['failures'])} oracle trial(s), "
              f"{len(theorems['failures'])} theorem row(s)", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "spectrum": cmd_spectrum,
            "witness": cmd_witness, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (CliError, ConfigError, ExprError, TreeError, FunctionError,
            FileNotFoundError, KeyError, ValueError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"treemult: error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - anything else is our bug
        print(f"treemult: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
