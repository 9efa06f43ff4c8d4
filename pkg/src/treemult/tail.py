"""Finite-window classification of how a level series behaves as depth grows.

Finite data cannot certify a limit, so the classifier answers with one of
five classes and keeps the window it looked at as evidence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .expr import Node, eval_levels, parse

__all__ = [
    "TailKind",
    "TailClass",
    "TailSettings",
    "classify_tail",
    "declared_tail",
]


class TailKind(str, enum.Enum):
    TENDS_TO_ZERO = "tends-to-zero"
    TENDS_TO_LIMIT = "tends-to-limit"
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class TailSettings:
    window: int = 20
    tol: float = 1e-6
    burn_in: int = 5


@dataclass(frozen=True)
class TailClass:
    kind: TailKind
    limit: Optional[complex] = None
    evidence: tuple = field(default=(), compare=False)
    window_start: Optional[int] = None
    declared: bool = False

    def __str__(self) -> str:
        if self.kind is TailKind.TENDS_TO_LIMIT:
            c = self.limit
            c = c.real if c.imag == 0 else c
            return f"{self.kind.value}({c:g})"
        return self.kind.value

    @property
    def source(self) -> str:
        return "declared" if self.declared else "observed"

    def modulus(self) -> "TailClass":
        """Tail class of ``|g|`` given the tail class of ``g``."""
        if self.kind is not TailKind.TENDS_TO_LIMIT:
            return TailClass(self.kind, None, tuple(abs(x) for x in self.evidence),
                             self.window_start, self.declared)
        return TailClass(self.kind, complex(abs(self.limit)),
                         tuple(abs(x) for x in self.evidence),
                         self.window_start, self.declared)

    def to_dict(self) -> dict:
        out = {"class": self.kind.value, "source": self.source}
        if self.limit is not None:
            out["limit"] = {"re": self.limit.real, "im": self.limit.imag}
        if self.window_start is not None:
            out["window_start"] = self.window_start
            out["window_abs_max"] = max((abs(x) for x in self.evidence), default=0.0)
            out["window_abs_min"] = min((abs(x) for x in self.evidence), default=0.0)
        return out


def classify_tail(g: Union[Node, str, Sequence], N: Optional[int] = None,
                  window: int = 20, tol: float = 1e-6, burn_in: int = 5) -> TailClass:
    """Classify the tail of a level series ``M_0, ..., M_N``.

    ``g`` is either the series itself (real or complex) or a radial
    expression, which is then evaluated on ``0..N``.  Only the last
    ``window`` levels, and none of the first ``burn_in``, are inspected:

    * tends-to-zero: window max modulus below ``tol`` and nonincreasing
      up to ``tol``;
    * tends-to-limit(c): every window value within ``tol`` of ``c``, the
      last value;
    * unbounded: modulus strictly increasing and last value above ``1/tol``;
    * bounded: window decreasing up to ``tol``, or not exceeding the peak
      seen before the window;
    * inconclusive: anything else (e.g. slow growth still below ``1/tol``).
    """
    if isinstance(g, str):
        g = parse(g)
    if isinstance(g, (list, tuple, np.ndarray)):
        series = np.asarray(g, dtype=complex)
        if N is not None:
            series = series[: N + 1]
    else:
        if N is None:
            raise ValueError("N is required when classifying an expression")
        series = eval_levels(g, N)
    if window < 3:
        raise ValueError(f"window must be at least 3, got {window}")
    if window > len(series):
        raise ValueError(f"window {window} larger than the {len(series)} available levels")

    start = max(len(series) - window, min(burn_in, len(series) - 3))
    w = series[start:]
    m = np.abs(w)
    ev = tuple(complex(x) for x in w)
    if not np.all(np.isfinite(m)):
        return TailClass(TailKind.UNBOUNDED, None, ev, start)

    steps = np.diff(m)
    if m.max() < tol and np.all(steps <= tol):
        return TailClass(TailKind.TENDS_TO_ZERO, None, ev, start)
    c = complex(w[-1])
    if np.max(np.abs(w - c)) < tol:
        return TailClass(TailKind.TENDS_TO_LIMIT, c, ev, start)
    if np.all(steps > 0) and m[-1] > 1.0 / tol:
        return TailClass(TailKind.UNBOUNDED, None, ev, start)
    earlier_peak = np.abs(series[:start]).max() if start > 0 else -np.inf
    if np.all(steps <= tol) or m.max() <= earlier_peak:
        return TailClass(TailKind.BOUNDED, None, ev, start)
    return TailClass(TailKind.INCONCLUSIVE, None, ev, start)


_DECLARED = {
    "zero": TailKind.TENDS_TO_ZERO,
    "tends-to-zero": TailKind.TENDS_TO_ZERO,
    "bounded": TailKind.BOUNDED,
    "unbounded": TailKind.UNBOUNDED,
    "inconclusive": TailKind.INCONCLUSIVE,
}


def declared_tail(text: str) -> TailClass:
    """Parse a trusted tail annotation: ``zero``, ``bounded``, ``unbounded``,
    or ``limit:<value>`` / ``tends-to-limit(<value>)`` with a complex value.
    """
    s = text.strip().lower()
    if s in _DECLARED:
        return TailClass(_DECLARED[s], declared=True)
    for prefix in ("limit:", "tends-to-limit(", "limit("):
        if s.startswith(prefix):
            body = s[len(prefix):].rstrip(")").replace(" ", "").replace("i", "j")
            try:
                c = complex(body)
            except ValueError:
                raise ValueError(f"bad limit value in declared tail {text!r}") from None
            return TailClass(TailKind.TENDS_TO_LIMIT, c, declared=True)
    raise ValueError(f"unknown declared tail {text!r}")
