"""A tiny expression language for radial functions of the depth ``n = |v|``.

Grammar (lowest to highest binding)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') unary)?      # right associative
    atom   := number | 'n' | const | func '(' expr ')' | '(' expr ')'

Constants are ``i``, ``pi`` and ``e``; functions are ``exp``, ``log``,
``sqrt``, ``abs`` and ``cis`` (``cis(t) = e^{it}``).  So ``-2^2`` is ``-4``
and ``2^-n`` is ``2^(-n)``.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ExprError",
    "ExprSyntaxError",
    "ExprEvalError",
    "Num",
    "Var",
    "Const",
    "Unary",
    "Binary",
    "Call",
    "parse",
    "evaluate",
    "eval_levels",
    "to_source",
]


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, column: int):
        super().__init__(f"column {column}: {message}")
        self.column = column


class ExprEvalError(ExprError):
    def __init__(self, message: str, n: int):
        super().__init__(f"at n = {n}: {message}")
        self.n = n


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Num, Var, Const, Unary, Binary, Call]

CONSTANTS = {"i": 1j, "pi": math.pi, "e": math.e}
FUNCTIONS = ("exp", "log", "sqrt", "abs", "cis")

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>\*\*|[-+*/^()]))")


def _tokenize(src: str) -> list:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            col = pos + len(src[pos:]) - len(src[pos:].lstrip()) + 1
            raise ExprSyntaxError(f"unexpected character {src[col - 1]!r}", col)
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(src) + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, got, col = self.take()
        if got != text:
            raise ExprSyntaxError(f"expected {text!r}, found {got or 'end of input'!r}", col)

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.peek()[0] == "op" and self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            return Unary(op, self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] in ("^", "**"):
            self.take()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, text, col = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text == "n":
                return Var()
            if text in CONSTANTS:
                return Const(text)
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            raise ExprSyntaxError(f"unknown identifier {text!r}", col)
        if text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", col)


def parse(src: str) -> Node:
    """Parse ``src`` into an expression tree.

    Raises :class:`ExprSyntaxError` carrying the 1-based column of the
    offending token.
    """
    p = _Parser(src)
    node = p.expr()
    kind, text, col = p.peek()
    if kind != "end":
        raise ExprSyntaxError(f"unexpected {text!r}", col)
    return node


def to_source(node: Node) -> str:
    """Render an expression back to parseable text (fully parenthesized)."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return "n"
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Unary):
        return f"({node.op}{to_source(node.operand)})"
    if isinstance(node, Binary):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def _real(z: complex):
    return z.imag == 0.0


def _pow(a: complex, b: complex, n: int) -> complex:
    if _real(b) and b.real == int(b.real) and abs(b.real) <= 1 << 20:
        k = int(b.real)
        if a == 0 and k < 0:
            raise ExprEvalError("zero raised to a negative power", n)
        return complex(a.real ** k) if _real(a) else a ** k
    if _real(a) and _real(b) and a.real > 0:
        return complex(math.pow(a.real, b.real))
    if a == 0:
        if b.real > 0:
            return 0j
        raise ExprEvalError("zero raised to a non-positive power", n)
    return a ** b


def _call(func: str, z: complex, n: int) -> complex:
    if func == "abs":
        return complex(abs(z))
    if func == "exp":
        return complex(math.exp(z.real)) if _real(z) else cmath.exp(z)
    if func == "cis":
        if not _real(z):
            raise ExprEvalError(f"cis needs a real argument, got {z}", n)
        return cmath.rect(1.0, z.real)
    if func == "log":
        if not _real(z) or z.real <= 0:
            raise ExprEvalError(f"log needs a positive real argument, got {z}", n)
        return complex(math.log(z.real))
    if func == "sqrt":
        if not _real(z) or z.real < 0:
            raise ExprEvalError(f"sqrt needs a nonnegative real argument, got {z}", n)
        return complex(math.sqrt(z.real))
    raise ExprEvalError(f"unknown function {func!r}", n)


def evaluate(node: Node, n: int) -> complex:
    """Evaluate at depth ``n`` in double precision."""
    try:
        return _eval(node, n)
    except ZeroDivisionError:
        raise ExprEvalError("division by zero", n) from None
    except OverflowError:
        raise ExprEvalError("floating point overflow", n) from None


def _eval(node: Node, n: int) -> complex:
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, Var):
        return complex(n)
    if isinstance(node, Const):
        return complex(CONSTANTS[node.name])
    if isinstance(node, Unary):
        v = _eval(node.operand, n)
        return -v if node.op == "-" else v
    if isinstance(node, Binary):
        a, b = _eval(node.left, n), _eval(node.right, n)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0:
                raise ExprEvalError("division by zero", n)
            return a / b
        return _pow(a, b, n)
    if isinstance(node, Call):
        return _call(node.func, _eval(node.arg, n), n)
    raise TypeError(f"not an expression node: {node!r}")


def eval_levels(node: Node, depth: int) -> np.ndarray:
    """Values at ``n = 0, 1, ..., depth`` as a complex array."""
    out = np.array([evaluate(node, n) for n in range(depth + 1)], dtype=complex)
    if not np.all(np.isfinite(out)):
        bad = int(np.flatnonzero(~np.isfinite(out))[0])
        raise ExprEvalError("non-finite value", bad)
    return out
