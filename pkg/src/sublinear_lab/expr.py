"""A small expression language for test functionals.

Grammar (lowest precedence first)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" unary)?          # right-associative, binds tighter than unary minus
    primary := NUMBER | "x" INDEX | NAME "(" expr ("," expr)* ")" | "(" expr ")"

so ``-x1^2`` is ``-(x1^2)`` and ``2^3^2`` is ``2^(3^2)``. Functions: ``abs``, ``sgn``
(with ``sgn(0) = 0``), ``pos`` (positive part), ``pow``, and variadic ``max``/``min``
taking at least two arguments. Offsets in errors are byte offsets into the UTF-8 source.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ArityError, EvalError, ExprSyntaxError, UnknownIdentifier
from .functional import Functional

FUNCTIONS = {"abs": (1, 1), "sgn": (1, 1), "pos": (1, 1), "pow": (2, 2), "max": (2, None), "min": (2, None)}


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    index: int  # 1-based
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    offset: int = field(default=0, compare=False)


_TOKEN = re.compile(
    rb"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(src: bytes):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(src, pos)
        if m is None:
            rest = src[pos:]
            if rest.strip() == b"":
                out.append(("end", None, len(src)))
                return out
            start = pos + len(rest) - len(rest.lstrip())
            raise ExprSyntaxError(start, "number, identifier or operator", src.decode(errors="replace"))
        kind = m.lastgroup
        out.append((kind, m.group(kind).decode(), m.start(kind)))
        pos = m.end()


class _Parser:
    def __init__(self, text: str, arity: int):
        self.text = text
        self.src = text.encode()
        self.arity = arity
        self.toks = _tokenize(self.src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, off = self.take()
        if val != value or kind != "op":
            raise ExprSyntaxError(off, repr(value), self.text)

    def fail(self, expected: str):
        raise ExprSyntaxError(self.peek()[2], expected, self.text)

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail("operator or end of input")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            _, op, off = self.take()
            node = BinOp(op, node, self.term(), off)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, off = self.take()
            node = BinOp(op, node, self.unary(), off)
        return node

    def unary(self):
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Neg(self.unary(), off)
        return self.power()

    def power(self):
        base = self.primary()
        kind, val, off = self.peek()
        if kind == "op" and val == "^":
            self.take()
            return BinOp("^", base, self.unary(), off)
        return base

    def primary(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val), off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if self.peek()[1] == "(" and self.peek()[0] == "op":
                return self.call(val, off)
            m = re.fullmatch(r"x([1-9]\d*)", val)
            if m:
                k = int(m.group(1))
                if k > self.arity:
                    raise UnknownIdentifier(val, off)
                return Var(k, off)
            raise UnknownIdentifier(val, off)
        self.i -= 1
        self.fail("number, coordinate, function call or '('")

    def call(self, name, off):
        if name not in FUNCTIONS:
            raise UnknownIdentifier(name, off)
        self.expect("(")
        args = [self.expr()]
        while self.peek()[1] == "," and self.peek()[0] == "op":
            self.take()
            args.append(self.expr())
        self.expect(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = f"{lo}" if lo == hi else f"at least {lo}"
            raise ArityError(f"{name} takes {want} arguments, got {len(args)}", off)
        return Call(name, tuple(args), off)


def parse(text: str, arity: int):
    """Parse ``text`` over coordinates ``x1..x<arity>``."""
    if arity < 0:
        raise ArityError("arity must be >= 0")
    return _Parser(text, arity).parse()


# printing: parenthesize only where the grammar would otherwise regroup

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG, _POW, _ATOM = 3, 4, 5


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return _POW if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG
    return _ATOM


def _wrap(node, minimum: int) -> str:
    s = to_source(node)
    return s if _prec(node) >= minimum else f"({s})"


def to_source(node) -> str:
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _NEG)
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if node.op == "^":
        return f"{_wrap(node.left, _ATOM)}^{_wrap(node.right, _NEG)}"
    p = _PREC[node.op]
    return f"{_wrap(node.left, p)} {node.op} {_wrap(node.right, p + 1)}"


def coordinates_used(node) -> int:
    """Largest coordinate index referenced (0 if none)."""
    if isinstance(node, Var):
        return node.index
    if isinstance(node, Num):
        return 0
    if isinstance(node, Neg):
        return coordinates_used(node.operand)
    if isinstance(node, BinOp):
        return max(coordinates_used(node.left), coordinates_used(node.right))
    return max(coordinates_used(a) for a in node.args)


# evaluation, vectorized over numpy arrays


def _ev(node, c):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return np.asarray(c[node.index - 1], dtype=float)
    if isinstance(node, Neg):
        return -_ev(node.operand, c)
    if isinstance(node, Call):
        args = [_ev(a, c) for a in node.args]
        if node.name == "abs":
            return np.abs(args[0])
        if node.name == "sgn":
            return np.sign(args[0])
        if node.name == "pos":
            return np.maximum(args[0], 0.0)
        if node.name == "pow":
            return _power(node, *args)
        red = np.maximum if node.name == "max" else np.minimum
        out = args[0]
        for a in args[1:]:
            out = red(out, a)
        return out
    a, b = _ev(node.left, c), _ev(node.right, c)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(b == 0):
            raise EvalError(to_source(node), "division by zero")
        return a / b
    return _power(node, a, b)


def _power(node, a, b):
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any((a < 0) & (b != np.round(b))):
        raise EvalError(to_source(node), "negative base with non-integer exponent")
    if np.any((a == 0) & (b < 0)):
        raise EvalError(to_source(node), "division by zero (zero to a negative power)")
    with np.errstate(over="ignore"):
        return np.power(a, b)


def evaluate(node, coords):
    """Evaluate on broadcastable coordinate arrays; non-finite results are errors."""
    with np.errstate(over="ignore", invalid="ignore"):
        out = _ev(node, coords)
    if not np.all(np.isfinite(out)):
        raise EvalError(to_source(node), "non-finite result")
    return out


def eval_ast(node, point) -> float:
    point = list(point)
    need = coordinates_used(node)
    if len(point) < need:
        raise ArityError(f"expression uses x{need} but the point has {len(point)} coordinates")
    return float(evaluate(node, [np.float64(v) for v in point]))


def to_functional(node, arity: int) -> Functional:
    if coordinates_used(node) > arity:
        raise ArityError(f"expression uses x{coordinates_used(node)} but arity is {arity}")
    return Functional(arity, lambda c: evaluate(node, c), to_source(node))


def compile_expr(text: str, arity: int) -> Functional:
    return to_functional(parse(text, arity), arity)
