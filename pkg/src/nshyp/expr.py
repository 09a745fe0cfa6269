"""Arithmetic boundary expressions: parser, evaluator, compiler.

Grammar (whitespace insignificant, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | xN | FN '(' expr (',' expr)* ')' | '(' expr ')'

Variables are 1-based (x1..xn); functions are min, max, sqrt, abs.
`^` binds tighter than unary minus, which binds tighter than '*'/'/'.

Expressions evaluate on IEEE float64 with the same operation order as the
compiled kernel programs, so scalar evaluation and bulk kernel evaluation
agree.  `evaluate` additionally raises ExprEvalError on domain errors
(division by zero, square root of a negative, invalid powers) instead of
returning inf/nan.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._core import opcodes as oc

Node = Union["Num", "Var", "Neg", "BinOp", "Call"]

_FUNCTIONS = {"min": 2, "max": 2, "sqrt": 1, "abs": 1}
_VAR_RE = re.compile(r"^x(\d+)$")
_TOKEN_RE = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<punct>[-+*/^(),])")


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    """Lexical or grammatical error, with a 1-based source position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExprEvalError(ExprError):
    """Domain error during strict evaluation."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based


@dataclass(frozen=True)
class Neg:
    operand: Node


@dataclass(frozen=True)
class BinOp:
    op: str
    lhs: Node
    rhs: Node


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple[Node, ...]


@dataclass(frozen=True)
class _Token:
    kind: str  # "num" | "ident" | one of -+*/^(), | "end"
    text: str
    pos: int   # 1-based


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    k = 0
    n = len(src)
    while k < n:
        if src[k].isspace():
            k += 1
            continue
        m = _TOKEN_RE.match(src, k)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {src[k]!r}", k + 1)
        if m.lastgroup == "num":
            tokens.append(_Token("num", m.group(), k + 1))
        elif m.lastgroup == "ident":
            tokens.append(_Token("ident", m.group(), k + 1))
        else:
            tokens.append(_Token(m.group(), m.group(), k + 1))
        k = m.end()
    tokens.append(_Token("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, src: str, dim: int):
        self.tokens = _tokenize(src)
        self.k = 0
        self.dim = dim

    @property
    def cur(self) -> _Token:
        return self.tokens[self.k]

    def advance(self) -> _Token:
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        if self.cur.kind != kind:
            raise ExprSyntaxError(f"expected {what}", self.cur.pos)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.cur.kind != "end":
            raise ExprSyntaxError(f"unexpected token {self.cur.text!r}", self.cur.pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.cur.kind in ("+", "-"):
            op = self.advance().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.cur.kind in ("*", "/"):
            op = self.advance().kind
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.cur.kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        if self.cur.kind == "^":
            self.advance()
            node = BinOp("^", node, self.unary())
        return node

    def atom(self) -> Node:
        tok = self.cur
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.advance()
            m = _VAR_RE.match(tok.text)
            if m:
                idx = int(m.group(1))
                if idx < 1 or idx > self.dim:
                    raise ExprSyntaxError(
                        f"variable {tok.text} out of range for dimension {self.dim}",
                        tok.pos)
                return Var(idx - 1)
            if tok.text in _FUNCTIONS:
                return self.call(tok)
            raise ExprSyntaxError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        raise ExprSyntaxError("expected an operand", tok.pos)

    def call(self, name: _Token) -> Node:
        self.expect("(", f"'(' after function {name.text!r}")
        args = [self.expr()]
        while self.cur.kind == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")", "')'")
        arity = _FUNCTIONS[name.text]
        if len(args) != arity:
            raise ExprSyntaxError(
                f"function {name.text!r} takes {arity} argument(s), got {len(args)}",
                name.pos)
        return Call(name.text, tuple(args))


@dataclass(frozen=True)
class BoundaryExpr:
    """A parsed expression over variables x1..x<dim>."""

    root: Node
    dim: int

    def evaluate(self, point) -> float:
        return evaluate(self, point)

    def pretty(self) -> str:
        return _pretty(self.root)

    def referenced_indices(self) -> frozenset[int]:
        """1-based indices of the variables the expression actually uses."""
        out: set[int] = set()
        _collect_vars(self.root, out)
        return frozenset(out)

    def compile(self) -> Program:
        return compile_program(self)


def parse(src: str, dim: int) -> BoundaryExpr:
    """Parse an expression over x1..x<dim>; raises ExprSyntaxError with a
    1-based position on any lexical or syntax problem."""
    if not src or src.isspace():
        raise ExprSyntaxError("empty expression", 1)
    if dim < 1:
        raise ValueError("dimension must be >= 1")
    return BoundaryExpr(root=_Parser(src, dim).parse(), dim=dim)


def _collect_vars(node: Node, out: set[int]) -> None:
    if isinstance(node, Var):
        out.add(node.index + 1)
    elif isinstance(node, Neg):
        _collect_vars(node.operand, out)
    elif isinstance(node, BinOp):
        _collect_vars(node.lhs, out)
        _collect_vars(node.rhs, out)
    elif isinstance(node, Call):
        for a in node.args:
            _collect_vars(a, out)


def evaluate(e: BoundaryExpr, point) -> float:
    """Strict evaluation at a point (sequence of dim floats).

    Domain errors raise ExprEvalError; other arithmetic follows IEEE float64
    (overflow yields inf).
    """
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (e.dim,):
        raise ExprEvalError(
            f"point has dimension {point.shape}, expression declares {e.dim}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return float(_eval_node(e.root, point))


def _eval_node(node: Node, point):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return point[node.index]
    if isinstance(node, Neg):
        return -_eval_node(node.operand, point)
    if isinstance(node, BinOp):
        a = _eval_node(node.lhs, point)
        b = _eval_node(node.rhs, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if b == 0.0:
                raise ExprEvalError("division by zero")
            return a / b
        if a < 0.0 and b != math.floor(b):
            raise ExprEvalError("fractional power of a negative base")
        if a == 0.0 and b < 0.0:
            raise ExprEvalError("zero raised to a negative power")
        return np.power(a, b)
    a = _eval_node(node.args[0], point)
    if node.fn == "sqrt":
        if a < 0.0:
            raise ExprEvalError("square root of a negative value")
        return np.sqrt(a)
    if node.fn == "abs":
        return np.abs(a)
    b = _eval_node(node.args[1], point)
    if node.fn == "min":
        return a if a < b else b
    return a if a > b else b


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    return 9


def _pretty(node: Node) -> str:
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        inner = _pretty(node.operand)
        return f"-({inner})" if _prec(node.operand) < 3 else f"-{inner}"
    if isinstance(node, Call):
        return f"{node.fn}({', '.join(_pretty(a) for a in node.args)})"
    p = _PREC[node.op]
    lhs = _pretty(node.lhs)
    rhs = _pretty(node.rhs)
    if node.op == "^":
        # right-associative; the rhs slot admits unary expressions bare
        if _prec(node.lhs) <= p:
            lhs = f"({lhs})"
        if _prec(node.rhs) < 3:
            rhs = f"({rhs})"
    else:
        if _prec(node.lhs) < p:
            lhs = f"({lhs})"
        if _prec(node.rhs) <= p:
            rhs = f"({rhs})"
    return f"{lhs} {node.op} {rhs}" if p == 1 else f"{lhs}{node.op}{rhs}"


@dataclass(frozen=True, eq=False)
class Program:
    """Flat postfix form of an expression, ready for the kernel VM."""

    codes: np.ndarray     # intc
    operands: np.ndarray  # float64
    dim: int


_BINOP_CODE = {"+": oc.OP_ADD, "-": oc.OP_SUB, "*": oc.OP_MUL,
               "/": oc.OP_DIV, "^": oc.OP_POW}
_CALL_CODE = {"min": oc.OP_MIN, "max": oc.OP_MAX,
              "sqrt": oc.OP_SQRT, "abs": oc.OP_ABS}


def compile_program(e: BoundaryExpr) -> Program:
    codes: list[int] = []
    operands: list[float] = []

    def emit(node: Node) -> int:
        if isinstance(node, Num):
            codes.append(oc.OP_CONST)
            operands.append(node.value)
            return 1
        if isinstance(node, Var):
            codes.append(oc.OP_VAR)
            operands.append(float(node.index))
            return 1
        if isinstance(node, Neg):
            depth = emit(node.operand)
            codes.append(oc.OP_NEG)
            operands.append(0.0)
            return depth
        if isinstance(node, BinOp):
            depth = max(emit(node.lhs), 1 + emit(node.rhs))
            codes.append(_BINOP_CODE[node.op])
            operands.append(0.0)
            return depth
        depth = 0
        for j, arg in enumerate(node.args):
            depth = max(depth, j + emit(arg))
        codes.append(_CALL_CODE[node.fn])
        operands.append(0.0)
        return depth

    depth = emit(e.root)
    if depth > oc.MAX_STACK:
        raise ExprError(f"expression too deep for the kernel VM (depth {depth})")
    return Program(codes=np.asarray(codes, dtype=np.intc),
                   operands=np.asarray(operands, dtype=np.float64),
                   dim=e.dim)
