"""Expression language for immersion components and coefficient functions.

A small real-valued language parsed by hand (recursive descent), evaluated
either on plain floats or on :class:`~biharm.jets.Jet` values, which is how
every derivative in the engine is obtained.

Grammar, loosest binding first::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative, binds above unary minus
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Identifiers are parameter names (declared at parse time), named constants
(bound at evaluation time; ``pi`` is preset), or one of the functions
``sin cos tan exp log sqrt atan``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .jets import DomainError, Jet, seed_point

Bindings = dict[str, float]

DEFAULT_BINDINGS: Bindings = {"pi": math.pi}

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "atan")


class ExprError(Exception):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnboundConstantError(ExprError):
    pass


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Param:
    name: str
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Call:
    fn: str
    arg: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, Param, Const, Call, Neg, BinOp]


# -- tokenizer / parser ------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens, pos = [], 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            bad = pos + len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(f"unknown token {source[bad]!r}", bad + 1)
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num")), m.start("num") + 1))
        elif m.lastgroup == "ident":
            tokens.append(("ident", m.group("ident"), m.start("ident") + 1))
        else:
            tokens.append(("op", m.group("op"), m.start("op") + 1))
        pos = m.end()
    tokens.append(("end", None, len(source) + 1))
    return tokens


class _Parser:
    def __init__(self, source: str, params):
        self.tokens = _tokenize(source)
        self.i = 0
        self.params = {name: k for k, name in enumerate(params)}

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            what = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {op!r}, found {what}", pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"trailing input {val!r}", pos)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = BinOp(val, node, self.term())
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = BinOp(val, node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.advance()
        if kind == "num":
            return Lit(val)
        if kind == "ident":
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "(":
                if val not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {val!r}", pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            if val in self.params:
                return Param(val, self.params[val])
            if val in FUNCTIONS:
                raise ExprSyntaxError(f"function {val!r} needs an argument list", pos)
            return Const(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        what = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"expected a value, found {what}", pos)


def parse_expression(source: str, params) -> Expr:
    """Parse ``source`` over the given parameter names (distinct identifiers)."""
    params = list(params)
    if len(set(params)) != len(params):
        raise ExprError(f"duplicate parameter names in {params}")
    for p in params:
        if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", p) or p in FUNCTIONS:
            raise ExprError(f"invalid parameter name {p!r}")
    return _Parser(source, params).parse()


# -- evaluation --------------------------------------------------------------

def _call(fn: str, x):
    if isinstance(x, Jet):
        return getattr(x, fn)()
    if fn == "log":
        if x <= 0.0:
            raise DomainError(f"log of non-positive value {x:.6g}")
        return math.log(x)
    if fn == "sqrt":
        if x < 0.0:
            raise DomainError(f"sqrt of negative value {x:.6g}")
        return math.sqrt(x)
    if fn == "tan" and math.cos(x) == 0.0:
        raise DomainError("tan at a pole")
    return getattr(math, fn)(x)


def _power(base, expo):
    if isinstance(expo, Jet):
        # parameter-dependent exponent: b^e = exp(e log b), positive base only
        logb = base.log() if isinstance(base, Jet) else _call("log", base)
        return (expo * logb).exp()
    if expo == int(expo):
        n = int(expo)
        if isinstance(base, Jet):
            return base.powi(n)
        if base == 0.0 and n < 0:
            raise DomainError("0 raised to a negative power")
        return float(base) ** n
    if isinstance(base, Jet):
        return base.powr(float(expo))
    if base <= 0.0:
        raise DomainError(f"x^{expo:.6g} needs positive base, got {base:.6g}")
    return math.pow(base, expo)


def evaluate(node: Expr, env, bindings: Bindings):
    """Evaluate over an environment of parameter values (floats or Jets)."""
    if isinstance(node, Lit):
        return node.value
    if isinstance(node, Param):
        return env[node.index]
    if isinstance(node, Const):
        try:
            return float(bindings[node.name])
        except KeyError:
            raise UnboundConstantError(f"constant {node.name!r} is not bound") from None
    if isinstance(node, Neg):
        return -evaluate(node.arg, env, bindings)
    if isinstance(node, Call):
        return _call(node.fn, evaluate(node.arg, env, bindings))
    if isinstance(node, BinOp):
        a = evaluate(node.left, env, bindings)
        b = evaluate(node.right, env, bindings)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            if not isinstance(a, Jet) and not isinstance(b, Jet) and b == 0.0:
                raise DomainError("division by zero")
            return a / b
        return _power(a, b)
    raise TypeError(f"not an expression node: {node!r}")


def _merged(bindings: Bindings | None) -> Bindings:
    if not bindings:
        return DEFAULT_BINDINGS
    out = dict(DEFAULT_BINDINGS)
    out.update(bindings)
    return out


def evaluate_jet(expr: Expr, point, order: int, bindings: Bindings | None = None) -> Jet:
    """Exact partial derivatives of ``expr`` at ``point``, up to ``order``."""
    env = seed_point(point, order)
    out = evaluate(expr, env, _merged(bindings))
    if isinstance(out, Jet):
        return out
    return Jet.constant(len(point), order, float(out))


def evaluate_jet_env(expr: Expr, env, bindings: Bindings | None = None):
    """Evaluate against prebuilt jet (or float) parameter values."""
    return evaluate(expr, env, _merged(bindings))


def evaluate_expr(expr: Expr, point, bindings: Bindings | None = None) -> float:
    """Plain (order-0) evaluation on floats."""
    return float(evaluate(expr, [float(x) for x in point], _merged(bindings)))


def expr_constants(expr: Expr) -> set[str]:
    """Names of all constants referenced by ``expr``."""
    if isinstance(expr, Const):
        return {expr.name}
    if isinstance(expr, Call):
        return expr_constants(expr.arg)
    if isinstance(expr, Neg):
        return expr_constants(expr.arg)
    if isinstance(expr, BinOp):
        return expr_constants(expr.left) | expr_constants(expr.right)
    return set()
