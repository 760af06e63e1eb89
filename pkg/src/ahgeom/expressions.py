"""Recursive-descent parser and evaluator for chart coordinate expressions.

Grammar (whitespace insensitive):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?        # right associative, binds above unary minus
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

so "-x^2" is -(x^2) and "2^3^2" is 2^(3^2).  Numbers are decimal literals
with an optional exponent.  The function set is fixed: sin cos tan exp log
sqrt atan.  Parsing never raises anything but ExprError subclasses, each
carrying a 1-based line/column position.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

__all__ = [
    "FUNCTIONS",
    "ExprError",
    "ExprSyntaxError",
    "ExprNameError",
    "ExprEvalError",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "Expr",
    "parse_expression",
    "to_source",
    "evaluate",
    "variables_of",
]

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": math.log,
    "sqrt": math.sqrt,
    "atan": math.atan,
}


class ExprError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        if line:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class ExprNameError(ExprError):
    """An identifier is neither a declared coordinate nor a known function."""


class ExprEvalError(ValueError):
    """Evaluation left the function domain or produced a non-finite value."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_]\w*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num | ident | op | end
    text: str
    col: int


def _tokenize(src: str, line: int, col_base: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        match = _TOKEN_RE.match(src, pos)
        if match is None:
            rest = src[pos:].lstrip()
            if not rest:
                break
            bad_at = pos + (len(src[pos:]) - len(rest))
            raise ExprSyntaxError(f"unexpected character {rest[0]!r}", line, col_base + bad_at)
        kind = match.lastgroup
        tokens.append(_Token(kind, match.group(kind), col_base + match.start(kind)))
        pos = match.end()
    tokens.append(_Token("end", "", col_base + len(src)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], line: int):
        self.tokens = tokens
        self.line = line
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token):
        raise ExprSyntaxError(message, self.line, tok.col)

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            self.fail(f"unexpected {tok.text!r} after expression", tok)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.factor()
        while self.peek().text in ("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Expr:
        if self.peek().text == "-":
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        if self.peek().text == "^":
            self.advance()
            node = BinOp("^", node, self.factor())
        return node

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if self.peek().text == "(":
                if tok.text not in FUNCTIONS:
                    raise ExprNameError(f"unknown function '{tok.text}'", self.line, tok.col)
                self.advance()
                arg = self.expr()
                closing = self.advance()
                if closing.text != ")":
                    self.fail("expected ')' to close function call", closing)
                return Call(tok.text, arg)
            return Var(tok.text)
        if tok.text == "(":
            node = self.expr()
            closing = self.advance()
            if closing.text != ")":
                self.fail("expected ')'", closing)
            return node
        if tok.kind == "end":
            self.fail("unexpected end of expression", tok)
        self.fail(f"unexpected {tok.text!r}", tok)


def parse_expression(src: str, line: int = 1, col_base: int = 1,
                     variables: tuple[str, ...] | None = None) -> Expr:
    """Parse one expression; optionally restrict identifiers to `variables`."""
    node = _Parser(_tokenize(src, line, col_base), line).parse()
    if variables is not None:
        for name in sorted(variables_of(node)):
            if name not in variables:
                raise ExprNameError(f"undeclared identifier '{name}'", line, col_base)
    return node


def variables_of(expr: Expr) -> set[str]:
    match expr:
        case Num():
            return set()
        case Var(name):
            return {name}
        case Neg(operand):
            return variables_of(operand)
        case BinOp(_, left, right):
            return variables_of(left) | variables_of(right)
        case Call(_, arg):
            return variables_of(arg)
    raise TypeError(f"not an expression node: {expr!r}")


# Printing: precedence levels, with '^' right associative above unary minus.
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(expr: Expr) -> int:
    match expr:
        case Num() | Var() | Call():
            return 5
        case Neg():
            return _PREC["neg"]
        case BinOp(op, _, _):
            return _PREC[op]
    raise TypeError(f"not an expression node: {expr!r}")


def to_source(expr: Expr) -> str:
    """Render with minimal parentheses; reparsing yields an equal tree."""
    match expr:
        case Num(value):
            return repr(value)
        case Var(name):
            return name
        case Call(func, arg):
            return f"{func}({to_source(arg)})"
        case Neg(operand):
            inner = to_source(operand)
            if _prec(operand) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        case BinOp(op, left, right):
            lsrc, rsrc = to_source(left), to_source(right)
            my = _PREC[op]
            if op == "^":
                # right associative: parenthesize left at equal precedence
                if _prec(left) <= my:
                    lsrc = f"({lsrc})"
                if _prec(right) < my:
                    rsrc = f"({rsrc})"
            else:
                if _prec(left) < my:
                    lsrc = f"({lsrc})"
                if _prec(right) <= my:
                    rsrc = f"({rsrc})"
            return f"{lsrc}{op}{rsrc}"
    raise TypeError(f"not an expression node: {expr!r}")


def _to_python(expr: Expr) -> str:
    match expr:
        case Num(value):
            return repr(value)
        case Var(name):
            return name
        case Neg(operand):
            return f"(-{_to_python(operand)})"
        case BinOp("^", left, right):
            return f"({_to_python(left)}**{_to_python(right)})"
        case BinOp(op, left, right):
            return f"({_to_python(left)}{op}{_to_python(right)})"
        case Call(func, arg):
            return f"{func}({_to_python(arg)})"
    raise TypeError(f"not an expression node: {expr!r}")


_EVAL_GLOBALS = {"__builtins__": {}, **FUNCTIONS}


@lru_cache(maxsize=None)
def _compiled(expr: Expr):
    return compile(_to_python(expr), "<chart expression>", "eval")


def evaluate(expr: Expr, env: Mapping[str, float]) -> float:
    """Evaluate at a point given as {coordinate name: value}.

    Domain violations (log of a non-positive number, division by zero, ...)
    and non-finite results raise ExprEvalError naming the expression.
    """
    try:
        value = float(eval(_compiled(expr), _EVAL_GLOBALS, dict(env)))
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise ExprEvalError(f"cannot evaluate '{to_source(expr)}' at {dict(env)}: {exc}") from exc
    if not math.isfinite(value):
        raise ExprEvalError(f"expression '{to_source(expr)}' is not finite at {dict(env)}")
    return value
