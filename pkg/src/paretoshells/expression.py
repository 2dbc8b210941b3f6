"""Arithmetic expressions over decision variables ``x1 .. xn``.

Grammar (infix): numeric literals, variables ``x1``..``xn``, ``+ - * / ^``,
parentheses and unary minus.  The exponent of ``^`` must be a literal
constant (optionally signed).  Parsing goes through :mod:`ast` after
mapping ``^`` to ``**``; the resulting tree is then converted into the
small node set below, rejecting everything else.

Evaluation is vectorized: pass an ``(m, n)`` array and get ``m`` values.
Domain problems (division by zero, ``0`` to a negative power, negative
base with a fractional exponent) show up as non-finite values, which the
problem layer turns into infeasible-by-domain verdicts.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParseError, UnknownVariableError

__all__ = [
    "Expression",
    "Const",
    "Var",
    "Neg",
    "BinOp",
    "Pow",
    "parse_expression",
]

_VAR_RE = re.compile(r"^x([1-9][0-9]*)$")


class Expression:
    """Base class of expression nodes."""

    def evaluate(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        with np.errstate(all="ignore"):
            out = self._eval(X)
        return np.broadcast_to(np.asarray(out, dtype=float), (X.shape[0],)).copy()

    def __call__(self, x) -> float:
        """Evaluate at a single point."""
        return float(self.evaluate(np.asarray(x, dtype=float)[None, :])[0])

    def variables(self) -> set[int]:
        raise NotImplementedError

    def to_string(self) -> str:
        raise NotImplementedError

    def _eval(self, X):
        raise NotImplementedError

    def __str__(self):
        return self.to_string()


@dataclass(frozen=True, eq=True)
class Const(Expression):
    value: float

    def _eval(self, X):
        return self.value

    def variables(self):
        return set()

    def to_string(self):
        text = repr(float(self.value))
        return f"({text})" if text.startswith("-") else text


@dataclass(frozen=True, eq=True)
class Var(Expression):
    index: int  # 0-based

    def _eval(self, X):
        return X[:, self.index]

    def variables(self):
        return {self.index}

    def to_string(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True, eq=True)
class Neg(Expression):
    operand: Expression

    def _eval(self, X):
        return -self.operand._eval(X)

    def variables(self):
        return self.operand.variables()

    def to_string(self):
        return f"(-{self.operand.to_string()})"


_OPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.true_divide,
}


@dataclass(frozen=True, eq=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    def _eval(self, X):
        return _OPS[self.op](self.left._eval(X), self.right._eval(X))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def to_string(self):
        return f"({self.left.to_string()} {self.op} {self.right.to_string()})"


@dataclass(frozen=True, eq=True)
class Pow(Expression):
    base: Expression
    exponent: float

    def _eval(self, X):
        b = self.base._eval(X)
        e = self.exponent
        if float(e).is_integer():
            return np.power(b, int(e)) if e >= 0 else np.power(np.asarray(b, dtype=float), e)
        return np.power(b, e)

    def variables(self):
        return self.base.variables()

    def to_string(self):
        return f"({self.base.to_string()} ^ {float(self.exponent)!r})"


_BINOPS = {ast.Add: "+", ast.Sub: "-", ast.Mult: "*", ast.Div: "/"}


def _literal(node) -> float | None:
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _literal(node.operand)
        if inner is not None:
            return -inner if isinstance(node.op, ast.USub) else inner
    return None


def _column_map(text: str):
    """1-based column in ``text`` of a 0-based offset into the ``^ -> **`` rewrite of its stripped form."""
    lead = len(text) - len(text.lstrip())
    body = text.strip()

    def column(offset: int) -> int:
        pos = 0
        for i, ch in enumerate(body):
            pos += 2 if ch == "^" else 1
            if pos > offset:
                return lead + i + 1
        return lead + len(body) + 1

    return column


def _convert(node, n: int | None, line_offset: int, column=lambda c: c + 1) -> Expression:
    def fail(msg, cls=ParseError):
        raise cls(msg, getattr(node, "lineno", 1) + line_offset, column(getattr(node, "col_offset", 0)))

    def sub(child):
        return _convert(child, n, line_offset, column)

    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            fail(f"unsupported literal {node.value!r}")
        return Const(float(node.value))
    if isinstance(node, ast.Name):
        m = _VAR_RE.match(node.id)
        if not m:
            fail(f"unknown variable {node.id!r}", UnknownVariableError)
        idx = int(m.group(1)) - 1
        if n is not None and idx >= n:
            fail(f"unknown variable {node.id!r} in a problem with n={n}", UnknownVariableError)
        return Var(idx)
    if isinstance(node, ast.UnaryOp):
        if isinstance(node.op, ast.USub):
            return Neg(sub(node.operand))
        if isinstance(node.op, ast.UAdd):
            return sub(node.operand)
        fail("unsupported unary operator")
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            exponent = _literal(node.right)
            if exponent is None:
                fail("exponent of '^' must be a literal constant")
            return Pow(sub(node.left), exponent)
        if type(node.op) in _BINOPS:
            return BinOp(_BINOPS[type(node.op)], sub(node.left), sub(node.right))
        fail("unsupported binary operator")
    fail(f"unsupported syntax: {type(node).__name__}")


def parse_expression(text: Union[str, Expression], n: int | None = None, line_offset: int = 0) -> Expression:
    """Parse ``text`` into an :class:`Expression`.

    ``n`` bounds the admissible variable indices.  ``**`` is not part of the
    grammar; use ``^``.
    """
    if isinstance(text, Expression):
        if n is not None and any(i >= n for i in text.variables()):
            raise UnknownVariableError(f"expression uses variables beyond x{n}")
        return text
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    if "**" in text:
        raise ParseError("use '^' for powers", 1 + line_offset, text.index("**") + 1)
    column = _column_map(text)
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        offset = max((exc.offset or 1) - 1, 0)
        raise ParseError(f"syntax error in {text!r}: {exc.msg}", (exc.lineno or 1) + line_offset, column(offset)) from None
    return _convert(tree.body, n, line_offset, column)
