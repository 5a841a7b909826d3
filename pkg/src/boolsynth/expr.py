"""Propositional expressions: a small immutable AST, a parser for the
``&``/``|``/``!`` text syntax and conversion to disjunctive normal form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .exceptions import ParseError


@dataclass(frozen=True)
class Const:
    value: bool

    def __str__(self) -> str:
        return "1" if self.value else "0"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not:
    arg: "Expr"

    def __str__(self) -> str:
        if isinstance(self.arg, (Var, Const)):
            return f"!{self.arg}"
        return f"!({self.arg})"


@dataclass(frozen=True)
class And:
    args: tuple

    def __str__(self) -> str:
        return " & ".join(_wrap(a, Or) for a in self.args)


@dataclass(frozen=True)
class Or:
    args: tuple

    def __str__(self) -> str:
        return " | ".join(_wrap(a, And) for a in self.args)


Expr = Union[Const, Var, Not, And, Or]

TRUE = Const(True)
FALSE = Const(False)


def _wrap(e: Expr, other: type) -> str:
    if isinstance(e, (And, Or)) and len(e.args) > 1:
        return f"({e})"
    return str(e)


def lit(name: str, positive: bool = True) -> Expr:
    return Var(name) if positive else Not(Var(name))


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(not e.value)
    if isinstance(e, Not):
        return e.arg
    return Not(e)


def conj(*args: Expr) -> Expr:
    """Conjunction with constant folding and flattening of nested ands."""
    out = []
    for a in args:
        if isinstance(a, Const):
            if not a.value:
                return FALSE
            continue
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args: Expr) -> Expr:
    """Disjunction with constant folding and flattening of nested ors."""
    out = []
    for a in args:
        if isinstance(a, Const):
            if a.value:
                return TRUE
            continue
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def evaluate(e: Expr, assignment: Mapping[str, int]) -> bool:
    if isinstance(e, Var):
        return bool(assignment[e.name])
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return not evaluate(e.arg, assignment)
    if isinstance(e, And):
        return all(evaluate(a, assignment) for a in e.args)
    if isinstance(e, Or):
        return any(evaluate(a, assignment) for a in e.args)
    raise TypeError(f"not an expression: {e!r}")


def variables(e: Expr) -> list[str]:
    """Variable names in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(x: Expr) -> None:
        if isinstance(x, Var):
            seen.setdefault(x.name)
        elif isinstance(x, Not):
            walk(x.arg)
        elif isinstance(x, (And, Or)):
            for a in x.args:
                walk(a)

    walk(e)
    return list(seen)


# A DNF term is a frozenset of (name, polarity) literals.
Term = frozenset


def to_dnf(e: Expr) -> set[frozenset]:
    """Return the terms of an equivalent DNF.

    Contradictory terms are dropped and absorbed terms removed, so the
    result is empty for an unsatisfiable expression and contains the empty
    term for a tautological one (when detected syntactically).
    """
    return _absorb(_dnf(e, True))


def _dnf(e: Expr, positive: bool) -> set[frozenset]:
    if isinstance(e, Const):
        return {frozenset()} if e.value == positive else set()
    if isinstance(e, Var):
        return {frozenset([(e.name, positive)])}
    if isinstance(e, Not):
        return _dnf(e.arg, not positive)
    conjunctive = isinstance(e, And) == positive
    parts = [_dnf(a, positive) for a in e.args]
    if not conjunctive:
        out: set[frozenset] = set()
        for p in parts:
            out |= p
        return out
    acc: set[frozenset] = {frozenset()}
    for p in parts:
        nxt = set()
        for t1 in acc:
            for t2 in p:
                t = t1 | t2
                if not _contradictory(t):
                    nxt.add(t)
        acc = _absorb(nxt)
        if not acc:
            break
    return acc


def _contradictory(term: Iterable) -> bool:
    seen: dict[str, bool] = {}
    for name, pol in term:
        if seen.setdefault(name, pol) != pol:
            return True
    return False


def _absorb(terms: set[frozenset]) -> set[frozenset]:
    ordered = sorted(terms, key=len)
    kept: list[frozenset] = []
    for t in ordered:
        if not any(k <= t for k in kept):
            kept.append(t)
    return set(kept)


# --------------------------------------------------------------------------
# parser
#
#   expr   := term ('|' term)*
#   term   := factor ('&' factor)*
#   factor := '!' factor | '(' expr ')' | '0' | '1' | identifier


_IDENT_START = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_IDENT_BODY = _IDENT_START | set("0123456789.:'")


class _Parser:
    def __init__(self, text: str, line: int | None, offset: int):
        self.text = text
        self.pos = 0
        self.line = line
        self.offset = offset

    def error(self, msg: str) -> ParseError:
        return ParseError(msg, line=self.line, column=self.offset + self.pos + 1)

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        args = [self.term()]
        while self.peek() == "|":
            self.pos += 1
            args.append(self.term())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def term(self) -> Expr:
        args = [self.factor()]
        while self.peek() == "&":
            self.pos += 1
            args.append(self.factor())
        return args[0] if len(args) == 1 else And(tuple(args))

    def factor(self) -> Expr:
        c = self.peek()
        if c == "!":
            self.pos += 1
            return Not(self.factor())
        if c == "(":
            self.pos += 1
            e = self.expr()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return e
        if c in ("0", "1"):
            self.pos += 1
            return Const(c == "1")
        if c in _IDENT_START:
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos] in _IDENT_BODY:
                self.pos += 1
            return Var(self.text[start:self.pos])
        if not c:
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {c!r}")


def parse(text: str, *, line: int | None = None, offset: int = 0) -> Expr:
    """Parse an expression. ``offset`` shifts reported columns when the
    expression is embedded in a longer line."""
    return _Parser(text, line, offset).parse()
