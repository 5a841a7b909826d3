"""Boolean update functions stored as DNF over named variables."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import expr as ex
from .exceptions import ContractViolation

# Truth tables are materialized as arrays of length 2**r.
MAX_TABLE_ARITY = 20

POSITIVE, NEGATIVE, DUAL = 1, -1, 0


@dataclass(frozen=True)
class Formula:
    """A propositional function in DNF.

    ``terms`` is a set of terms, each a frozenset of ``(name, polarity)``
    literals. The empty set of terms is the constant false and the set
    holding only the empty term is the constant true. ``support`` lists the
    syntactic variables in a fixed order; the first one is the most
    significant bit when truth-table indices are spelled out.
    """

    terms: frozenset
    support: tuple

    def __post_init__(self):
        names = set(self.support)
        if len(names) != len(self.support):
            raise ContractViolation(f"duplicate variable in support {self.support}")
        for term in self.terms:
            seen = set()
            for name, _ in term:
                if name in seen:
                    raise ContractViolation(f"variable {name!r} repeated in a term")
                seen.add(name)
                if name not in names:
                    raise ContractViolation(f"literal {name!r} outside support {self.support}")

    # construction ---------------------------------------------------------

    @classmethod
    def from_terms(cls, terms: Iterable[Iterable[tuple]], support: Sequence[str] | None = None) -> "Formula":
        terms = frozenset(frozenset((str(n), bool(p)) for n, p in t) for t in terms)
        if support is None:
            support = sorted({n for t in terms for n, _ in t})
        return cls(terms, tuple(support))

    @classmethod
    def from_expr(cls, e: ex.Expr, support: Sequence[str] | None = None) -> "Formula":
        terms = frozenset(ex.to_dnf(e))
        return cls(terms, tuple(support) if support is not None else tuple(ex.variables(e)))

    @classmethod
    def parse(cls, text: str) -> "Formula":
        return cls.from_expr(ex.parse(text))

    @classmethod
    def constant(cls, value: bool, support: Sequence[str] = ()) -> "Formula":
        return cls(frozenset([frozenset()]) if value else frozenset(), tuple(support))

    @classmethod
    def from_table(cls, table, support: Sequence[str]) -> "Formula":
        from .minimize import minimize_dnf

        return minimize_dnf(table, support)

    # queries --------------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        return not self.terms or frozenset() in self.terms

    @property
    def constant_value(self) -> bool | None:
        if not self.terms:
            return False
        if frozenset() in self.terms:
            return True
        return None

    def with_support(self, support: Sequence[str]) -> "Formula":
        return Formula(self.terms, tuple(support))

    def evaluate(self, state: Mapping[str, int]) -> int:
        return eval_formula(self, state)

    def truth_table(self, order: Sequence[str] | None = None) -> np.ndarray:
        """Outputs over all inputs of ``order`` (default: the support), index
        ``k`` spelling the inputs with the first variable as leading bit."""
        return _truth_table(self, tuple(self.support if order is None else order))

    def signs(self, order: Sequence[str] | None = None) -> dict[str, int]:
        """Sign of every influencing variable: +1, -1 or 0 (non-monotone).

        Variables without any influence are absent from the result.
        """
        order = tuple(self.support if order is None else order)
        return dict(_signs(self, order))

    def is_monotone(self) -> bool:
        return all(s != DUAL for s in self.signs().values())

    def equivalent(self, other: "Formula") -> bool:
        order = tuple(dict.fromkeys(self.support + other.support))
        return bool(np.array_equal(self.truth_table(order), other.truth_table(order)))

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[list[tuple]]:
        rank = {v: i for i, v in enumerate(self.support)}
        terms = [sorted(t, key=lambda l: rank[l[0]]) for t in self.terms]
        terms.sort(key=lambda t: (len(t), [(rank[n], not p) for n, p in t]))
        return terms

    def to_expr(self) -> ex.Expr:
        return ex.disj(*(ex.conj(*(ex.lit(n, p) for n, p in t)) for t in self.sorted_terms()))

    def __str__(self) -> str:
        value = self.constant_value
        if value is not None:
            return "1" if value else "0"
        terms = self.sorted_terms()
        parts = []
        for t in terms:
            body = " & ".join(n if p else f"!{n}" for n, p in t)
            parts.append(f"({body})" if len(t) > 1 and len(terms) > 1 else body)
        return " | ".join(parts)


def eval_formula(f: Formula, state: Mapping[str, int]) -> int:
    """Truth value of ``f`` under ``state`` (a mapping name -> bit)."""
    missing = [v for v in f.support if v not in state]
    if missing:
        raise ContractViolation(f"state does not assign {missing}")
    for term in f.terms:
        if all(bool(state[n]) == p for n, p in term):
            return 1
    return 0


def is_monotone(f: Formula) -> bool:
    return f.is_monotone()


@lru_cache(maxsize=65536)
def _truth_table(f: Formula, order: tuple) -> np.ndarray:
    r = len(order)
    if r > MAX_TABLE_ARITY:
        raise ContractViolation(f"truth table over {r} variables exceeds {MAX_TABLE_ARITY}")
    pos = {v: i for i, v in enumerate(order)}
    idx = np.arange(1 << r, dtype=np.int64)
    out = np.zeros(1 << r, dtype=bool)
    for term in f.terms:
        m = np.ones(1 << r, dtype=bool)
        for name, polarity in term:
            if name not in pos:
                raise ContractViolation(f"variable {name!r} not in table order {order}")
            bit = (idx >> (r - 1 - pos[name])) & 1
            m &= bit == int(polarity)
        out |= m
    out.setflags(write=False)
    return out


@lru_cache(maxsize=65536)
def _signs(f: Formula, order: tuple) -> tuple:
    table = _truth_table(f, order).astype(np.int8)
    r = len(order)
    idx = np.arange(1 << r)
    out = []
    for i, name in enumerate(order):
        w = 1 << (r - 1 - i)
        low = idx[(idx & w) == 0]
        diff = table[low | w] - table[low]
        if not diff.any():
            continue
        if (diff >= 0).all():
            out.append((name, POSITIVE))
        elif (diff <= 0).all():
            out.append((name, NEGATIVE))
        else:
            out.append((name, DUAL))
    return tuple(out)
