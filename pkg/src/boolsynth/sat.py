"""CNF problems, Tseitin encoding and a small complete SAT solver.

The solver is conflict-driven (1-UIP learning, non-chronological
backjumping, two watched literals) with a static branching order: the
lowest-index unassigned variable is decided true first. No restarts and no
randomness, so every run is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import expr as ex
from .exceptions import ContractViolation, ParseError

DEFAULT_MODEL_CAP = 500


@dataclass(frozen=True)
class CnfProblem:
    num_vars: int
    clauses: tuple
    var_names: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        for c in clauses:
            for l in c:
                if l == 0 or abs(l) > self.num_vars:
                    raise ContractViolation(f"literal {l} outside 1..{self.num_vars}")

    def index_of(self, name: str) -> int:
        for i, n in self.var_names.items():
            if n == name:
                return i
        raise KeyError(name)

    def satisfied_by(self, assignment: dict[int, int]) -> bool:
        return all(any((assignment[abs(l)] == 1) == (l > 0) for l in c) for c in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"c {i} {n}" for i, n in sorted(self.var_names.items())]
        lines.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dimacs(cls, text: str) -> "CnfProblem":
        num_vars = None
        names: dict[int, str] = {}
        clauses: list[list[int]] = []
        current: list[int] = []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("c"):
                parts = line.split()
                if len(parts) == 3 and parts[1].isdigit():
                    names[int(parts[1])] = parts[2]
                continue
            if line.startswith("p"):
                parts = line.split()
                if len(parts) != 4 or parts[1] != "cnf":
                    raise ParseError("bad problem line", line=lineno)
                num_vars = int(parts[2])
                continue
            if num_vars is None:
                raise ParseError("clause before problem line", line=lineno)
            for tok in line.split():
                try:
                    l = int(tok)
                except ValueError:
                    raise ParseError(f"bad literal {tok!r}", line=lineno) from None
                if l == 0:
                    clauses.append(current)
                    current = []
                else:
                    current.append(l)
        if current:
            clauses.append(current)
        if num_vars is None:
            raise ParseError("missing problem line")
        return cls(num_vars, tuple(tuple(c) for c in clauses), names)


@dataclass(frozen=True)
class Model:
    assignment: dict

    def __getitem__(self, var: int) -> int:
        return self.assignment[var]

    def project(self, variables: Iterable[int]) -> tuple:
        return tuple(self.assignment[v] for v in variables)


@dataclass
class Enumeration:
    models: list
    truncated: bool

    def __len__(self) -> int:
        return len(self.models)

    def __iter__(self):
        return iter(self.models)


# --------------------------------------------------------------------------
# Tseitin translation


def from_propositional(e: ex.Expr, variables: Sequence[str] | None = None) -> CnfProblem:
    """Equisatisfiable CNF of ``e``.

    ``variables`` fixes the indices of the original variables (1-based, in
    the given order) and may declare variables not occurring in ``e``;
    auxiliary gate variables are numbered after them. Every gate is encoded
    as an equivalence, so each assignment of the original variables that
    satisfies ``e`` has exactly one satisfying extension.
    """
    names = list(variables) if variables is not None else ex.variables(e)
    index = {n: i + 1 for i, n in enumerate(names)}
    for n in ex.variables(e):
        if n not in index:
            index[n] = len(index) + 1
            names.append(n)
    enc = _Tseitin(index)
    enc.require(e)
    var_names = {i: n for n, i in index.items()}
    for i in range(len(index) + 1, enc.next_var):
        var_names[i] = f"_aux{i}"
    return CnfProblem(enc.next_var - 1, tuple(enc.clauses), var_names)


class _Tseitin:
    def __init__(self, index: dict[str, int]):
        self.index = index
        self.next_var = len(index) + 1
        self.clauses: list[tuple] = []
        self.cache: dict = {}

    def fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def require(self, e: ex.Expr) -> None:
        if isinstance(e, ex.Const):
            if not e.value:
                self.clauses.append(())
            return
        if isinstance(e, ex.And):
            for a in e.args:
                self.require(a)
            return
        if isinstance(e, ex.Or):
            lits = [self.literal(a) for a in e.args]
            if any(l is True for l in lits):
                return
            lits = [l for l in lits if l is not False]
            self.clauses.append(tuple(dict.fromkeys(lits)))
            return
        l = self.literal(e)
        if l is False:
            self.clauses.append(())
        elif l is not True:
            self.clauses.append((l,))

    def literal(self, e: ex.Expr):
        """Literal equivalent to ``e``; True/False for constants."""
        if isinstance(e, ex.Const):
            return e.value
        if isinstance(e, ex.Var):
            return self.index[e.name]
        if isinstance(e, ex.Not):
            l = self.literal(e.arg)
            return (not l) if isinstance(l, bool) else -l
        key = e
        if key in self.cache:
            return self.cache[key]
        lits = [self.literal(a) for a in e.args]
        if isinstance(e, ex.And):
            if any(l is False for l in lits):
                return False
            lits = list(dict.fromkeys(l for l in lits if l is not True))
            if not lits:
                return True
            if len(lits) == 1:
                return lits[0]
            g = self.fresh()
            for l in lits:
                self.clauses.append((-g, l))
            self.clauses.append(tuple([g] + [-l for l in lits]))
        else:
            if any(l is True for l in lits):
                return True
            lits = list(dict.fromkeys(l for l in lits if l is not False))
            if not lits:
                return False
            if len(lits) == 1:
                return lits[0]
            g = self.fresh()
            for l in lits:
                self.clauses.append((g, -l))
            self.clauses.append(tuple([-g] + lits))
        self.cache[key] = g
        return g


# --------------------------------------------------------------------------
# solver


class Solver:
    """Incremental CDCL solver. Clauses may be added between calls to
    :meth:`solve`; learned clauses are kept since they remain implied."""

    def __init__(self, num_vars: int, clauses: Iterable[Sequence[int]] = ()):
        self.n = num_vars
        self.value = [0] * (num_vars + 1)
        self.level = [0] * (num_vars + 1)
        self.reason: list = [None] * (num_vars + 1)
        self.watches: list[list] = [[] for _ in range(2 * num_vars + 2)]
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.next_decision = 1
        self.ok = True
        for c in clauses:
            self.add_clause(c)

    @staticmethod
    def _w(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _val(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def add_clause(self, clause: Sequence[int]) -> bool:
        """Add a clause at decision level 0. Returns False once unsatisfiable."""
        if self.trail_lim:
            self._backtrack(0)
        if not self.ok:
            return False
        lits: list[int] = []
        for l in dict.fromkeys(clause):
            if -l in lits:
                return True
            v = self._val(l)
            if v == 1:
                return True
            if v == 0:
                lits.append(l)
        if not lits:
            self.ok = False
            return False
        if len(lits) == 1:
            self._enqueue(lits[0], None)
            if self._propagate() is not None:
                self.ok = False
            return self.ok
        self._attach(lits)
        return True

    def _attach(self, lits: list[int]) -> None:
        self.watches[self._w(-lits[0])].append(lits)
        self.watches[self._w(-lits[1])].append(lits)

    def _enqueue(self, lit: int, reason) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        value = self.value
        watches = self.watches
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            ws = watches[self._w(lit)]
            i = j = 0
            end = len(ws)
            while i < end:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                fv = value[first] if first > 0 else -value[-first]
                if fv == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    l = c[k]
                    lv = value[l] if l > 0 else -value[-l]
                    if lv != -1:
                        c[1], c[k] = l, false_lit
                        watches[self._w(-l)].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if fv == -1:
                        while i < end:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(self.trail)
                        return c
                    self._enqueue(first, c)
            del ws[j:]
        return None

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        seen = set()
        learned = [0]
        counter = 0
        lit = None
        idx = len(self.trail) - 1
        current = len(self.trail_lim)
        clause = conflict
        while True:
            for q in clause:
                if lit is not None and q == lit:
                    continue
                v = abs(q)
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    if self.level[v] >= current:
                        counter += 1
                    else:
                        learned.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            lit = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(lit)]
            seen.discard(abs(lit))
            # reason clauses store the implied literal first
        learned[0] = -lit
        if len(learned) == 1:
            return learned, 0
        best = max(range(1, len(learned)), key=lambda k: self.level[abs(learned[k])])
        learned[1], learned[best] = learned[best], learned[1]
        return learned, self.level[abs(learned[1])]

    def _backtrack(self, level: int) -> None:
        if len(self.trail_lim) <= level:
            return
        start = self.trail_lim[level]
        for lit in self.trail[start:]:
            v = abs(lit)
            self.value[v] = 0
            self.reason[v] = None
            if v < self.next_decision:
                self.next_decision = v
        del self.trail[start:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        v = self.next_decision
        while v <= self.n and self.value[v] != 0:
            v += 1
        self.next_decision = v
        return v if v <= self.n else 0

    def solve(self) -> dict[int, int] | None:
        """Return a total assignment ``{var: bit}`` or None when unsatisfiable."""
        if not self.ok:
            return None
        if self.trail_lim:
            self._backtrack(0)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    self.ok = False
                    return None
                learned, level = self._analyze(conflict)
                self._backtrack(level)
                if len(learned) == 1:
                    self._enqueue(learned[0], None)
                else:
                    self._attach(learned)
                    self._enqueue(learned[0], learned)
                continue
            v = self._pick()
            if v == 0:
                return {i: (1 if self.value[i] == 1 else 0) for i in range(1, self.n + 1)}
            self.trail_lim.append(len(self.trail))
            self._enqueue(v, None)


def solve(problem: CnfProblem) -> Model | None:
    """A satisfying model, or None when ``problem`` is unsatisfiable."""
    assignment = Solver(problem.num_vars, problem.clauses).solve()
    return None if assignment is None else Model(assignment)


def enumerate_models(
    problem: CnfProblem,
    projection: Sequence[int] | None = None,
    cap: int = DEFAULT_MODEL_CAP,
) -> Enumeration:
    """All models distinct on ``projection`` (default: every variable).

    Models are found by repeated solving, each one blocked on the projected
    variables only. At most ``cap`` models are returned; ``truncated`` tells
    whether at least one more exists.
    """
    if cap < 1:
        raise ContractViolation("cap must be >= 1")
    projection = list(range(1, problem.num_vars + 1)) if projection is None else list(projection)
    for v in projection:
        if not 1 <= v <= problem.num_vars:
            raise ContractViolation(f"projection variable {v} not declared")
    solver = Solver(problem.num_vars, problem.clauses)
    models: list[Model] = []
    while True:
        assignment = solver.solve()
        if assignment is None:
            return Enumeration(models, truncated=False)
        if len(models) == cap:
            return Enumeration(models, truncated=True)
        models.append(Model(assignment))
        if not projection:
            return Enumeration(models, truncated=False)
        solver.add_clause([-v if assignment[v] else v for v in projection])
