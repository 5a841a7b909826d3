"""Local formula inference.

Each target's truth table over its regulators is unknown except where the
Boolean profiles pin it down. One SAT variable ``b_<pattern>`` stands for
each output cell; constraints from the profiles, from the consensus
regulatory profile and from regulation signs restrict the cells, and every
model of the conjunction is minimized into a DNF formula.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import expr as ex
from .exceptions import ContractViolation, InconsistentProfiles
from .formula import Formula
from .minimize import minimize_dnf
from .sat import DEFAULT_MODEL_CAP, enumerate_models, from_propositional, solve

logger = logging.getLogger(__name__)

UNKNOWN = None


@dataclass(frozen=True)
class BooleanProfileSet:
    """Observation rows over named variables; cells are 0, 1 or None."""

    variables: tuple
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        rows = tuple(tuple(None if c is None else int(c) for c in row) for row in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(set(self.variables)) != len(self.variables):
            raise ContractViolation("duplicate variable in profile header")
        if not rows:
            raise ContractViolation("a profile set needs at least one row")
        for i, row in enumerate(rows):
            if len(row) != len(self.variables):
                raise ContractViolation(f"row {i} has {len(row)} cells, expected {len(self.variables)}")
            for c in row:
                if c not in (0, 1, None):
                    raise ContractViolation(f"row {i} has invalid cell {c!r}")

    def column(self, name: str) -> list:
        j = self.variables.index(name)
        return [row[j] for row in self.rows]


@dataclass(frozen=True)
class RegulatorSpec:
    """Ordered regulators of ``target`` with sign +1, -1 or None (unknown)."""

    target: str
    regulators: tuple

    def __post_init__(self):
        regs = tuple((str(n), None if s is None else int(s)) for n, s in self.regulators)
        object.__setattr__(self, "regulators", regs)
        if not regs:
            raise ContractViolation(f"{self.target!r} has no regulators")
        names = [n for n, _ in regs]
        if len(set(names)) != len(names):
            raise ContractViolation(f"duplicate regulator of {self.target!r}")
        for n, s in regs:
            if s not in (1, -1, None):
                raise ContractViolation(f"invalid sign {s!r} for {n!r} -> {self.target!r}")

    @property
    def names(self) -> tuple:
        return tuple(n for n, _ in self.regulators)

    @property
    def signs(self) -> tuple:
        return tuple(s for _, s in self.regulators)

    def __len__(self) -> int:
        return len(self.regulators)


@dataclass(frozen=True)
class PartialTruthTable:
    regulators: tuple
    outputs: tuple  # 0, 1 or None per input index

    @classmethod
    def from_rows(cls, rows: Sequence[tuple], regulators: Sequence[str]) -> "PartialTruthTable":
        out: list = [None] * (1 << len(regulators))
        for pattern, value in rows:
            if None not in pattern:
                out[pattern_index(pattern)] = value
        return cls(tuple(regulators), tuple(out))


@dataclass(frozen=True)
class FormulaPool:
    target: str
    regulators: tuple
    formulas: tuple
    truncated: bool = False
    diagnostic: str | None = None

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)


# --------------------------------------------------------------------------
# b-variable labels


def pattern_index(pattern: Sequence[int]) -> int:
    k = 0
    for b in pattern:
        k = (k << 1) | int(b)
    return k


def b_name(index: int, r: int) -> str:
    return "b_" + format(index, f"0{r}b") if r else "b_"


def b_vars(r: int) -> list[str]:
    return [b_name(k, r) for k in range(1 << r)]


def _b(pattern: Sequence[int], positive: bool = True) -> ex.Expr:
    return ex.lit(b_name(pattern_index(pattern), len(pattern)), positive)


def _completions(pattern: Sequence) -> list[tuple]:
    """Every 0/1 filling of the unknown cells, in lexicographic order."""
    holes = [i for i, c in enumerate(pattern) if c is None]
    out = []
    for beta in itertools.product((0, 1), repeat=len(holes)):
        p = list(pattern)
        for i, b in zip(holes, beta):
            p[i] = b
        out.append(tuple(p))
    return out


# --------------------------------------------------------------------------
# profiles -> rows


def profiles_to_rows(profiles: BooleanProfileSet, spec: RegulatorSpec) -> list[tuple[tuple, int]]:
    """Project each profile on (regulator pattern, target value).

    Rows with an unknown target are dropped and duplicates collapsed; two
    fully defined rows with the same pattern and different outputs raise
    :class:`InconsistentProfiles`.
    """
    missing = [v for v in (spec.target, *spec.names) if v not in profiles.variables]
    if missing:
        raise ContractViolation(f"profiles lack variables {missing}")
    cols = [profiles.variables.index(v) for v in spec.names]
    tcol = profiles.variables.index(spec.target)
    rows: dict[tuple, None] = {}
    for row in profiles.rows:
        out = row[tcol]
        if out is None:
            continue
        pattern = tuple(row[c] for c in cols)
        rows.setdefault((pattern, out))
    defined: dict[tuple, int] = {}
    for pattern, out in rows:
        if None in pattern:
            continue
        if defined.setdefault(pattern, out) != out:
            label = "".join(map(str, pattern))
            raise InconsistentProfiles(f"pattern {label} of {spec.names} gives both outputs for {spec.target!r}")
    return list(rows)


# --------------------------------------------------------------------------
# constraint families


def constraint_bp(rows: Iterable[tuple[tuple, int]]) -> ex.Expr:
    """Profile constraint: each row forces its cell; a row with unknown
    inputs forces at least one of its completions."""
    parts = []
    for pattern, value in rows:
        parts.append(ex.disj(*(_b(p, bool(value)) for p in _completions(pattern))))
    return ex.conj(*parts)


def constraint_cp(spec: RegulatorSpec) -> ex.Expr:
    """Consensus regulatory profile.

    Activators on with inhibitors off forces the target on; the mirror
    pattern forces it off. Unknown-sign regulators range over every value,
    the same value being used in both patterns of a pair. Without any
    signed regulator no consensus pattern exists and the constraint is
    vacuous.
    """
    signs = spec.signs
    if all(s is None for s in signs):
        return ex.TRUE
    act = tuple(1 if s == 1 else 0 if s == -1 else None for s in signs)
    parts = []
    for on in _completions(act):
        off = tuple(1 - b if s is not None else b for b, s in zip(on, signs))
        parts.append(ex.conj(_b(on), _b(off, False)))
    return ex.disj(*parts)


def _sibling_pairs(r: int, position: int) -> list[tuple[tuple, tuple]]:
    """Pairs of patterns differing only at ``position`` (0 then 1)."""
    out = []
    for alpha in itertools.product((0, 1), repeat=r - 1):
        lo = alpha[:position] + (0,) + alpha[position:]
        hi = alpha[:position] + (1,) + alpha[position:]
        out.append((lo, hi))
    return out


def _position(spec: RegulatorSpec, which: str) -> int:
    try:
        return spec.names.index(which)
    except ValueError:
        raise ContractViolation(f"{which!r} does not regulate {spec.target!r}") from None


def constraint_sign(spec: RegulatorSpec, which: str) -> ex.Expr:
    """Regulation conformity for a signed regulator: some sibling pair moves
    the output in the declared direction and none moves it the other way."""
    i = _position(spec, which)
    sign = spec.signs[i]
    if sign not in (1, -1):
        raise ContractViolation(f"{which!r} -> {spec.target!r} has no declared sign")
    pairs = _sibling_pairs(len(spec), i)
    up = sign == 1
    witness = ex.disj(*(ex.conj(_b(lo, not up), _b(hi, up)) for lo, hi in pairs))
    order = ex.conj(*(ex.disj(_b(lo, not up), _b(hi, up)) for lo, hi in pairs))
    return ex.conj(witness, order)


def constraint_exists(spec: RegulatorSpec, which: str) -> ex.Expr:
    """Some sibling pair on ``which`` has different outputs."""
    i = _position(spec, which)
    if spec.signs[i] is not None:
        raise ContractViolation(f"{which!r} -> {spec.target!r} is signed; use constraint_sign")
    return ex.disj(
        *(
            ex.disj(ex.conj(_b(lo), _b(hi, False)), ex.conj(_b(lo, False), _b(hi)))
            for lo, hi in _sibling_pairs(len(spec), i)
        )
    )


def build_constraints(rows, spec: RegulatorSpec, enforce_influence: bool = True) -> dict[str, ex.Expr]:
    """Every constraint family for one target, keyed by a readable label."""
    out = {"bp": constraint_bp(rows), "cp": constraint_cp(spec)}
    for name, sign in spec.regulators:
        if sign is not None:
            out[f"sign:{name}"] = constraint_sign(spec, name)
        elif enforce_influence:
            out[f"exists:{name}"] = constraint_exists(spec, name)
    return out


# --------------------------------------------------------------------------
# inference


def infer_formulas(
    profiles: BooleanProfileSet,
    spec: RegulatorSpec,
    cap: int = DEFAULT_MODEL_CAP,
    enforce_influence: bool = True,
) -> FormulaPool:
    """All formulas over ``spec``'s regulators consistent with the profiles
    and the declared regulations (at most ``cap``)."""
    return infer_from_rows(profiles_to_rows(profiles, spec), spec, cap, enforce_influence)


def infer_from_rows(
    rows: Sequence[tuple[tuple, int]],
    spec: RegulatorSpec,
    cap: int = DEFAULT_MODEL_CAP,
    enforce_influence: bool = True,
) -> FormulaPool:
    r = len(spec)
    cells = b_vars(r)
    constraints = build_constraints(rows, spec, enforce_influence)
    problem = from_propositional(ex.conj(*constraints.values()), cells)
    projection = list(range(1, len(cells) + 1))
    found = enumerate_models(problem, projection, cap)
    formulas: list[Formula] = []
    seen: set[bytes] = set()
    for model in found.models:
        table = np.array(model.project(projection), dtype=np.uint8)
        key = table.tobytes()
        if key in seen:
            continue
        seen.add(key)
        formulas.append(minimize_dnf(table, spec.names))
    diagnostic = None
    if not formulas:
        diagnostic = _diagnose(rows, spec, cells)
        logger.warning("no formula for %s: %s", spec.target, diagnostic)
    elif found.truncated:
        logger.info("formula pool of %s truncated at %d", spec.target, cap)
    return FormulaPool(spec.target, spec.names, tuple(formulas), found.truncated, diagnostic)


def _diagnose(rows, spec: RegulatorSpec, cells: list[str]) -> str:
    if solve(from_propositional(constraint_bp(rows), cells)) is None:
        return "the profiles are contradictory"
    return "the declared regulations conflict with the profiles"


def regulator_specs_from_network(network, unsigned_dual: bool = True) -> list[RegulatorSpec]:
    """Regulator sets and signs read off a network's interaction graph.

    Non-monotone arcs become unknown-sign regulators.
    """
    graph = network.interaction_graph()
    specs = []
    for v in network.variables:
        arcs = graph.regulators(v)
        if arcs:
            specs.append(RegulatorSpec(v, tuple((a.source, a.sign if a.sign != 0 else None) for a in arcs)))
    return specs


def truth_table_rows(formula: Formula, regulators: Sequence[str], indices: Iterable[int] | None = None) -> list[tuple[tuple, int]]:
    """Rows ``(pattern, output)`` of ``formula`` over ``regulators``."""
    r = len(regulators)
    table = formula.truth_table(tuple(regulators))
    idx = range(1 << r) if indices is None else indices
    return [(tuple((k >> (r - 1 - i)) & 1 for i in range(r)), int(table[k])) for k in idx]


def infer_pools(
    profiles: BooleanProfileSet | Mapping[str, BooleanProfileSet],
    specs: Sequence[RegulatorSpec],
    cap: int = DEFAULT_MODEL_CAP,
    enforce_influence: bool = True,
    n_jobs: int = 1,
) -> dict[str, FormulaPool]:
    """Pools for several targets; targets are independent so ``n_jobs > 1``
    runs them in worker processes. ``profiles`` may be one profile set or a
    mapping target -> profile set."""

    def for_target(spec):
        return profiles[spec.target] if isinstance(profiles, Mapping) else profiles

    if n_jobs == 1 or len(specs) < 2:
        return {s.target: infer_formulas(for_target(s), s, cap, enforce_influence) for s in specs}
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        futures = {s.target: pool.submit(infer_formulas, for_target(s), s, cap, enforce_influence) for s in specs}
        return {t: f.result() for t, f in futures.items()}
