"""Boolean networks and their signed interaction graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import ContractViolation
from .formula import Formula

# Exhaustive state-space arrays are built up to this many variables.
MAX_EXHAUSTIVE_VARS = 20


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    sign: int


@dataclass(frozen=True)
class SignedInteractionGraph:
    nodes: tuple
    arcs: frozenset

    def regulators(self, target: str) -> list[Arc]:
        order = {v: i for i, v in enumerate(self.nodes)}
        return sorted((a for a in self.arcs if a.target == target), key=lambda a: order[a.source])

    def targets(self, source: str) -> list[Arc]:
        order = {v: i for i, v in enumerate(self.nodes)}
        return sorted((a for a in self.arcs if a.source == source), key=lambda a: order[a.target])

    def adjacency(self) -> np.ndarray:
        """0/1 matrix with ``A[i, j] = 1`` for an arc ``i -> j``."""
        order = {v: i for i, v in enumerate(self.nodes)}
        A = np.zeros((len(self.nodes), len(self.nodes)))
        for a in self.arcs:
            A[order[a.source], order[a.target]] = 1.0
        return A

    def sign(self, source: str, target: str) -> int | None:
        for a in self.arcs:
            if a.source == source and a.target == target:
                return a.sign
        return None


@dataclass(frozen=True)
class BooleanNetwork:
    """One update function per variable. Variable order is fixed at
    construction and defines state bit positions."""

    variables: tuple
    functions: Mapping[str, Formula] = field(hash=False, compare=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if len(set(variables)) != len(variables):
            raise ContractViolation("variable names must be unique")
        if set(self.functions) != set(variables):
            missing = set(variables) - set(self.functions)
            extra = set(self.functions) - set(variables)
            raise ContractViolation(f"one formula per variable required (missing {sorted(missing)}, extra {sorted(extra)})")
        declared = set(variables)
        for v, f in self.functions.items():
            outside = set(f.support) - declared
            if outside:
                raise ContractViolation(f"formula of {v!r} uses undeclared {sorted(outside)}")
        object.__setattr__(self, "functions", {v: self.functions[v] for v in variables})

    @classmethod
    def from_dict(cls, functions: Mapping[str, Formula], variables: Sequence[str] | None = None) -> "BooleanNetwork":
        return cls(tuple(variables if variables is not None else functions), dict(functions))

    def __len__(self) -> int:
        return len(self.variables)

    def __getitem__(self, name: str) -> Formula:
        return self.functions[name]

    def __eq__(self, other) -> bool:
        return isinstance(other, BooleanNetwork) and self.variables == other.variables and self.functions == other.functions

    def __hash__(self) -> int:
        return hash((self.variables, tuple(self.functions.values())))

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def replace(self, name: str, formula: Formula) -> "BooleanNetwork":
        functions = dict(self.functions)
        functions[name] = formula
        return BooleanNetwork(self.variables, functions)

    def fingerprint(self) -> tuple:
        """Semantic key: per-variable (support, packed truth table)."""
        return tuple(
            (f.support, np.packbits(f.truth_table()).tobytes()) for f in self.functions.values()
        )

    def as_mapping(self, state: Sequence[int]) -> dict[str, int]:
        if len(state) != len(self.variables):
            raise ContractViolation(f"state has {len(state)} bits, network has {len(self.variables)} variables")
        return dict(zip(self.variables, (int(b) for b in state)))

    def step(self, state: Sequence[int]) -> tuple:
        """Synchronous image F(s)."""
        m = self.as_mapping(state)
        return tuple(self.functions[v].evaluate(m) for v in self.variables)

    def interaction_graph(self) -> "SignedInteractionGraph":
        return derive_interactions(self)

    def is_monotone(self) -> bool:
        return all(f.is_monotone() for f in self.functions.values())

    def __str__(self) -> str:
        return "\n".join(f"{v} = {self.functions[v]}" for v in self.variables) + "\n"


def derive_interactions(network: BooleanNetwork) -> SignedInteractionGraph:
    """Arcs ``i -> j`` where flipping ``x_i`` alone can flip ``f_j``, signed
    +1 / -1 when all flips agree with / reverse the order, 0 otherwise."""
    arcs = set()
    for target, f in network.functions.items():
        for source, sign in f.signs().items():
            arcs.add(Arc(source, target, sign))
    return SignedInteractionGraph(network.variables, frozenset(arcs))


# --------------------------------------------------------------------------
# exhaustive state-space helpers


@lru_cache(maxsize=32)
def state_bits(n: int) -> np.ndarray:
    """``(2**n, n)`` array, row k holding the bits of k, column 0 leading."""
    if n > MAX_EXHAUSTIVE_VARS:
        raise ContractViolation(f"{n} variables exceed the exhaustive limit {MAX_EXHAUSTIVE_VARS}")
    idx = np.arange(1 << n, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    out = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8192)
def function_values(formula: Formula, variables: tuple) -> np.ndarray:
    """Value of ``formula`` on every state over ``variables``."""
    n = len(variables)
    bits = state_bits(n)
    pos = {v: i for i, v in enumerate(variables)}
    local = np.zeros(1 << n, dtype=np.int64)
    for v in formula.support:
        local = (local << 1) | bits[:, pos[v]]
    out = formula.truth_table()[local]
    out.setflags(write=False)
    return out


def fixpoint_mask(formula: Formula, variables: tuple, name: str) -> np.ndarray:
    """Boolean mask of states where ``name`` is unchanged by ``formula``."""
    return _fixpoint_mask(formula, variables, variables.index(name))


@lru_cache(maxsize=8192)
def _fixpoint_mask(formula: Formula, variables: tuple, i: int) -> np.ndarray:
    out = function_values(formula, variables) == state_bits(len(variables))[:, i].astype(bool)
    out.setflags(write=False)
    return out


def states_to_int(states: Iterable[Sequence[int]]) -> list[int]:
    out = []
    for s in states:
        k = 0
        for b in s:
            k = (k << 1) | int(b)
        out.append(k)
    return out
