"""Asynchronous transitions and stable states."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as ex
from .exceptions import ContractViolation
from .network import MAX_EXHAUSTIVE_VARS, BooleanNetwork, fixpoint_mask, state_bits
from .sat import enumerate_models, from_propositional

DEFAULT_STABLE_CAP = 1 << 16


@dataclass(frozen=True)
class StableStateSet:
    variables: tuple
    states: tuple
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, state) -> bool:
        return tuple(state) in self.states

    def as_array(self) -> np.ndarray:
        return np.array(self.states, dtype=np.uint8).reshape(len(self.states), len(self.variables))


def async_successors(network: BooleanNetwork, state: Sequence[int]) -> list[tuple[str, tuple]]:
    """One successor per variable, self-loops included."""
    m = network.as_mapping(state)
    out = []
    for i, v in enumerate(network.variables):
        nxt = list(int(b) for b in state)
        nxt[i] = network.functions[v].evaluate(m)
        out.append((v, tuple(nxt)))
    return out


def is_stable(network: BooleanNetwork, state: Sequence[int]) -> bool:
    return network.step(state) == tuple(int(b) for b in state)


def stable_states(network: BooleanNetwork, cap: int = DEFAULT_STABLE_CAP, method: str = "sat") -> StableStateSet:
    """Fixed points of ``network`` in lexicographic order.

    ``method="sat"`` encodes ``x_i <-> f_i(x)`` for every variable and
    enumerates models projected on the variables; ``"exhaustive"`` scans all
    ``2**n`` states with vectorized truth tables; ``"auto"`` picks the scan
    for up to 16 variables.
    """
    if method == "auto":
        method = "exhaustive" if len(network) <= 16 else "sat"
    if method == "sat":
        return _stable_sat(network, cap)
    if method == "exhaustive":
        return _stable_exhaustive(network, cap)
    raise ContractViolation(f"unknown method {method!r}")


def _stable_sat(network: BooleanNetwork, cap: int) -> StableStateSet:
    constraint = ex.conj(
        *(
            _iff(ex.Var(v), network.functions[v].to_expr())
            for v in network.variables
        )
    )
    problem = from_propositional(constraint, network.variables)
    projection = list(range(1, len(network) + 1))
    found = enumerate_models(problem, projection, cap)
    states = sorted(m.project(projection) for m in found.models)
    return StableStateSet(network.variables, tuple(states), found.truncated)


def _iff(a: ex.Expr, b: ex.Expr) -> ex.Expr:
    return ex.disj(ex.conj(a, b), ex.conj(ex.neg(a), ex.neg(b)))


def stable_mask(network: BooleanNetwork) -> np.ndarray:
    """Boolean mask over all ``2**n`` states marking the fixed points."""
    variables = network.variables
    mask = np.ones(1 << len(variables), dtype=bool)
    for v in variables:
        mask &= fixpoint_mask(network.functions[v], variables, v)
    return mask


def _stable_exhaustive(network: BooleanNetwork, cap: int) -> StableStateSet:
    if len(network) > MAX_EXHAUSTIVE_VARS:
        raise ContractViolation(f"exhaustive scan limited to {MAX_EXHAUSTIVE_VARS} variables")
    idx = np.flatnonzero(stable_mask(network))
    truncated = len(idx) > cap
    bits = state_bits(len(network))[idx[:cap]]
    return StableStateSet(network.variables, tuple(tuple(int(b) for b in row) for row in bits), truncated)
