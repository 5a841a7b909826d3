"""Multi-criteria scoring of candidate networks and Pareto comparison."""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .dynamics import DEFAULT_STABLE_CAP, StableStateSet, stable_states
from .exceptions import ContractViolation, ScoringError
from .network import BooleanNetwork, fixpoint_mask, state_bits


@dataclass(frozen=True)
class SignatureSet:
    """Expected values of the biomarkers at stable states."""

    biomarkers: tuple
    signatures: tuple

    def __post_init__(self):
        object.__setattr__(self, "biomarkers", tuple(self.biomarkers))
        sigs = tuple(dict.fromkeys(tuple(int(b) for b in s) for s in self.signatures))
        object.__setattr__(self, "signatures", sigs)
        for s in sigs:
            if len(s) != len(self.biomarkers):
                raise ContractViolation(f"signature {s} does not match biomarkers {self.biomarkers}")

    @classmethod
    def from_stable_states(cls, states: StableStateSet, biomarkers: Sequence[str]) -> "SignatureSet":
        cols = [states.variables.index(b) for b in biomarkers]
        return cls(tuple(biomarkers), tuple(tuple(s[c] for c in cols) for s in states))

    def __len__(self) -> int:
        return len(self.signatures)


@dataclass(frozen=True)
class ScoreVector:
    per_signature: tuple
    monotony: int
    stable_gap: int
    extra: tuple = ()

    @property
    def values(self) -> tuple:
        return (*self.per_signature, self.monotony, self.stable_gap, *self.extra)

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __str__(self) -> str:
        return ";".join(str(v) for v in self.values)


class Order(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


def pareto_leq(a: Iterable[int], b: Iterable[int]) -> Order:
    """Component-wise comparison of two score vectors."""
    a, b = tuple(a), tuple(b)
    if len(a) != len(b):
        raise ContractViolation(f"score vectors of length {len(a)} and {len(b)}")
    le = all(x <= y for x, y in zip(a, b))
    ge = all(x >= y for x, y in zip(a, b))
    if le and ge:
        return Order.EQUAL
    if le:
        return Order.LESS
    if ge:
        return Order.GREATER
    return Order.INCOMPARABLE


def pareto_minimal(vectors: Sequence[Iterable[int]]) -> list[int]:
    """Indices of the vectors no other vector is strictly below."""
    vs = [tuple(v) for v in vectors]
    return [i for i, v in enumerate(vs) if not any(pareto_leq(w, v) is Order.LESS for w in vs)]


def is_optimal(v: ScoreVector | Iterable[int]) -> bool:
    return all(x == 0 for x in v)


Criterion = Callable[[BooleanNetwork, StableStateSet], int]


class Objective:
    """Score networks against biomarker signatures, monotony and the
    expected number of stable states.

    Extra criteria ``f(network, stable_states) -> int`` are appended to the
    vector. Scores are memoized on the semantic fingerprint of the network.
    """

    def __init__(
        self,
        signatures: SignatureSet,
        ref_stable_count: int,
        extra_criteria: Sequence[Criterion] = (),
        stable_cap: int = DEFAULT_STABLE_CAP,
        method: str = "auto",
    ):
        self.signatures = signatures
        self.ref_stable_count = int(ref_stable_count)
        self.extra_criteria = tuple(extra_criteria)
        self.stable_cap = stable_cap
        self.method = method
        self._memo: dict = {}
        self._lock = threading.Lock()
        self.evaluations = 0

    @property
    def length(self) -> int:
        return len(self.signatures) + 2 + len(self.extra_criteria)

    def __call__(self, network: BooleanNetwork) -> ScoreVector:
        return self.score(network)

    def score(self, network: BooleanNetwork) -> ScoreVector:
        key = network.fingerprint()
        with self._lock:
            hit = self._memo.get(key)
        if hit is not None:
            return hit
        result = self._score(network, self._stable(network))
        with self._lock:
            self._memo[key] = result
            self.evaluations += 1
        return result

    def _stable(self, network: BooleanNetwork) -> StableStateSet:
        missing = set(self.signatures.biomarkers) - set(network.variables)
        if missing:
            raise ContractViolation(f"biomarkers {sorted(missing)} are not network variables")
        found = stable_states(network, self.stable_cap, self.method)
        if found.truncated:
            raise ScoringError(f"more than {self.stable_cap} stable states")
        return found

    def _score(self, network: BooleanNetwork, omega: StableStateSet) -> ScoreVector:
        cols = [network.index(b) for b in self.signatures.biomarkers]
        if len(omega):
            restricted = omega.as_array()[:, cols]
            per_sig = tuple(
                int((restricted != np.array(sig, dtype=np.uint8)).sum(axis=1).min())
                for sig in self.signatures.signatures
            )
        else:
            # no stable state: worse than any attainable distance
            per_sig = (len(cols) + 1,) * len(self.signatures)
        monotony = sum(0 if f.is_monotone() else 1 for f in network.functions.values())
        gap = abs(len(omega) - self.ref_stable_count)
        extra = tuple(int(c(network, omega)) for c in self.extra_criteria)
        return ScoreVector(per_sig, monotony, gap, extra)

    def score_substitutions(self, network: BooleanNetwork, variable: str, formulas: Sequence) -> list:
        """Scores of ``network`` with ``variable``'s formula replaced by each
        of ``formulas``; a :class:`ScoringError` instance marks a failure.

        Fixed points of the other variables are shared across formulas, so
        for small networks each substitution costs one vectorized mask.
        """
        out: list = []
        shared = None
        if self.method in ("auto", "exhaustive") and len(network) <= 16:
            shared = np.ones(1 << len(network), dtype=bool)
            for v in network.variables:
                if v != variable:
                    shared &= fixpoint_mask(network.functions[v], network.variables, v)
        for f in formulas:
            candidate = network.replace(variable, f)
            key = candidate.fingerprint()
            with self._lock:
                hit = self._memo.get(key)
            if hit is not None:
                out.append(hit)
                continue
            try:
                if shared is None:
                    result = self._score(candidate, self._stable(candidate))
                else:
                    mask = shared & fixpoint_mask(f, network.variables, variable)
                    idx = np.flatnonzero(mask)
                    if len(idx) > self.stable_cap:
                        raise ScoringError(f"more than {self.stable_cap} stable states")
                    bits = state_bits(len(network))[idx]
                    omega = StableStateSet(network.variables, tuple(map(tuple, bits.tolist())))
                    result = self._score(candidate, omega)
            except ScoringError as err:
                out.append(err)
                continue
            with self._lock:
                self._memo[key] = result
                self.evaluations += 1
            out.append(result)
        return out
