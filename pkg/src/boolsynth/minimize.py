"""Two-level minimization of complete truth tables.

Prime implicants come from Quine-McCluskey merging; the cover is an exact
minimum (fewest terms, then fewest literals) found by branch and bound with
essential-prime and dominance reductions.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exceptions import ContractViolation
from .formula import Formula

logger = logging.getLogger(__name__)

MAX_EXACT_ARITY = 10

# A cube is (value, free): ``free`` marks don't-care bit positions and
# ``value`` holds the fixed bits (zero at free positions). Bit r-1-i
# belongs to the i-th variable.


def prime_implicants(onset: Sequence[int], r: int, dontcare: Sequence[int] = ()) -> list[tuple[int, int]]:
    """All prime implicants of the function with the given minterms."""
    current = {(m, 0) for m in set(onset) | set(dontcare)}
    primes: set[tuple[int, int]] = set()
    while current:
        merged_into: set[tuple[int, int]] = set()
        used: set[tuple[int, int]] = set()
        for value, free in current:
            for b in range(r):
                bit = 1 << b
                if free & bit or value & bit:
                    continue
                partner = (value | bit, free)
                if partner in current:
                    used.add((value, free))
                    used.add(partner)
                    merged_into.add((value, free | bit))
        primes |= current - used
        current = merged_into
    dc = set(dontcare)
    # implicants covering only don't-cares are useless for the cover
    return sorted(p for p in primes if any(m not in dc for m in _minterms(p, r)))


def _minterms(cube: tuple[int, int], r: int) -> list[int]:
    value, free = cube
    bits = [1 << b for b in range(r) if free & (1 << b)]
    out = []
    for k in range(1 << len(bits)):
        m = value
        for j, bit in enumerate(bits):
            if k >> j & 1:
                m |= bit
        out.append(m)
    return out


def _literal_count(cube: tuple[int, int], r: int) -> int:
    return r - bin(cube[1]).count("1")


def minimum_cover(onset: Sequence[int], primes: list[tuple[int, int]], r: int, max_nodes: int = 2_000) -> list[tuple[int, int]]:
    """Smallest set of primes covering ``onset``; ties broken by literal
    count.

    Branch and bound handles the usual small cyclic cores; when it needs
    more than ``max_nodes`` nodes the same problem is handed to an integer
    program, which stays exact on the large cores of 9-10 input tables.
    """
    onset = sorted(set(onset))
    if not onset:
        return []
    pos = {m: i for i, m in enumerate(onset)}
    masks = []
    for p in primes:
        mask = 0
        for m in _minterms(p, r):
            if m in pos:
                mask |= 1 << pos[m]
        masks.append(mask)
    lits = [_literal_count(p, r) for p in primes]
    full = (1 << len(onset)) - 1

    best = _greedy(full, masks, lits)
    best_cost = (len(best), sum(lits[i] for i in best))
    nodes = 0

    def covering(bit: int, alive: list[int]) -> list[int]:
        return [i for i in alive if masks[i] & bit]

    def lower_bound(uncovered: int, alive: list[int]) -> int:
        # minterms pairwise sharing no prime each need their own term
        lb = 0
        blocked = 0
        rest = uncovered
        while rest:
            low = rest & -rest
            rest ^= low
            if low & blocked:
                continue
            lb += 1
            for i in alive:
                if masks[i] & low:
                    blocked |= masks[i]
        return lb

    def search(uncovered: int, alive: list[int], chosen: list[int], nlits: int) -> None:
        nonlocal best, best_cost, nodes
        nodes += 1
        if nodes > max_nodes:
            return
        # essential primes
        while uncovered:
            forced = None
            rest = uncovered
            while rest:
                low = rest & -rest
                rest ^= low
                cov = covering(low, alive)
                if not cov:
                    return
                if len(cov) == 1:
                    forced = cov[0]
                    break
            if forced is None:
                break
            chosen = chosen + [forced]
            nlits += lits[forced]
            uncovered &= ~masks[forced]
            alive = [i for i in alive if i != forced and masks[i] & uncovered]
        if not uncovered:
            cost = (len(chosen), nlits)
            if cost < best_cost:
                best, best_cost = chosen, cost
            return
        # drop primes dominated on the uncovered part by a cheaper-or-equal one
        alive = _undominated(alive, masks, lits, uncovered)
        lb = lower_bound(uncovered, alive)
        # every further term adds at least one literal
        if (len(chosen) + lb, nlits + lb) >= best_cost:
            return
        # branch on the minterm with fewest covering primes
        rest = uncovered
        pick_cov = None
        while rest:
            low = rest & -rest
            rest ^= low
            cov = covering(low, alive)
            if pick_cov is None or len(cov) < len(pick_cov):
                pick_cov = cov
        pick_cov.sort(key=lambda i: (-bin(masks[i] & uncovered).count("1"), lits[i], i))
        for i in pick_cov:
            remaining = [j for j in alive if j != i and masks[j] & uncovered & ~masks[i]]
            search(uncovered & ~masks[i], remaining, chosen + [i], nlits + lits[i])

    search(full, [i for i in range(len(primes)) if masks[i]], [], 0)
    if nodes > max_nodes:
        logger.debug("cover search exceeded %d nodes, solving as an integer program", max_nodes)
        best = _cover_ilp(len(onset), masks, lits)
    return [primes[i] for i in sorted(best, key=lambda i: primes[i])]


def _undominated(alive: list[int], masks: list[int], lits: list[int], uncovered: int) -> list[int]:
    keep = []
    for i in alive:
        mi = masks[i] & uncovered
        dominated = False
        for j in alive:
            if j == i:
                continue
            mj = masks[j] & uncovered
            if mi & ~mj == 0 and lits[j] <= lits[i] and (mj != mi or lits[j] < lits[i] or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    return keep


def _cover_ilp(n_rows: int, masks: list[int], lits: list[int]) -> list[int]:
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    A = lil_matrix((n_rows, len(masks)))
    for j, mask in enumerate(masks):
        while mask:
            low = mask & -mask
            A[low.bit_length() - 1, j] = 1
            mask ^= low
    # a term outweighs every possible literal total
    weight = sum(lits) + 1
    cost = np.array([weight + l for l in lits], dtype=float)
    res = milp(
        cost,
        constraints=LinearConstraint(A.tocsr(), lb=1, ub=np.inf),
        integrality=np.ones(len(masks)),
        bounds=Bounds(0, 1),
    )
    if not res.success:
        raise RuntimeError(f"cover integer program failed: {res.message}")
    return [j for j in range(len(masks)) if res.x[j] > 0.5]


def _greedy(full: int, masks: list[int], lits: list[int]) -> list[int]:
    chosen = []
    uncovered = full
    while uncovered:
        i = max(range(len(masks)), key=lambda k: (bin(masks[k] & uncovered).count("1"), -lits[k], -k))
        chosen.append(i)
        uncovered &= ~masks[i]
    return chosen


def minimize_dnf(table, support: Sequence[str]) -> Formula:
    """Minimum DNF of a complete truth table over ``support``.

    ``table[k]`` is the output for the input whose bits spell ``k`` with
    ``support[0]`` as the leading bit.
    """
    support = tuple(support)
    arr = np.asarray(table).astype(np.int8).ravel()
    r = len(support)
    if arr.size != 1 << r:
        raise ContractViolation(f"table of length {arr.size} does not match {r} variables")
    if ((arr != 0) & (arr != 1)).any():
        raise ContractViolation("table must be complete (0/1 outputs only)")
    return _minimize_cached(np.packbits(arr.astype(np.uint8)).tobytes(), r, support)


@lru_cache(maxsize=65536)
def _minimize_cached(packed: bytes, r: int, support: tuple) -> Formula:
    arr = np.unpackbits(np.frombuffer(packed, dtype=np.uint8))[: 1 << r]
    onset = [int(k) for k in np.flatnonzero(arr)]
    if not onset:
        return Formula.constant(False, support)
    if len(onset) == 1 << r:
        return Formula.constant(True, support)
    if r > MAX_EXACT_ARITY:
        logger.warning("minimizing a %d-input table; cover search may be slow", r)
    primes = prime_implicants(onset, r)
    cover = minimum_cover(onset, primes, r)
    terms = []
    for value, free in cover:
        term = []
        for i, name in enumerate(support):
            bit = 1 << (r - 1 - i)
            if not free & bit:
                term.append((name, bool(value & bit)))
        terms.append(term)
    return Formula.from_terms(terms, support)
