import itertools
import random

import pytest

from boolsynth import expr as ex
from boolsynth.formula import Formula
from boolsynth.network import BooleanNetwork


def random_expr(rng: random.Random, names, depth=3):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.05:
            return ex.Const(rng.random() < 0.5)
        return ex.lit(rng.choice(names), rng.random() < 0.6)
    k = rng.randint(2, 3)
    parts = [random_expr(rng, names, depth - 1) for _ in range(k)]
    node = ex.And(tuple(parts)) if rng.random() < 0.5 else ex.Or(tuple(parts))
    return ex.Not(node) if rng.random() < 0.15 else node


def random_formula(rng: random.Random, names) -> Formula:
    """Formula over exactly ``names`` (unused names stay in the support)."""
    return Formula.from_expr(random_expr(rng, list(names)), support=names)


def brute_table(e, names):
    """Truth table by direct recursive evaluation, first name leading."""
    return [int(ex.evaluate(e, dict(zip(names, bits)))) for bits in itertools.product((0, 1), repeat=len(names))]


def random_network(rng: random.Random, n: int, max_in: int = 3) -> BooleanNetwork:
    names = [f"v{i}" for i in range(n)]
    fs = {}
    for v in names:
        regs = rng.sample(names, rng.randint(1, min(max_in, n)))
        fs[v] = Formula.from_expr(random_expr(rng, regs, depth=2))
    return BooleanNetwork(tuple(names), fs)


def brute_stable_states(net: BooleanNetwork):
    out = []
    for bits in itertools.product((0, 1), repeat=len(net)):
        if net.step(bits) == bits:
            out.append(bits)
    return out


@pytest.fixture
def worked_profiles():
    from boolsynth.inference import BooleanProfileSet

    return BooleanProfileSet(("x1", "x2", "x3", "x4"), ((1, 1, 0, 1), (0, 1, 1, 0), (1, 0, None, 0)))


def tenure_violations(trace, tenure):
    """Rows moving a variable still within its tenure without aspiration or
    relaxation, plus rows whose recorded tabu set disagrees with a replay."""
    expiry = {}
    bad = []
    for row in trace:
        t = row.iteration
        tabu = {v for v, e in expiry.items() if t <= e}
        if set(row.tabu) != tabu:
            bad.append((t, "tabu set", tuple(sorted(tabu)), row.tabu))
        if row.variable is not None:
            if row.variable in tabu and not (row.aspiration or row.relaxed):
                bad.append((t, "moved tabu variable", row.variable))
            expiry[row.variable] = t + tenure
    return bad
