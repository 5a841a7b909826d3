import math
import random

import numpy as np
import pytest

from boolsynth.exceptions import ContractViolation, SearchConfigError
from boolsynth.formula import Formula
from boolsynth.io import parse_network
from boolsynth.network import Arc, SignedInteractionGraph
from boolsynth.objective import Objective, SignatureSet
from boolsynth.search import (
    CentralityRanking,
    SearchConfig,
    TabuSearch,
    _election_key,
    best_local_move,
    eigenvector_centrality,
    initial_network,
    roulette_select,
    run,
)

from conftest import tenure_violations


def graph(nodes, arcs):
    return SignedInteractionGraph(tuple(nodes), frozenset(Arc(s, t, 1) for s, t in arcs))


def test_centrality_symmetric_graphs_uniform():
    nodes = "abcd"
    complete = graph(nodes, [(s, t) for s in nodes for t in nodes if s != t])
    cycle = graph(nodes, [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    for g in (complete, cycle):
        assert np.allclose(list(eigenvector_centrality(g).scores.values()), 0.25, atol=1e-12)


def test_centrality_star_matches_dense_eigenvector():
    nodes = ["h", "l1", "l2", "l3", "l4"]
    g = graph(nodes, [("h", l) for l in nodes[1:]])
    got = np.array([eigenvector_centrality(g)[v] for v in nodes])
    M = 0.85 * g.adjacency() + 0.15 / 5
    w, V = np.linalg.eig(M)
    v = np.real(V[:, np.argmax(np.real(w))])
    v = v / v.sum()
    assert np.abs(got - v).max() < 1e-8
    assert eigenvector_centrality(g).ranked()[0] == "h"


def test_centrality_sums_to_one_on_random_graphs():
    rng = random.Random(0)
    for _ in range(20):
        nodes = [f"n{i}" for i in range(rng.randint(1, 10))]
        arcs = [(s, t) for s in nodes for t in nodes if rng.random() < 0.3]
        c = eigenvector_centrality(graph(nodes, arcs))
        assert math.isclose(sum(c.scores.values()), 1.0) and min(c.scores.values()) > 0


def test_roulette_uniform_and_weighted():
    rng = np.random.default_rng(0)
    trials = 100_000
    uniform = CentralityRanking({"a": 0.25, "b": 0.25, "c": 0.25, "d": 0.25})
    counts = {v: 0 for v in "abcd"}
    for _ in range(trials):
        counts[roulette_select(uniform, (), 1, rng)[0]] += 1
    sd = math.sqrt(trials * 0.25 * 0.75)
    assert all(abs(c - trials / 4) < 3 * sd for c in counts.values())

    weighted = CentralityRanking({"a": 0.5, "b": 0.3, "c": 0.2})
    counts = {v: 0 for v in "abc"}
    for _ in range(trials):
        counts[roulette_select(weighted, (), 2, rng)[0]] += 1
    for v, p in (("a", 0.5), ("b", 0.3), ("c", 0.2)):
        assert abs(counts[v] - trials * p) < 3 * math.sqrt(trials * p * (1 - p))


def test_roulette_exclusion_and_shortfall():
    rng = np.random.default_rng(1)
    r = CentralityRanking({"a": 0.6, "b": 0.3, "c": 0.1})
    for _ in range(200):
        got = roulette_select(r, {"a"}, 5, rng)
        assert sorted(got) == ["b", "c"]
    with pytest.raises(ContractViolation):
        roulette_select(r, {"a", "b", "c"}, 1, rng)


TOY = parse_network("a = b\nb = a\nc = a & b\n")
TOY_POOLS = {
    "a": [Formula.parse("b"), Formula.parse("!b"), Formula.parse("b & c")],
    "b": [Formula.parse("a"), Formula.parse("a | c")],
    "c": [Formula.parse("a & b"), Formula.parse("a | b"), Formula.parse("!a")],
}
TOY_OBJ = SignatureSet(("a", "c"), [(1, 0), (0, 0)])


def test_best_local_move_matches_exhaustive_scoring():
    obj = Objective(TOY_OBJ, 2)
    for freq in ({}, {"a": 2, "b": 1}):
        move = best_local_move(TOY, ["a", "b", "c"], TOY_POOLS, obj, freq)
        options = []
        for v in TOY.variables:
            for f in TOY_POOLS[v]:
                if f != TOY.functions[v]:
                    s = Objective(TOY_OBJ, 2, method="sat")(TOY.replace(v, f)).values
                    options.append(((False, s, freq.get(v, 0), TOY.index(v)), v, s))
        key, v, s = min(options, key=lambda o: o[0])
        assert (move.variable, move.score.values) == (v, s)


def test_identity_move_when_pool_is_singleton():
    obj = Objective(TOY_OBJ, 2)
    move = best_local_move(TOY, ["a"], {"a": [TOY.functions["a"]]}, obj)
    assert move.identity and move.formula == TOY.functions["a"] and move.score == obj(TOY)


def test_zero_vector_formula_elected():
    target = parse_network("a = !b\nb = !a\n")
    sigs = SignatureSet(("a",), [(1,), (0,)])
    obj = Objective(sigs, 2)
    pools = {"a": [Formula.parse("b"), Formula.parse("!b")], "b": [Formula.parse("!a")]}
    start = target.replace("a", Formula.parse("b"))
    move = best_local_move(start, ["a", "b"], pools, obj)
    assert move.variable == "a" and all(x == 0 for x in move.score)


def test_already_optimal_returns_immediately():
    net = parse_network("a = !b\nb = !a\n")
    res = run(net, {"a": [net.functions["a"]], "b": [net.functions["b"]]}, Objective(SignatureSet(("a",), [(1,), (0,)]), 2))
    assert res.iterations == 0 and res.optimal and res.halted == "optimal"


def search_instance():
    truth = parse_network("a = !b\nb = !a & c\nc = c | a\nd = a & !c\n")
    pools = {
        "a": [Formula.parse("b"), Formula.parse("!b"), Formula.parse("b & !d")],
        "b": [Formula.parse("a & c"), Formula.parse("!a & c"), Formula.parse("!a")],
        "c": [Formula.parse("c & a"), Formula.parse("c | a")],
        "d": [Formula.parse("a & !c"), Formula.parse("a | c")],
    }
    sigs = SignatureSet(("a", "b"), [(1, 0), (0, 1)])
    return truth, pools, sigs


def test_search_finds_optimum_and_respects_tenure():
    truth, pools, sigs = search_instance()
    obj = Objective(sigs, 2)
    assert all(x == 0 for x in obj(truth))
    cfg = SearchConfig(num_candidates=2, rng_seed=3)
    res = TabuSearch(pools, obj, cfg).run()
    assert res.optimal and res.iterations > 0
    assert tenure_violations(res.trace, cfg.tenure_for(4)) == []
    assert not any(x > y for x, y in zip(res.score, res.initial_score))


def test_every_visited_network_is_an_assembly():
    truth, pools, sigs = search_instance()
    res = TabuSearch(pools, Objective(sigs, 5), SearchConfig(failure_bound=15, rng_seed=1)).run()
    for row in res.trace:
        if row.variable:
            assert any(str(f) == row.formula for f in pools[row.variable])
    for v, f in res.network.functions.items():
        assert f in pools[v]


def test_unattainable_objective_halts_at_failure_bound():
    truth, pools, sigs = search_instance()
    obj = Objective(sigs, 2, extra_criteria=[lambda net, omega: 1])
    res = TabuSearch(pools, obj, SearchConfig(failure_bound=17, rng_seed=0)).run()
    assert res.halted == "failure_bound"
    assert res.trace[-1].failures == 17
    last_improved = max([r.iteration for r in res.trace if r.improved], default=0)
    assert res.iterations == last_improved + 17


def test_determinism():
    truth, pools, sigs = search_instance()
    a = TabuSearch(pools, Objective(sigs, 5), SearchConfig(failure_bound=20, rng_seed=9)).run()
    b = TabuSearch(pools, Objective(sigs, 5), SearchConfig(failure_bound=20, rng_seed=9)).run()
    assert [r.as_row() for r in a.trace] == [r.as_row() for r in b.trace]


def test_initial_network_smallest():
    net = initial_network(["a", "b"], {"a": [Formula.parse("b | c & d"), Formula.parse("b")], "b": [Formula.parse("a")]})
    assert str(net.functions["a"]) == "b"


def test_config_validation():
    with pytest.raises(SearchConfigError):
        SearchConfig(num_candidates=0)
    with pytest.raises(SearchConfigError):
        SearchConfig(failure_bound=0)
    with pytest.raises(SearchConfigError):
        SearchConfig(tabu_tenure=-1)
    with pytest.raises(SearchConfigError):
        TabuSearch({"a": []}, Objective(SignatureSet((), ()), 1))
    assert SearchConfig().tenure_for(7) == 4 and SearchConfig(tabu_tenure=2).tenure_for(7) == 2


def test_election_key_prefers_real_moves():
    obj = Objective(TOY_OBJ, 2)
    m1 = best_local_move(TOY, ["a"], {"a": [TOY.functions["a"]]}, obj)
    m2 = best_local_move(TOY, ["b"], TOY_POOLS, obj)
    assert _election_key(m2, TOY, {}) < _election_key(m1, TOY, {})
