import random

import numpy as np
import pytest

from boolsynth.dynamics import async_successors, is_stable, stable_states
from boolsynth.exceptions import ContractViolation
from boolsynth.formula import Formula
from boolsynth.io import parse_network
from boolsynth.network import Arc, BooleanNetwork, derive_interactions

from conftest import brute_stable_states, random_network

TOGGLE = parse_network("a = !b\nb = !a\n")


def test_toggle_switch():
    for method in ("sat", "exhaustive"):
        assert stable_states(TOGGLE, method=method).states == ((0, 1), (1, 0))


def test_async_successors_include_self_loops():
    succ = async_successors(TOGGLE, (0, 0))
    assert succ == [("a", (1, 0)), ("b", (0, 1))]
    assert all(s == (0, 1) for _, s in async_successors(TOGGLE, (0, 1)))
    assert is_stable(TOGGLE, (0, 1)) and not is_stable(TOGGLE, (1, 1))


def test_random_networks_sat_and_scan_agree_with_brute_force():
    rng = random.Random(4)
    for _ in range(60):
        net = random_network(rng, rng.randint(1, 8))
        truth = sorted(brute_stable_states(net))
        assert list(stable_states(net, method="sat").states) == truth
        assert list(stable_states(net, method="exhaustive").states) == truth


def test_cap_truncates():
    net = parse_network("a = a\nb = b\nc = c\n")
    got = stable_states(net, cap=3, method="sat")
    assert len(got) == 3 and got.truncated
    got = stable_states(net, cap=3, method="exhaustive")
    assert len(got) == 3 and got.truncated


def test_interaction_signs():
    net = parse_network("a = b & !c\nb = a\nc = (a & !b) | (!a & b)\n")
    g = derive_interactions(net)
    assert Arc("b", "a", 1) in g.arcs and Arc("c", "a", -1) in g.arcs
    assert Arc("a", "c", 0) in g.arcs and Arc("b", "c", 0) in g.arcs
    assert not net.is_monotone()


def test_fictitious_variable_has_no_arc():
    net = BooleanNetwork(("a", "b"), {"a": Formula.parse("b | (b & a)"), "b": Formula.parse("a")})
    assert {(x.source, x.target) for x in net.interaction_graph().arcs} == {("b", "a"), ("a", "b")}


def test_network_contracts():
    with pytest.raises(ContractViolation):
        BooleanNetwork(("a",), {"a": Formula.parse("b")})
    with pytest.raises(ContractViolation):
        TOGGLE.as_mapping((0,))


def test_synchronous_step():
    assert TOGGLE.step((0, 0)) == (1, 1)
    assert TOGGLE.step(np.array([1, 0])) == (1, 0)
