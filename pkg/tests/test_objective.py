import random

import pytest

from boolsynth.exceptions import ContractViolation, ScoringError
from boolsynth.formula import Formula
from boolsynth.io import parse_network
from boolsynth.objective import Objective, Order, ScoreVector, SignatureSet, is_optimal, pareto_leq, pareto_minimal

from conftest import brute_stable_states, random_network


def brute_score(net, sigs, ref):
    omega = brute_stable_states(net)
    cols = [net.variables.index(b) for b in sigs.biomarkers]
    per = []
    for sig in sigs.signatures:
        if omega:
            per.append(min(sum(s[c] != v for c, v in zip(cols, sig)) for s in omega))
        else:
            per.append(len(cols) + 1)
    mono = sum(not f.is_monotone() for f in net.functions.values())
    return (*per, mono, abs(len(omega) - ref))


def test_score_matches_brute_force():
    rng = random.Random(0)
    for _ in range(80):
        net = random_network(rng, rng.randint(2, 7))
        bm = rng.sample(net.variables, rng.randint(1, len(net)))
        sigs = SignatureSet(tuple(bm), [tuple(rng.randint(0, 1) for _ in bm) for _ in range(rng.randint(1, 3))])
        ref = rng.randint(0, 3)
        for method in ("sat", "exhaustive"):
            assert Objective(sigs, ref, method=method)(net).values == brute_score(net, sigs, ref)


def test_substitution_scores_match_direct_scores():
    rng = random.Random(1)
    for _ in range(30):
        net = random_network(rng, 5)
        sigs = SignatureSet(net.variables[:2], [(0, 1), (1, 1)])
        v = net.variables[2]
        cands = [Formula.parse(t) for t in ("v0", "!v1", "v0 & v3", "v4 | !v0", "1")]
        obj = Objective(sigs, 2)
        fast = obj.score_substitutions(net, v, cands)
        fresh = Objective(sigs, 2, method="sat")
        assert [s.values for s in fast] == [fresh(net.replace(v, f)).values for f in cands]


def test_empty_omega_worst_distance():
    net = parse_network("a = !a\nb = b\n")
    vec = Objective(SignatureSet(("a", "b"), [(0, 0)]), 1)(net)
    assert vec.values == (3, 0, 1)


def test_extra_criteria_appended():
    net = parse_network("a = b\nb = a\n")
    obj = Objective(SignatureSet(("a",), [(1,)]), 2, extra_criteria=[lambda n, om: 7])
    assert obj(net).values == (0, 0, 0, 7)
    assert obj.length == 4


def test_cap_raises_scoring_error():
    net = parse_network("a = a\nb = b\n")
    with pytest.raises(ScoringError):
        Objective(SignatureSet(("a",), [(1,)]), 1, stable_cap=2)(net)


def test_unknown_biomarker():
    with pytest.raises(ContractViolation):
        Objective(SignatureSet(("z",), [(1,)]), 1)(parse_network("a = a\n"))


def test_memo_hits():
    net = parse_network("a = b\nb = a\n")
    obj = Objective(SignatureSet(("a",), [(1,)]), 2)
    obj(net)
    obj(parse_network("a = b\nb = a\n"))
    assert obj.evaluations == 1


def test_pareto_order():
    assert pareto_leq((0, 1), (1, 1)) is Order.LESS
    assert pareto_leq((1, 1), (1, 1)) is Order.EQUAL
    assert pareto_leq((2, 0), (1, 1)) is Order.INCOMPARABLE
    assert pareto_leq((2, 1), (1, 1)) is Order.GREATER
    with pytest.raises(ContractViolation):
        pareto_leq((1,), (1, 2))


def test_pareto_minimal_brute():
    rng = random.Random(2)
    for _ in range(100):
        vs = [tuple(rng.randint(0, 3) for _ in range(3)) for _ in range(rng.randint(1, 8))]
        expected = [i for i, v in enumerate(vs) if not any(all(a <= b for a, b in zip(w, v)) and w != v for w in vs)]
        assert pareto_minimal(vs) == expected


def test_signature_dedup_and_shape():
    s = SignatureSet(("a", "b"), [(1, 0), (1, 0), (0, 0)])
    assert len(s) == 2
    with pytest.raises(ContractViolation):
        SignatureSet(("a",), [(1, 0)])


def test_score_vector_text():
    v = ScoreVector((0, 1), 0, 2)
    assert str(v) == "0;1;0;2" and not is_optimal(v) and is_optimal(ScoreVector((0,), 0, 0))
