import itertools
import random

import pytest

from boolsynth.exceptions import ContractViolation, InconsistentProfiles
from boolsynth.formula import Formula
from boolsynth.inference import (
    BooleanProfileSet,
    RegulatorSpec,
    b_name,
    build_constraints,
    infer_formulas,
    infer_from_rows,
    infer_pools,
    profiles_to_rows,
    regulator_specs_from_network,
)
from boolsynth.io import parse_network


def semantic_oracle(rows, spec, enforce_influence=True):
    """Every complete table over the regulators meeting the constraints,
    checked directly on the table."""
    r = len(spec)
    pats = list(itertools.product((0, 1), repeat=r))
    out = set()
    for bits in itertools.product((0, 1), repeat=1 << r):
        table = dict(zip(pats, bits))
        ok = all(
            any(table[c] == val for c in itertools.product(*[(0, 1) if x is None else (x,) for x in pat]))
            for pat, val in rows
        )
        signs = spec.signs
        if ok and any(s is not None for s in signs):
            ok = any(
                table[tuple(1 if s == 1 else 0 if s == -1 else b for s, b in zip(signs, beta))] == 1
                and table[tuple(0 if s == 1 else 1 if s == -1 else b for s, b in zip(signs, beta))] == 0
                for beta in pats
            )
        for i, s in enumerate(signs):
            if not ok:
                break
            diffs = [table[p[:i] + (1,) + p[i + 1 :]] - table[p] for p in pats if p[i] == 0]
            if s == 1:
                ok = min(diffs) >= 0 and max(diffs) > 0
            elif s == -1:
                ok = max(diffs) <= 0 and min(diffs) < 0
            elif enforce_influence:
                ok = any(diffs)
        if ok:
            out.add(bits)
    return out


def pool_tables(pool, names):
    return {tuple(int(b) for b in f.truth_table(names)) for f in pool.formulas}


def test_worked_example(worked_profiles):
    spec = RegulatorSpec("x1", (("x2", 1), ("x3", -1), ("x4", None)))
    pool = infer_formulas(worked_profiles, spec)
    expected = [Formula.parse(t) for t in ("(x2 & x4) | !x3", "(x2 & !x3) | (x2 & x4) | (!x3 & !x4)", "(x2 & !x3) | (!x3 & !x4)")]
    assert len(pool) == 3
    for e in expected:
        assert sum(f.equivalent(e) for f in pool.formulas) == 1
    spec_pos = RegulatorSpec("x1", (("x2", 1), ("x3", -1), ("x4", 1)))
    (only,) = infer_formulas(worked_profiles, spec_pos).formulas
    assert only.equivalent(Formula.parse("(x2 & x4) | !x3"))


def test_profiles_to_rows(worked_profiles):
    spec = RegulatorSpec("x1", (("x2", 1), ("x3", -1), ("x4", None)))
    assert profiles_to_rows(worked_profiles, spec) == [((1, 0, 1), 1), ((1, 1, 0), 0), ((0, None, 0), 1)]


def test_inconsistent_profiles():
    p = BooleanProfileSet(("t", "a"), ((1, 0), (0, 0)))
    with pytest.raises(InconsistentProfiles):
        profiles_to_rows(p, RegulatorSpec("t", (("a", 1),)))


def test_unknown_target_rows_are_dropped():
    p = BooleanProfileSet(("t", "a"), ((None, 0), (1, 1)))
    assert profiles_to_rows(p, RegulatorSpec("t", (("a", 1),))) == [((1,), 1)]


def test_missing_columns():
    p = BooleanProfileSet(("t",), ((1,),))
    with pytest.raises(ContractViolation):
        profiles_to_rows(p, RegulatorSpec("t", (("a", 1),)))


def test_pools_match_semantic_oracle():
    rng = random.Random(0)
    for _ in range(150):
        r = rng.randint(1, 3)
        names = tuple(f"r{i}" for i in range(r))
        spec = RegulatorSpec("t", tuple((n, rng.choice((1, -1, None))) for n in names))
        rows = {}
        for _ in range(rng.randint(0, 4)):
            pat = tuple(rng.choice((0, 1, None)) if rng.random() < 0.3 else rng.randint(0, 1) for _ in names)
            rows.setdefault(pat, rng.randint(0, 1))
        rows = [(p, v) for p, v in rows.items()]
        defined = {}
        if any(defined.setdefault(p, v) != v for p, v in rows if None not in p):
            continue
        for enforce in (True, False):
            pool = infer_from_rows(rows, spec, cap=1000, enforce_influence=enforce)
            assert pool_tables(pool, names) == semantic_oracle(rows, spec, enforce)
            assert (pool.diagnostic is None) == bool(len(pool))


def test_pool_formulas_respect_signs():
    rng = random.Random(1)
    for _ in range(50):
        names = ("a", "b", "c")
        spec = RegulatorSpec("t", tuple((n, rng.choice((1, -1))) for n in names))
        pool = infer_from_rows([], spec, cap=1000)
        for f in pool.formulas:
            assert f.signs(names) == dict(spec.regulators)


def test_cap_truncates():
    spec = RegulatorSpec("t", (("a", None), ("b", None), ("c", None)))
    pool = infer_from_rows([], spec, cap=5)
    assert len(pool) == 5 and pool.truncated


def test_conflicting_regulation_diagnostic():
    # a activates t but the data say t falls when a rises
    spec = RegulatorSpec("t", (("a", 1),))
    pool = infer_from_rows([((0,), 1), ((1,), 0)], spec)
    assert not len(pool)
    assert "regulations" in pool.diagnostic


def test_constraint_labels():
    spec = RegulatorSpec("x1", (("x2", 1), ("x3", -1), ("x4", None)))
    keys = build_constraints([], spec)
    assert set(keys) == {"bp", "cp", "sign:x2", "sign:x3", "exists:x4"}
    assert set(build_constraints([], spec, enforce_influence=False)) == {"bp", "cp", "sign:x2", "sign:x3"}


def test_b_name_labels():
    assert b_name(5, 3) == "b_101"


def test_regulator_specs_from_network():
    net = parse_network("a = b & !c\nb = a\nc = (a & !b) | (!a & b)\n")
    specs = {s.target: s.regulators for s in regulator_specs_from_network(net)}
    assert specs == {"a": (("b", 1), ("c", -1)), "b": (("a", 1),), "c": (("a", None), ("b", None))}


def test_infer_pools_parallel_matches_serial(worked_profiles):
    specs = [RegulatorSpec("x1", (("x2", 1), ("x3", -1), ("x4", None))), RegulatorSpec("x2", (("x3", None), ("x4", None)))]
    serial = infer_pools(worked_profiles, specs)
    parallel = infer_pools(worked_profiles, specs, n_jobs=2)
    assert {t: p.formulas for t, p in serial.items()} == {t: p.formulas for t, p in parallel.items()}
