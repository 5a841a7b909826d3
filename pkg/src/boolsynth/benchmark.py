"""Distances between networks and the synthesis benchmark protocol."""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .dynamics import stable_states
from .exceptions import BoolSynthError, ContractViolation
from .formula import Formula
from .inference import BooleanProfileSet, FormulaPool, RegulatorSpec, infer_formulas, infer_pools, regulator_specs_from_network, truth_table_rows
from .network import BooleanNetwork
from .objective import Objective, SignatureSet
from .search import SearchConfig, TabuSearch, eigenvector_centrality

logger = logging.getLogger(__name__)

RESULT_FIELDS = (
    "profile_pct", "signature_pct", "trial", "distance", "score",
    "iterations", "model_space_log10", "seconds", "status",
)


def truth_distance(f: Formula, g: Formula) -> float:
    """Fraction of input patterns on which ``f`` and ``g`` disagree."""
    if set(f.support) != set(g.support):
        raise ContractViolation(f"supports differ: {f.support} vs {g.support}")
    order = f.support
    return float(np.mean(f.truth_table(order) != g.truth_table(order)))


def network_distance(a: BooleanNetwork, b: BooleanNetwork) -> float:
    if set(a.variables) != set(b.variables):
        raise ContractViolation("networks have different variables")
    return float(np.mean([truth_distance(a.functions[v], b.functions[v]) for v in a.variables]))


def percent_count(fraction: float, total: int) -> int:
    """``round(fraction * total)`` rounding halves up, at least one."""
    return max(1, math.floor(fraction * total + 0.5))


def _check_fraction(fraction: float, allow_zero: bool = False) -> None:
    lo_ok = fraction >= 0 if allow_zero else fraction > 0
    if not (lo_ok and fraction <= 1):
        raise ContractViolation(f"fraction {fraction} outside {'[0' if allow_zero else '(0'}, 1]")


def reference_specs(reference: BooleanNetwork) -> list[RegulatorSpec]:
    specs = regulator_specs_from_network(reference)
    for s in specs:
        if s.target in s.names:
            raise ContractViolation(f"self-regulation of {s.target!r} is not supported by profile sampling")
    return specs


def sample_profiles(reference: BooleanNetwork, fraction: float, rng: np.random.Generator) -> dict[str, BooleanProfileSet]:
    """Per target, a random subset of its reference truth-table rows.

    Variables have different regulator counts, so each target gets its own
    profile set over ``regulators + (target,)``.
    """
    _check_fraction(fraction)
    out = {}
    for spec in reference_specs(reference):
        r = len(spec)
        k = percent_count(fraction, 1 << r)
        idx = sorted(rng.choice(1 << r, size=k, replace=False).tolist())
        rows = truth_table_rows(reference.functions[spec.target], spec.names, idx)
        out[spec.target] = BooleanProfileSet((*spec.names, spec.target), tuple((*p, o) for p, o in rows))
    return out


def select_biomarkers(reference: BooleanNetwork, fraction: float, method: str = "auto") -> SignatureSet:
    """Most central variables of the reference, restricted stable states as
    signatures."""
    _check_fraction(fraction)
    omega = stable_states(reference, method=method)
    if not len(omega):
        raise BoolSynthError("reference has no stable state, no signature can be derived")
    ranked = eigenvector_centrality(reference.interaction_graph()).ranked()
    chosen = ranked[: percent_count(fraction, len(reference))]
    return SignatureSet.from_stable_states(omega, chosen)


def reference_pools(reference: BooleanNetwork, pools: Mapping[str, FormulaPool]) -> dict[str, list[Formula]]:
    """Pools for every variable; variables without regulators keep their
    reference formula."""
    return {v: list(pools[v].formulas) if v in pools else [reference.functions[v]] for v in reference.variables}


def model_space_log10(pools: Mapping[str, Sequence]) -> float:
    return float(sum(math.log10(len(p)) for p in pools.values() if len(p)))


def random_network(reference: BooleanNetwork, pools: Mapping[str, Sequence[Formula]], rng: np.random.Generator) -> BooleanNetwork:
    return BooleanNetwork(
        reference.variables, {v: pools[v][int(rng.integers(len(pools[v])))] for v in reference.variables}
    )


def load_reference(name: str) -> BooleanNetwork:
    from .io import parse_network

    return parse_network(resources.files("boolsynth.data").joinpath(name).read_text())


def reference_names() -> list[str]:
    return sorted(p.name for p in resources.files("boolsynth.data").iterdir() if p.name.endswith(".txt"))


@dataclass
class BenchmarkPlan:
    reference: BooleanNetwork
    profile_percents: list
    signature_percents: list
    trials: int = 10
    seed: int = 0
    search: SearchConfig = field(default_factory=SearchConfig)
    n_jobs: int = 1

    def __post_init__(self):
        for p in self.profile_percents:
            _check_fraction(p)
        for s in self.signature_percents:
            _check_fraction(s, allow_zero=True)
        if self.trials < 1:
            raise ContractViolation("trials must be >= 1")

    def cells(self) -> list[tuple[int, int, int]]:
        return [
            (pi, si, t)
            for pi in range(len(self.profile_percents))
            for si in range(len(self.signature_percents))
            for t in range(self.trials)
        ]


@dataclass(frozen=True)
class BenchmarkRecord:
    profile_pct: float
    signature_pct: float
    trial: int
    distance: float
    score: str
    iterations: int
    model_space_log10: float
    seconds: float
    status: str

    def as_row(self) -> list[str]:
        return [
            f"{self.profile_pct:g}", f"{self.signature_pct:g}", str(self.trial),
            "" if math.isnan(self.distance) else f"{self.distance:.6f}", self.score,
            str(self.iterations), f"{self.model_space_log10:.4f}", f"{self.seconds:.3f}", self.status,
        ]


def run_trial(plan: BenchmarkPlan, pi: int, si: int, trial: int) -> BenchmarkRecord:
    """One cell trial.

    Profiles and the random starting network depend only on (seed, profile
    cell, trial), so every signature cell of a trial starts from the same
    data; a signature fraction of 0 reports that starting network as is.
    """
    p, s = plan.profile_percents[pi], plan.signature_percents[si]
    ref = plan.reference
    t0 = time.perf_counter()
    try:
        data_rng = np.random.default_rng([plan.seed, pi, trial])
        profiles = sample_profiles(ref, p, data_rng)
        specs = reference_specs(ref)
        inferred = infer_pools(profiles, specs, cap=plan.search.max_formulas)
        empty = [v for v, pool in inferred.items() if not len(pool)]
        if empty:
            raise BoolSynthError(f"no consistent formula for {empty}")
        pools = reference_pools(ref, inferred)
        space = model_space_log10(pools)
        start = random_network(ref, pools, data_rng)
        omega_count = len(stable_states(ref, method="auto"))
        if s == 0:
            objective = Objective(SignatureSet((), ()), omega_count)
            net, score, iterations = start, objective(start), 0
        else:
            objective = Objective(select_biomarkers(ref, s), omega_count)
            cfg = dataclasses.replace(plan.search, rng_seed=_search_seed(plan.seed, pi, si, trial))
            result = TabuSearch(pools, objective, cfg).run(start)
            net, score, iterations = result.network, result.score, result.iterations
        return BenchmarkRecord(
            p, s, trial, network_distance(net, ref), str(score), iterations, space,
            time.perf_counter() - t0, "ok",
        )
    except BoolSynthError as err:
        logger.warning("trial %s/%s/%d failed: %s", p, s, trial, err)
        return BenchmarkRecord(p, s, trial, float("nan"), "", 0, float("nan"), time.perf_counter() - t0, f"error: {err}")


def _search_seed(seed: int, pi: int, si: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, pi, si, trial]).generate_state(1)[0])


def run_benchmark(plan: BenchmarkPlan, out=None) -> list[BenchmarkRecord]:
    """Run every (profile, signature, trial) cell.

    ``out`` is a path or text stream; records are written as soon as they
    are available.
    """
    fh, close = None, False
    if isinstance(out, (str, Path)):
        fh, close = open(out, "w", newline=""), True
    elif out is not None:
        fh = out
    writer = csv.writer(fh, lineterminator="\n") if fh is not None else None
    if writer:
        writer.writerow(RESULT_FIELDS)
    records = []

    def emit(rec):
        records.append(rec)
        if writer:
            writer.writerow(rec.as_row())
            fh.flush()

    try:
        cells = plan.cells()
        if plan.n_jobs <= 1:
            for c in cells:
                emit(run_trial(plan, *c))
        else:
            from concurrent.futures import ProcessPoolExecutor, as_completed

            with ProcessPoolExecutor(max_workers=plan.n_jobs) as pool:
                futures = [pool.submit(run_trial, plan, *c) for c in cells]
                for f in as_completed(futures):
                    emit(f.result())
    finally:
        if close:
            fh.close()
    return sorted(records, key=lambda r: (r.profile_pct, r.signature_pct, r.trial))


def read_results(path_or_text) -> list[dict]:
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else path_or_text
    return list(csv.DictReader(text.splitlines()))


def aggregate(rows: Iterable[Mapping]) -> list[dict]:
    """Mean, min, max and standard deviation of the distance per cell."""
    cells: dict[tuple, list] = {}
    for r in rows:
        d = r["distance"]
        if d in ("", None) or (isinstance(d, float) and math.isnan(d)):
            continue
        cells.setdefault((float(r["profile_pct"]), float(r["signature_pct"])), []).append(
            (float(d), int(r["iterations"]))
        )
    out = []
    for (p, s), vals in sorted(cells.items()):
        d = np.array([v[0] for v in vals])
        out.append({
            "profile_pct": p, "signature_pct": s, "trials": len(vals),
            "distance_mean": float(d.mean()), "distance_min": float(d.min()),
            "distance_max": float(d.max()), "distance_std": float(d.std()),
            "iterations_mean": float(np.mean([v[1] for v in vals])),
        })
    return out


# four-input formulas for pool_size_experiment, all regulators signed
POOL_SIZE_FORMULAS = (
    "x2 & !x3 & x4 & !x5",
    "(x2 & x3) | (!x4 & x5)",
    "(x2 | !x3) & (x4 | x5)",
    "x2 | (!x3 & x4 & !x5)",
    "(x2 & x3) | (x3 & x4) | (x4 & !x5)",
)


def pool_size_experiment(
    formulas: Sequence[Formula],
    counts: Sequence[int],
    trials: int = 10,
    seed: int = 0,
    cap: int = 500,
) -> list[dict]:
    """Size of the inferred pool of each formula from growing sets of
    random truth-table rows, regulator signs taken from the formula.

    Within a trial the row sets are nested: each count extends the previous
    selection by rows not yet chosen.
    """
    out = []
    for fi, f in enumerate(formulas):
        signs = f.signs()
        spec = RegulatorSpec("target", tuple((v, signs.get(v) or None) for v in f.support))
        r = len(f.support)
        for count in counts:
            if not 1 <= count <= 1 << r:
                raise ContractViolation(f"row count {count} outside [1, {1 << r}]")
        for t in range(trials):
            order = np.random.default_rng([seed, fi, t]).permutation(1 << r).tolist()
            for count in counts:
                rows = truth_table_rows(f, f.support, sorted(order[:count]))
                profiles = BooleanProfileSet((*f.support, "target"), tuple((*p, o) for p, o in rows))
                pool = infer_formulas(profiles, spec, cap)
                out.append({"formula": str(f), "count": count, "trial": t, "pool_size": len(pool), "truncated": pool.truncated})
    return out
