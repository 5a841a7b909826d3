"""Tabu search over assemblies of per-variable formula pools."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .exceptions import ContractViolation, ConvergenceError, SearchConfigError
from .formula import Formula
from .inference import FormulaPool
from .network import BooleanNetwork, SignedInteractionGraph
from .objective import Objective, Order, ScoreVector, is_optimal, pareto_leq

logger = logging.getLogger(__name__)

TELEPORT = 0.15


@dataclass(frozen=True)
class CentralityRanking:
    scores: dict

    def ranked(self) -> list[str]:
        order = {v: i for i, v in enumerate(self.scores)}
        return sorted(self.scores, key=lambda v: (-self.scores[v], order[v]))

    def __getitem__(self, v: str) -> float:
        return self.scores[v]


def eigenvector_centrality(
    graph: SignedInteractionGraph,
    tol: float = 1e-12,
    max_iter: int = 10_000,
    teleport: float = TELEPORT,
) -> CentralityRanking:
    """Influence of each node by power iteration.

    A node is influential when it regulates influential nodes, so the
    iteration follows out-arcs. A uniform teleportation mass keeps the
    matrix positive, which makes the principal vector unique and positive
    on graphs with sources and sinks. The result sums to one.
    """
    n = len(graph.nodes)
    if n == 0:
        raise ContractViolation("centrality of an empty graph")
    M = (1.0 - teleport) * graph.adjacency() + teleport / n
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        y = M @ x
        y /= y.sum()
        if np.abs(y - x).max() < tol:
            return CentralityRanking(dict(zip(graph.nodes, y.tolist())))
        x = y
    raise ConvergenceError(f"no convergence within {max_iter} iterations", last_iterate=x)


def roulette_select(ranking: CentralityRanking, excluded, k: int, rng: np.random.Generator, among: Sequence[str] | None = None) -> list[str]:
    """Draw up to ``k`` distinct variables, each draw picking ``x_i`` with
    probability ``c_i`` over the sum of the remaining available weights."""
    pool = [v for v in (among if among is not None else ranking.scores) if v not in set(excluded)]
    if not pool:
        raise ContractViolation("no variable available for selection")
    chosen = []
    weights = [ranking.scores[v] for v in pool]
    for _ in range(min(k, len(pool))):
        total = sum(weights)
        u = rng.random() * total
        acc = 0.0
        pick = len(pool) - 1
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                pick = i
                break
        chosen.append(pool.pop(pick))
        weights.pop(pick)
    return chosen


@dataclass(frozen=True)
class Move:
    variable: str
    formula: Formula
    score: ScoreVector
    identity: bool = False


def _local_best(current: BooleanNetwork, variable: str, pool: Sequence[Formula], objective: Objective) -> Move | None:
    present = current.functions[variable]
    options = [f for f in pool if f != present]
    identity = not options
    if identity:
        options = [present]
    best = None
    for pos, (f, s) in enumerate(zip(options, objective.score_substitutions(current, variable, options))):
        if not isinstance(s, ScoreVector):
            continue
        key = (s.values, pos)
        if best is None or key < best[0]:
            best = (key, Move(variable, f, s, identity))
    return None if best is None else best[1]


def best_local_move(
    current: BooleanNetwork,
    candidates: Sequence[str],
    pools: Mapping[str, Sequence[Formula]],
    objective: Objective,
    frequency: Mapping[str, int] | None = None,
) -> Move | None:
    """Best single-formula change among ``candidates``.

    Each candidate contributes its lexicographically smallest (hence
    Pareto-minimal) substitution other than its current formula; the
    current formula is kept only when the pool offers nothing else. The
    election prefers real changes, then the smallest vector, then the least
    frequently moved variable, then the lowest variable index. Returns None
    when no substitution could be scored.
    """
    frequency = frequency or {}
    moves = []
    for v in candidates:
        pool = pools[v]
        if not len(pool):
            raise ContractViolation(f"empty formula pool for {v!r}")
        m = _local_best(current, v, list(pool), objective)
        if m is not None:
            moves.append(m)
    if not moves:
        return None
    return min(moves, key=lambda m: _election_key(m, current, frequency))


def _election_key(move: Move, current: BooleanNetwork, frequency: Mapping[str, int]) -> tuple:
    return (move.identity, move.score.values, frequency.get(move.variable, 0), current.index(move.variable))


@dataclass
class SearchConfig:
    num_candidates: int = 4
    failure_bound: int = 100
    max_formulas: int = 500
    tabu_tenure: int | None = None
    rng_seed: int = 0
    diversification_period: int = 10
    aspiration: bool = True
    initial: str = "smallest"
    max_iterations: int | None = None

    def __post_init__(self):
        if self.num_candidates < 1:
            raise SearchConfigError("num_candidates must be >= 1")
        if self.failure_bound < 1:
            raise SearchConfigError("failure_bound must be >= 1")
        if self.tabu_tenure is not None and self.tabu_tenure < 0:
            raise SearchConfigError("tabu_tenure must be >= 0")
        if self.initial not in ("smallest", "random"):
            raise SearchConfigError(f"unknown initial strategy {self.initial!r}")

    def tenure_for(self, n: int) -> int:
        """Tenure for a search over ``n`` movable variables."""
        return math.ceil(n / 2) if self.tabu_tenure is None else self.tabu_tenure


@dataclass
class TabuState:
    current: BooleanNetwork
    current_score: ScoreVector
    best: BooleanNetwork
    best_score: ScoreVector
    tabu_list: dict = field(default_factory=dict)
    move_frequency: dict = field(default_factory=dict)
    iteration: int = 0
    consecutive_failures: int = 0

    def tabu(self) -> set:
        return {v for v, expiry in self.tabu_list.items() if self.iteration <= expiry}


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    candidates: tuple
    tabu: tuple
    variable: str | None
    formula: str | None
    score: str
    best: str
    improved: bool
    failures: int
    aspiration: bool = False
    relaxed: bool = False
    diversified: bool = False

    FIELDS = (
        "iteration", "candidates", "tabu", "variable", "formula", "score",
        "best", "improved", "failures", "aspiration", "relaxed", "diversified",
    )

    def as_row(self) -> list[str]:
        return [
            str(self.iteration),
            ";".join(self.candidates),
            ";".join(self.tabu),
            self.variable or "",
            self.formula or "",
            self.score,
            self.best,
            str(int(self.improved)),
            str(self.failures),
            str(int(self.aspiration)),
            str(int(self.relaxed)),
            str(int(self.diversified)),
        ]


@dataclass
class SearchResult:
    network: BooleanNetwork
    score: ScoreVector
    initial_score: ScoreVector
    trace: list
    halted: str
    seed: int

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def optimal(self) -> bool:
        return is_optimal(self.score)


def initial_network(variables: Sequence[str], pools: Mapping[str, Sequence[Formula]], strategy: str = "smallest", rng: np.random.Generator | None = None) -> BooleanNetwork:
    functions = {}
    for v in variables:
        pool = list(pools[v])
        if not pool:
            raise SearchConfigError(f"empty formula pool for {v!r}")
        if strategy == "random":
            if rng is None:
                raise SearchConfigError("random initialization needs an rng")
            functions[v] = pool[int(rng.integers(len(pool)))]
        else:
            functions[v] = min(
                enumerate(pool), key=lambda p: (len(p[1].terms), sum(len(t) for t in p[1].terms), p[0])
            )[1]
    return BooleanNetwork(tuple(variables), functions)


class TabuSearch:
    """Search the model space spanned by ``pools`` for a network whose
    score is the null vector."""

    def __init__(self, pools: Mapping[str, Sequence[Formula]], objective: Objective, config: SearchConfig | None = None):
        self.pools = {v: list(p) for v, p in pools.items()}
        self.objective = objective
        self.config = config or SearchConfig()
        for v, p in self.pools.items():
            if not p:
                raise SearchConfigError(f"empty formula pool for {v!r}")
        self._centrality: dict = {}

    def _ranking(self, network: BooleanNetwork) -> CentralityRanking:
        key = network.fingerprint()
        if key not in self._centrality:
            self._centrality[key] = eigenvector_centrality(network.interaction_graph())
        return self._centrality[key]

    def run(self, initial: BooleanNetwork | None = None) -> SearchResult:
        cfg = self.config
        rng = np.random.default_rng(cfg.rng_seed)
        if initial is None:
            missing = [v for v in self.pools if not self.pools[v]]
            if missing:
                raise SearchConfigError(f"empty pools for {missing}")
            initial = initial_network(list(self.pools), self.pools, cfg.initial, rng)
        pools = {v: self.pools.get(v, [initial.functions[v]]) for v in initial.variables}
        movable = [v for v in initial.variables if len(pools[v]) > 1 or pools[v][0] != initial.functions[v]]
        tenure = cfg.tenure_for(len(movable) or len(initial))

        score = self.objective(initial)
        state = TabuState(initial, score, initial, score)
        trace: list[TraceRow] = []
        halted = "optimal"
        while True:
            if is_optimal(state.best_score):
                halted = "optimal"
                break
            if state.consecutive_failures >= cfg.failure_bound:
                halted = "failure_bound"
                break
            if cfg.max_iterations is not None and state.iteration >= cfg.max_iterations:
                halted = "max_iterations"
                break
            state.iteration += 1
            trace.append(self._iterate(state, pools, movable, tenure, rng))
        logger.info("search halted (%s) after %d iterations, best %s", halted, state.iteration, state.best_score)
        return SearchResult(state.best, state.best_score, score, trace, halted, cfg.rng_seed)

    def _iterate(self, state: TabuState, pools, movable, tenure: int, rng) -> TraceRow:
        cfg = self.config
        variables = state.current.variables
        tabu = state.tabu()
        among = movable if movable else list(variables)
        available = [v for v in among if v not in tabu]
        relaxed = False
        if not available:
            # every movable variable is tabu: release the earliest expiring
            soonest = min(state.tabu_list[v] for v in among)
            available = [v for v in among if state.tabu_list[v] == soonest]
            relaxed = True
        diversified = bool(cfg.diversification_period) and state.iteration % cfg.diversification_period == 0
        if diversified:
            by_freq = sorted(available, key=lambda v: (state.move_frequency.get(v, 0), variables.index(v)))
            quartile = by_freq[: max(1, math.ceil(len(by_freq) / 4))]
            candidates = quartile[: cfg.num_candidates]
        else:
            ranking = self._ranking(state.current)
            candidates = roulette_select(ranking, (), cfg.num_candidates, rng, among=available)

        move = best_local_move(state.current, candidates, pools, self.objective, state.move_frequency)
        aspiration = False
        if cfg.aspiration:
            blocked = [v for v in among if v in tabu and v not in available]
            freq = state.move_frequency
            for v in blocked:
                m = best_local_move(state.current, [v], pools, self.objective, freq)
                if m is None or m.identity or pareto_leq(m.score, state.best_score) is not Order.LESS:
                    continue
                if move is None or _election_key(m, state.current, freq) < _election_key(move, state.current, freq):
                    move, aspiration = m, True

        tabu_snapshot = tuple(v for v in variables if v in tabu)
        if move is None:
            state.consecutive_failures += 1
            return TraceRow(
                state.iteration, tuple(candidates), tabu_snapshot, None, None,
                str(state.current_score), str(state.best_score), False,
                state.consecutive_failures, aspiration, relaxed, diversified,
            )
        state.current = state.current.replace(move.variable, move.formula)
        state.current_score = move.score
        state.tabu_list[move.variable] = state.iteration + tenure
        state.move_frequency[move.variable] = state.move_frequency.get(move.variable, 0) + 1
        improved = pareto_leq(move.score, state.best_score) is Order.LESS
        if improved:
            state.best, state.best_score = state.current, move.score
            state.consecutive_failures = 0
        else:
            state.consecutive_failures += 1
        return TraceRow(
            state.iteration, tuple(candidates), tabu_snapshot, move.variable, str(move.formula),
            str(move.score), str(state.best_score), improved, state.consecutive_failures,
            aspiration, relaxed, diversified,
        )


def run(
    initial: BooleanNetwork | None,
    pools: Mapping[str, Sequence[Formula] | FormulaPool],
    objective: Objective,
    config: SearchConfig | None = None,
) -> SearchResult:
    return TabuSearch(pools, objective, config).run(initial)
