"""Estimator wrappers in the scikit-learn style.

``LocalFormulaInference`` learns one formula pool per target from Boolean
profiles; ``BooleanNetworkSynthesizer`` adds the network search on top and
predicts synchronous successor states.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_is_fitted

from .dynamics import DEFAULT_STABLE_CAP
from .exceptions import ContractViolation, InfeasibleInference
from .formula import Formula
from .inference import BooleanProfileSet, RegulatorSpec, infer_pools
from .network import BooleanNetwork, function_values
from .objective import Objective, SignatureSet
from .search import SearchConfig, TabuSearch


def check_profiles(X, variables: Sequence[str] | None = None) -> BooleanProfileSet:
    """Coerce ``X`` to a profile set.

    Accepts a :class:`BooleanProfileSet`, a DataFrame (columns give the
    names) or a 2-D array with ``variables``. Unknown cells are ``None``,
    NaN, ``-1`` or ``"-"``.
    """
    if isinstance(X, BooleanProfileSet):
        return X
    if hasattr(X, "columns") and hasattr(X, "to_numpy"):
        variables = [str(c) for c in X.columns] if variables is None else variables
        X = X.to_numpy(dtype=object)
    arr = np.asarray(X, dtype=object)
    if arr.ndim != 2:
        raise ContractViolation(f"profiles must be 2-D, got shape {arr.shape}")
    if variables is None:
        raise ContractViolation("variable names are required for array input")
    if len(variables) != arr.shape[1]:
        raise ContractViolation(f"{len(variables)} names for {arr.shape[1]} columns")
    rows = []
    for i, raw in enumerate(arr):
        row = []
        for j, c in enumerate(raw):
            if c is None or c == "-" or (isinstance(c, float) and np.isnan(c)) or c == -1:
                row.append(None)
            elif c in (0, 1, "0", "1", True, False):
                row.append(int(c))
            else:
                raise ContractViolation(f"invalid profile cell {c!r} at row {i}, column {j}")
        rows.append(tuple(row))
    return BooleanProfileSet(tuple(variables), tuple(rows))


def check_states(X, n_features: int) -> np.ndarray:
    """Complete 0/1 states as a ``(n_samples, n_features)`` uint8 array."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != n_features:
        raise ContractViolation(f"expected states with {n_features} columns, got shape {arr.shape}")
    if not np.isin(arr, (0, 1)).all():
        raise ContractViolation("states must contain only 0 and 1")
    return arr.astype(np.uint8)


def _specs(graph) -> list[RegulatorSpec]:
    if graph is None:
        raise ContractViolation("an interaction graph is required")
    if isinstance(graph, str):
        from .io import parse_graph

        return parse_graph(graph)
    return list(graph)


class LocalFormulaInference(BaseEstimator):
    """Per-target pools of formulas consistent with the profiles and the
    declared regulations."""

    def __init__(self, graph=None, max_formulas: int = 500, enforce_influence: bool = True, n_jobs: int = 1):
        self.graph = graph
        self.max_formulas = max_formulas
        self.enforce_influence = enforce_influence
        self.n_jobs = n_jobs

    def fit(self, X, y=None, variables=None):
        """``X`` is one profile set, or a mapping target -> profile set when
        each target was observed separately."""
        if self.max_formulas < 1:
            raise ContractViolation("max_formulas must be >= 1")
        specs = _specs(self.graph)
        if isinstance(X, Mapping):
            profiles = {t: check_profiles(p) for t, p in X.items()}
            missing = [s.target for s in specs if s.target not in profiles]
            if missing:
                raise ContractViolation(f"no profiles for targets {missing}")
            if variables is None:
                targets = [s.target for s in specs]
                variables = list(dict.fromkeys(targets + [v for s in specs for v in s.names]))
        else:
            profiles = check_profiles(X, variables)
            variables = profiles.variables
        self.pools_ = infer_pools(profiles, specs, self.max_formulas, self.enforce_influence, self.n_jobs)
        self.variables_ = tuple(variables)
        self.feature_names_in_ = np.array(self.variables_, dtype=object)
        self.n_features_in_ = len(self.variables_)
        self.model_space_size_ = int(np.prod([len(p) for p in self.pools_.values()], dtype=object))
        return self

    def transform(self, X) -> np.ndarray:
        """Fraction of each target's pool that outputs 1 on each state."""
        check_is_fitted(self, "pools_")
        states = check_states(X, self.n_features_in_)
        names = tuple(self.variables_)
        out = np.zeros((len(states), len(self.pools_)))
        idx = states @ (1 << np.arange(len(names) - 1, -1, -1))
        for k, pool in enumerate(self.pools_.values()):
            if not len(pool):
                out[:, k] = np.nan
                continue
            votes = np.mean([function_values(f, names)[idx] for f in pool.formulas], axis=0)
            out[:, k] = votes
        return out

    def predict(self, X) -> np.ndarray:
        return (self.transform(X) >= 0.5).astype(np.uint8)


class BooleanNetworkSynthesizer(BaseEstimator):
    """Infer pools, then search their product for a network matching the
    signatures and the expected number of stable states."""

    def __init__(
        self,
        graph=None,
        max_formulas: int = 500,
        n_moves: int = 4,
        failure_bound: int = 100,
        tabu_tenure: int | None = None,
        max_iterations: int | None = None,
        initial: str = "smallest",
        enforce_influence: bool = True,
        stable_cap: int = DEFAULT_STABLE_CAP,
        random_state=0,
        n_jobs: int = 1,
    ):
        self.graph = graph
        self.max_formulas = max_formulas
        self.n_moves = n_moves
        self.failure_bound = failure_bound
        self.tabu_tenure = tabu_tenure
        self.max_iterations = max_iterations
        self.initial = initial
        self.enforce_influence = enforce_influence
        self.stable_cap = stable_cap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _seed(self) -> int:
        if isinstance(self.random_state, (int, np.integer)):
            return int(self.random_state)
        return int(check_random_state(self.random_state).randint(2**31 - 1))

    def fit(self, X, y=None, signatures: SignatureSet | None = None, ref_stable_count: int | None = None, variables=None):
        if signatures is None or ref_stable_count is None:
            raise ContractViolation("fit needs signatures and ref_stable_count")
        inference = LocalFormulaInference(self.graph, self.max_formulas, self.enforce_influence, self.n_jobs)
        inference.fit(X, variables=variables)
        empty = {t: p.diagnostic for t, p in inference.pools_.items() if not len(p)}
        if empty:
            raise InfeasibleInference(f"no consistent formula for {sorted(empty)}: {empty}")
        names = tuple(inference.variables_)
        pools = {v: list(inference.pools_[v].formulas) for v in names if v in inference.pools_}
        # variables nobody regulates keep their current value
        for v in names:
            if v not in pools:
                pools[v] = [Formula.from_terms([[(v, True)]])]
        self.seed_ = self._seed()
        config = SearchConfig(
            num_candidates=self.n_moves,
            failure_bound=self.failure_bound,
            max_formulas=self.max_formulas,
            tabu_tenure=self.tabu_tenure,
            rng_seed=self.seed_,
            initial=self.initial,
            max_iterations=self.max_iterations,
        )
        objective = Objective(signatures, ref_stable_count, stable_cap=self.stable_cap)
        result = TabuSearch({v: pools[v] for v in names}, objective, config).run()
        self.pools_ = inference.pools_
        self.variables_ = names
        self.feature_names_in_ = np.array(names, dtype=object)
        self.n_features_in_ = len(names)
        self.network_: BooleanNetwork = result.network
        self.score_ = result.score
        self.initial_score_ = result.initial_score
        self.trace_ = result.trace
        self.halted_ = result.halted
        self.n_iter_ = result.iterations
        return self

    def predict(self, X) -> np.ndarray:
        """Synchronous successor of each state."""
        check_is_fitted(self, "network_")
        states = check_states(X, self.n_features_in_)
        idx = states @ (1 << np.arange(self.n_features_in_ - 1, -1, -1))
        cols = [function_values(self.network_.functions[v], self.variables_)[idx] for v in self.variables_]
        return np.stack(cols, axis=1).astype(np.uint8)
