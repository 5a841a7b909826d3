"""Synthesis of Boolean networks from partial observations.

Pipeline: complete the truth table of each variable from Boolean profiles
and declared regulations (all SAT models), minimize every completion to a
DNF, then search the product of the resulting pools for a network whose
stable states match the biomarker signatures.
"""

from .benchmark import network_distance, truth_distance
from .dynamics import StableStateSet, stable_states
from .estimators import BooleanNetworkSynthesizer, LocalFormulaInference, check_profiles, check_states
from .exceptions import (
    BoolSynthError,
    ContractViolation,
    ConvergenceError,
    InconsistentProfiles,
    InfeasibleInference,
    ParseError,
    ScoringError,
    SearchConfigError,
)
from .formula import Formula
from .inference import BooleanProfileSet, FormulaPool, RegulatorSpec, infer_formulas, infer_pools
from .io import parse_graph, parse_network, parse_profiles, parse_signatures, serialize_network
from .minimize import minimize_dnf
from .network import BooleanNetwork, SignedInteractionGraph
from .objective import Objective, ScoreVector, SignatureSet, pareto_leq
from .sat import CnfProblem, enumerate_models, solve
from .search import SearchConfig, SearchResult, TabuSearch, eigenvector_centrality

__all__ = [
    "network_distance",
    "truth_distance",
    "StableStateSet",
    "stable_states",
    "BooleanNetworkSynthesizer",
    "LocalFormulaInference",
    "check_profiles",
    "check_states",
    "BoolSynthError",
    "ContractViolation",
    "ConvergenceError",
    "InconsistentProfiles",
    "InfeasibleInference",
    "ParseError",
    "ScoringError",
    "SearchConfigError",
    "Formula",
    "BooleanProfileSet",
    "FormulaPool",
    "RegulatorSpec",
    "infer_formulas",
    "infer_pools",
    "parse_graph",
    "parse_network",
    "parse_profiles",
    "parse_signatures",
    "serialize_network",
    "minimize_dnf",
    "BooleanNetwork",
    "SignedInteractionGraph",
    "Objective",
    "ScoreVector",
    "SignatureSet",
    "pareto_leq",
    "CnfProblem",
    "enumerate_models",
    "solve",
    "SearchConfig",
    "SearchResult",
    "TabuSearch",
    "eigenvector_centrality",
]

__version__ = "0.1.0"
