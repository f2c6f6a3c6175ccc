"""Agent-based C2C marketplace simulator running EigenTrust against fraud threat models."""

from c2ctrust.agents import THREAT_MODELS, Quality, Role, ThreatModelSpec, threat_model
from c2ctrust.analysis import (
    DynamicsThresholds,
    DynamicsVerdict,
    Shape,
    classify_dynamics,
    detect_oscillation,
    trend_slope,
    windowed_variance,
)
from c2ctrust.network import Roster, TradeGraph, assign_roles, ensure_attacker_adjacency, generate_k_out_graph
from c2ctrust.simulation import SimConfig, SimulationResult, TrustTimeSeries, cohort_means, run_simulation
from c2ctrust.trust_core import RatingLedger, compute_global_trust, local_trust_matrix, record_rating

__version__ = "0.1.0"

__all__ = [
    "THREAT_MODELS",
    "DynamicsThresholds",
    "DynamicsVerdict",
    "Quality",
    "RatingLedger",
    "Role",
    "Roster",
    "Shape",
    "SimConfig",
    "SimulationResult",
    "ThreatModelSpec",
    "TradeGraph",
    "TrustTimeSeries",
    "assign_roles",
    "classify_dynamics",
    "cohort_means",
    "compute_global_trust",
    "detect_oscillation",
    "ensure_attacker_adjacency",
    "generate_k_out_graph",
    "local_trust_matrix",
    "record_rating",
    "run_simulation",
    "threat_model",
    "trend_slope",
    "windowed_variance",
]
