"""Simplified quantum-teleportation circuit toolkit."""

from .circuits import (
    Circuit,
    CircuitSyntaxError,
    Gate,
    GateKind,
    Metrics,
    compose,
    metrics,
    parse_circuit,
    serialize_circuit,
)
from .sim import (
    DensityMatrix,
    MessageParams,
    StateVector,
    apply_gate,
    circuit_unitary,
    fidelity,
    reduced_density,
    run,
    sample_measurements,
)
from .rewrite import builtin_rules, find_matches, apply_at, optimize, validate_rule
from .protocols import (
    PROTOCOL_IDS,
    build_simplified,
    channel_state,
    checkpoint_states,
    expand_to_original,
    get_protocol,
    verify_teleportation,
)
from .tomography import experiment_report, theoretical_density, tomograph

__all__ = [
    "Circuit",
    "CircuitSyntaxError",
    "Gate",
    "GateKind",
    "Metrics",
    "compose",
    "metrics",
    "parse_circuit",
    "serialize_circuit",
    "DensityMatrix",
    "MessageParams",
    "StateVector",
    "apply_gate",
    "circuit_unitary",
    "fidelity",
    "reduced_density",
    "run",
    "sample_measurements",
    "builtin_rules",
    "find_matches",
    "apply_at",
    "optimize",
    "validate_rule",
    "PROTOCOL_IDS",
    "build_simplified",
    "channel_state",
    "checkpoint_states",
    "expand_to_original",
    "get_protocol",
    "verify_teleportation",
    "experiment_report",
    "theoretical_density",
    "tomograph",
]

__version__ = "0.1.0"
