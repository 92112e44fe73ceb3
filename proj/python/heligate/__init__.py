"""Simulation of two-qubit gates with two electrons on helium."""

from ._core import (
    ConfigError,
    ConvergenceError,
    DomainError,
    alpha,
    average_fidelity,
    builtin_voltages,
    canonical_gate,
    config_hash,
    gate_matrix,
    leakage_error,
    loss,
    optimize_rotations,
    parse_voltage_csv,
    ramp,
    spectrum,
    swap_error,
    target_gate,
    voltage_csv,
    zz_coupling,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "alpha",
    "average_fidelity",
    "builtin_voltages",
    "canonical_gate",
    "config_hash",
    "gate_matrix",
    "leakage_error",
    "loss",
    "optimize_rotations",
    "parse_voltage_csv",
    "ramp",
    "spectrum",
    "swap_error",
    "target_gate",
    "voltage_csv",
    "zz_coupling",
]
