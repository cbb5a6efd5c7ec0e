"""Gaussian simulation of optical-state teleportation onto a mirror's vibrational mode."""

from .dynamics import (
    Couplings,
    PhysicalParams,
    closed_form_propagator,
    couplings_from_params,
    drift_matrix,
    evolve_initial,
    nbar_from_temperature,
    propagator,
)
from .gaussian import GaussianState, make_coherent, make_thermal, make_vacuum
from .protocol import (
    MIRROR_VARIANT,
    PRINTED_VARIANT,
    SELECTED_VARIANT,
    NormalCoefficients,
    ProtocolResult,
    SignVariant,
    conditional_matrix,
    cooling_neff,
    displacement_gains,
    extract_coefficients,
    fidelity_coherent,
    fidelity_curve,
    fidelity_no_heterodyne,
    output_covariance,
    summarize_curve,
    time_in_window,
)
from .readout import ReadoutCoefficients, dominance_condition, readout_coefficients
from .trajectories import TrajectoryRecord, estimate_fidelity, mean_transport_check, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "Couplings",
    "PhysicalParams",
    "closed_form_propagator",
    "couplings_from_params",
    "drift_matrix",
    "evolve_initial",
    "nbar_from_temperature",
    "propagator",
    "GaussianState",
    "make_coherent",
    "make_thermal",
    "make_vacuum",
    "MIRROR_VARIANT",
    "PRINTED_VARIANT",
    "SELECTED_VARIANT",
    "NormalCoefficients",
    "ProtocolResult",
    "SignVariant",
    "conditional_matrix",
    "cooling_neff",
    "displacement_gains",
    "extract_coefficients",
    "fidelity_coherent",
    "fidelity_curve",
    "fidelity_no_heterodyne",
    "output_covariance",
    "summarize_curve",
    "time_in_window",
    "ReadoutCoefficients",
    "dominance_condition",
    "readout_coefficients",
    "TrajectoryRecord",
    "estimate_fidelity",
    "mean_transport_check",
    "run_trajectory",
]
