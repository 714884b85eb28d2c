"""Monte Carlo ground truth on U(nd)."""

from .unitary_sim import (
    HermitianIncrement,
    MomentEstimate,
    ScanResult,
    SimConfig,
    convergence_scan,
    estimate_combination,
    estimate_moment,
    estimate_moments,
    sample_increment,
    simulate_paths,
    step,
)

__all__ = [
    "SimConfig",
    "HermitianIncrement",
    "MomentEstimate",
    "ScanResult",
    "sample_increment",
    "step",
    "simulate_paths",
    "estimate_moment",
    "estimate_moments",
    "estimate_combination",
    "convergence_scan",
]
