"""Simulation of general multivariate gamma Levy processes with a Dickman small-jump approximation."""
from .dickman import DickmanSpec
from .errors import DomainError
from .large_jumps import (
    GmgdSpec,
    LargeJumpLaw,
    build_large_jump_law,
    k_epsilon,
    mgd_spec,
    study_preset_spec,
    sample_large_jump,
    sample_large_jump_path,
)
from .paths import PathSkeleton
from .process import SimulationConfig, evaluate_path, sample_path
from .radial import acceptance_rate, sample_radial
from .special import ell, upper_gamma_zero
from .spectral import SpectralMeasure, sample_direction, total_mass, uniform_circle
from .validation import (
    MomentReport,
    analytic_moments,
    analytic_moments_study,
    compare_drop_small_jumps,
    convergence_check,
    ks_statistic,
    moment_study,
)

__version__ = "0.1.0"
