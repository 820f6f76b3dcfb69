"""Amplified intensity interferometry: closed-form laws and their oracles.

The package evaluates the correlation, noise and SNR algebra of a two-
detector intensity interferometer, plain and with optical parametric
amplifiers on the detector inputs, and verifies every closed form against
independent routes: direct summation for thermal moments, truncated
Fock-space numerics for the amplifier, a Gaussian pairing-sum engine, and
a generic substitution path for the noise polynomials.
"""

from .analysis import (
    FitResult,
    McEstimate,
    PhiEstimate,
    RatioTable,
    Spacing,
    SweepSpec,
    estimate_phi,
    fit_inverse_law,
    monte_carlo_semiclassical,
    sweep_ratios,
    target_ratio_operating_point,
)
from .errors import (
    DegenerateFitError,
    DomainError,
    FringeCoverageError,
    OpaHbtError,
    SummationLimitError,
    TruncationError,
    UnreachableTargetError,
    UnsupportedConfigurationError,
)
from .fock import (
    FockSpace,
    FockState,
    OrderingConvention,
    choose_dim,
    expm_taylor,
    hbt_two_mode_correlation,
    moment_truncation_bound,
    partial_trace,
    product_state,
    reduced_moments,
    space_for_squeezed_thermal,
    thermal_state,
    two_mode_squeeze,
    vacuum_state,
)
from .hbt import (
    ConsistencyReport,
    CorrelationReading,
    Geometry,
    SourcePair,
    UndefinedSnrWarning,
    consistency_report,
    correlation_ac,
    correlation_dc,
    correlation_full,
    correlation_reading,
    noise_avg_printed,
    noise_avg_substitution,
    noise_full,
    opa_correlation_ac,
    opa_noise_avg_printed,
    signal_ratio,
    snr,
    snr_ratio,
)
from .opa import (
    BogoliubovCoeffs,
    OpaParams,
    coeffs,
    equivalent_thermal_mean,
    propagate_moments,
)
from .oracle_checks import run_oracle_checks
from .photon_stats import (
    MomentConvention,
    MomentVector,
    ThermalSource,
    geometric_summation_moments,
    thermal_moments,
)
from .wick import GaussianSecondMoments, gaussian_wick_moment, number_moments

__version__ = "0.1.0"

__all__ = [
    "BogoliubovCoeffs",
    "ConsistencyReport",
    "CorrelationReading",
    "DegenerateFitError",
    "DomainError",
    "FitResult",
    "FockSpace",
    "FockState",
    "FringeCoverageError",
    "GaussianSecondMoments",
    "Geometry",
    "McEstimate",
    "MomentConvention",
    "MomentVector",
    "OpaHbtError",
    "OpaParams",
    "OrderingConvention",
    "PhiEstimate",
    "RatioTable",
    "SourcePair",
    "Spacing",
    "SummationLimitError",
    "SweepSpec",
    "ThermalSource",
    "TruncationError",
    "UndefinedSnrWarning",
    "UnreachableTargetError",
    "UnsupportedConfigurationError",
    "choose_dim",
    "coeffs",
    "consistency_report",
    "correlation_ac",
    "correlation_dc",
    "correlation_full",
    "correlation_reading",
    "equivalent_thermal_mean",
    "estimate_phi",
    "expm_taylor",
    "fit_inverse_law",
    "gaussian_wick_moment",
    "geometric_summation_moments",
    "hbt_two_mode_correlation",
    "moment_truncation_bound",
    "monte_carlo_semiclassical",
    "noise_avg_printed",
    "noise_avg_substitution",
    "noise_full",
    "number_moments",
    "opa_correlation_ac",
    "opa_noise_avg_printed",
    "partial_trace",
    "product_state",
    "propagate_moments",
    "reduced_moments",
    "run_oracle_checks",
    "signal_ratio",
    "snr",
    "snr_ratio",
    "space_for_squeezed_thermal",
    "sweep_ratios",
    "target_ratio_operating_point",
    "thermal_moments",
    "thermal_state",
    "two_mode_squeeze",
    "vacuum_state",
]
