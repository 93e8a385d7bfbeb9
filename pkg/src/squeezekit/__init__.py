"""Squeezing spectra of a sub-threshold OPO under slow pump-frequency drift.

Core pieces: detuned input-output coefficients and noise spectra
(:mod:`squeezekit.opo`), averaging over a drifting-detuning lineshape
(:mod:`squeezekit.drift`), group-delay budgets (:mod:`squeezekit.pathdelay`),
delay-scan fitting (:mod:`squeezekit.fitting`), and a CLI plus HTTP service
front end (:mod:`squeezekit.cli`, :mod:`squeezekit.api`).
"""

__version__ = "0.1.0"

from .drift import (
    AveragedValue,
    DelayOptimum,
    DelaySetting,
    SqueezeTrace,
    averaged_spectrum,
    averaged_spectrum_fixed,
    delay_scan,
    find_optimal_delay,
)
from .fitting import (
    FitConfig,
    FitResult,
    MeasuredScan,
    fit_model,
    load_scan_csv,
    normalize_to_shot,
    subtract_electronic_noise,
)
from .lineshape import LaserLineshape, lineshape_density
from .opo import (
    BogoliubovCoeffs,
    alpha_for_target_squeezing,
    bogoliubov_coeffs,
    compensation_length,
    optimal_phase,
    spectrum_closed,
    spectrum_oracle,
)
from .params import (
    C_VACUUM,
    PhysicalCavity,
    ScaledOpoParams,
    db_to_linear,
    demod_to_scaled,
    detection_efficiency,
    linear_to_db,
    scale_params,
)
from .pathdelay import (
    DelayLedger,
    PathElement,
    element_delay,
    relative_delay,
    white_light_length,
)

__all__ = [
    "AveragedValue",
    "BogoliubovCoeffs",
    "C_VACUUM",
    "DelayLedger",
    "DelayOptimum",
    "DelaySetting",
    "FitConfig",
    "FitResult",
    "LaserLineshape",
    "MeasuredScan",
    "PathElement",
    "PhysicalCavity",
    "ScaledOpoParams",
    "SqueezeTrace",
    "alpha_for_target_squeezing",
    "averaged_spectrum",
    "averaged_spectrum_fixed",
    "bogoliubov_coeffs",
    "compensation_length",
    "db_to_linear",
    "delay_scan",
    "demod_to_scaled",
    "detection_efficiency",
    "element_delay",
    "find_optimal_delay",
    "fit_model",
    "linear_to_db",
    "lineshape_density",
    "load_scan_csv",
    "normalize_to_shot",
    "optimal_phase",
    "relative_delay",
    "scale_params",
    "spectrum_closed",
    "spectrum_oracle",
    "subtract_electronic_noise",
    "white_light_length",
]
