"""Cavity parameters, scaling conventions, and dB helpers.

All spectral quantities in this package are dimensionless, scaled to the
total cavity amplitude decay rate k_tot = k1 + k2.  With that convention a
cavity whose transmission resonance has a Lorentzian full width at half
maximum of ``linewidth_fwhm_hz`` (in Hz) has k_tot = pi * linewidth_fwhm_hz,
and a demodulation frequency f (Hz) maps to the scaled sideband frequency
Omega = 2*pi*f / k_tot = 2*f / linewidth_fwhm_hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

C_VACUUM = 299792458.0
"""Speed of light in vacuum, m/s (exact)."""

# Pump amplitudes this close to threshold are outside the model's validity.
ALPHA_MAX = 0.99


@dataclass(frozen=True)
class PhysicalCavity:
    """Measurable description of the optical resonator.

    Parameters
    ----------
    linewidth_fwhm_hz : float
        Full width at half maximum of the cavity resonance, Hz.
    output_coupler_transmission : float
        Power transmission T of the output coupler, as a fraction.
    round_trip_loss : float
        Residual intracavity power loss L per round trip, as a fraction.
    free_spectral_range_hz : float, optional
        Free spectral range, Hz.  Informational only.
    """

    linewidth_fwhm_hz: float
    output_coupler_transmission: float
    round_trip_loss: float
    free_spectral_range_hz: float | None = None

    def __post_init__(self) -> None:
        if not self.linewidth_fwhm_hz > 0.0:
            raise ValueError("cavity linewidth must be positive")
        t = self.output_coupler_transmission
        loss = self.round_trip_loss
        if not 0.0 < t < 1.0:
            raise ValueError("output coupler transmission must lie in (0, 1)")
        if not 0.0 <= loss < 1.0:
            raise ValueError("round trip loss must lie in [0, 1)")
        if not t + loss < 1.0:
            raise ValueError("transmission plus loss must stay below 1")
        if self.free_spectral_range_hz is not None and self.free_spectral_range_hz <= 0.0:
            raise ValueError("free spectral range must be positive")

    @property
    def k_tot(self) -> float:
        """Total amplitude decay rate k1 + k2 in 1/s."""
        return math.pi * self.linewidth_fwhm_hz

    @property
    def escape_efficiency(self) -> float:
        """Fraction of the intracavity decay leaving through the coupler, T/(T+L)."""
        t = self.output_coupler_transmission
        return t / (t + self.round_trip_loss)


@dataclass(frozen=True)
class ScaledOpoParams:
    """Dimensionless OPO description plus the physical rate scale.

    Parameters
    ----------
    eta : float
        Escape efficiency k1/(k1+k2), in (0, 1].
    alpha_mag : float
        Pump amplitude |alpha| scaled so threshold sits at 1.
    pump_phase : float
        Pump phase phi in radians.  Only the combination
        2*theta - phi is observable; phi defaults to 0.
    eta_det : float
        Total detection efficiency applied outside the cavity, in (0, 1].
    k_tot : float
        Total amplitude decay rate, 1/s.  Converts Hz to scaled units.
    """

    eta: float
    alpha_mag: float
    pump_phase: float = 0.0
    eta_det: float = 1.0
    k_tot: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("escape efficiency must lie in (0, 1]")
        if not 0.0 <= self.alpha_mag <= ALPHA_MAX:
            raise ValueError(
                f"pump amplitude {self.alpha_mag!r} is at or above threshold; "
                f"require 0 <= |alpha| <= {ALPHA_MAX}"
            )
        if not 0.0 < self.eta_det <= 1.0:
            raise ValueError("detection efficiency must lie in (0, 1]")
        if not self.k_tot > 0.0:
            raise ValueError("k_tot must be positive")

    @property
    def alpha(self) -> complex:
        """Complex pump amplitude alpha = |alpha| * exp(i*phi)."""
        return self.alpha_mag * complex(math.cos(self.pump_phase), math.sin(self.pump_phase))


def scale_params(
    cavity: PhysicalCavity,
    alpha_mag: float,
    pump_phase: float = 0.0,
    eta_det: float = 1.0,
) -> ScaledOpoParams:
    """Convert a physical cavity plus pump and detection data to scaled form.

    Parameters
    ----------
    cavity : PhysicalCavity
    alpha_mag : float
        Pump amplitude relative to threshold, in [0, 0.99].
    pump_phase : float
        Pump phase in radians.
    eta_det : float
        Total detection efficiency (homodyne visibility squared times
        detector quantum efficiency); escape efficiency is handled
        separately through ``eta``.

    Returns
    -------
    ScaledOpoParams
    """
    return ScaledOpoParams(
        eta=cavity.escape_efficiency,
        alpha_mag=alpha_mag,
        pump_phase=pump_phase,
        eta_det=eta_det,
        k_tot=cavity.k_tot,
    )


def demod_to_scaled(demod_freq_hz: float, k_tot: float) -> float:
    """Scaled sideband frequency Omega = 2*pi*f/k_tot for a demodulation frequency in Hz."""
    if demod_freq_hz < 0.0:
        raise ValueError("demodulation frequency must be nonnegative")
    if k_tot <= 0.0:
        raise ValueError("k_tot must be positive")
    return 2.0 * math.pi * demod_freq_hz / k_tot


def detection_efficiency(homodyne_visibility: float, quantum_efficiency: float) -> float:
    """Total detection efficiency: visibility enters squared, QE linearly."""
    if not 0.0 < homodyne_visibility <= 1.0:
        raise ValueError("homodyne visibility must lie in (0, 1]")
    if not 0.0 < quantum_efficiency <= 1.0:
        raise ValueError("quantum efficiency must lie in (0, 1]")
    return homodyne_visibility**2 * quantum_efficiency


def linear_to_db(linear):
    """Noise power relative to shot noise, in dB.  Accepts scalars or arrays."""
    arr = np.asarray(linear, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("linear power must be positive to convert to dB")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


def db_to_linear(db):
    """Inverse of :func:`linear_to_db`; exact round trip."""
    out = np.power(10.0, np.asarray(db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out
