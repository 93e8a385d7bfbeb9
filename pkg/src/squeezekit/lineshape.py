"""Detuning distributions for a slowly drifting pump laser.

The pump-cavity detuning wanders slowly compared with the cavity
relaxation, so each instant sees a steady state at a fixed detuning and
the observed spectrum is the instantaneous spectrum averaged over the
detuning density rho.  Supported densities: a delta (no drift), a
Gaussian, and a Lorentzian, each specified by a FWHM in Hz and converted
to scaled units via dlt_fwhm = 2*pi*fwhm/k_tot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("delta", "gaussian", "lorentzian")

# FWHM = 2*sqrt(2*ln 2) * sigma for a Gaussian.
FWHM_PER_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))

# Integration windows, in units of sigma / of gamma.
GAUSSIAN_SIGMA_SPAN = 8.0
LORENTZIAN_GAMMA_SPAN = 200.0


@dataclass(frozen=True)
class LaserLineshape:
    """Spectral density of the pump-cavity detuning.

    Parameters
    ----------
    kind : str
        One of "delta", "gaussian", "lorentzian".
    fwhm_hz : float
        Full width at half maximum in Hz; must be 0 for "delta" and
        positive otherwise.
    """

    kind: str
    fwhm_hz: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown lineshape kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "delta":
            if self.fwhm_hz != 0.0:
                raise ValueError("delta lineshape must have fwhm_hz = 0")
        elif not self.fwhm_hz > 0.0:
            raise ValueError(f"{self.kind} lineshape needs a positive fwhm_hz")

    def scaled_fwhm(self, k_tot: float) -> float:
        """FWHM in scaled detuning units."""
        if k_tot <= 0.0:
            raise ValueError("k_tot must be positive")
        return 2.0 * math.pi * self.fwhm_hz / k_tot


def lineshape_density(shape: LaserLineshape, dlt, k_tot: float):
    """Probability density of the scaled detuning.

    Parameters
    ----------
    shape : LaserLineshape
        Must not be the delta shape (a point mass has no density; callers
        handle it by direct evaluation).
    dlt : array_like
        Scaled detuning values.
    k_tot : float
        Rate scale converting the Hz FWHM.

    Returns
    -------
    float or ndarray
        Density per unit scaled detuning; integrates to 1.
    """
    if shape.kind == "delta":
        raise ValueError("the delta lineshape is a point mass; evaluate directly at dlt = 0")
    dlt = np.asarray(dlt, dtype=float)
    width = shape.scaled_fwhm(k_tot)
    if shape.kind == "gaussian":
        sigma = width / FWHM_PER_SIGMA
        out = np.exp(-(dlt**2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
    else:
        gamma = 0.5 * width
        out = (gamma / math.pi) / (dlt**2 + gamma**2)
    return float(out) if out.ndim == 0 else out


def integration_domain(shape: LaserLineshape, k_tot: float) -> tuple[float, float]:
    """Symmetric truncation window covering all but a bounded tail."""
    width = shape.scaled_fwhm(k_tot)
    if shape.kind == "gaussian":
        half = GAUSSIAN_SIGMA_SPAN * width / FWHM_PER_SIGMA
    elif shape.kind == "lorentzian":
        half = LORENTZIAN_GAMMA_SPAN * 0.5 * width
    else:
        raise ValueError("the delta lineshape has no integration domain")
    return -half, half


def tail_mass(shape: LaserLineshape) -> float:
    """Probability mass outside :func:`integration_domain`."""
    if shape.kind == "gaussian":
        return math.erfc(GAUSSIAN_SIGMA_SPAN / math.sqrt(2.0))
    if shape.kind == "lorentzian":
        return 1.0 - (2.0 / math.pi) * math.atan(LORENTZIAN_GAMMA_SPAN)
    return 0.0
