"""Sub-threshold OPO sideband coefficients and quadrature noise spectra.

The steady-state intracavity field of a degenerate parametric oscillator
below threshold maps input vacuum modes linearly onto the output field.
For a cavity with escape efficiency eta, pump amplitude alpha (threshold at
|alpha| = 1) and pump-cavity detuning dlt (both sidebands shifted by the
same amount), the output annihilation operator at scaled sideband
frequency omg mixes the two input ports at +omg and -omg:

    b_out(omg) = [a1 v1 + a2 v2 + c1 u1' + c2 u2'] / b

where v are input annihilation operators at +omg, u' are creation
operators at -omg, and port 1 is the output coupler, port 2 the loss
channel.  Everything downstream (noise spectra, optimal phase, dispersion
compensation) follows from these five coefficients.

Two independent evaluations of the homodyne noise spectrum are provided:

* :func:`spectrum_oracle` assembles the quadrature operator directly from
  the coefficients at both sidebands and sums vacuum correlators.  It is
  the reference implementation; slow path, no algebraic shortcuts.
* :func:`spectrum_closed` evaluates the simplified closed form.  Its
  cosine coefficient is validated against the oracle by the test suite.

All functions broadcast over numpy arrays in omg, dlt and phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import ScaledOpoParams, C_VACUUM, db_to_linear


@dataclass(frozen=True)
class BogoliubovCoeffs:
    """The five linear input-output coefficients at one sideband frequency.

    At alpha = 0 the cavity is passive: c1 = c2 = 0 and
    |a1|**2 + |a2|**2 = |b|**2.
    """

    a1: complex
    a2: complex
    c1: complex
    c2: complex
    b: complex


def _coeff_arrays(eta: float, alpha: complex, omg, dlt):
    """Raw coefficient arrays; broadcasts over omg and dlt."""
    omg = np.asarray(omg, dtype=float)
    dlt = np.asarray(dlt, dtype=float)
    amag2 = abs(alpha) ** 2
    root = math.sqrt(eta * (1.0 - eta))
    a1 = eta**2 - (1.0 - eta - 1j * omg) ** 2 + dlt * (2j * eta - dlt) + amag2
    a2 = 2.0 * root * (1j * (-omg + dlt) + 1.0)
    c1 = 2.0 * eta * alpha * np.ones_like(a1)
    c2 = 2.0 * alpha * root * np.ones_like(a1)
    b = (1.0 - 1j * omg) ** 2 + dlt**2 - amag2
    return a1, a2, c1, c2, b


def bogoliubov_coeffs(p: ScaledOpoParams, omg: float, dlt: float) -> BogoliubovCoeffs:
    """Evaluate the input-output coefficients at one sideband.

    Parameters
    ----------
    p : ScaledOpoParams
    omg : float
        Scaled sideband frequency Omega (may be negative for the lower
        sideband).
    dlt : float
        Scaled pump-cavity detuning.

    Returns
    -------
    BogoliubovCoeffs
    """
    a1, a2, c1, c2, b = _coeff_arrays(p.eta, p.alpha, omg, dlt)
    return BogoliubovCoeffs(
        a1=complex(a1), a2=complex(a2), c1=complex(c1), c2=complex(c2), b=complex(b)
    )


def spectrum_oracle(p: ScaledOpoParams, omg, dlt, theta):
    """Homodyne noise spectrum assembled directly from vacuum correlators.

    The measured quadrature at local-oscillator phase theta mixes the
    output field at the upper sideband with its conjugate at the lower
    sideband.  Collecting the coefficients of the four independent input
    vacuum operators and summing their symmetrized correlators gives the
    noise power relative to shot noise; detection efficiency mixes in
    plain vacuum:  S_det = 1 + eta_det * (S_ideal - 1).

    Parameters
    ----------
    p : ScaledOpoParams
    omg : array_like
        Scaled demodulation frequency, >= 0.
    dlt : array_like
        Scaled pump-cavity detuning.
    theta : array_like
        Local-oscillator phase in radians.

    Returns
    -------
    float or ndarray
        Linear noise power relative to shot noise.
    """
    omg = np.asarray(omg, dtype=float)
    dlt = np.asarray(dlt, dtype=float)
    theta = np.asarray(theta, dtype=float)

    a1p, a2p, c1p, c2p, bp = _coeff_arrays(p.eta, p.alpha, omg, dlt)
    a1m, a2m, c1m, c2m, bm = _coeff_arrays(p.eta, p.alpha, -omg, dlt)

    em = np.exp(-1j * theta)
    ep = np.exp(1j * theta)

    f1 = em * a1p / bp + ep * np.conj(c1m / bm)
    f2 = em * a2p / bp + ep * np.conj(c2m / bm)
    g1 = em * c1p / bp + ep * np.conj(a1m / bm)
    g2 = em * c2p / bp + ep * np.conj(a2m / bm)

    s_ideal = 0.5 * (
        np.abs(f1) ** 2 + np.abs(f2) ** 2 + np.abs(g1) ** 2 + np.abs(g2) ** 2
    )
    out = 1.0 + p.eta_det * (s_ideal - 1.0)
    return float(out) if out.ndim == 0 else out


def spectrum_closed(p: ScaledOpoParams, omg, dlt, total_phase):
    """Closed-form homodyne noise spectrum.

    Evaluates

        S_ideal = 1 + (8 eta / |b|**2)
                  * (|alpha|**2 + (kcos/2) |alpha| cos(psi) + dlt |alpha| sin(psi))

    with kcos = 1 + omg**2 - dlt**2 + |alpha|**2 and psi the total phase
    argument (2*theta - pump_phase plus any delay-line contribution).  The
    expression is kept multiplied out so the |alpha| -> 0 limit needs no
    division by |alpha|.  Detection efficiency as in the oracle.

    Parameters
    ----------
    p : ScaledOpoParams
    omg, dlt : array_like
        Scaled demodulation frequency and detuning.
    total_phase : array_like
        Total phase argument psi in radians.

    Returns
    -------
    float or ndarray
        Linear noise power relative to shot noise.
    """
    omg = np.asarray(omg, dtype=float)
    dlt = np.asarray(dlt, dtype=float)
    psi = np.asarray(total_phase, dtype=float)

    amag = p.alpha_mag
    b = (1.0 - 1j * omg) ** 2 + dlt**2 - amag**2
    babs2 = np.abs(b) ** 2
    kcos = 1.0 + omg**2 - dlt**2 + amag**2
    bracket = amag**2 + 0.5 * kcos * amag * np.cos(psi) + dlt * amag * np.sin(psi)
    s_ideal = 1.0 + 8.0 * p.eta * bracket / babs2
    out = 1.0 + p.eta_det * (s_ideal - 1.0)
    return float(out) if out.ndim == 0 else out


def optimal_phase(p: ScaledOpoParams, omg, dlt):
    """Total phase argument (branch near pi) that minimizes the spectrum.

    The extremum condition of the closed form gives
    tan(psi) = 2*dlt / (1 + omg**2 - dlt**2 + |alpha|**2); the minimizing
    branch sits at pi plus that angle.

    Returns
    -------
    float or ndarray
        Phase in radians, in (0, 2*pi].
    """
    omg = np.asarray(omg, dtype=float)
    dlt = np.asarray(dlt, dtype=float)
    kcos = 1.0 + omg**2 - dlt**2 + p.alpha_mag**2
    out = math.pi + np.arctan2(2.0 * dlt, kcos)
    return float(out) if out.ndim == 0 else out


def compensation_length(p: ScaledOpoParams, omg, group_index: float):
    """Local-oscillator delay length that cancels first-order drift dispersion.

    A drifting pump detuning rotates the optimal homodyne phase at a rate
    set by the cavity dispersion at the demodulation sideband.  Delaying
    the local oscillator by

        l = c / (n_g * k_tot * (1 + omg**2 + |alpha|**2))

    of fiber with group index n_g makes the locked phase track that
    rotation to first order.

    Parameters
    ----------
    p : ScaledOpoParams
    omg : array_like
        Scaled demodulation frequency.
    group_index : float
        Group index of the delay fiber, >= 1.

    Returns
    -------
    float or ndarray
        Length in meters.
    """
    if group_index < 1.0:
        raise ValueError("group index must be >= 1")
    omg = np.asarray(omg, dtype=float)
    out = C_VACUUM / (group_index * p.k_tot * (1.0 + omg**2 + p.alpha_mag**2))
    return float(out) if out.ndim == 0 else out


def alpha_for_target_squeezing(
    target_db: float,
    omg: float,
    eta: float,
    eta_det: float,
    tol: float = 1e-12,
) -> float:
    """Pump amplitude whose best detected on-resonance squeezing hits a target.

    The detected minimum at zero detuning,
    S = 1 - 4*eta*eta_det*|alpha| / ((1+|alpha|)**2 + omg**2),
    decreases monotonically in |alpha| on [0, 1), so plain bisection
    applies.

    Parameters
    ----------
    target_db : float
        Desired squeezing level in dB (negative).
    omg : float
        Scaled demodulation frequency.
    eta, eta_det : float
        Escape and detection efficiencies.
    tol : float
        Absolute bisection tolerance on |alpha|.

    Returns
    -------
    float
        Pump amplitude in (0, 1).

    Raises
    ------
    ValueError
        If the target is below the reachable floor for these efficiencies.
    """
    target_lin = db_to_linear(target_db)

    def detected(amag: float) -> float:
        return 1.0 - 4.0 * eta * eta_det * amag / ((1.0 + amag) ** 2 + omg**2)

    lo, hi = 0.0, 1.0 - 1e-12
    if detected(hi) > target_lin:
        raise ValueError(
            f"target {target_db} dB is unreachable: floor is "
            f"{10.0 * math.log10(detected(hi)):.3f} dB at threshold"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if detected(mid) > target_lin:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
