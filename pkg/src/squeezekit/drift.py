"""Squeezing spectra averaged over a drifting pump-cavity detuning.

The homodyne phase is locked at the white-light value (pi, best squeezing
at zero detuning).  A detuning excursion dlt then sees the total phase
pi + 2 * k_tot * tau_d * dlt, where tau_d is the relative group delay of
the local-oscillator path; positive tau_d means extra local-oscillator
fiber.  The observed spectrum is the instantaneous spectrum integrated
against the detuning density.

Two evaluation paths are provided: :func:`averaged_spectrum` (adaptive
quadrature with an explicit error estimate, used wherever a single value
with an error bar is wanted) and :func:`averaged_spectrum_fixed` (a fixed
Gauss-Legendre rule vectorized over many delays at once, used inside
fitting loops; validated against the adaptive path by the test suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .lineshape import (
    FWHM_PER_SIGMA,
    LaserLineshape,
    integration_domain,
    lineshape_density,
    tail_mass,
)
from .opo import spectrum_closed
from .params import C_VACUUM, ScaledOpoParams, linear_to_db
from .quadrature import QuadratureError, gauss_legendre_nodes, integrate

LOCKED_PHASE = math.pi
"""Total phase the homodyne lock holds at zero detuning."""


class DelayScanError(RuntimeError):
    """A delay-scan point failed to converge; carries the offending delay."""


@dataclass(frozen=True)
class DelaySetting:
    """Relative group delay, local oscillator minus squeezing path.

    Positive values mean the local-oscillator path is longer than the
    white-light balance.
    """

    tau_d_s: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.tau_d_s):
            raise ValueError("delay must be finite")

    @classmethod
    def from_fiber(cls, excess_fiber_m: float, group_index: float = 1.5) -> "DelaySetting":
        """Delay produced by a length of excess fiber in the LO path."""
        if group_index < 1.0:
            raise ValueError("group index must be >= 1")
        return cls(tau_d_s=excess_fiber_m * group_index / C_VACUUM)

    def fiber_equivalent_m(self, group_index: float = 1.5) -> float:
        """Fiber length with the same group delay."""
        if group_index < 1.0:
            raise ValueError("group index must be >= 1")
        return self.tau_d_s * C_VACUUM / group_index


@dataclass(frozen=True)
class AveragedValue:
    """Drift-averaged noise power with its quadrature error estimate."""

    s_linear: float
    quad_error: float


@dataclass(frozen=True)
class SqueezeTrace:
    """Sampled noise curve against phase, frequency, or delay."""

    abscissa_name: str
    abscissa: tuple[float, ...]
    s_linear: tuple[float, ...]
    s_db: tuple[float, ...]
    quad_error: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.abscissa)


@dataclass(frozen=True)
class DelayOptimum:
    """Result of a delay optimization.

    ``interior`` is False when the minimum sits on the search boundary;
    ``flat`` marks a delay-independent curve (delta lineshape, or variation
    below the quadrature noise), in which case the reported delay is not
    meaningful.
    """

    delay: DelaySetting
    s_bar_linear: float
    quad_error: float
    fiber_excess_m: float
    interior: bool
    flat: bool


def drift_phase(k_tot: float, tau_d_s: float, dlt):
    """Total phase seen at detuning dlt with the lock held at pi."""
    return LOCKED_PHASE + 2.0 * k_tot * tau_d_s * np.asarray(dlt, dtype=float)


def _spectrum_sup(p: ScaledOpoParams, omg: float, lo: float) -> float:
    """Estimate of sup over |dlt| >= lo of the phase-maximized spectrum.

    The phase-maximized closed form depends on |dlt| only; it is sampled
    at the window edge, at the cavity-resonance detuning where |b| is
    smallest, and on a log grid toward the asymptote.
    """
    cands = [lo, *np.geomspace(lo, lo * 1e3, 50)]
    peak = math.sqrt(max(0.0, omg**2 + p.alpha_mag**2 - 1.0))
    if peak >= lo:
        cands.append(peak)
    dlt = np.asarray(cands, dtype=float)
    amag = p.alpha_mag
    babs2 = np.abs((1.0 - 1j * omg) ** 2 + dlt**2 - amag**2) ** 2
    kcos = 1.0 + omg**2 - dlt**2 + amag**2
    hyp = np.sqrt(0.25 * kcos**2 + dlt**2)
    s_ideal = 1.0 + 8.0 * p.eta * (amag**2 + amag * hyp) / babs2
    return float(1.0 + p.eta_det * (np.max(s_ideal) - 1.0))


def averaged_spectrum(
    p: ScaledOpoParams,
    omg: float,
    shape: LaserLineshape,
    delay: DelaySetting,
    rel_tol: float = 1e-8,
    max_intervals: int = 4096,
) -> AveragedValue:
    """Average the locked-phase spectrum over the detuning density.

    Parameters
    ----------
    p : ScaledOpoParams
    omg : float
        Scaled demodulation frequency.
    shape : LaserLineshape
    delay : DelaySetting
        Relative group delay entering the drift phase.
    rel_tol : float
        Relative quadrature tolerance.
    max_intervals : int
        Subdivision cap; exceeded caps raise, never return partial values.

    Returns
    -------
    AveragedValue
        The truncated-domain integral and an error estimate combining the
        quadrature error with the analytic tail bound
        (sup of S over the tail) * (tail probability mass).

    Raises
    ------
    QuadratureError
        If the quadrature does not converge within ``max_intervals``.
    """
    if shape.kind == "delta":
        return AveragedValue(
            s_linear=spectrum_closed(p, omg, 0.0, LOCKED_PHASE), quad_error=0.0
        )

    k_tot = p.k_tot
    lo, hi = integration_domain(shape, k_tot)

    def integrand(dlt):
        phase = drift_phase(k_tot, delay.tau_d_s, dlt)
        return spectrum_closed(p, omg, dlt, phase) * lineshape_density(shape, dlt, k_tot)

    res = integrate(integrand, lo, hi, rel_tol=rel_tol, max_intervals=max_intervals)
    tail = tail_mass(shape) * _spectrum_sup(p, omg, hi)
    return AveragedValue(s_linear=res.value, quad_error=res.error + tail)


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _fixed_nodes(shape: LaserLineshape, k_tot: float, tau_abs_max: float):
    """Node/weight arrays (weights include the density) for the fixed rule.

    Node counts scale with the phase swing 2*k_tot*tau*width so the
    oscillation the delay imprints on the integrand stays resolved.
    """
    lo, hi = integration_domain(shape, k_tot)
    rate = 2.0 * k_tot * tau_abs_max
    if shape.kind == "gaussian":
        span = rate * (hi - lo)
        n = max(64, int(math.ceil(0.8 * span)) + 40)
        x, w = _leggauss(n)
        nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
        weights = 0.5 * (hi - lo) * w
    elif shape.kind == "lorentzian":
        gamma = 0.5 * shape.scaled_fwhm(k_tot)
        edges = [0.0]
        e = gamma
        while e < hi:
            edges.append(min(e, hi))
            e *= 2.0
        if edges[-1] < hi:
            edges.append(hi)
        nodes_parts = []
        weight_parts = []
        for a, b in zip(edges[:-1], edges[1:]):
            span = rate * (b - a)
            n = min(200, max(24, int(math.ceil(0.8 * span)) + 24))
            xl, wl = gauss_legendre_nodes(n, a, b)
            nodes_parts.extend([xl, -xl])
            weight_parts.extend([wl, wl])
        nodes = np.concatenate(nodes_parts)
        weights = np.concatenate(weight_parts)
    else:
        raise ValueError("fixed rule applies to continuous lineshapes only")
    return nodes, weights * lineshape_density(shape, nodes, k_tot)


def averaged_spectrum_fixed(
    p: ScaledOpoParams,
    omg: float,
    shape: LaserLineshape,
    tau_ds: Sequence[float],
) -> np.ndarray:
    """Drift-averaged spectrum on a fixed rule, vectorized over delays.

    Same truncated domain as :func:`averaged_spectrum`, no error estimate;
    intended for optimization loops where the averaged spectrum is
    evaluated at many delays per step.  Agreement with the adaptive path
    is enforced by the test suite.
    """
    taus = np.asarray(tau_ds, dtype=float)
    if shape.kind == "delta":
        return np.full(taus.shape, spectrum_closed(p, omg, 0.0, LOCKED_PHASE))
    nodes, weights = _fixed_nodes(shape, p.k_tot, float(np.max(np.abs(taus))))
    # phase grid: (n_delays, n_nodes)
    phase = LOCKED_PHASE + 2.0 * p.k_tot * taus[:, None] * nodes[None, :]
    s = spectrum_closed(p, omg, nodes[None, :], phase)
    return s @ weights


def delay_scan(
    p: ScaledOpoParams,
    omg: float,
    shape: LaserLineshape,
    delays: Sequence[DelaySetting],
    rel_tol: float = 1e-8,
    max_intervals: int = 4096,
) -> SqueezeTrace:
    """Averaged spectrum at each delay, in input order.

    Raises
    ------
    DelayScanError
        If any point fails to converge; the message names the delay.
    """
    if len(delays) == 0:
        raise ValueError("delay scan needs at least one delay")
    s_lin = []
    s_db = []
    errs = []
    for d in delays:
        try:
            v = averaged_spectrum(p, omg, shape, d, rel_tol=rel_tol, max_intervals=max_intervals)
        except QuadratureError as exc:
            raise DelayScanError(
                f"averaging failed at tau_d = {d.tau_d_s:.6e} s: {exc}"
            ) from exc
        s_lin.append(v.s_linear)
        s_db.append(linear_to_db(v.s_linear))
        errs.append(v.quad_error)
    return SqueezeTrace(
        abscissa_name="tau_d_s",
        abscissa=tuple(d.tau_d_s for d in delays),
        s_linear=tuple(s_lin),
        s_db=tuple(s_db),
        quad_error=tuple(errs),
    )


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def find_optimal_delay(
    p: ScaledOpoParams,
    omg: float,
    shape: LaserLineshape,
    group_index: float = 1.5,
    window_m: tuple[float, float] = (-5.0, 60.0),
    coarse_step_m: float = 1.0,
    refine_tol_m: float = 1e-3,
    rel_tol: float = 1e-8,
    max_intervals: int = 4096,
) -> DelayOptimum:
    """Locate the delay minimizing the averaged spectrum.

    A coarse grid over ``window_m`` brackets the minimum, then
    golden-section search narrows it to ``refine_tol_m`` of equivalent
    fiber.  A minimum on the window boundary is returned with
    ``interior=False``; a curve whose variation stays within the
    quadrature error (always the case for the delta lineshape) is flagged
    ``flat`` and the reported delay is arbitrary.
    """
    if shape.kind == "delta":
        val = averaged_spectrum(p, omg, shape, DelaySetting(0.0))
        return DelayOptimum(
            delay=DelaySetting(0.0),
            s_bar_linear=val.s_linear,
            quad_error=val.quad_error,
            fiber_excess_m=0.0,
            interior=False,
            flat=True,
        )

    lo_m, hi_m = window_m
    if not hi_m > lo_m:
        raise ValueError("window must have positive width")

    def eval_at(length_m: float) -> AveragedValue:
        d = DelaySetting.from_fiber(length_m, group_index)
        return averaged_spectrum(p, omg, shape, d, rel_tol=rel_tol, max_intervals=max_intervals)

    n_pts = max(3, int(round((hi_m - lo_m) / coarse_step_m)) + 1)
    grid = np.linspace(lo_m, hi_m, n_pts)
    vals = [eval_at(length) for length in grid]
    s = np.array([v.s_linear for v in vals])
    errs = np.array([v.quad_error for v in vals])

    i_min = int(np.argmin(s))
    if float(np.max(s) - np.min(s)) <= 3.0 * float(np.max(errs)) + 1e-12:
        return DelayOptimum(
            delay=DelaySetting.from_fiber(float(grid[i_min]), group_index),
            s_bar_linear=float(s[i_min]),
            quad_error=float(errs[i_min]),
            fiber_excess_m=float(grid[i_min]),
            interior=False,
            flat=True,
        )
    if i_min == 0 or i_min == n_pts - 1:
        return DelayOptimum(
            delay=DelaySetting.from_fiber(float(grid[i_min]), group_index),
            s_bar_linear=float(s[i_min]),
            quad_error=float(errs[i_min]),
            fiber_excess_m=float(grid[i_min]),
            interior=False,
            flat=False,
        )

    # golden-section search inside the bracketing pair of grid cells
    a, b = float(grid[i_min - 1]), float(grid[i_min + 1])
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1 = eval_at(x1)
    f2 = eval_at(x2)
    while b - a > refine_tol_m:
        if f1.s_linear <= f2.s_linear:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = eval_at(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = eval_at(x2)
    best_m, best = (x1, f1) if f1.s_linear <= f2.s_linear else (x2, f2)
    return DelayOptimum(
        delay=DelaySetting.from_fiber(best_m, group_index),
        s_bar_linear=best.s_linear,
        quad_error=best.quad_error,
        fiber_excess_m=best_m,
        interior=True,
        flat=False,
    )
