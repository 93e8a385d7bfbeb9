"""Fitting measured squeezing-vs-delay scans with the drift-averaged model.

The model has one shared shape parameter, the lineshape FWHM, plus one
additive offset per demodulation frequency (technical noise relative to
the shot-noise level, in linear power units).  For a candidate FWHM the
offsets minimize a weighted least-squares objective analytically, so the
numerical search is one-dimensional: a derivative-free simplex over
log(FWHM), restarted from several log-spaced points.

Inputs are measured in dB relative to shot noise; the objective works in
linear power, where the offsets are additive and the reported standard
deviations convert via sigma_lin = sigma_db * ln(10)/10 * power.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .drift import averaged_spectrum_fixed
from .lineshape import LaserLineshape
from .params import C_VACUUM, ScaledOpoParams, db_to_linear, demod_to_scaled, linear_to_db

LN10_OVER_10 = math.log(10.0) / 10.0

CSV_COLUMNS = ("excess_fiber_m", "noise_db", "std_dev_db")


class ScanFormatError(ValueError):
    """Malformed scan data; message names the offending file and line."""


def subtract_electronic_noise(measured_db, floor_db: float):
    """Remove an additive electronic-noise floor from a dB reading.

    corrected = 10*log10(10^(measured/10) - 10^(floor/10)).  A floor of
    -inf is the identity.

    Raises
    ------
    ValueError
        If any measured value does not exceed the floor (nothing would be
        left after subtraction).
    """
    measured_db = np.asarray(measured_db, dtype=float)
    if floor_db == -math.inf:
        out = measured_db.copy()
        return float(out) if out.ndim == 0 else out
    if np.any(measured_db <= floor_db):
        raise ValueError(
            f"measured power must exceed the electronic-noise floor ({floor_db} dB)"
        )
    out = 10.0 * np.log10(np.power(10.0, measured_db / 10.0) - 10.0 ** (floor_db / 10.0))
    return float(out) if out.ndim == 0 else out


def normalize_to_shot(raw_linear, sql_linear):
    """Pointwise ratio of a raw trace to the shot-noise trace."""
    raw = np.asarray(raw_linear, dtype=float)
    sql = np.asarray(sql_linear, dtype=float)
    if raw.shape != sql.shape:
        raise ValueError("raw and shot-noise traces must have the same shape")
    if np.any(sql <= 0.0):
        raise ValueError("shot-noise trace must be strictly positive")
    out = raw / sql
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class MeasuredScan:
    """One squeezing-vs-delay scan at a fixed demodulation frequency.

    ``noise_db`` is the measured noise power relative to shot noise,
    before electronic-noise subtraction; ``electronics_floor_db`` (if
    given) is subtracted when the scan enters a fit.
    """

    demod_freq_hz: float
    excess_fiber_m: tuple[float, ...]
    noise_db: tuple[float, ...]
    std_dev_db: tuple[float, ...]
    electronics_floor_db: float | None = None
    resolution_bandwidth_hz: float | None = None
    video_bandwidth_hz: float | None = None
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "excess_fiber_m", tuple(float(v) for v in self.excess_fiber_m))
        object.__setattr__(self, "noise_db", tuple(float(v) for v in self.noise_db))
        object.__setattr__(self, "std_dev_db", tuple(float(v) for v in self.std_dev_db))
        n = len(self.excess_fiber_m)
        if n == 0:
            raise ValueError("scan must contain at least one row")
        if len(self.noise_db) != n or len(self.std_dev_db) != n:
            raise ValueError("scan columns must have equal length")
        if self.demod_freq_hz <= 0.0:
            raise ValueError("demodulation frequency must be positive")
        if any(s < 0.0 for s in self.std_dev_db):
            raise ValueError("standard deviations must be nonnegative")
        if self.electronics_floor_db is not None and min(self.noise_db) <= self.electronics_floor_db:
            raise ValueError(
                "electronic-noise floor must sit below every measured point"
            )

    def corrected_db(self) -> np.ndarray:
        """Measured dB values after electronic-noise subtraction."""
        if self.electronics_floor_db is None:
            return np.asarray(self.noise_db, dtype=float)
        return subtract_electronic_noise(np.asarray(self.noise_db), self.electronics_floor_db)


def load_scan_csv(
    path: str | Path,
    demod_freq_hz: float,
    electronics_floor_db: float | None = None,
    label: str = "",
) -> MeasuredScan:
    """Parse a scan CSV with columns excess_fiber_m, noise_db, std_dev_db.

    Raises
    ------
    ScanFormatError
        Naming the file and one-based line number of the first problem.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise ScanFormatError(f"cannot read scan file {path}: {exc}") from exc
    if not rows:
        raise ScanFormatError(f"{path}: file is empty")
    header = tuple(c.strip() for c in rows[0])
    if header != CSV_COLUMNS:
        raise ScanFormatError(
            f"{path} line 1: header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}"
        )
    fibers: list[float] = []
    noise: list[float] = []
    std: list[float] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise ScanFormatError(f"{path} line {i}: expected 3 fields, got {len(row)}")
        try:
            fibers.append(float(row[0]))
            noise.append(float(row[1]))
            std.append(float(row[2]))
        except ValueError as exc:
            raise ScanFormatError(f"{path} line {i}: non-numeric field ({exc})") from exc
    if not fibers:
        raise ScanFormatError(f"{path}: no data rows")
    return MeasuredScan(
        demod_freq_hz=demod_freq_hz,
        excess_fiber_m=tuple(fibers),
        noise_db=tuple(noise),
        std_dev_db=tuple(std),
        electronics_floor_db=electronics_floor_db,
        label=label or path.stem,
    )


@dataclass(frozen=True)
class FitConfig:
    """Search settings for :func:`fit_model`."""

    n_starts: int = 5
    fwhm_min_hz: float = 1e5
    fwhm_max_hz: float = 3e6
    fit_offsets: bool = True
    fixed_offsets: tuple[float, ...] | None = None
    max_iterations: int = 400
    group_index: float = 1.5

    def __post_init__(self) -> None:
        if self.n_starts < 1:
            raise ValueError("need at least one start")
        if not 0.0 < self.fwhm_min_hz < self.fwhm_max_hz:
            raise ValueError("fwhm bounds must satisfy 0 < min < max")
        if self.max_iterations < 10:
            raise ValueError("max_iterations too small to converge")


@dataclass(frozen=True)
class FitStart:
    """Outcome of one simplex start."""

    start_fwhm_hz: float
    fwhm_hz: float
    objective: float
    n_iterations: int
    converged: bool
    objective_history: tuple[float, ...] = ()


@dataclass(frozen=True)
class FitResult:
    """Best fit of the drift-averaged model to a set of scans."""

    lineshape_fwhm_hz: float
    offsets_linear: tuple[float, ...]
    demod_freqs_hz: tuple[float, ...]
    residual_rms_db: float
    converged: bool
    starts: tuple[FitStart, ...]
    objective: float
    fwhm_std_hz: float | None
    degenerate: bool
    n_points: int
    shape_kind: str


class _Objective:
    """Weighted least squares in linear power with profiled offsets."""

    def __init__(
        self,
        scans: Sequence[MeasuredScan],
        p: ScaledOpoParams,
        shape_kind: str,
        cfg: FitConfig,
    ):
        self.p = p
        self.shape_kind = shape_kind
        self.cfg = cfg
        self.omegas = [demod_to_scaled(s.demod_freq_hz, p.k_tot) for s in scans]
        self.taus = [
            np.asarray(s.excess_fiber_m, dtype=float) * cfg.group_index / C_VACUUM
            for s in scans
        ]
        self.y = [db_to_linear(s.corrected_db()) for s in scans]
        self.weights = []
        for s, y in zip(scans, self.y):
            std = np.asarray(s.std_dev_db, dtype=float)
            if np.all(std == 0.0):
                self.weights.append(np.ones_like(y))
            elif np.any(std <= 0.0):
                raise ValueError("std_dev_db must be positive wherever weighting is wanted")
            else:
                sigma_lin = y * LN10_OVER_10 * std
                self.weights.append(1.0 / sigma_lin**2)
        self.cache: dict[float, float] = {}

    def models(self, fwhm_hz: float) -> list[np.ndarray]:
        shape = LaserLineshape(kind=self.shape_kind, fwhm_hz=fwhm_hz)
        return [
            averaged_spectrum_fixed(self.p, omg, shape, tau)
            for omg, tau in zip(self.omegas, self.taus)
        ]

    def offsets(self, models: list[np.ndarray]) -> list[float]:
        if self.cfg.fixed_offsets is not None:
            return list(self.cfg.fixed_offsets)
        if not self.cfg.fit_offsets:
            return [0.0] * len(models)
        out = []
        for m, y, w in zip(models, self.y, self.weights):
            out.append(float(np.sum(w * (y - m)) / np.sum(w)))
        return out

    def chi2(self, fwhm_hz: float) -> float:
        models = self.models(fwhm_hz)
        offs = self.offsets(models)
        total = 0.0
        for m, o, y, w in zip(models, offs, self.y, self.weights):
            r = m + o - y
            total += float(np.sum(w * r * r))
        return total

    def __call__(self, x: np.ndarray) -> float:
        key = float(x[0])
        if key not in self.cache:
            self.cache[key] = self.chi2(math.exp(key))
        return self.cache[key]


def fit_model(
    scans: Sequence[MeasuredScan],
    p: ScaledOpoParams,
    shape_kind: str,
    cfg: FitConfig | None = None,
) -> FitResult:
    """Fit the shared lineshape FWHM and per-frequency offsets.

    Parameters
    ----------
    scans : sequence of MeasuredScan
        At least 3 points each; electronic noise is subtracted per scan
        when a floor is attached.
    p : ScaledOpoParams
        Fixed model parameters (not fitted).
    shape_kind : str
        "gaussian" or "lorentzian".
    cfg : FitConfig, optional

    Returns
    -------
    FitResult
        ``converged`` reflects the best start; a best-so-far result is
        returned even when False.  ``degenerate`` marks a FWHM pinned at a
        search bound or an objective flat in the FWHM.
    """
    cfg = cfg or FitConfig()
    if not scans:
        raise ValueError("need at least one scan")
    for s in scans:
        if len(s.excess_fiber_m) < 3:
            raise ValueError(f"scan {s.label or s.demod_freq_hz} has fewer than 3 points")
    if shape_kind not in ("gaussian", "lorentzian"):
        raise ValueError("fit lineshape must be gaussian or lorentzian")
    if cfg.fixed_offsets is not None and len(cfg.fixed_offsets) != len(scans):
        raise ValueError("fixed_offsets must match the number of scans")

    obj = _Objective(scans, p, shape_kind, cfg)
    lo, hi = math.log(cfg.fwhm_min_hz), math.log(cfg.fwhm_max_hz)
    starts = np.log(np.geomspace(cfg.fwhm_min_hz, cfg.fwhm_max_hz, cfg.n_starts))

    results: list[FitStart] = []
    best = None
    for x0 in starts:
        history: list[float] = []

        def track(xk: np.ndarray) -> None:
            key = float(xk[0])
            history.append(obj.cache.get(key, obj(xk)))

        # fatol scaled to the starting objective so the simplex is not asked
        # to resolve function spreads below floating-point noise; xatol stays
        # the binding precision criterion
        f0 = obj(np.array([x0]))
        res = minimize(
            obj,
            x0=np.array([x0]),
            method="Nelder-Mead",
            bounds=[(lo, hi)],
            callback=track,
            options={
                "xatol": 1e-7,
                "fatol": 1e-9 * (1.0 + abs(f0)),
                "maxiter": cfg.max_iterations,
                "maxfev": 4 * cfg.max_iterations,
            },
        )
        start = FitStart(
            start_fwhm_hz=math.exp(x0),
            fwhm_hz=math.exp(float(res.x[0])),
            objective=float(res.fun),
            n_iterations=int(res.nit),
            converged=bool(res.success),
            objective_history=tuple(history),
        )
        results.append(start)
        if best is None or start.objective < best.objective:
            best = start

    fwhm = best.fwhm_hz
    models = obj.models(fwhm)
    offs = obj.offsets(models)

    # residuals in dB against the corrected data
    sq_sum = 0.0
    n_points = 0
    for s, m, o in zip(scans, models, offs):
        pred = np.maximum(m + o, 1e-300)
        r = s.corrected_db() - linear_to_db(pred)
        sq_sum += float(np.sum(r * r))
        n_points += r.size
    residual_rms_db = math.sqrt(sq_sum / n_points)

    pinned = fwhm <= cfg.fwhm_min_hz * 1.005 or fwhm >= cfg.fwhm_max_hz * 0.995
    c0 = best.objective
    flat = (
        abs(obj.chi2(fwhm * 1.25) - c0) <= 1e-9 * (1.0 + abs(c0))
        and abs(obj.chi2(fwhm / 1.25) - c0) <= 1e-9 * (1.0 + abs(c0))
    )

    # 1-sigma width from the curvature of chi2 at the optimum
    fwhm_std = None
    if not pinned and not flat:
        h = fwhm * 1e-4
        d2 = (obj.chi2(fwhm + h) - 2.0 * c0 + obj.chi2(fwhm - h)) / h**2
        if d2 > 0.0:
            fwhm_std = math.sqrt(2.0 / d2)

    return FitResult(
        lineshape_fwhm_hz=fwhm,
        offsets_linear=tuple(offs),
        demod_freqs_hz=tuple(s.demod_freq_hz for s in scans),
        residual_rms_db=residual_rms_db,
        converged=best.converged,
        starts=tuple(results),
        objective=best.objective,
        fwhm_std_hz=fwhm_std,
        degenerate=pinned or flat,
        n_points=n_points,
        shape_kind=shape_kind,
    )


def synthesize_scan(
    p: ScaledOpoParams,
    shape: LaserLineshape,
    demod_freq_hz: float,
    excess_fiber_m: Sequence[float],
    offset_linear: float = 0.0,
    noise_frac: float = 0.01,
    rng: np.random.Generator | None = None,
    group_index: float = 1.5,
    electronics_floor_db: float | None = None,
    label: str = "",
) -> MeasuredScan:
    """Forward-model scan with multiplicative noise, for tests and demos.

    The linear power is (averaged spectrum + offset) * (1 + eps) with
    eps ~ N(0, noise_frac**2); when an electronics floor is given its
    linear power is added before converting to dB, so the subtraction
    step recovers the noisy signal exactly.
    """
    rng = rng or np.random.default_rng(0)
    fibers = np.asarray(excess_fiber_m, dtype=float)
    taus = fibers * group_index / C_VACUUM
    s_bar = averaged_spectrum_fixed(p, demod_to_scaled(demod_freq_hz, p.k_tot), shape, taus)
    y = (s_bar + offset_linear) * (1.0 + noise_frac * rng.standard_normal(fibers.size))
    if np.any(y <= 0.0):
        raise ValueError("noise drew a non-positive power; lower noise_frac")
    if electronics_floor_db is not None:
        y = y + db_to_linear(electronics_floor_db)
    std_db = np.full(fibers.size, max(noise_frac / LN10_OVER_10, 1e-8))
    return MeasuredScan(
        demod_freq_hz=demod_freq_hz,
        excess_fiber_m=tuple(fibers),
        noise_db=tuple(linear_to_db(y)),
        std_dev_db=tuple(std_db),
        electronics_floor_db=electronics_floor_db,
        label=label,
    )
