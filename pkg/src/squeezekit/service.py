"""Request/response models and handlers for the compute service.

Each handler takes a pydantic request carrying a full :class:`RunConfig`
plus command extras, runs the core modules, and returns a response whose
``documents`` list holds the rendered CSV/JSON/SVG payloads.  The HTTP
layer (:mod:`squeezekit.api`) and the command line (:mod:`squeezekit.cli`)
both call these functions; the CLI only moves files and flags around.

Everything here is deterministic: identical requests produce identical
documents, byte for byte.  Timestamps only ever appear inside SVG
comments and only when the request supplies one.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np
from pydantic import BaseModel, ConfigDict

from .config import ConfigError, RunConfig, format_hz, freq_file_tag
from .drift import (
    DelaySetting,
    delay_scan,
    find_optimal_delay,
)
from .fitting import FitConfig, FitResult, MeasuredScan, fit_model
from .lineshape import LaserLineshape
from .opo import compensation_length, spectrum_closed
from .params import C_VACUUM, demod_to_scaled, linear_to_db
from .pathdelay import element_delay, relative_delay, white_light_length
from .svgplot import PlotSeries, line_plot


class Document(BaseModel):
    """One output file: name, MIME type, full text content."""

    filename: str
    media_type: str
    content: str


def _csv_document(filename: str, header: tuple[str, ...], rows) -> Document:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return Document(filename=filename, media_type="text/csv", content=buf.getvalue())


def _json_document(filename: str, payload) -> Document:
    return Document(
        filename=filename,
        media_type="application/json",
        content=json.dumps(payload, indent=2) + "\n",
    )


def _svg_document(filename: str, content: str) -> Document:
    return Document(filename=filename, media_type="image/svg+xml", content=content)


def _domain(cfg: RunConfig):
    """Construct the core objects, mapping invariant failures to ConfigError."""
    try:
        p = cfg.scaled_params()
        shape = cfg.laser_lineshape()
        grid = cfg.delay_grid_m()
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return p, shape, grid


def _select_freqs(cfg: RunConfig, demod_hz: float | None) -> list[float]:
    if demod_hz is not None:
        if demod_hz <= 0.0:
            raise ConfigError("demod-hz must be positive")
        return [demod_hz]
    if not cfg.scan.demod_freqs_hz:
        raise ConfigError("scan.demod_freqs_hz is empty and no demod-hz was given")
    return list(cfg.scan.demod_freqs_hz)


# ---------------------------------------------------------------- spectrum


class SpectrumRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig
    demod_hz: float | None = None
    timestamp: str | None = None


class SpectrumSummary(BaseModel):
    demod_freq_hz: float
    min_db: float
    max_db: float
    theta_at_min_rad: float


class SpectrumResponse(BaseModel):
    documents: list[Document]
    summaries: list[SpectrumSummary]


def run_spectrum(req: SpectrumRequest) -> SpectrumResponse:
    """Phase scan of the un-averaged spectrum at zero detuning."""
    cfg = req.config
    p, _, _ = _domain(cfg)
    freqs = _select_freqs(cfg, req.demod_hz)
    n = cfg.scan.phase_points

    documents: list[Document] = []
    summaries: list[SpectrumSummary] = []
    theta = np.arange(n) * (2.0 * math.pi / n)
    for f in freqs:
        omg = demod_to_scaled(f, p.k_tot)
        psi = 2.0 * theta - p.pump_phase
        s_lin = spectrum_closed(p, omg, 0.0, psi)
        s_db = linear_to_db(s_lin)
        tag = freq_file_tag(f)
        documents.append(
            _csv_document(
                f"spectrum_{tag}.csv",
                ("theta_rad", "s_linear", "s_db"),
                zip(theta, s_lin, s_db),
            )
        )
        i_min = int(np.argmin(s_lin))
        summaries.append(
            SpectrumSummary(
                demod_freq_hz=f,
                min_db=float(np.min(s_db)),
                max_db=float(np.max(s_db)),
                theta_at_min_rad=float(theta[i_min]),
            )
        )
        if cfg.output.emit_svg:
            svg = line_plot(
                [
                    PlotSeries(
                        label=f"{tag} noise power",
                        x=tuple(theta),
                        y=tuple(s_db),
                    )
                ],
                title=f"Quadrature noise vs LO phase ({tag})",
                xlabel="LO phase theta (rad)",
                ylabel="noise power (dB rel. shot noise)",
                timestamp=req.timestamp,
            )
            documents.append(_svg_document(f"spectrum_{tag}.svg", svg))
    return SpectrumResponse(documents=documents, summaries=summaries)


# ---------------------------------------------------------------- delay scan


class DelayScanRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig
    demod_hz: float | None = None
    timestamp: str | None = None


class DelayOptimumModel(BaseModel):
    demod_freq_hz: float
    flat: bool
    interior: bool
    fiber_excess_m: float | None
    s_bar_min_db: float
    predicted_length_m: float


class DelayScanResponse(BaseModel):
    documents: list[Document]
    optima: list[DelayOptimumModel]


def run_delay_scan(req: DelayScanRequest) -> DelayScanResponse:
    """Drift-averaged squeezing against local-oscillator excess fiber."""
    cfg = req.config
    p, shape, grid_m = _domain(cfg)
    freqs = _select_freqs(cfg, req.demod_hz)
    ng = cfg.scan.group_index
    rel_tol = cfg.quadrature.rel_tol
    max_iv = cfg.quadrature.max_intervals

    documents: list[Document] = []
    optima: list[DelayOptimumModel] = []
    for f in freqs:
        omg = demod_to_scaled(f, p.k_tot)
        delays = [DelaySetting.from_fiber(m, ng) for m in grid_m]
        trace = delay_scan(p, omg, shape, delays, rel_tol=rel_tol, max_intervals=max_iv)
        tag = freq_file_tag(f)
        documents.append(
            _csv_document(
                f"delay_scan_{tag}.csv",
                ("excess_fiber_m", "s_bar_linear", "s_bar_db", "quad_err"),
                zip(grid_m, trace.s_linear, trace.s_db, trace.quad_error),
            )
        )
        if cfg.output.emit_svg:
            svg = line_plot(
                [
                    PlotSeries(
                        label=f"{tag} averaged",
                        x=tuple(grid_m),
                        y=trace.s_db,
                        markers=True,
                    )
                ],
                title=f"Averaged squeezing vs delay ({tag})",
                xlabel="excess LO fiber (m)",
                ylabel="noise power (dB rel. shot noise)",
                timestamp=req.timestamp,
            )
            documents.append(_svg_document(f"delay_scan_{tag}.svg", svg))

        window = (min(grid_m), max(grid_m)) if len(grid_m) > 1 else (-5.0, 60.0)
        opt = find_optimal_delay(
            p,
            omg,
            shape,
            group_index=ng,
            window_m=window,
            coarse_step_m=min(1.0, cfg.scan.delay_step_m),
            rel_tol=rel_tol,
            max_intervals=max_iv,
        )
        optima.append(
            DelayOptimumModel(
                demod_freq_hz=f,
                flat=opt.flat,
                interior=opt.interior,
                fiber_excess_m=None if opt.flat else opt.fiber_excess_m,
                s_bar_min_db=linear_to_db(opt.s_bar_linear),
                predicted_length_m=compensation_length(p, omg, ng),
            )
        )

    payload = {
        "group_index": ng,
        "lineshape_kind": shape.kind,
        "lineshape_fwhm_hz": shape.fwhm_hz,
        "optima": [o.model_dump() for o in optima],
    }
    documents.append(_json_document("delay_scan_optima.json", payload))
    return DelayScanResponse(documents=documents, optima=optima)


# ---------------------------------------------------------------- budget


class BudgetRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig
    timestamp: str | None = None


class BudgetRow(BaseModel):
    path: str
    label: str
    kind: str
    delay_s: float
    counted: bool


class BudgetResponse(BaseModel):
    documents: list[Document]
    rows: list[BudgetRow]
    lo_total_s: float
    squeeze_total_s: float
    tau_d_s: float
    white_light_correction_m: float
    group_index: float


def run_budget(req: BudgetRequest) -> BudgetResponse:
    """Per-element delays, the relative delay, and the balancing fiber length."""
    cfg = req.config
    _domain(cfg)
    try:
        ledger = cfg.delay_ledger()
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    ng = cfg.scan.group_index

    rows: list[BudgetRow] = []
    for e in ledger.lo_path:
        rows.append(
            BudgetRow(
                path="local_oscillator",
                label=e.label,
                kind=e.kind,
                delay_s=element_delay(e),
                counted=True,
            )
        )
    for e in ledger.squeeze_path:
        counted = ledger.include_doubler_in_squeeze_path or e.kind != "cavity"
        rows.append(
            BudgetRow(
                path="squeezing",
                label=e.label,
                kind=e.kind,
                delay_s=element_delay(e),
                counted=counted,
            )
        )
    tau_d = relative_delay(ledger)
    lo_total = sum(r.delay_s for r in rows if r.path == "local_oscillator")
    squeeze_total = sum(r.delay_s for r in rows if r.path == "squeezing" and r.counted)
    correction = white_light_length(ledger, ng)
    payload = {
        "rows": [r.model_dump() for r in rows],
        "lo_total_s": lo_total,
        "squeeze_total_s": squeeze_total,
        "tau_d_s": tau_d,
        "white_light_correction_m": correction,
        "group_index": ng,
        "include_doubler_in_squeeze_path": ledger.include_doubler_in_squeeze_path,
    }
    documents = [_json_document("budget.json", payload)]
    return BudgetResponse(
        documents=documents,
        rows=rows,
        lo_total_s=lo_total,
        squeeze_total_s=squeeze_total,
        tau_d_s=tau_d,
        white_light_correction_m=correction,
        group_index=ng,
    )


# ---------------------------------------------------------------- fit


class ScanPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    demod_freq_hz: float
    label: str = ""
    excess_fiber_m: list[float]
    noise_db: list[float]
    std_dev_db: list[float]


class FitStartModel(BaseModel):
    start_fwhm_hz: float
    fwhm_hz: float
    objective: float
    n_iterations: int
    converged: bool


class FitResultModel(BaseModel):
    lineshape_fwhm_hz: float
    offsets_linear: dict[str, float]
    residual_rms_db: float
    converged: bool
    starts: list[FitStartModel]
    shape_kind: str
    objective: float
    fwhm_std_hz: float | None
    degenerate: bool
    n_points: int


class ComparisonRow(BaseModel):
    shape_kind: str
    objective: float
    lineshape_fwhm_hz: float
    residual_rms_db: float


class FitRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig
    scans: list[ScanPayload]
    timestamp: str | None = None


class FitResponse(BaseModel):
    documents: list[Document]
    result: FitResultModel
    comparison: list[ComparisonRow]


def _result_model(res: FitResult) -> FitResultModel:
    return FitResultModel(
        lineshape_fwhm_hz=res.lineshape_fwhm_hz,
        offsets_linear={
            format_hz(f): o for f, o in zip(res.demod_freqs_hz, res.offsets_linear)
        },
        residual_rms_db=res.residual_rms_db,
        converged=res.converged,
        starts=[
            FitStartModel(
                start_fwhm_hz=s.start_fwhm_hz,
                fwhm_hz=s.fwhm_hz,
                objective=s.objective,
                n_iterations=s.n_iterations,
                converged=s.converged,
            )
            for s in res.starts
        ],
        shape_kind=res.shape_kind,
        objective=res.objective,
        fwhm_std_hz=res.fwhm_std_hz,
        degenerate=res.degenerate,
        n_points=res.n_points,
    )


def run_fit(req: FitRequest) -> FitResponse:
    """Fit the drift-averaged model to measured delay scans."""
    cfg = req.config
    p, shape, _ = _domain(cfg)
    if shape.kind == "delta":
        raise ConfigError("fitting needs lineshape.kind gaussian or lorentzian")
    if not req.scans:
        raise ConfigError("fit request contains no scans")

    floor = cfg.detection.electronics_floor_db
    try:
        scans = [
            MeasuredScan(
                demod_freq_hz=s.demod_freq_hz,
                excess_fiber_m=tuple(s.excess_fiber_m),
                noise_db=tuple(s.noise_db),
                std_dev_db=tuple(s.std_dev_db),
                electronics_floor_db=floor,
                label=s.label,
            )
            for s in req.scans
        ]
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    fit_cfg = FitConfig(
        n_starts=cfg.fit.n_starts,
        fwhm_min_hz=cfg.fit.fwhm_min_hz,
        fwhm_max_hz=cfg.fit.fwhm_max_hz,
        fit_offsets=cfg.fit.fit_offsets,
        max_iterations=cfg.fit.max_iterations,
        group_index=cfg.scan.group_index,
    )
    result = fit_model(scans, p, shape.kind, fit_cfg)

    comparison = [
        ComparisonRow(
            shape_kind=result.shape_kind,
            objective=result.objective,
            lineshape_fwhm_hz=result.lineshape_fwhm_hz,
            residual_rms_db=result.residual_rms_db,
        )
    ]
    if cfg.fit.compare_lineshapes:
        other_kind = "lorentzian" if shape.kind == "gaussian" else "gaussian"
        other = fit_model(scans, p, other_kind, fit_cfg)
        comparison.append(
            ComparisonRow(
                shape_kind=other.shape_kind,
                objective=other.objective,
                lineshape_fwhm_hz=other.lineshape_fwhm_hz,
                residual_rms_db=other.residual_rms_db,
            )
        )

    model = _result_model(result)
    payload = model.model_dump()
    payload["comparison"] = [c.model_dump() for c in comparison]
    documents = [_json_document("fit_result.json", payload)]
    if cfg.output.emit_svg:
        documents.append(
            _svg_document(
                "fit_overlay.svg",
                _overlay_svg(scans, p, result, cfg.scan.group_index, req.timestamp),
            )
        )
    return FitResponse(documents=documents, result=model, comparison=comparison)


def _overlay_svg(
    scans: list[MeasuredScan],
    p,
    result: FitResult,
    group_index: float,
    timestamp: str | None,
) -> str:
    """Data with error bars, solid bare-model and dashed offset-model curves."""
    from .drift import averaged_spectrum_fixed
    from .svgplot import PALETTE

    shape = LaserLineshape(kind=result.shape_kind, fwhm_hz=result.lineshape_fwhm_hz)
    series: list[PlotSeries] = []
    for i, (scan, offset) in enumerate(zip(scans, result.offsets_linear)):
        color = PALETTE[i % len(PALETTE)]
        tag = freq_file_tag(scan.demod_freq_hz)
        lo, hi = min(scan.excess_fiber_m), max(scan.excess_fiber_m)
        dense = np.linspace(lo, hi, 121)
        taus = dense * group_index / C_VACUUM
        omg = demod_to_scaled(scan.demod_freq_hz, p.k_tot)
        bare = averaged_spectrum_fixed(p, omg, shape, taus)
        series.append(
            PlotSeries(
                label=f"{tag} data",
                x=scan.excess_fiber_m,
                y=tuple(scan.corrected_db()),
                yerr=scan.std_dev_db,
                color=color,
                markers=True,
                line=False,
            )
        )
        series.append(
            PlotSeries(
                label=f"{tag} model",
                x=tuple(dense),
                y=tuple(linear_to_db(bare)),
                color=color,
            )
        )
        series.append(
            PlotSeries(
                label=f"{tag} model+offset",
                x=tuple(dense),
                y=tuple(linear_to_db(np.maximum(bare + offset, 1e-300))),
                color=color,
                dashed=True,
            )
        )
    return line_plot(
        series,
        title="Measured squeezing vs delay with fitted model",
        xlabel="excess LO fiber (m)",
        ylabel="noise power (dB rel. shot noise)",
        timestamp=timestamp,
    )
