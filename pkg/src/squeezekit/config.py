"""Run configuration: a single JSON document with explicit units in key names.

Unknown keys are rejected everywhere; every mapping accepts an optional
``note`` string for human annotations.  Physical invariants live in the
core dataclasses; :func:`load_config` constructs those eagerly so a bad
config fails at load time with a pointed message, not midway through a
run.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, ValidationError

from .lineshape import LaserLineshape
from .params import (
    PhysicalCavity,
    ScaledOpoParams,
    detection_efficiency,
    scale_params,
)
from .pathdelay import DelayLedger, PathElement


class ConfigError(ValueError):
    """Invalid configuration; message carries location detail."""


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    note: str | None = None


class CavityConfig(StrictModel):
    linewidth_fwhm_hz: float
    output_coupler_transmission: float
    round_trip_loss: float
    free_spectral_range_hz: float | None = None


class PumpConfig(StrictModel):
    alpha_mag: float
    pump_phase_rad: float = 0.0


class DetectionConfig(StrictModel):
    homodyne_visibility: float = 0.98
    detector_quantum_efficiency: float = 0.95
    electronics_floor_db: float | None = None


class LineshapeConfig(StrictModel):
    kind: Literal["delta", "gaussian", "lorentzian"]
    fwhm_hz: float = 0.0


class PathElementConfig(StrictModel):
    kind: Literal["fiber", "free_space", "cavity", "lumped"]
    length_m: float = 0.0
    group_index: float = 1.0
    linewidth_fwhm_hz: float = 0.0
    delay_s: float = 0.0
    label: str = ""

    def to_element(self) -> PathElement:
        return PathElement(
            kind=self.kind,
            length_m=self.length_m,
            group_index=self.group_index,
            linewidth_fwhm_hz=self.linewidth_fwhm_hz,
            delay_s=self.delay_s,
            label=self.label,
        )


class LedgerConfig(StrictModel):
    lo_path: list[PathElementConfig]
    squeeze_path: list[PathElementConfig]
    include_doubler_in_squeeze_path: bool = True

    def to_ledger(self) -> DelayLedger:
        return DelayLedger(
            lo_path=tuple(e.to_element() for e in self.lo_path),
            squeeze_path=tuple(e.to_element() for e in self.squeeze_path),
            include_doubler_in_squeeze_path=self.include_doubler_in_squeeze_path,
        )


class ScanConfig(StrictModel):
    demod_freqs_hz: list[float] = [1e6, 2e6, 3e6]
    delay_min_m: float = 0.0
    delay_max_m: float = 60.0
    delay_step_m: float = 4.0
    phase_points: int = 720
    group_index: float = 1.5


class QuadratureSettings(StrictModel):
    rel_tol: float = 1e-8
    max_intervals: int = 4096


class FitScanConfig(StrictModel):
    csv_path: str
    demod_freq_hz: float
    label: str = ""


class FitSettings(StrictModel):
    n_starts: int = 5
    fwhm_min_hz: float = 1e5
    fwhm_max_hz: float = 3e6
    fit_offsets: bool = True
    compare_lineshapes: bool = True
    max_iterations: int = 400
    scans: list[FitScanConfig] = []


class OutputConfig(StrictModel):
    directory: str = "out"
    emit_svg: bool = True


class RunConfig(StrictModel):
    cavity: CavityConfig
    pump: PumpConfig
    detection: DetectionConfig = DetectionConfig()
    lineshape: LineshapeConfig
    ledger: LedgerConfig | None = None
    scan: ScanConfig = ScanConfig()
    quadrature: QuadratureSettings = QuadratureSettings()
    fit: FitSettings = FitSettings()
    output: OutputConfig = OutputConfig()

    def physical_cavity(self) -> PhysicalCavity:
        return PhysicalCavity(
            linewidth_fwhm_hz=self.cavity.linewidth_fwhm_hz,
            output_coupler_transmission=self.cavity.output_coupler_transmission,
            round_trip_loss=self.cavity.round_trip_loss,
            free_spectral_range_hz=self.cavity.free_spectral_range_hz,
        )

    def scaled_params(self) -> ScaledOpoParams:
        eta_det = detection_efficiency(
            self.detection.homodyne_visibility,
            self.detection.detector_quantum_efficiency,
        )
        return scale_params(
            self.physical_cavity(),
            alpha_mag=self.pump.alpha_mag,
            pump_phase=self.pump.pump_phase_rad,
            eta_det=eta_det,
        )

    def laser_lineshape(self) -> LaserLineshape:
        return LaserLineshape(kind=self.lineshape.kind, fwhm_hz=self.lineshape.fwhm_hz)

    def delay_ledger(self) -> DelayLedger:
        if self.ledger is None:
            raise ConfigError("this command needs a 'ledger' section in the config")
        return self.ledger.to_ledger()

    def delay_grid_m(self) -> list[float]:
        scan = self.scan
        if scan.delay_step_m <= 0.0:
            raise ConfigError("scan.delay_step_m must be positive")
        if scan.delay_max_m < scan.delay_min_m:
            raise ConfigError("scan.delay_max_m must be >= scan.delay_min_m")
        n = int(round((scan.delay_max_m - scan.delay_min_m) / scan.delay_step_m)) + 1
        grid = [scan.delay_min_m + i * scan.delay_step_m for i in range(n)]
        return [g for g in grid if g <= scan.delay_max_m + 1e-9]


def _validation_message(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_config(data: dict, source: str = "<config>") -> RunConfig:
    """Validate a parsed JSON mapping and enforce the physics invariants."""
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"{source}: {_validation_message(exc)}") from exc
    try:
        cfg.scaled_params()
        cfg.laser_lineshape()
        if cfg.ledger is not None:
            cfg.delay_ledger()
        cfg.delay_grid_m()
        if cfg.scan.phase_points < 2:
            raise ValueError("scan.phase_points must be at least 2")
        for f in cfg.scan.demod_freqs_hz:
            if f <= 0.0:
                raise ValueError("scan.demod_freqs_hz entries must be positive")
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return cfg


def load_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON config file.

    Raises
    ------
    ConfigError
        With the file name plus a line/column for JSON syntax problems or
        a dotted field path for validation problems.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return parse_config(data, source=str(path))


def default_config_path() -> Path:
    """Path of the packaged default configuration."""
    return Path(__file__).parent / "data" / "default_config.json"


def format_hz(freq_hz: float) -> str:
    """Stable short label for a frequency in Hz (used in keys and filenames)."""
    return f"{freq_hz:.10g}"


def freq_file_tag(freq_hz: float) -> str:
    """Filename fragment like '2mhz' or '0.5mhz'."""
    return f"{freq_hz / 1e6:.10g}mhz".replace("+", "").replace("-", "m")


__all__ = [
    "CavityConfig",
    "ConfigError",
    "DetectionConfig",
    "FitScanConfig",
    "FitSettings",
    "LedgerConfig",
    "LineshapeConfig",
    "OutputConfig",
    "PathElementConfig",
    "PumpConfig",
    "QuadratureSettings",
    "RunConfig",
    "ScanConfig",
    "default_config_path",
    "format_hz",
    "freq_file_tag",
    "load_config",
    "parse_config",
]
