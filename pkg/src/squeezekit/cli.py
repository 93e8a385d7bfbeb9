"""Command-line front end.

Thin client over the service layer: it loads the config, reads any scan
CSVs, builds a request, runs it either in-process or against a remote
server (``--server``), writes the returned documents, and prints a short
summary.  All computation happens behind the service interface.

Exit codes: 0 success, 2 bad input or config, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

import httpx

from .config import ConfigError, RunConfig, load_config
from .drift import DelayScanError
from .fitting import ScanFormatError, load_scan_csv
from .quadrature import QuadratureError
from .service import (
    BudgetRequest,
    BudgetResponse,
    DelayScanRequest,
    DelayScanResponse,
    Document,
    FitRequest,
    FitResponse,
    ScanPayload,
    SpectrumRequest,
    SpectrumResponse,
    run_budget,
    run_delay_scan,
    run_fit,
    run_spectrum,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_ROUTES = {
    "spectrum": ("/v1/spectrum", run_spectrum, SpectrumResponse),
    "delay-scan": ("/v1/delay-scan", run_delay_scan, DelayScanResponse),
    "budget": ("/v1/budget", run_budget, BudgetResponse),
    "fit": ("/v1/fit", run_fit, FitResponse),
}


class _RemoteInputError(RuntimeError):
    pass


class _RemoteNumericError(RuntimeError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="squeeze",
        description="Squeezing spectra, drift averaging, delay budgets, and delay-scan fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "spectrum": "phase scan of the squeezing spectrum",
        "delay-scan": "drift-averaged squeezing vs LO delay",
        "budget": "group-delay budget of both homodyne paths",
        "fit": "fit measured delay scans with the averaged model",
    }
    for name, help_text in specs.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", default=None, help="output directory (default from config)")
        cmd.add_argument("--no-timestamp", action="store_true", help="omit SVG timestamps")
        cmd.add_argument("--server", default=None, help="base URL of a running service")
        if name in ("spectrum", "delay-scan"):
            cmd.add_argument(
                "--demod-hz", type=float, default=None, help="single demodulation frequency"
            )
        if name == "fit":
            cmd.add_argument(
                "csv",
                nargs="*",
                help="scan CSVs overriding the config's fit.scans paths, in order",
            )
    return parser


def _timestamp(args) -> str | None:
    if args.no_timestamp:
        return None
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _fit_scan_payloads(cfg: RunConfig, args, config_dir: Path) -> list[ScanPayload]:
    entries = list(cfg.fit.scans)
    override = [Path(c) for c in (args.csv or [])]
    if override:
        if entries and len(override) != len(entries):
            raise ScanFormatError(
                f"{len(override)} CSVs given but the config lists {len(entries)} scans"
            )
        if not entries:
            raise ScanFormatError(
                "CSV paths given but the config's fit.scans does not map them "
                "to demodulation frequencies"
            )
        paths = override
    else:
        if not entries:
            raise ConfigError("fit needs scans: add fit.scans to the config or pass CSV paths")
        paths = [config_dir / e.csv_path for e in entries]

    payloads = []
    for entry, path in zip(entries, paths):
        scan = load_scan_csv(path, demod_freq_hz=entry.demod_freq_hz, label=entry.label)
        payloads.append(
            ScanPayload(
                demod_freq_hz=scan.demod_freq_hz,
                label=scan.label,
                excess_fiber_m=list(scan.excess_fiber_m),
                noise_db=list(scan.noise_db),
                std_dev_db=list(scan.std_dev_db),
            )
        )
    return payloads


def _dispatch(args, request, response_type):
    route, handler, _ = _ROUTES[args.command]
    if args.server is None:
        return handler(request)
    url = args.server.rstrip("/") + route
    resp = httpx.post(url, json=request.model_dump(mode="json"), timeout=600.0)
    if resp.status_code == 422:
        raise _RemoteInputError(_detail(resp))
    if resp.status_code >= 500:
        raise _RemoteNumericError(_detail(resp))
    resp.raise_for_status()
    return response_type.model_validate(resp.json())


def _detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("detail", resp.text))
    except ValueError:
        return resp.text


def _write_documents(documents: list[Document], out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for doc in documents:
        (out_dir / doc.filename).write_text(doc.content, encoding="utf-8")


def _print_spectrum(resp: SpectrumResponse) -> None:
    for s in resp.summaries:
        print(
            f"spectrum {s.demod_freq_hz:.6g} Hz: min {s.min_db:+.3f} dB at "
            f"theta = {s.theta_at_min_rad:.4f} rad, max {s.max_db:+.3f} dB"
        )


def _print_delay_scan(resp: DelayScanResponse) -> None:
    for o in resp.optima:
        if o.flat:
            print(
                f"delay scan {o.demod_freq_hz:.6g} Hz: flat curve (delay-independent), "
                f"level {o.s_bar_min_db:+.3f} dB"
            )
            continue
        side = "interior" if o.interior else "window boundary"
        print(
            f"delay scan {o.demod_freq_hz:.6g} Hz: optimum at {o.fiber_excess_m:.3f} m "
            f"({side}), {o.s_bar_min_db:+.3f} dB; first-order prediction "
            f"{o.predicted_length_m:.3f} m"
        )


def _print_budget(resp: BudgetResponse) -> None:
    print(f"{'path':<18} {'label':<24} {'kind':<12} {'delay (ns)':>12}  counted")
    for r in resp.rows:
        print(
            f"{r.path:<18} {r.label or '-':<24} {r.kind:<12} "
            f"{r.delay_s * 1e9:>12.4f}  {'yes' if r.counted else 'no'}"
        )
    print(
        f"totals: LO {resp.lo_total_s * 1e9:.4f} ns, squeezing "
        f"{resp.squeeze_total_s * 1e9:.4f} ns, tau_d {resp.tau_d_s * 1e9:+.4f} ns"
    )
    print(
        f"white-light correction: {resp.white_light_correction_m:+.4f} m of LO fiber "
        f"(group index {resp.group_index})"
    )


def _print_fit(resp: FitResponse) -> None:
    r = resp.result
    status = "converged" if r.converged else "NOT converged"
    print(
        f"fit ({r.shape_kind}): fwhm = {r.lineshape_fwhm_hz / 1e3:.1f} kHz, "
        f"residual rms {r.residual_rms_db:.4f} dB, {status}"
        + (", degenerate" if r.degenerate else "")
    )
    for freq, off in r.offsets_linear.items():
        print(f"  offset at {freq} Hz: {off:+.4f} (linear, rel. shot noise)")
    for c in resp.comparison:
        print(
            f"  {c.shape_kind}: objective {c.objective:.6g}, "
            f"fwhm {c.lineshape_fwhm_hz / 1e3:.1f} kHz, rms {c.residual_rms_db:.4f} dB"
        )


def run(args) -> int:
    cfg = load_config(args.config)
    stamp = _timestamp(args)
    config_dir = Path(args.config).resolve().parent

    if args.command == "spectrum":
        request = SpectrumRequest(config=cfg, demod_hz=args.demod_hz, timestamp=stamp)
    elif args.command == "delay-scan":
        request = DelayScanRequest(config=cfg, demod_hz=args.demod_hz, timestamp=stamp)
    elif args.command == "budget":
        request = BudgetRequest(config=cfg, timestamp=stamp)
    else:
        request = FitRequest(
            config=cfg, scans=_fit_scan_payloads(cfg, args, config_dir), timestamp=stamp
        )

    response = _dispatch(args, request, _ROUTES[args.command][2])

    out_dir = Path(args.out) if args.out else Path(cfg.output.directory)
    _write_documents(response.documents, out_dir)
    print(f"wrote {len(response.documents)} files to {out_dir}")

    if args.command == "spectrum":
        _print_spectrum(response)
    elif args.command == "delay-scan":
        _print_delay_scan(response)
    elif args.command == "budget":
        _print_budget(response)
    else:
        _print_fit(response)
        if not response.result.converged:
            print("fit did not converge; result saved with converged=false", file=sys.stderr)
            return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConfigError, ScanFormatError, _RemoteInputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (QuadratureError, DelayScanError, _RemoteNumericError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except httpx.HTTPError as exc:
        print(f"server error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
