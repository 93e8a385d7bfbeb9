"""Minimal deterministic SVG line plots.

Self-contained output: inline styling, no fonts or scripts fetched from
anywhere, fixed coordinate formatting so identical data yields identical
bytes.  An optional timestamp goes into a comment; suppress it when byte
stability across runs matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass(frozen=True)
class PlotSeries:
    """One curve or point set."""

    label: str
    x: tuple[float, ...]
    y: tuple[float, ...]
    color: str | None = None
    dashed: bool = False
    markers: bool = False
    line: bool = True
    yerr: tuple[float, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        object.__setattr__(self, "yerr", tuple(float(v) for v in self.yerr))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")
        if self.yerr and len(self.yerr) != len(self.x):
            raise ValueError("yerr must match the data length")


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions with a 1-2-5 step covering [lo, hi]."""
    if not hi > lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt_tick(v: float) -> str:
    if v == 0.0:
        return "0"
    a = abs(v)
    if a >= 1e5 or a < 1e-3:
        return f"{v:.1e}"
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return s


def _c(v: float) -> str:
    """Fixed two-decimal coordinate formatting."""
    return f"{v:.2f}"


def line_plot(
    series: Sequence[PlotSeries],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 720,
    height: int = 460,
    timestamp: str | None = None,
) -> str:
    """Render series to an SVG document string."""
    if not series:
        raise ValueError("need at least one series")
    xs = [v for s in series for v in s.x]
    ys_lo = [
        y - (s.yerr[i] if s.yerr else 0.0) for s in series for i, y in enumerate(s.y)
    ]
    ys_hi = [
        y + (s.yerr[i] if s.yerr else 0.0) for s in series for i, y in enumerate(s.y)
    ]
    if not xs:
        raise ValueError("series contain no points")
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys_lo), max(ys_hi)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad_y = 0.06 * (y_hi - y_lo)
    y_lo -= pad_y
    y_hi += pad_y

    ml, mr, mt, mb = 64, 16, 34, 48
    pw, ph = width - ml - mr, height - mt - mb

    def px(v: float) -> float:
        return ml + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v: float) -> float:
        return mt + (y_hi - v) / (y_hi - y_lo) * ph

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    if timestamp is not None:
        parts.append(f"<!-- generated {timestamp} -->")
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{_esc(title)}</text>'
        )

    # gridlines and ticks
    for t in _nice_ticks(x_lo, x_hi):
        if t < x_lo or t > x_hi:
            continue
        x = px(t)
        parts.append(
            f'<line x1="{_c(x)}" y1="{mt}" x2="{_c(x)}" y2="{mt + ph}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_c(x)}" y="{mt + ph + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        if t < y_lo or t > y_hi:
            continue
        y = py(t)
        parts.append(
            f'<line x1="{ml}" y1="{_c(y)}" x2="{ml + pw}" y2="{_c(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ml - 6}" y="{_c(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt_tick(t)}</text>'
        )
    parts.append(
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    if xlabel:
        parts.append(
            f'<text x="{ml + pw / 2:.0f}" y="{height - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>'
        )
    if ylabel:
        yc = mt + ph / 2
        parts.append(
            f'<text x="16" y="{yc:.0f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 16 {yc:.0f})">{_esc(ylabel)}</text>'
        )

    for i, s in enumerate(series):
        color = s.color or PALETTE[i % len(PALETTE)]
        if s.yerr:
            for xv, yv, ev in zip(s.x, s.y, s.yerr):
                parts.append(
                    f'<line x1="{_c(px(xv))}" y1="{_c(py(yv - ev))}" '
                    f'x2="{_c(px(xv))}" y2="{_c(py(yv + ev))}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
        if s.line and len(s.x) > 1:
            pts = " ".join(f"{_c(px(xv))},{_c(py(yv))}" for xv, yv in zip(s.x, s.y))
            dash = ' stroke-dasharray="6 4"' if s.dashed else ""
            parts.append(
                f'<polyline points="{pts}" fill="none" stroke="{color}" '
                f'stroke-width="1.5"{dash}/>'
            )
        if s.markers:
            for xv, yv in zip(s.x, s.y):
                parts.append(
                    f'<circle cx="{_c(px(xv))}" cy="{_c(py(yv))}" r="2.5" fill="{color}"/>'
                )

    # legend
    labeled = [s for s in series if s.label]
    if labeled:
        lx, ly = ml + pw - 160, mt + 8
        parts.append(
            f'<rect x="{lx - 6}" y="{ly - 4}" width="160" height="{16 * len(labeled) + 8}" '
            f'fill="white" fill-opacity="0.85" stroke="#cccccc"/>'
        )
        for i, s in enumerate(series):
            if not s.label:
                continue
            color = s.color or PALETTE[i % len(PALETTE)]
            row = ly + 8 + 16 * sum(1 for t in labeled[: labeled.index(s)])
            dash = ' stroke-dasharray="6 4"' if s.dashed else ""
            parts.append(
                f'<line x1="{lx}" y1="{row}" x2="{lx + 22}" y2="{row}" '
                f'stroke="{color}" stroke-width="1.5"{dash}/>'
            )
            parts.append(
                f'<text x="{lx + 28}" y="{row + 4}" font-family="sans-serif" '
                f'font-size="11">{_esc(s.label)}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
