"""Group-delay bookkeeping for the local-oscillator and squeezing paths.

White-light homodyning requires equal group delay in both paths.  This
module sums per-element delays, reports the relative delay tau_d
(local oscillator minus squeezing path), and solves for the fiber length
change that restores balance.

The OPO cavity itself must not appear as a ledger element: its group
delay depends on the demodulation sideband and is handled by the
dispersion-compensation model in :mod:`squeezekit.opo`.  Auxiliary
cavities (such as the pump doubler) contribute 1/(pi * linewidth) at line
center.  Whether the doubler delay belongs to the squeezing path is a
modeling choice, exposed as a ledger flag that defaults to counting it
there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import C_VACUUM

ELEMENT_KINDS = ("fiber", "free_space", "cavity", "lumped")


@dataclass(frozen=True)
class PathElement:
    """One contribution to a path's group delay.

    Kinds
    -----
    fiber
        ``length_m`` of fiber with ``group_index``; delay l * n_g / c.
    free_space
        ``length_m`` of propagation at c.
    cavity
        Resonant transmission through a cavity of ``linewidth_fwhm_hz``;
        delay 1/(pi * linewidth) at line center.
    lumped
        A fixed ``delay_s``, for components known only by their delay.
    """

    kind: str
    length_m: float = 0.0
    group_index: float = 1.0
    linewidth_fwhm_hz: float = 0.0
    delay_s: float = 0.0
    label: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind {self.kind!r}; expected one of {ELEMENT_KINDS}")
        if self.kind in ("fiber", "free_space") and self.length_m < 0.0:
            raise ValueError("element length must be nonnegative")
        if self.kind == "fiber" and self.group_index < 1.0:
            raise ValueError("fiber group index must be >= 1")
        if self.kind == "cavity" and not self.linewidth_fwhm_hz > 0.0:
            raise ValueError("cavity element needs a positive linewidth")
        if self.kind == "lumped" and self.delay_s < 0.0:
            raise ValueError("lumped delay must be nonnegative")

    @classmethod
    def fiber(cls, length_m: float, group_index: float = 1.5, label: str = "") -> "PathElement":
        return cls(kind="fiber", length_m=length_m, group_index=group_index, label=label)

    @classmethod
    def free_space(cls, length_m: float, label: str = "") -> "PathElement":
        return cls(kind="free_space", length_m=length_m, label=label)

    @classmethod
    def cavity(cls, linewidth_fwhm_hz: float, label: str = "") -> "PathElement":
        return cls(kind="cavity", linewidth_fwhm_hz=linewidth_fwhm_hz, label=label)

    @classmethod
    def lumped(cls, delay_s: float, label: str = "") -> "PathElement":
        return cls(kind="lumped", delay_s=delay_s, label=label)


def element_delay(e: PathElement) -> float:
    """Group delay of a single element in seconds."""
    if e.kind == "fiber":
        return e.length_m * e.group_index / C_VACUUM
    if e.kind == "free_space":
        return e.length_m / C_VACUUM
    if e.kind == "cavity":
        return 1.0 / (math.pi * e.linewidth_fwhm_hz)
    return e.delay_s


def _reject_opo(elements: tuple[PathElement, ...], path_name: str) -> None:
    for e in elements:
        if "opo" in e.label.lower():
            raise ValueError(
                f"the OPO cavity must not appear in the {path_name} path: its group "
                "delay depends on the demodulation frequency and is accounted for by "
                "the dispersion-compensation length, not the ledger"
            )


@dataclass(frozen=True)
class DelayLedger:
    """Ordered delay elements of both homodyne arms."""

    lo_path: tuple[PathElement, ...]
    squeeze_path: tuple[PathElement, ...]
    include_doubler_in_squeeze_path: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo_path", tuple(self.lo_path))
        object.__setattr__(self, "squeeze_path", tuple(self.squeeze_path))
        if not self.lo_path or not self.squeeze_path:
            raise ValueError("both paths must contain at least one element")
        _reject_opo(self.lo_path, "local-oscillator")
        _reject_opo(self.squeeze_path, "squeezing")


def path_delay(elements: tuple[PathElement, ...], skip_cavities: bool = False) -> float:
    """Total delay of a path; optionally without its cavity elements."""
    total = 0.0
    for e in elements:
        if skip_cavities and e.kind == "cavity":
            continue
        total += element_delay(e)
    return total


def relative_delay(ledger: DelayLedger) -> float:
    """Relative group delay tau_d = LO path minus squeezing path, seconds.

    With ``include_doubler_in_squeeze_path`` disabled, cavity elements in
    the squeezing path are left out of the sum, shifting tau_d by exactly
    their line-center delay.
    """
    lo = path_delay(ledger.lo_path)
    sq = path_delay(ledger.squeeze_path, skip_cavities=not ledger.include_doubler_in_squeeze_path)
    return lo - sq


def white_light_length(ledger: DelayLedger, group_index: float = 1.5) -> float:
    """LO fiber length change that zeroes the relative delay.

    Negative when the LO path is already too long.
    """
    if group_index < 1.0:
        raise ValueError("group index must be >= 1")
    return -relative_delay(ledger) * C_VACUUM / group_index
