"""Affective-slider self-reports and their circumplex mapping.

Sliders are quantized to 101 discrete levels (0..100), interpreted as
value/100 on the unit interval.  Valence and arousal map affinely onto
the [-1, 1]^2 circumplex square; control is carried but never plotted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MappingMismatch, OutOfRange, SliderOutOfRange, TextTooLong

SLIDER_MAX = 100
FREE_TEXT_MAX = 280


@dataclass(frozen=True)
class AffectSliders:
    """One triple of quantized slider values, each 0..100 inclusive."""

    valence: int
    arousal: int
    control: int

    def __post_init__(self):
        for name in ("valence", "arousal", "control"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise SliderOutOfRange(f"{name} must be an integer, got {v!r}")
            if not 0 <= v <= SLIDER_MAX:
                raise SliderOutOfRange(f"{name}={v} outside 0..{SLIDER_MAX}")


@dataclass(frozen=True)
class SelfReport:
    """A submitted self-report for one painting.

    ``order_index`` is 1-based position among the session's accepted
    reports and doubles as the dot label on the postcard plot.
    """

    emotion_id: str
    painting_id: str
    sliders: AffectSliders
    free_text: str
    order_index: int
    ts_ms: int


@dataclass(frozen=True)
class CircumplexPoint:
    """A plotted point: valence on x, arousal on y, both in [-1, 1]."""

    x: float
    y: float
    label: int


def quantize_slider(raw: float) -> int:
    """Quantize a unit-interval slider position to 0..100, round-half-up."""
    if not 0.0 <= raw <= 1.0:
        raise OutOfRange(f"raw slider value {raw!r} outside [0, 1]")
    return int(math.floor(raw * SLIDER_MAX + 0.5))


def to_circumplex(sliders: AffectSliders) -> tuple[float, float]:
    """Map sliders onto circumplex coordinates: x from valence, y from arousal."""
    x = 2.0 * (sliders.valence / SLIDER_MAX) - 1.0
    y = 2.0 * (sliders.arousal / SLIDER_MAX) - 1.0
    return x, y


def report_to_point(report: SelfReport) -> CircumplexPoint:
    x, y = to_circumplex(report.sliders)
    return CircumplexPoint(x=x, y=y, label=report.order_index)


def validate_report(report: SelfReport, catalog) -> None:
    """Check a report against slider bounds, text length, and the catalog mapping.

    Raises SliderOutOfRange, TextTooLong, or MappingMismatch; returns None when valid.
    """
    # AffectSliders already enforces bounds on construction; re-check to cover
    # reports deserialized through other paths.
    AffectSliders(report.sliders.valence, report.sliders.arousal, report.sliders.control)
    if len(report.free_text) > FREE_TEXT_MAX:
        raise TextTooLong(f"free text is {len(report.free_text)} chars, cap {FREE_TEXT_MAX}")
    mapped = catalog.painting_for_emotion(report.emotion_id)
    if mapped.id != report.painting_id:
        raise MappingMismatch(
            f"emotion {report.emotion_id!r} maps to painting {mapped.id!r}, "
            f"report names {report.painting_id!r}"
        )
