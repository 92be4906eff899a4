"""Deployment-level statistics and the per-painting emotion map.

Works over the datastore's export stream (donated sessions only) plus two
store counts the export cannot carry: sessions still awaiting consent
(partial) and completed-but-withheld sessions, which exist only as an
anonymous tally after deletion.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

from . import selection
from .catalog import Catalog
from .selfreport import AffectSliders, SelfReport, to_circumplex


@dataclass(frozen=True)
class Dataset:
    sessions: tuple[dict, ...]
    partial: int = 0
    withheld_completed: int = 0


@dataclass(frozen=True)
class EmotionBin:
    painting_id: str
    x: float
    y: float
    count: int


@dataclass(frozen=True)
class SummaryStats:
    completed: int
    partial: int
    mean_paintings_per_visitor: float
    engagements: dict = field(default_factory=dict)
    first_choice: dict = field(default_factory=dict)
    strongest: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "completed": self.completed,
            "partial": self.partial,
            "mean_paintings_per_visitor": self.mean_paintings_per_visitor,
            "engagements": dict(sorted(self.engagements.items())),
            "first_choice": dict(sorted(self.first_choice.items())),
            "strongest": dict(sorted(self.strongest.items())),
        }


def load_dataset(store) -> Dataset:
    return Dataset(
        sessions=tuple(store.export_donated()),
        partial=store.partial_count(),
        withheld_completed=store.withheld_completed_count,
    )


def dataset_from_jsonl(lines: Iterable[str], partial: int = 0,
                       withheld_completed: int = 0) -> Dataset:
    sessions = tuple(json.loads(line) for line in lines if line.strip())
    return Dataset(sessions=sessions, partial=partial,
                   withheld_completed=withheld_completed)


def _reports_of(record: dict) -> list[SelfReport]:
    return [
        SelfReport(
            emotion_id=r["emotion_id"],
            painting_id=r["painting_id"],
            sliders=AffectSliders(r["valence"], r["arousal"], r["control"]),
            free_text=r.get("free_text", ""),
            order_index=r["order_index"],
            ts_ms=r.get("ts_ms", 0),
        )
        for r in record["reports"]
    ]


def bin_reports(dataset: Dataset, painting_id: str) -> list[EmotionBin]:
    """Multiset counts of distinct (valence, arousal) pairs for one painting."""
    counts: dict[tuple[int, int], int] = {}
    for record in dataset.sessions:
        for r in record["reports"]:
            if r["painting_id"] == painting_id:
                key = (r["valence"], r["arousal"])
                counts[key] = counts.get(key, 0) + 1
    bins = []
    for (valence, arousal), count in sorted(counts.items()):
        x, y = to_circumplex(AffectSliders(valence, arousal, 0))
        bins.append(EmotionBin(painting_id=painting_id, x=x, y=y, count=count))
    return bins


def summary_stats(dataset: Dataset) -> SummaryStats:
    """Headline counts; strongest re-runs the selection comparator per session."""
    engagements: dict[str, int] = {}
    first_choice: dict[str, int] = {}
    strongest: dict[str, int] = {}
    total_reports = 0

    for record in dataset.sessions:
        reports = _reports_of(record)
        if not reports:
            continue
        total_reports += len(reports)
        for pid in {r.painting_id for r in reports}:
            engagements[pid] = engagements.get(pid, 0) + 1
        first = min(reports, key=lambda r: r.order_index)
        first_choice[first.painting_id] = first_choice.get(first.painting_id, 0) + 1
        winner = selection.strongest_report(reports)
        strongest[winner.painting_id] = strongest.get(winner.painting_id, 0) + 1

    n = len(dataset.sessions)
    mean = total_reports / n if n else 0.0
    return SummaryStats(
        completed=n + dataset.withheld_completed,
        partial=dataset.partial,
        mean_paintings_per_visitor=mean,
        engagements=engagements,
        first_choice=first_choice,
        strongest=strongest,
    )


@dataclass(frozen=True)
class MapStyle:
    panel_size: int = 190
    panel_gap: int = 26
    margin: int = 30
    columns: int = 3
    r_min: float = 2.5
    r_max: float = 13.0
    color_low: str = "#fff1a8"   # one report
    color_high: str = "#e8262d"  # the most-reported pair


DEFAULT_MAP_STYLE = MapStyle()


def circle_radius(count: int, max_count: int, style: MapStyle = DEFAULT_MAP_STYLE) -> float:
    """Area-leaning radius scale, strictly increasing in count."""
    return style.r_min + (style.r_max - style.r_min) * math.sqrt(count / max_count)


def circle_color(count: int, max_count: int, style: MapStyle = DEFAULT_MAP_STYLE) -> str:
    """Linear ramp from the single-report hue to full red at the maximum."""
    t = 1.0 if max_count <= 1 else (count - 1) / (max_count - 1)
    lo = _parse_hex(style.color_low)
    hi = _parse_hex(style.color_high)
    rgb = tuple(round(l + (h - l) * t) for l, h in zip(lo, hi))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _parse_hex(color: str) -> tuple[int, int, int]:
    color = color.lstrip("#")
    return int(color[0:2], 16), int(color[2:4], 16), int(color[4:6], 16)


def render_emotion_map(dataset: Dataset, catalog: Catalog,
                       style: MapStyle = DEFAULT_MAP_STYLE) -> bytes:
    """One circumplex panel per catalog painting, in catalog order."""
    bins_by_painting = {
        entry.painting.id: bin_reports(dataset, entry.painting.id)
        for entry in catalog.entries
    }
    max_count = max(
        (b.count for bins in bins_by_painting.values() for b in bins),
        default=1,
    )

    cols = style.columns
    rows = -(-len(catalog.entries) // cols)
    width = style.margin * 2 + cols * style.panel_size + (cols - 1) * style.panel_gap
    height = style.margin * 2 + rows * (style.panel_size + 28) + (rows - 1) * style.panel_gap

    parts: list[str] = []
    for i, entry in enumerate(catalog.entries):
        col, row = i % cols, i // cols
        ox = style.margin + col * (style.panel_size + style.panel_gap)
        oy = style.margin + 18 + row * (style.panel_size + 28 + style.panel_gap)
        title = entry.painting.title
        parts.append(
            f'<g class="panel" id="panel-{entry.painting.id}">'
        )
        parts.append(
            f'<text x="{ox + style.panel_size / 2:.2f}" y="{oy - 6:.2f}" font-size="11" '
            f'text-anchor="middle">{_esc(title)} / {_esc(entry.emotion.display_name)}</text>'
        )
        parts.append(
            f'<rect x="{ox}" y="{oy}" width="{style.panel_size}" height="{style.panel_size}" '
            'fill="#fcfcfa" stroke="#555" stroke-width="1"/>'
        )
        cx = ox + style.panel_size / 2
        cy = oy + style.panel_size / 2
        parts.append(f'<line x1="{ox}" y1="{cy}" x2="{ox + style.panel_size}" y2="{cy}" '
                     'stroke="#ccc" stroke-width="0.7"/>')
        parts.append(f'<line x1="{cx}" y1="{oy}" x2="{cx}" y2="{oy + style.panel_size}" '
                     'stroke="#ccc" stroke-width="0.7"/>')
        for b in bins_by_painting[entry.painting.id]:
            px = ox + (b.x + 1.0) / 2.0 * style.panel_size
            py = oy + (1.0 - (b.y + 1.0) / 2.0) * style.panel_size
            r = circle_radius(b.count, max_count, style)
            fill = circle_color(b.count, max_count, style)
            parts.append(
                f'<circle class="bin" cx="{px:.2f}" cy="{py:.2f}" r="{r:.2f}" '
                f'fill="{fill}" fill-opacity="0.85" data-count="{b.count}"/>'
            )
        parts.append("</g>")

    doc = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica, Arial, sans-serif">\n'
        + "\n".join(parts)
        + "\n</svg>\n"
    )
    return doc.encode("utf-8")


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
