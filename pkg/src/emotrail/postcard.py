"""Souvenir postcard composition and SVG rendering.

The card front is the painting the visitor reacted most strongly to; the
back stacks a circumplex plot of the numbered self-report points, one
sentence per report, the camera summary sentence, and a fixed closing
question.  Rendering is pure: identical inputs give identical bytes.
"""

from __future__ import annotations

import json
import math
import textwrap
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from . import selection
from .affect import AffectLevels, AffectScores, InsufficientData, quantize_levels
from .catalog import Catalog
from .errors import NoReports
from .selfreport import CircumplexPoint, report_to_point
from .session import Session

CLOSING_QUESTION = "Do you think this is actually what you felt?"

# printed when the camera produced too few valid frames to score
INSUFFICIENT_DATA_SENTENCE = "The camera could not read your expressions well enough to say."

DEGREE_WORDS = ("not at all", "a little", "somewhat", "very")
ENJOYMENT_WORDS = ("not at all", "a little", "somewhat", "a lot")

CV_TEMPLATE = (
    "It seems like this experience has left you {frustrated} frustrated, "
    "{engaged} engaged, and you enjoyed it {enjoyed}."
)

ELLIPSIS = "…"


@dataclass(frozen=True)
class PostcardData:
    front_painting_id: str
    points: tuple[CircumplexPoint, ...]
    sentences: tuple[str, ...]
    cv_sentence: str
    closing_question: str


@dataclass(frozen=True)
class PostcardStyle:
    """Layout constants and configurable copy for the rendered card."""

    width: int = 480
    plot_size: int = 280
    margin: int = 28
    dot_radius: float = 7.0
    dot_fill: str = "#d0312d"
    overlap_offset_px: float = 9.0
    wrap_chars: int = 62
    x_axis_caption: str = "valence"
    y_axis_caption: str = "arousal"
    plot_heading: str = "Your self-reported emotions, mapped on the valence-arousal model:"
    cv_heading: str = "What the camera read from your face during the conversation:"


DEFAULT_STYLE = PostcardStyle()


def sentence_for_levels(levels: AffectLevels) -> str:
    """Fill the camera-summary template from the three four-point levels."""
    return CV_TEMPLATE.format(
        frustrated=DEGREE_WORDS[levels.frustration_level],
        engaged=DEGREE_WORDS[levels.engagement_level],
        enjoyed=ENJOYMENT_WORDS[levels.enjoyment_level],
    )


def sentence_for_report(report, catalog: Catalog) -> str:
    """One per-painting line; empty free text prints an ellipsis placeholder."""
    title = catalog.painting(report.painting_id).title
    text = report.free_text if report.free_text else ELLIPSIS
    return f'At the "{title}" you felt {text}'


def cv_sentence_for(scores: AffectScores | InsufficientData | None) -> str:
    if isinstance(scores, AffectScores):
        return sentence_for_levels(quantize_levels(scores))
    return INSUFFICIENT_DATA_SENTENCE


def compose_postcard(session: Session,
                     scores: AffectScores | InsufficientData | None,
                     catalog: Catalog) -> PostcardData:
    """Assemble the postcard content for a session with at least one report."""
    if not session.reports:
        raise NoReports("cannot compose a postcard without self-reports")
    front = selection.strongest_report(session.reports).painting_id
    points = tuple(report_to_point(r) for r in session.reports)
    sentences = tuple(sentence_for_report(r, catalog) for r in session.reports)
    return PostcardData(
        front_painting_id=front,
        points=points,
        sentences=sentences,
        cv_sentence=cv_sentence_for(scores),
        closing_question=CLOSING_QUESTION,
    )


def _dot_positions(points, style: PostcardStyle, origin_x: float, origin_y: float):
    """Pixel positions for the numbered dots, nudging exact overlaps apart."""
    groups: dict[tuple[float, float], list[CircumplexPoint]] = {}
    for p in points:
        groups.setdefault((p.x, p.y), []).append(p)
    positions = []
    for p in points:
        px = origin_x + (p.x + 1.0) / 2.0 * style.plot_size
        py = origin_y + (1.0 - (p.y + 1.0) / 2.0) * style.plot_size
        if len(groups[(p.x, p.y)]) > 1:
            angle = (p.label - 1) * (2.0 * math.pi / 6.0)
            px += style.overlap_offset_px * math.cos(angle)
            py += style.overlap_offset_px * math.sin(angle)
        positions.append((px, py, p.label))
    return positions


def render_postcard_svg(data: PostcardData, catalog: Catalog,
                        style: PostcardStyle = DEFAULT_STYLE) -> bytes:
    """Render the card back as a standalone SVG document."""
    m = style.margin
    plot_x = (style.width - style.plot_size) / 2.0
    y = float(m)

    parts: list[str] = []
    emit = parts.append

    front = catalog.painting(data.front_painting_id)
    emit(f'<text x="{m}" y="{y:.2f}" class="front-ref" font-size="10" fill="#777">'
         f'front: {escape(front.title)} ({escape(front.image_ref)})</text>')
    y += 20

    emit(f'<text x="{m}" y="{y:.2f}" font-size="12">{escape(style.plot_heading)}</text>')
    y += 14

    plot_y = y
    cx = plot_x + style.plot_size / 2.0
    cy = plot_y + style.plot_size / 2.0
    emit(f'<rect x="{plot_x:.2f}" y="{plot_y:.2f}" width="{style.plot_size}" '
         f'height="{style.plot_size}" fill="#fcfcfa" stroke="#444" stroke-width="1"/>')
    emit(f'<line x1="{plot_x:.2f}" y1="{cy:.2f}" x2="{plot_x + style.plot_size:.2f}" '
         f'y2="{cy:.2f}" stroke="#bbb" stroke-width="1"/>')
    emit(f'<line x1="{cx:.2f}" y1="{plot_y:.2f}" x2="{cx:.2f}" '
         f'y2="{plot_y + style.plot_size:.2f}" stroke="#bbb" stroke-width="1"/>')
    emit(f'<text x="{plot_x + style.plot_size - 4:.2f}" y="{cy - 6:.2f}" font-size="9" '
         f'fill="#888" text-anchor="end">{escape(style.x_axis_caption)}</text>')
    emit(f'<text x="{cx + 6:.2f}" y="{plot_y + 12:.2f}" font-size="9" '
         f'fill="#888">{escape(style.y_axis_caption)}</text>')

    for px, py, label in _dot_positions(data.points, style, plot_x, plot_y):
        emit(f'<circle class="report-dot" cx="{px:.2f}" cy="{py:.2f}" '
             f'r="{style.dot_radius:.2f}" fill="{style.dot_fill}"/>')
        emit(f'<text x="{px:.2f}" y="{py + 3.2:.2f}" font-size="9" fill="#fff" '
             f'text-anchor="middle">{label}</text>')

    y = plot_y + style.plot_size + 26
    for i, sentence in enumerate(data.sentences, start=1):
        for j, line in enumerate(textwrap.wrap(f"{i}) {sentence}", style.wrap_chars) or [""]):
            indent = m if j == 0 else m + 14
            emit(f'<text x="{indent}" y="{y:.2f}" class="report-sentence" '
                 f'font-size="11">{escape(line)}</text>')
            y += 15
        y += 3

    y += 10
    emit(f'<text x="{m}" y="{y:.2f}" font-size="12">{escape(style.cv_heading)}</text>')
    y += 17
    for line in textwrap.wrap(data.cv_sentence, style.wrap_chars):
        emit(f'<text x="{m}" y="{y:.2f}" class="cv-sentence" font-size="11">'
             f'{escape(line)}</text>')
        y += 15

    y += 14
    emit(f'<text x="{m}" y="{y:.2f}" class="closing-question" font-size="12" '
         f'font-style="italic">{escape(data.closing_question)}</text>')
    y += 8

    height = y + m
    doc = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{height:.0f}" viewBox="0 0 {style.width} {height:.0f}" '
        'font-family="Helvetica, Arial, sans-serif">\n'
        + "\n".join(parts)
        + "\n</svg>\n"
    )
    return doc.encode("utf-8")


def postcard_meta(data: PostcardData) -> dict:
    return {
        "front_painting_id": data.front_painting_id,
        "points": [{"x": p.x, "y": p.y, "label": p.label} for p in data.points],
        "sentences": list(data.sentences),
        "cv_sentence": data.cv_sentence,
    }


def write_postcard(data: PostcardData, catalog: Catalog, out_dir: str | Path,
                   session_id: str, style: PostcardStyle = DEFAULT_STYLE) -> tuple[Path, Path]:
    """Write postcard_<session_id>.svg and its .meta sidecar; returns both paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    svg_path = out / f"postcard_{session_id}.svg"
    meta_path = out / f"postcard_{session_id}.meta"
    svg_path.write_bytes(render_postcard_svg(data, catalog, style))
    meta_path.write_text(json.dumps(postcard_meta(data), indent=2) + "\n", encoding="utf-8")
    return svg_path, meta_path
