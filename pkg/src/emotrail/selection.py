"""Interview video selection from self-reports.

The winning report is the lexicographic argmax over four keys: arousal,
then distance of valence from the 50 midpoint, then distance of control
from the midpoint, with the earliest submission winning any remaining
tie.  Video polarity comes from the winning report's valence; the rest
position (50) counts as positive so a neutral slider never gets the
negative framing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .catalog import Catalog, Polarity
from .errors import EmptyReports
from .selfreport import SelfReport

MIDPOINT = 50


@dataclass(frozen=True)
class VideoChoice:
    painting_id: str
    polarity: Polarity
    source_report_index: int


def _extremity_valence(r: SelfReport) -> int:
    return abs(r.sliders.valence - MIDPOINT)


def _extremity_control(r: SelfReport) -> int:
    return abs(r.sliders.control - MIDPOINT)


DEFAULT_TIE_BREAKERS = (_extremity_valence, _extremity_control)


def strongest_report(reports: Iterable[SelfReport],
                     tie_breakers: Sequence = DEFAULT_TIE_BREAKERS) -> SelfReport:
    """The report with the strongest arousal, tie-broken by extremity keys."""
    reports = list(reports)
    if not reports:
        raise EmptyReports("no self-reports to select from")

    def key(r: SelfReport):
        # order_index negated: earliest submission wins final ties
        return (r.sliders.arousal, *(tb(r) for tb in tie_breakers), -r.order_index)

    return max(reports, key=key)


def polarity_for_valence(valence: int) -> Polarity:
    return Polarity.POSITIVE if valence >= MIDPOINT else Polarity.NEGATIVE


def select_interview_video(reports: Iterable[SelfReport], catalog: Catalog,
                           tie_breakers: Sequence = DEFAULT_TIE_BREAKERS) -> VideoChoice:
    """Pick the interview video: winning report's painting, polarity from its valence."""
    winner = strongest_report(reports, tie_breakers)
    polarity = polarity_for_valence(winner.sliders.valence)
    catalog.video_for(winner.painting_id, polarity)  # existence check
    return VideoChoice(
        painting_id=winner.painting_id,
        polarity=polarity,
        source_report_index=winner.order_index,
    )
