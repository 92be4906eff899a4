"""Facial-action-unit stream parsing and affect scoring.

Input is a CSV export of per-frame AU intensities (FACS 0-5 scale),
validity flag, detector confidence, and head pose.  Scoring filters to
frames that are flagged valid with confidence at or above a threshold,
normalizes intensities to [0, 1], folds in a bounded head-activity
measure, and averages three affect states over the filtered frames:

    enjoyment   <- AU06, AU12
    frustration <- AU10, AU17, head activity
    engagement  <- all five AUs, head activity

All three are convex combinations of values in [0, 1], so scores stay in
[0, 1].  Weights default to equal and are exposed through ScoringConfig
because the deployed combination is not publicly documented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import HeaderMismatch, NonMonotoneTimestamp, RangeError, RowParseError

FAU_CSV_HEADER = "ts_ms,valid,confidence,au06,au10,au12,au14,au17,pitch,yaw,roll"
AU_MAX = 5.0

AU_FIELDS = ("au06", "au10", "au12", "au14", "au17")
ANGLE_FIELDS = ("pitch", "yaw", "roll")


@dataclass(frozen=True)
class FauFrame:
    ts_ms: int
    valid: bool
    confidence: float
    au06: float
    au10: float
    au12: float
    au14: float
    au17: float
    pitch: float
    yaw: float
    roll: float


@dataclass(frozen=True)
class FauStream:
    frames: tuple[FauFrame, ...]
    session_id: str = ""


@dataclass(frozen=True)
class AffectScores:
    enjoyment: float
    engagement: float
    frustration: float
    valid_frame_count: int
    coverage: float


@dataclass(frozen=True)
class InsufficientData:
    """Returned instead of scores when too few valid frames were captured."""

    valid_frame_count: int
    required: int


@dataclass(frozen=True)
class ScoringConfig:
    """Thresholds and combination weights for affect scoring.

    Defaults: confidence cut 0.75, 30 valid frames minimum (about one
    second of footage), head rate clip at 1.0 rad/s, equal weights.
    """

    c_min: float = 0.75
    n_min: int = 30
    omega_max: float = 1.0
    enjoyment_weights: tuple[float, float] = (1.0, 1.0)          # au06, au12
    frustration_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)  # au10, au17, head
    engagement_weights: tuple[float, float] = (1.0, 1.0)         # mean of five AUs, head


DEFAULT_SCORING = ScoringConfig()


def parse_fau_csv(data: bytes | str, session_id: str = "") -> FauStream:
    """Parse the FAU CSV export into a validated, time-ordered stream.

    Accepts LF or CRLF line endings.  Raises HeaderMismatch, RowParseError,
    RangeError, or NonMonotoneTimestamp with the offending 1-based line.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise RowParseError(1, f"not valid UTF-8: {exc}") from exc
    else:
        text = data
    lines = text.splitlines()
    if not lines or lines[0].strip() != FAU_CSV_HEADER:
        got = lines[0].strip() if lines else "<empty>"
        raise HeaderMismatch(f"expected header {FAU_CSV_HEADER!r}, got {got!r}")

    frames: list[FauFrame] = []
    prev_ts: int | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.strip().split(",")
        if len(parts) != 11:
            raise RowParseError(lineno, f"expected 11 fields, got {len(parts)}")
        try:
            ts_ms = int(parts[0])
        except ValueError:
            raise RowParseError(lineno, f"bad ts_ms {parts[0]!r}") from None
        if parts[1] not in ("0", "1"):
            raise RowParseError(lineno, f"valid flag must be 0 or 1, got {parts[1]!r}")
        valid = parts[1] == "1"
        try:
            numbers = [float(p) for p in parts[2:]]
        except ValueError as exc:
            raise RowParseError(lineno, f"bad numeric field: {exc}") from None

        confidence = numbers[0]
        if not 0.0 <= confidence <= 1.0:
            raise RangeError(lineno, "confidence", f"{confidence} outside [0, 1]")
        aus = numbers[1:6]
        for name, value in zip(AU_FIELDS, aus):
            if not 0.0 <= value <= AU_MAX:
                raise RangeError(lineno, name, f"{value} outside [0, {AU_MAX}]")
        angles = numbers[6:9]
        for name, value in zip(ANGLE_FIELDS, angles):
            if not math.isfinite(value):
                raise RangeError(lineno, name, f"{value} is not finite")
        if prev_ts is not None and ts_ms <= prev_ts:
            raise NonMonotoneTimestamp(lineno)
        prev_ts = ts_ms

        frames.append(FauFrame(ts_ms, valid, confidence, *aus, *angles))
    return FauStream(frames=tuple(frames), session_id=session_id)


def head_activity(frames, omega_max: float = 1.0) -> list[float]:
    """Per-frame head activity in [0, 1] from pose change rate.

    First frame gets 0; each later frame gets the Euclidean norm of the
    (pitch, yaw, roll) delta per second, clipped at omega_max.
    """
    out: list[float] = []
    prev: FauFrame | None = None
    for frame in frames:
        if prev is None:
            out.append(0.0)
        else:
            dt_s = (frame.ts_ms - prev.ts_ms) / 1000.0
            delta = math.sqrt(
                (frame.pitch - prev.pitch) ** 2
                + (frame.yaw - prev.yaw) ** 2
                + (frame.roll - prev.roll) ** 2
            )
            out.append(min(1.0, delta / dt_s / omega_max))
        prev = frame
    return out


def score(stream: FauStream, config: ScoringConfig = DEFAULT_SCORING) -> AffectScores | InsufficientData:
    """Score enjoyment, engagement, and frustration over the valid frames.

    Frames count as valid when flagged valid with confidence >= c_min.
    Head activity is computed over the filtered sequence, so gaps left by
    invalid frames are bridged by their surrounding valid neighbors.
    """
    total = len(stream.frames)
    kept = [f for f in stream.frames if f.valid and f.confidence >= config.c_min]
    if len(kept) < config.n_min:
        return InsufficientData(valid_frame_count=len(kept), required=config.n_min)

    h = head_activity(kept, config.omega_max)
    we6, we12 = config.enjoyment_weights
    wf10, wf17, wfh = config.frustration_weights
    wg_au, wg_h = config.engagement_weights

    enj_sum = 0.0
    fru_sum = 0.0
    eng_sum = 0.0
    for frame, hv in zip(kept, h):
        a6 = frame.au06 / AU_MAX
        a10 = frame.au10 / AU_MAX
        a12 = frame.au12 / AU_MAX
        a14 = frame.au14 / AU_MAX
        a17 = frame.au17 / AU_MAX
        enj_sum += (we6 * a6 + we12 * a12) / (we6 + we12)
        fru_sum += (wf10 * a10 + wf17 * a17 + wfh * hv) / (wf10 + wf17 + wfh)
        au_mean = (a6 + a10 + a12 + a14 + a17) / 5.0
        eng_sum += (wg_au * au_mean + wg_h * hv) / (wg_au + wg_h)

    n = len(kept)
    return AffectScores(
        enjoyment=enj_sum / n,
        engagement=eng_sum / n,
        frustration=fru_sum / n,
        valid_frame_count=n,
        coverage=n / total,
    )


@dataclass(frozen=True)
class AffectLevels:
    enjoyment_level: int
    engagement_level: int
    frustration_level: int


def quantize_level(value: float) -> int:
    """Map [0, 1] to the four-point scale: half-open bins at 0.25/0.5/0.75, top closed."""
    if value >= 0.75:
        return 3
    if value >= 0.5:
        return 2
    if value >= 0.25:
        return 1
    return 0


def quantize_levels(scores: AffectScores) -> AffectLevels:
    return AffectLevels(
        enjoyment_level=quantize_level(scores.enjoyment),
        engagement_level=quantize_level(scores.engagement),
        frustration_level=quantize_level(scores.frustration),
    )
