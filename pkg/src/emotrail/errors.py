"""Error types shared across the package.

Every error the HTTP gateway can surface maps to exactly one of these
classes; the wire-level ``code`` is the class name.
"""


class EmotrailError(Exception):
    """Base class for all domain errors."""


# -- catalog ----------------------------------------------------------------

class ParseError(EmotrailError):
    """Input document could not be parsed at all."""


class ValidationError(EmotrailError):
    """Parsed document violates a structural invariant."""


class UnknownEmotion(EmotrailError):
    """Emotion id not present in the catalog."""


# -- session state machine --------------------------------------------------

class InvalidTransition(EmotrailError):
    """Event is not legal in the session's current phase."""


class EmotionReuse(EmotrailError):
    """Emotion was already chosen earlier in this session."""


class NoReports(EmotrailError):
    """Card scanned before any self-report was submitted."""


class SequenceGap(EmotrailError):
    """Event sequence number is not contiguous."""


# -- self reports -----------------------------------------------------------

class OutOfRange(EmotrailError):
    """Raw slider value outside [0, 1]."""


class SliderOutOfRange(EmotrailError):
    """Quantized slider component outside 0..100."""


class TextTooLong(EmotrailError):
    """Free text exceeds the postcard layout bound."""


class MappingMismatch(EmotrailError):
    """Report's painting does not match the catalog mapping of its emotion."""


# -- selection --------------------------------------------------------------

class EmptyReports(EmotrailError):
    """Selection requires at least one self-report."""


# -- FAU stream parsing -----------------------------------------------------

class HeaderMismatch(ParseError):
    """FAU CSV header line does not match the documented format."""


class RowParseError(ParseError):
    """FAU CSV row is malformed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class RangeError(EmotrailError):
    """FAU CSV field value outside its documented range."""

    def __init__(self, line: int, field: str, message: str = ""):
        detail = f"line {line}, field {field}"
        if message:
            detail += f": {message}"
        super().__init__(detail)
        self.line = line
        self.field = field


class NonMonotoneTimestamp(EmotrailError):
    """FAU frame timestamps must be strictly increasing."""

    def __init__(self, line: int, message: str = "timestamp not strictly increasing"):
        super().__init__(f"line {line}: {message}")
        self.line = line


# -- datastore --------------------------------------------------------------

class SessionDeleted(EmotrailError):
    """Session was hard-deleted; no further writes accepted."""


class UnknownSession(EmotrailError):
    """No session with this id exists in the store."""


class AlreadyDecided(EmotrailError):
    """A consent decision was already recorded for this session."""


# -- gateway ----------------------------------------------------------------

class UnknownToken(EmotrailError):
    """Scanned token does not resolve to any live session."""


class AlreadyInterviewed(EmotrailError):
    """The session already had its one interview."""


class UnknownProfile(EmotrailError):
    """Simulation profile name not recognized."""
