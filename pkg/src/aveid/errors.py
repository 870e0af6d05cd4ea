"""Exception hierarchy for the aveid package.

Every error raised on user input carries enough context (line number,
field/region name, subject, frame) to locate the offending input.
"""

from __future__ import annotations


class AveidError(Exception):
    """Base class for all errors raised by this package."""


# --- ingestion ---------------------------------------------------------

class IngestError(AveidError):
    """Base class for file parsing/validation failures."""


class EmptyFileError(IngestError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"{path}: file contains no data rows")


class MalformedRowError(IngestError):
    def __init__(self, path: str, line: int, reason: str):
        self.path = path
        self.line = line
        self.reason = reason
        super().__init__(f"{path}: line {line}: {reason}")


class DuplicateFrameError(IngestError):
    def __init__(self, path: str, line: int, subject: str, frame: int):
        self.path = path
        self.line = line
        self.subject = subject
        self.frame = frame
        super().__init__(
            f"{path}: line {line}: duplicate frame {frame} for subject '{subject}'"
        )


class NonMonotonicFramesError(IngestError):
    def __init__(self, path: str, line: int, subject: str, frame: int):
        self.path = path
        self.line = line
        self.subject = subject
        self.frame = frame
        super().__init__(
            f"{path}: line {line}: frame {frame} for subject '{subject}' "
            f"is not greater than the previous frame"
        )


class MalformedJsonError(IngestError):
    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


class MissingRegionError(IngestError):
    def __init__(self, path: str, name: str):
        self.path = path
        self.name = name
        super().__init__(f"{path}: missing region '{name}'")


class OutOfBoundsError(IngestError):
    def __init__(self, name: str, detail: str, path: str | None = None):
        self.path = path
        self.name = name
        prefix = f"{path}: " if path else ""
        super().__init__(f"{prefix}region/point '{name}': {detail}")


class OutOfRangeScoreError(IngestError):
    def __init__(self, path: str, line: int, field: str, value: object, allowed: str):
        self.path = path
        self.line = line
        self.field = field
        super().__init__(
            f"{path}: line {line}: {field}={value!r} outside allowed range {allowed}"
        )


class OverlappingPeriodsError(IngestError):
    def __init__(self, path: str, line: int, detail: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}: line {line}: {detail}")


# --- model / analytics -------------------------------------------------

class InvalidModelError(AveidError):
    """A core-model invariant was violated at construction time."""


class InvalidWindowError(AveidError):
    """Smoothing window is even or < 1."""


class EmptyWindowError(AveidError):
    """An observation window contains no detected frames; features undefined."""


class PeriodOutOfRangeError(AveidError):
    """An annotation period does not fit within the session duration."""


# --- stats -------------------------------------------------------------

class StatsError(AveidError):
    """Base class for statistical preconditions."""


class EmptyInputError(StatsError):
    pass


class LengthMismatchError(StatsError):
    pass


class TooFewSamplesError(StatsError):
    pass


class ConstantInputError(StatsError):
    pass


# --- validation harness ------------------------------------------------

class AlignmentMismatchError(AveidError):
    """Feature rows and score rows do not align one-to-one."""


class NoEngagedPeriodsError(AveidError):
    """No annotated engagement period was found across the sessions."""


# --- synthetic ---------------------------------------------------------

class InvalidSpecError(AveidError):
    """Generator spec violates its invariants."""


class ReducibleChainError(AveidError):
    """The gaze transition matrix has no unique stationary distribution."""
