"""Exception hierarchy shared by the curbscan modules."""


class CurbscanError(Exception):
    """Base class for every error raised by this package."""


class TraceError(CurbscanError, ValueError):
    """A trace record or trace stream failed validation.

    ``index`` is the 0-based record position inside the stream when known.
    """

    def __init__(self, message: str, field: str | None = None, index: int | None = None):
        super().__init__(message)
        self.field = field
        self.index = index

    def __str__(self) -> str:
        msg = super().__str__()
        if self.index is not None:
            return f"record {self.index}: {msg}"
        return msg


class MalformedRecord(TraceError):
    pass


class OutOfRange(TraceError):
    pass


class NonMonotoneTimestamp(TraceError):
    pass


class EmptyTrace(TraceError):
    pass


class ZeroSpeed(CurbscanError, ValueError):
    """The vehicle is stationary, so a metric window has no duration."""


class TooFewSamples(CurbscanError, ValueError):
    pass


class NonPositiveRise(CurbscanError, ValueError):
    pass


class ZeroGroundTruth(CurbscanError, ValueError):
    pass


class StaleRun(CurbscanError):
    """A run is older than the state already held for a zone."""

    def __init__(self, zone_id: str, run_id: str, wall_clock, last_update):
        super().__init__(
            f"run {run_id!r} ({wall_clock}) is older than zone {zone_id!r} state ({last_update})"
        )
        self.zone_id = zone_id
        self.run_id = run_id
        self.wall_clock = wall_clock
        self.last_update = last_update
