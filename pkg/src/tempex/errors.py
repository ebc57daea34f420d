"""Exception types shared across the toolkit."""


class TempexError(Exception):
    """Base class for all toolkit errors."""


class MalformedUrl(TempexError):
    """Input could not be parsed as an absolute URL."""


class UnsupportedScheme(TempexError):
    """URL parses but its scheme is not http or https."""


class ParseError(TempexError):
    """A wire-format line or document could not be parsed.

    ``line_no`` is set when the error refers to a specific line of a
    multi-line payload.
    """

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class MissingDatetime(TempexError):
    """A memento link carried no datetime attribute."""


class BackendUnreachable(TempexError):
    """Transport failure that persisted through bounded retries."""


class RateLimited(TempexError):
    """The backend signalled throttling."""


class AllArchivesFailed(TempexError):
    """Every configured archive endpoint errored during aggregation."""


class FileUnreadable(TempexError):
    """An input file could not be opened."""


class ManifestMissing(TempexError):
    """Fixture root has no manifest.json."""


class BodyMissing(TempexError):
    """Manifest references a body file that does not exist."""

    def __init__(self, surt: str, ts: str):
        super().__init__(f"body missing for {surt} @ {ts}")
        self.surt = surt
        self.ts = ts


class ChecksumMismatch(TempexError):
    """A body file's size does not match the length recorded for it."""


class MissingEpochBody(TempexError):
    """Change attribution requires a body for every configured epoch."""


class FewerThanThreeEpochs(TempexError):
    """Trend-shape classification needs exactly three epoch counts."""


class PairNotVerified(TempexError):
    """A backward-extension pair failed re-verification of its later epochs."""


class ConfigError(TempexError):
    """Run configuration failed validation."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
