"""CDX index client: wire-format parsing, paginated queries, window checks.

The wire format is one capture per line, seven space-separated fields:

    urlkey timestamp original mimetype statuscode digest length

Queries go through a backend object (fixture store or live endpoint) that
exposes ``cdx_page_count(query)`` and ``cdx_page(query, page)``; this module
owns pagination, the politeness delay between page fetches, retries, and
row-level error recovery.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum

from .clock import RateLimiter
from .epochs import EpochSpec, parse_ts14
from .errors import BackendUnreachable, ParseError, RateLimited
from .urlkeys import SurtKey, canonicalize, surt_prefix

MAX_ATTEMPTS = 3


@dataclass(frozen=True)
class CdxRecord:
    urlkey: str
    timestamp: str
    original: str
    mimetype: str
    status: str  # "-" or "100".."599"
    digest: str
    length: int

    @property
    def datetime(self) -> datetime:
        return parse_ts14(self.timestamp)

    @property
    def is_success(self) -> bool:
        return self.status == "200"

    def line(self) -> str:
        return (
            f"{self.urlkey} {self.timestamp} {self.original} "
            f"{self.mimetype} {self.status} {self.digest} {self.length}"
        )


class MatchType(Enum):
    EXACT = "exact"
    PREFIX = "prefix"
    DOMAIN = "domain"


@dataclass(frozen=True)
class CdxQuery:
    """target is a URL for Exact/Domain matches, a URL or SURT prefix for Prefix."""

    match_type: MatchType
    target: str
    from_ts: str | None = None  # year ("2008") or 14-digit bound
    to_ts: str | None = None

    def surt_target(self) -> str:
        if self.match_type is MatchType.PREFIX:
            if ")" in self.target and "://" not in self.target:
                return self.target  # already a SURT prefix
            return surt_prefix(
                self.target if "://" in self.target else "http://" + self.target
            )
        url = self.target if "://" in self.target else "http://" + self.target
        return canonicalize(url).key

    @staticmethod
    def exact(url: str, from_ts=None, to_ts=None) -> "CdxQuery":
        return CdxQuery(MatchType.EXACT, url, from_ts, to_ts)

    @staticmethod
    def prefix(target: str, from_ts=None, to_ts=None) -> "CdxQuery":
        return CdxQuery(MatchType.PREFIX, target, from_ts, to_ts)

    @staticmethod
    def domain(target: str, from_ts=None, to_ts=None) -> "CdxQuery":
        return CdxQuery(MatchType.DOMAIN, target, from_ts, to_ts)


def expand_bound(bound: str, is_from: bool) -> str:
    """Widen a partial timestamp bound ("2008", "200803") to 14 digits."""
    template = "00000101000000" if is_from else "99991231235959"
    return bound + template[len(bound):]


def parse_cdx_line(line: str, line_no: int | None = None) -> CdxRecord:
    fields = line.split(" ")
    if len(fields) != 7:
        raise ParseError(f"expected 7 fields, got {len(fields)}: {line!r}", line_no)
    urlkey, timestamp, original, mimetype, status, digest, length = fields
    try:
        parse_ts14(timestamp)
    except ValueError as e:
        raise ParseError(f"bad timestamp {timestamp!r}: {e}", line_no) from e
    if status != "-":
        if not status.isdigit() or not 100 <= int(status) <= 599:
            raise ParseError(f"bad status {status!r}", line_no)
    try:
        length_n = int(length)
        if length_n < 0:
            raise ValueError
    except ValueError:
        raise ParseError(f"bad length {length!r}", line_no) from None
    return CdxRecord(urlkey, timestamp, original, mimetype, status, digest, length_n)


@dataclass
class FetchStats:
    pages: int = 0
    rows: int = 0
    parse_errors: list[tuple[int, str]] = field(default_factory=list)


class CdxGateway:
    """Paginated CDX access behind one politeness gate.

    Every backend call (page-count preflight included) waits on the shared
    limiter, so consecutive page fetches within a query are separated by
    exactly one drawn delay and the endpoint never sees a tighter gap across
    queries either.
    """

    def __init__(self, backend, limiter: RateLimiter):
        self.backend = backend
        self.limiter = limiter

    def _call(self, fn, *args):
        attempt = 0
        while True:
            attempt += 1
            self.limiter.wait()
            try:
                return fn(*args)
            except (RateLimited, BackendUnreachable):
                if attempt >= MAX_ATTEMPTS:
                    raise
                self.limiter.clock.sleep(self.limiter.backoff(attempt))

    def fetch(self, query: CdxQuery, stats: FetchStats | None = None) -> list[CdxRecord]:
        """All rows for the query, across every page, in index order.

        Malformed rows are skipped and recorded in ``stats``; they never
        abort the fetch.
        """
        stats = stats if stats is not None else FetchStats()
        page_count = self._call(self.backend.cdx_page_count, query)
        records: list[CdxRecord] = []
        line_no = 0
        for page in range(page_count):
            text = self._call(self.backend.cdx_page, query, page)
            stats.pages += 1
            for line in text.splitlines():
                line_no += 1
                if not line.strip():
                    continue
                try:
                    records.append(parse_cdx_line(line, line_no))
                except ParseError as e:
                    stats.parse_errors.append((line_no, str(e)))
        stats.rows = len(records)
        return records


class WindowStatus(Enum):
    SUCCESS = "SuccessCapture"
    NON_SUCCESS_ONLY = "NonSuccessOnly"
    NO_CAPTURE = "NoCapture"


@dataclass(frozen=True)
class WindowResult:
    status: WindowStatus
    record: CdxRecord | None = None

    def __bool__(self) -> bool:
        return self.status is WindowStatus.SUCCESS


def capture_status_in_window(records: list[CdxRecord], window: EpochSpec) -> WindowResult:
    """Classify a key's captures against one epoch window.

    Success returns the 200 capture nearest the window target; ties go to
    the earlier timestamp. Revisit rows (status "-") have no archived body
    and count as non-success.
    """
    in_window = [r for r in records if window.contains(r.datetime)]
    if not in_window:
        return WindowResult(WindowStatus.NO_CAPTURE)
    successes = [r for r in in_window if r.is_success]
    if not successes:
        return WindowResult(WindowStatus.NON_SUCCESS_ONLY)
    best = min(successes, key=lambda r: (abs(r.datetime - window.target), r.datetime))
    return WindowResult(WindowStatus.SUCCESS, best)


def filter_records(records, key: SurtKey | None = None):
    if key is None:
        return list(records)
    return [r for r in records if r.urlkey == key.key]
