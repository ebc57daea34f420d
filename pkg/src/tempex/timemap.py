"""Memento TimeMap parsing and multi-archive aggregation.

TimeMaps arrive as application/link-format (RFC 7089): a comma-separated
list of ``<uri>; rel="..."; datetime="..."`` links. Real documents in the
wild drop attributes and whitespace in creative ways, so the parser is
tolerant everywhere except genuinely unbalanced ``<...>`` syntax.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime

from .epochs import EpochSpec
from .errors import AllArchivesFailed, MissingDatetime, ParseError, TempexError
from .urlkeys import SurtKey, canonicalize

EARLIEST_PLAUSIBLE = 1996  # the public archived web starts here


@dataclass(frozen=True)
class CaptureRef:
    """A resolvable archived capture of one original URL."""

    original: SurtKey
    archive_id: str
    datetime: datetime
    uri_m: str
    status: str | None = None  # unknown until a CDX lookup fills it

    def dedupe_key(self):
        return (self.archive_id, self.datetime)


@dataclass
class MergedTimeMap:
    original: SurtKey
    captures: list[CaptureRef] = field(default_factory=list)
    archive_errors: dict[str, str] = field(default_factory=dict)


def _split_links(body: str):
    """Yield (uri, params_text) for each link, honoring quoted commas."""
    i, n = 0, len(body)
    while i < n:
        while i < n and body[i] in " \t\r\n,":
            i += 1
        if i >= n:
            return
        if body[i] != "<":
            raise ParseError(f"expected '<' at offset {i}")
        close = body.find(">", i)
        if close < 0:
            raise ParseError("unbalanced link syntax: '<' without '>'")
        uri = body[i + 1 : close]
        k = close + 1
        in_quotes = False
        while k < n:
            c = body[k]
            if c == '"':
                in_quotes = not in_quotes
            elif c == "," and not in_quotes:
                break
            k += 1
        yield uri, body[close + 1 : k]
        i = k + 1


def _parse_params(text: str) -> dict[str, str]:
    params = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk or "=" not in chunk:
            continue
        key, _, value = chunk.partition("=")
        params[key.strip().lower()] = value.strip().strip('"')
    return params


def _original_from_uri_m(uri_m: str) -> str | None:
    # Replay URLs embed the original after the 14-digit stamp:
    # .../web/20080101000000/http://epa.gov/
    for marker in ("/http://", "/https://"):
        pos = uri_m.find(marker)
        if pos > 0:
            return uri_m[pos + 1 :]
    return None


def parse_timemap(
    body: str, archive_id: str, problems: list[TempexError] | None = None
) -> list[CaptureRef]:
    """Extract memento links as CaptureRefs, in document order.

    Links whose rel does not include "memento" are ignored. Memento links
    without a parseable datetime, or dated before the plausible archive era,
    are skipped; the reason is recorded in ``problems`` when a list is given.
    """
    problems = problems if problems is not None else []
    original_url: str | None = None
    mementos: list[tuple[str, dict[str, str]]] = []
    for uri, params_text in _split_links(body):
        params = _parse_params(params_text)
        rels = params.get("rel", "").split()
        if "original" in rels:
            original_url = uri
        if "memento" in rels:
            mementos.append((uri, params))

    refs: list[CaptureRef] = []
    for uri_m, params in mementos:
        raw_dt = params.get("datetime")
        if not raw_dt:
            problems.append(MissingDatetime(f"memento without datetime: {uri_m}"))
            continue
        try:
            dt = parsedate_to_datetime(raw_dt)
        except (TypeError, ValueError):
            problems.append(MissingDatetime(f"unparseable datetime {raw_dt!r}: {uri_m}"))
            continue
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        dt = dt.astimezone(timezone.utc)
        if dt.year < EARLIEST_PLAUSIBLE:
            problems.append(ParseError(f"implausible datetime {raw_dt!r}: {uri_m}"))
            continue
        source = original_url or _original_from_uri_m(uri_m)
        if source is None:
            problems.append(ParseError(f"cannot determine original URL for memento {uri_m}"))
            continue
        refs.append(
            CaptureRef(
                original=canonicalize(source),
                archive_id=archive_id,
                datetime=dt,
                uri_m=uri_m,
            )
        )
    return refs


def merge_captures(original: SurtKey, capture_lists) -> MergedTimeMap:
    """Union capture lists, deduplicating on (archive_id, datetime)."""
    seen = {}
    for captures in capture_lists:
        for ref in captures:
            seen.setdefault(ref.dedupe_key(), ref)
    merged = sorted(seen.values(), key=lambda r: (r.datetime, r.archive_id))
    return MergedTimeMap(original=original, captures=merged)


def aggregate(url: str, archive_ids: list[str], backend) -> MergedTimeMap:
    """Query each archive's TimeMap for ``url`` and merge the results.

    Individual archive failures are recorded on the result; only a failure
    of every archive raises.
    """
    if not archive_ids:
        raise ValueError("no archives configured")
    original = canonicalize(url)
    lists = []
    errors: dict[str, str] = {}
    for archive_id in archive_ids:
        try:
            body = backend.timemap(archive_id, url)
            lists.append(parse_timemap(body, archive_id))
        except TempexError as e:
            errors[archive_id] = str(e)
    if len(errors) == len(archive_ids):
        raise AllArchivesFailed(f"all {len(archive_ids)} archives failed for {url}")
    merged = merge_captures(original, lists)
    merged.archive_errors = errors
    return merged


def archives_with_window(timemap: MergedTimeMap, window: EpochSpec) -> list[str]:
    """Archive ids holding at least one capture inside the window, sorted."""
    return sorted({c.archive_id for c in timemap.captures if window.contains(c.datetime)})
