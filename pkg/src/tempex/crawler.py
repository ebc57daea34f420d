"""Sticky-time crawler over the archived web.

Every fetch replays a URL at one fixed target instant; a capture is only
accepted when its archived status is 200 and its datetime falls in the
accepted years. Rejected pages contribute no outlinks, so a stale hub hides
its whole subtree — that is the point of the sticky policy, not a bug.
"""

from __future__ import annotations

import re
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from html.parser import HTMLParser
from urllib.parse import urljoin

from .clock import NO_DELAY, RateLimiter, RateLimitPolicy, RealClock
from .epochs import format_ts14, utc
from .errors import BackendUnreachable, MalformedUrl, UnsupportedScheme
from .urlkeys import (
    DepthClass,
    PathDepthClass,
    ScopeRule,
    SurtKey,
    canonicalize,
    classify_depth,
    in_scope,
    path_segments,
    registrable_domain,
)


@dataclass(frozen=True)
class StickyTimePolicy:
    target: datetime = utc(2008, 1, 1)
    accept_years: frozenset[int] = frozenset({2007, 2008})

    def admits(self, capture_dt: datetime) -> bool:
        return capture_dt.year in self.accept_years


class RejectReason(Enum):
    NON_SUCCESS_STATUS = "NonSuccessStatus"
    OUT_OF_WINDOW = "OutOfWindow"
    NO_CAPTURE = "NoCapture"
    FETCH_ERROR = "FetchError"
    OUT_OF_SCOPE = "OutOfScope"


@dataclass
class FetchOutcome:
    accepted: bool
    reason: RejectReason | None = None
    capture: object | None = None  # backend capture entry (has .status/.datetime/.ts)
    body: str = ""


def fetch_at(url: str, policy: StickyTimePolicy, backend) -> FetchOutcome:
    """Replay ``url`` at the policy target and apply the sticky acceptance rule."""
    capture = backend.nearest_capture(url, policy.target)
    if capture is None:
        return FetchOutcome(False, RejectReason.NO_CAPTURE)
    if capture.status != "200":
        return FetchOutcome(False, RejectReason.NON_SUCCESS_STATUS, capture)
    if not policy.admits(capture.datetime):
        return FetchOutcome(False, RejectReason.OUT_OF_WINDOW, capture)
    return FetchOutcome(True, None, capture, backend.body(capture))


class _AnchorCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)


def extract_links(body: str, base: str) -> list[str]:
    """Absolute anchor targets, deduplicated on their canonical key.

    Malformed HTML degrades to whatever the tolerant parser can see; this
    never raises. Scope filtering is the caller's job.
    """
    collector = _AnchorCollector()
    try:
        collector.feed(body)
        collector.close()
    except Exception:
        pass  # keep whatever was collected before the parser gave up
    links: list[str] = []
    seen: set[str] = set()
    for href in collector.hrefs:
        href = href.strip()
        if not href or href.startswith(("#", "mailto:", "javascript:")):
            continue
        absolute = urljoin(base, href)
        try:
            key = canonicalize(absolute).key
        except (MalformedUrl, UnsupportedScheme):
            continue
        if key not in seen:
            seen.add(key)
            links.append(absolute)
    return links


class TrapReason(Enum):
    REPEATED_SEGMENT = "RepeatedSegment"
    PATH_DEPTH_EXPLOSION = "PathDepthExplosion"
    CALENDAR_PATTERN = "CalendarPattern"
    SESSION_PARAM = "SessionParam"
    NONE = "None"


@dataclass(frozen=True)
class TrapVerdict:
    is_trap: bool
    reason: TrapReason


@dataclass(frozen=True)
class TrapConfig:
    repeat_threshold: int = 3
    depth_threshold: int = 12
    # Two or more consecutive year/month[/day] groups in the path.
    calendar_patterns: tuple[str, ...] = (r"(?:/\d{4}(?:/\d{1,2}){1,2}){2,}",)
    # A single trailing date group only counts once this many siblings from
    # the same directory have streamed past (one dated page is normal; a
    # grid of them is a calendar).
    calendar_sibling_threshold: int = 25
    session_params: frozenset[str] = frozenset({"jsessionid", "phpsessid", "sid"})


DEFAULT_TRAP_CONFIG = TrapConfig()

_DATE_TAIL = re.compile(r"/\d{4}(?:/\d{1,2}){1,2}/?$")


def detect_trap(url: str, siblings_seen: int = 0, config: TrapConfig = DEFAULT_TRAP_CONFIG) -> TrapVerdict:
    """Heuristic crawler-trap check on one URL.

    ``siblings_seen`` is how many URLs sharing this URL's parent directory
    the caller has already streamed; it only matters for the single-date
    calendar heuristic.
    """
    segs = path_segments(url)

    run = 1
    for prev, cur in zip(segs, segs[1:]):
        run = run + 1 if cur == prev else 1
        if run >= config.repeat_threshold:
            return TrapVerdict(True, TrapReason.REPEATED_SEGMENT)

    if len(segs) > config.depth_threshold:
        return TrapVerdict(True, TrapReason.PATH_DEPTH_EXPLOSION)

    path = "/" + "/".join(segs)
    for pattern in config.calendar_patterns:
        if re.search(pattern, path):
            return TrapVerdict(True, TrapReason.CALENDAR_PATTERN)
    if siblings_seen >= config.calendar_sibling_threshold and _DATE_TAIL.search(path):
        return TrapVerdict(True, TrapReason.CALENDAR_PATTERN)

    query = url.partition("?")[2]
    if query:
        param_names = {p.partition("=")[0].lower() for p in query.split("&")}
        if param_names & config.session_params:
            return TrapVerdict(True, TrapReason.SESSION_PARAM)

    return TrapVerdict(False, TrapReason.NONE)


@dataclass(frozen=True)
class CrawlCandidate:
    surt: SurtKey
    url: str
    depth_class: PathDepthClass
    accepted_ts: str  # 14-digit timestamp of the accepted capture
    crawl_depth: int

    def row(self) -> dict:
        return {
            "surt": self.surt.key,
            "url": self.url,
            "depth_class": self.depth_class.depth.value,
            "accepted_datetime": self.accepted_ts,
        }


@dataclass(frozen=True)
class CrawlConfig:
    scope: ScopeRule = ScopeRule()
    max_depth: int = 50
    high_threshold: int = 1
    trap: TrapConfig = DEFAULT_TRAP_CONFIG
    workers: int = 1
    # Replay-endpoint politeness, per host; distinct from (and far lighter
    # than) the CDX paging policy. Fixture runs leave it at zero.
    host_delay: RateLimitPolicy = NO_DELAY


@dataclass
class CrawlReport:
    candidates: list[CrawlCandidate] = field(default_factory=list)
    rejections: Counter = field(default_factory=Counter)
    traps: Counter = field(default_factory=Counter)
    fetched: int = 0

    def candidates_per_agency(self) -> Counter:
        counts = Counter()
        for cand in self.candidates:
            counts[registrable_domain(cand.surt.host)] += 1
        return counts


def crawl(
    seeds: list[str],
    policy: StickyTimePolicy,
    config: CrawlConfig,
    backend,
    clock=None,
) -> CrawlReport:
    """Breadth-first sticky-time crawl from ``seeds``.

    Only accepted pages contribute outlinks; trap-flagged URLs are never
    enqueued. Candidates come back sorted by key so reports are stable
    across worker counts.
    """
    clock = clock if clock is not None else RealClock()
    host_gates: dict[str, RateLimiter] = {}
    report = CrawlReport()
    frontier: deque[tuple[str, str, int]] = deque()
    enqueued: set[str] = set()
    trap_seen: set[str] = set()

    def admit(url: str, depth: int, *, is_seed: bool) -> None:
        try:
            if not in_scope(url, config.scope):
                if is_seed:
                    report.rejections[RejectReason.OUT_OF_SCOPE.value] += 1
                return
            key = canonicalize(url).key
        except (MalformedUrl, UnsupportedScheme):
            if is_seed:
                report.rejections[RejectReason.OUT_OF_SCOPE.value] += 1
            return
        if key in enqueued:
            return
        verdict = detect_trap(url, config=config.trap)
        if verdict.is_trap:
            if key not in trap_seen:
                trap_seen.add(key)
                report.traps[verdict.reason.value] += 1
            return
        if depth > config.max_depth:
            return
        enqueued.add(key)
        frontier.append((url, key, depth))

    for seed in seeds:
        admit(seed, 0, is_seed=True)

    def fetch_one(item):
        url, key, depth = item
        if config.host_delay.max_delay > 0:
            host = key.split(")", 1)[0]
            gate = host_gates.setdefault(host, RateLimiter(config.host_delay, clock))
            gate.wait()
        try:
            return item, fetch_at(url, policy, backend)
        except BackendUnreachable:
            return item, FetchOutcome(False, RejectReason.FETCH_ERROR)

    while frontier:
        level = list(frontier)
        frontier.clear()
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                results = list(pool.map(fetch_one, level))
        else:
            results = [fetch_one(item) for item in level]
        for (url, key, depth), outcome in results:
            report.fetched += 1
            if not outcome.accepted:
                report.rejections[outcome.reason.value] += 1
                continue
            report.candidates.append(
                CrawlCandidate(
                    surt=canonicalize(url),
                    url=url,
                    depth_class=classify_depth(url, config.high_threshold),
                    accepted_ts=format_ts14(outcome.capture.datetime),
                    crawl_depth=depth,
                )
            )
            for link in extract_links(outcome.body, base=url):
                admit(link, depth + 1, is_seed=False)

    report.candidates.sort(key=lambda c: c.surt.key)
    return report
