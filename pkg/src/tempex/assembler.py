"""Assembly of verified snapshot tuples from every candidate stream.

A tuple is one URL with exactly one successful capture per configured epoch.
Candidates arrive from five places (original-collection pairs, past-web
crawls, full-domain CDX sweeps, external URL lists, manual curation); all of
them pass through the same CDX verification here, so nothing upstream can
smuggle an unverified tuple into the dataset.
"""

from __future__ import annotations

import csv
import json
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from threading import Lock
from typing import Iterable, Iterator

from .cdx import CdxGateway, CdxQuery, WindowResult, WindowStatus, capture_status_in_window
from .crawler import DEFAULT_TRAP_CONFIG, TrapConfig, detect_trap, extract_links
from .epochs import EpochSpec, format_ts14
from .errors import FileUnreadable, MalformedUrl, PairNotVerified, UnsupportedScheme
from .fixture import replay_url
from .timemap import CaptureRef
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

CDX_ARCHIVE = "web.archive.org"


class Source(Enum):
    ORIGINAL_COLLECTION = "OriginalCollection"
    PASTWEB_CRAWL = "PastWebCrawl"
    DOMAIN_SWEEP = "DomainSweep"
    EXTERNAL_LIST = "ExternalList"
    MANUAL_CURATION = "ManualCuration"


# Lower rank wins when the same key arrives from several sources.
SOURCE_PRECEDENCE = {
    Source.ORIGINAL_COLLECTION: 0,
    Source.MANUAL_CURATION: 1,
    Source.DOMAIN_SWEEP: 2,
    Source.PASTWEB_CRAWL: 3,
    Source.EXTERNAL_LIST: 4,
}

_DEPTH_ORDER = {DepthClass.HIGH: 0, DepthClass.DEEP: 1}


def agency_of(url: str, aliases: dict[str, str] | None = None) -> str:
    host = canonicalize(url).host
    domain = registrable_domain(host)
    if aliases:
        return aliases.get(host, aliases.get(domain, domain))
    return domain


@dataclass(frozen=True)
class SnapshotTuple:
    surt: SurtKey
    url: str
    agency: str
    depth: PathDepthClass
    captures: dict  # epoch name -> CaptureRef
    source: Source

    def sort_key(self):
        return (self.agency, _DEPTH_ORDER[self.depth.depth], self.surt.key)

    def row(self) -> dict:
        return {
            "surt": self.surt.key,
            "url": self.url,
            "agency": self.agency,
            "depth": self.depth.depth.value,
            "captures": {
                name: {
                    "archive": ref.archive_id,
                    "datetime": format_ts14(ref.datetime),
                    "uri_m": ref.uri_m,
                }
                for name, ref in self.captures.items()
            },
            "source": self.source.value,
        }


@dataclass(frozen=True)
class Candidate:
    """One URL offered for forward extension, with its origin stream."""

    url: str
    source: Source
    high_threshold: int = 1

    @property
    def surt(self) -> SurtKey:
        return canonicalize(self.url)

    @property
    def depth(self) -> PathDepthClass:
        return classify_depth(self.url, self.high_threshold)

    @property
    def agency(self) -> str:
        return agency_of(self.url)


class QuotaLedger:
    """Per-(agency, depth) acquisition counters with check-and-increment.

    ``found`` only counts tuples claimed through the ledger; it never
    decreases. When the agency set is given up front, ``all_full`` lets a
    consumer stop pulling candidates as soon as every bucket is satisfied.
    """

    def __init__(self, target: int = 15, agencies: Iterable[str] | None = None):
        self.target = target
        self._lock = Lock()
        self._found: dict[tuple[str, DepthClass], int] = {}
        self._preconfigured = agencies is not None
        self._buckets: set[tuple[str, DepthClass]] = set()
        if agencies:
            for agency in agencies:
                for depth in (DepthClass.HIGH, DepthClass.DEEP):
                    self._buckets.add((agency, depth))
                    self._found[(agency, depth)] = 0

    def found(self, agency: str, depth: DepthClass) -> int:
        return self._found.get((agency, depth), 0)

    def is_full(self, agency: str, depth: DepthClass) -> bool:
        return self.found(agency, depth) >= self.target

    def all_full(self) -> bool:
        if not self._preconfigured:
            return False
        return all(self._found[b] >= self.target for b in self._buckets)

    def try_claim(self, agency: str, depth: DepthClass) -> bool:
        with self._lock:
            key = (agency, depth)
            if self._found.get(key, 0) >= self.target:
                return False
            self._found[key] = self._found.get(key, 0) + 1
            self._buckets.add(key)
            return True

    def snapshot(self) -> list[dict]:
        with self._lock:
            rows = [
                {
                    "agency": agency,
                    "depth": depth.value,
                    "target": self.target,
                    "found": self._found.get((agency, depth), 0),
                }
                for agency, depth in sorted(self._buckets, key=lambda b: (b[0], b[1].value))
            ]
        return rows


def _window_records(gateway: CdxGateway, url: str, window: EpochSpec):
    query = CdxQuery.exact(
        url, from_ts=format_ts14(window.start), to_ts=format_ts14(window.end)
    )
    return gateway.fetch(query)


def check_window(gateway: CdxGateway, url: str, window: EpochSpec) -> WindowResult:
    return capture_status_in_window(_window_records(gateway, url, window), window)


def _ref_from_record(record, archive_id: str = CDX_ARCHIVE) -> CaptureRef:
    return CaptureRef(
        original=canonicalize(record.original),
        archive_id=archive_id,
        datetime=record.datetime,
        uri_m=replay_url(archive_id, record.timestamp, record.original),
        status=record.status,
    )


class BackwardStatus(Enum):
    TUPLE = "Tuple"
    NO_EARLY_CAPTURE = "NoEarlyCapture"
    EARLY_NON_SUCCESS = "EarlyCaptureNonSuccess"


@dataclass
class BackwardResult:
    status: BackwardStatus
    tuple: SnapshotTuple | None = None


class ForwardStatus(Enum):
    TUPLE = "Tuple"
    MISSING_MIDDLE = "MissingMiddle"
    MISSING_LATE = "MissingLate"


@dataclass
class ForwardResult:
    status: ForwardStatus
    tuple: SnapshotTuple | None = None


def _build_tuple(url: str, refs: dict, source: Source, high_threshold: int = 1) -> SnapshotTuple:
    return SnapshotTuple(
        surt=canonicalize(url),
        url=url,
        agency=agency_of(url),
        depth=classify_depth(url, high_threshold),
        captures=refs,
        source=source,
    )


def extend_backward(
    url: str,
    gateway: CdxGateway,
    epochs: list[EpochSpec],
    source: Source = Source.ORIGINAL_COLLECTION,
    high_threshold: int = 1,
) -> BackwardResult:
    """Extend a verified later-epoch pair back into the earliest window.

    The later epochs are re-verified from the index rather than trusted;
    a pair that no longer holds raises PairNotVerified so the caller can
    count it instead of emitting a bad tuple.
    """
    early, later = epochs[0], epochs[1:]
    refs: dict = {}
    for window in later:
        result = check_window(gateway, url, window)
        if result.status is not WindowStatus.SUCCESS:
            raise PairNotVerified(f"{url}: no successful capture in {window.name}")
        refs[window.name] = _ref_from_record(result.record)

    early_result = check_window(gateway, url, early)
    if early_result.status is WindowStatus.NO_CAPTURE:
        return BackwardResult(BackwardStatus.NO_EARLY_CAPTURE)
    if early_result.status is WindowStatus.NON_SUCCESS_ONLY:
        return BackwardResult(BackwardStatus.EARLY_NON_SUCCESS)
    refs[early.name] = _ref_from_record(early_result.record)
    ordered = {e.name: refs[e.name] for e in epochs}
    return BackwardResult(
        BackwardStatus.TUPLE, _build_tuple(url, ordered, source, high_threshold)
    )


def extend_forward(
    url: str,
    gateway: CdxGateway,
    epochs: list[EpochSpec],
    source: Source,
    high_threshold: int = 1,
) -> ForwardResult:
    """Extend a verified early capture through the later windows, in order.

    The early window is re-verified; callers must have screened it already
    (PairNotVerified otherwise). The first later window without a successful
    capture classifies the failure.
    """
    early, later = epochs[0], epochs[1:]
    early_result = check_window(gateway, url, early)
    if early_result.status is not WindowStatus.SUCCESS:
        raise PairNotVerified(f"{url}: early window {early.name} not verified")
    refs = {early.name: _ref_from_record(early_result.record)}
    for i, window in enumerate(later):
        result = check_window(gateway, url, window)
        if result.status is not WindowStatus.SUCCESS:
            is_last = i == len(later) - 1
            return ForwardResult(
                ForwardStatus.MISSING_LATE if is_last else ForwardStatus.MISSING_MIDDLE
            )
        refs[window.name] = _ref_from_record(result.record)
    return ForwardResult(ForwardStatus.TUPLE, _build_tuple(url, refs, source, high_threshold))


@dataclass
class FunnelReport:
    pairs: int = 0
    with_early_capture: int = 0
    eliminated_non_success: int = 0
    tuples: int = 0
    stale_pairs: int = 0


def extend_backward_batch(
    urls: list[str],
    gateway: CdxGateway,
    epochs: list[EpochSpec],
    workers: int = 1,
    high_threshold: int = 1,
) -> tuple[list[SnapshotTuple], FunnelReport]:
    """Run the backward-extension funnel over a pair list."""
    report = FunnelReport(pairs=len(urls))
    tuples: list[SnapshotTuple] = []

    def run(url: str):
        try:
            return extend_backward(
                url, gateway, epochs, Source.ORIGINAL_COLLECTION, high_threshold
            )
        except PairNotVerified:
            return None

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, urls))
    else:
        results = [run(url) for url in urls]

    for result in results:
        if result is None:
            report.stale_pairs += 1
            continue
        if result.status is BackwardStatus.TUPLE:
            report.with_early_capture += 1
            report.tuples += 1
            tuples.append(result.tuple)
        elif result.status is BackwardStatus.EARLY_NON_SUCCESS:
            report.with_early_capture += 1
            report.eliminated_non_success += 1
    return tuples, report


@dataclass
class FillReport:
    consumed: int = 0
    skipped_full: int = 0
    failed_early: int = 0
    missing_middle: int = 0
    missing_late: int = 0
    claimed: int = 0


def fill_quota(
    stream: Iterable[Candidate],
    ledger: QuotaLedger,
    gateway: CdxGateway,
    epochs: list[EpochSpec],
    high_first: bool = True,
) -> tuple[list[SnapshotTuple], FillReport]:
    """Consume candidates until every ledger bucket is satisfied.

    High candidates are verified as they arrive; deep candidates for an
    agency wait in a side buffer until that agency's high bucket is full or
    the stream ends, so verification effort goes to high pages first. Full
    buckets skip candidates without paying for verification.
    """
    report = FillReport()
    tuples: list[SnapshotTuple] = []
    deferred: dict[str, deque[Candidate]] = {}

    def verify(cand: Candidate) -> None:
        try:
            result = extend_forward(
                cand.url, gateway, epochs, cand.source, cand.high_threshold
            )
        except PairNotVerified:
            report.failed_early += 1
            return
        if result.status is ForwardStatus.MISSING_MIDDLE:
            report.missing_middle += 1
            return
        if result.status is ForwardStatus.MISSING_LATE:
            report.missing_late += 1
            return
        tup = result.tuple
        if ledger.try_claim(tup.agency, tup.depth.depth):
            report.claimed += 1
            tuples.append(tup)

    def drain(agency: str) -> None:
        queue = deferred.get(agency)
        while queue and not ledger.is_full(agency, DepthClass.DEEP):
            verify(queue.popleft())

    for cand in stream:
        if ledger.all_full():
            break
        report.consumed += 1
        agency, depth = cand.agency, cand.depth.depth
        if ledger.is_full(agency, depth):
            report.skipped_full += 1
            continue
        if high_first and depth is DepthClass.DEEP and not ledger.is_full(agency, DepthClass.HIGH):
            deferred.setdefault(agency, deque()).append(cand)
            continue
        verify(cand)
        if high_first and depth is DepthClass.HIGH and ledger.is_full(agency, DepthClass.HIGH):
            drain(agency)

    for agency in sorted(deferred):
        drain(agency)

    return tuples, report


@dataclass
class ExternalListStats:
    lines: int = 0
    malformed: int = 0
    out_of_scope: int = 0
    duplicates: int = 0
    traps: Counter = field(default_factory=Counter)
    emitted: int = 0

    @property
    def trap_total(self) -> int:
        return sum(self.traps.values())

    @property
    def trap_ratio(self) -> float | None:
        denominator = self.trap_total + self.emitted + self.duplicates
        if denominator == 0:
            return None
        return self.trap_total / denominator


class ExternalListStream:
    """Streaming, trap-filtered candidate source over a plain URL list.

    One-shot iterable: the file is read lazily, line by line, and never
    held in memory. ``stats`` is complete once iteration finishes.
    """

    def __init__(
        self,
        path,
        scope: ScopeRule,
        trap_config: TrapConfig = DEFAULT_TRAP_CONFIG,
        high_threshold: int = 1,
    ):
        self.path = Path(path)
        self.scope = scope
        self.trap_config = trap_config
        self.high_threshold = high_threshold
        self.stats = ExternalListStats()
        try:
            self._handle = open(self.path, encoding="utf-8")
        except OSError as e:
            raise FileUnreadable(f"{self.path}: {e}") from e

    def __iter__(self) -> Iterator[Candidate]:
        seen: set[str] = set()
        siblings: Counter = Counter()
        with self._handle as f:
            for line in f:
                url = line.strip()
                if not url or url.startswith("#"):
                    continue
                self.stats.lines += 1
                try:
                    key = canonicalize(url)
                except (MalformedUrl, UnsupportedScheme):
                    self.stats.malformed += 1
                    continue
                if not in_scope(url, self.scope):
                    self.stats.out_of_scope += 1
                    continue
                parent = key.key.rsplit("/", 1)[0]
                verdict = detect_trap(url, siblings[parent], self.trap_config)
                siblings[parent] += 1
                if verdict.is_trap:
                    self.stats.traps[verdict.reason.value] += 1
                    continue
                if key.key in seen:
                    self.stats.duplicates += 1
                    continue
                seen.add(key.key)
                self.stats.emitted += 1
                yield Candidate(url=url, source=Source.EXTERNAL_LIST, high_threshold=self.high_threshold)


def ingest_external_list(
    path,
    scope: ScopeRule,
    trap_config: TrapConfig = DEFAULT_TRAP_CONFIG,
    high_threshold: int = 1,
) -> ExternalListStream:
    return ExternalListStream(path, scope, trap_config, high_threshold)


def sweep_domains(
    domains: list[str],
    gateway: CdxGateway,
    epochs: list[EpochSpec],
    backend=None,
    scope: ScopeRule | None = None,
    high_threshold: int = 1,
) -> list[Candidate]:
    """Full-domain candidate discovery for small, poorly-linked domains.

    Runs a prefix CDX query restricted to the early window, then (when a
    replay backend is available) a depth-1 crawl of each hit to pick up
    pages and subdomains the index query cannot see.
    """
    early = epochs[0]
    candidates: list[Candidate] = []
    seen: set[str] = set()

    def add(url: str) -> None:
        try:
            key = canonicalize(url).key
        except (MalformedUrl, UnsupportedScheme):
            return
        if key not in seen:
            seen.add(key)
            candidates.append(
                Candidate(url=url, source=Source.DOMAIN_SWEEP, high_threshold=high_threshold)
            )

    for domain in domains:
        query = CdxQuery.prefix(
            f"http://{domain}/",
            from_ts=format_ts14(early.start),
            to_ts=format_ts14(early.end),
        )
        records = gateway.fetch(query)
        hits = sorted(
            {r.original for r in records if r.is_success},
        )
        for url in hits:
            add(url)
        if backend is None:
            continue
        domain_scope = scope or ScopeRule()
        for url in hits:
            capture = backend.nearest_capture(url, early.target)
            if capture is None or capture.status != "200":
                continue
            if not early.contains(capture.datetime):
                continue
            for link in extract_links(backend.body(capture), base=url):
                if in_scope(link, domain_scope) and registrable_domain(
                    canonicalize(link).host
                ) == registrable_domain(domain):
                    add(link)
    return candidates


def merge_and_dedupe(sources: Iterable[Iterable[SnapshotTuple]]) -> list[SnapshotTuple]:
    """Union tuple lists on their key, resolving collisions by source rank."""
    chosen: dict[str, SnapshotTuple] = {}
    for tuples in sources:
        for tup in tuples:
            key = tup.surt.key
            current = chosen.get(key)
            if current is None or SOURCE_PRECEDENCE[tup.source] < SOURCE_PRECEDENCE[current.source]:
                chosen[key] = tup
    return sorted(chosen.values(), key=lambda t: t.sort_key())


# -- dataset serialization ---------------------------------------------------


def _json_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_triplets(path, tuples: list[SnapshotTuple]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for tup in tuples:
            f.write(_json_line(tup.row()) + "\n")


def read_triplets(path) -> list[SnapshotTuple]:
    from .epochs import parse_ts14

    tuples = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            row = json.loads(line)
            captures = {
                name: CaptureRef(
                    original=canonicalize(row["url"]),
                    archive_id=cap["archive"],
                    datetime=parse_ts14(cap["datetime"]),
                    uri_m=cap["uri_m"],
                )
                for name, cap in row["captures"].items()
            }
            depth = DepthClass(row["depth"])
            tuples.append(
                SnapshotTuple(
                    surt=canonicalize(row["url"]),
                    url=row["url"],
                    agency=row["agency"],
                    depth=PathDepthClass(depth, len(path_segments(row["url"]))),
                    captures=captures,
                    source=Source(row["source"]),
                )
            )
    return tuples


def write_summary_csv(path, tuples: list[SnapshotTuple]) -> None:
    """Agency x depth pivot of the dataset."""
    counts: dict[str, Counter] = {}
    for tup in tuples:
        counts.setdefault(tup.agency, Counter())[tup.depth.depth.value] += 1
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["agency", "high", "deep"])
        for agency in sorted(counts):
            writer.writerow([agency, counts[agency]["High"], counts[agency]["Deep"]])


def write_candidates(path, candidates) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for cand in candidates:
            f.write(_json_line(cand.row()) + "\n")


def read_candidate_urls(path) -> list[str]:
    """URLs from a candidates.jsonl file (crawl output)."""
    urls = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                urls.append(json.loads(line)["url"])
    return urls


def read_pairs(path) -> list[str]:
    """URLs from a pairs.jsonl file ({surt, url} rows)."""
    urls = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                urls.append(json.loads(line)["url"])
    return urls
