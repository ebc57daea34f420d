"""Capture provenance: collection labels, source grouping, and trends.

Archives tag each capture with the collections that produced it. This
module maps those free-text labels onto nine stable source groups via an
ordered pattern table (editable JSON, no rebuild needed), then aggregates
group counts by agency, epoch, or Archive-It partner.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .clock import PROVENANCE_POLICY, RateLimiter
from .epochs import format_ts14
from .errors import ConfigError, FewerThanThreeEpochs
from .timemap import CaptureRef
from .urlkeys import registrable_domain


class SourceGroup(Enum):
    LARGE_IMPORTED_CRAWLS = "LargeImportedCrawls"
    ARCHIVE_IT = "ArchiveIt"
    SMALL_IMPORTED_CRAWLS = "SmallImportedCrawls"
    INTERNAL_CRAWLS = "InternalCrawls"
    END_OF_TERM = "EndOfTerm"
    ARCHIVE_TEAM = "ArchiveTeam"
    SOCIAL = "Social"
    MONITORING = "Monitoring"
    SAVE_PAGE_NOW = "SavePageNow"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class GroupingRule:
    pattern: str  # word-boundary matched, case-insensitive
    group: SourceGroup
    organization: str  # finer label: the contributing organization
    epoch: str | None = None  # restrict the rule to one epoch (GDELT flips in 2020)

    def matches(self, collection: str, epoch: str | None) -> bool:
        if self.epoch is not None and epoch != self.epoch:
            return False
        return re.search(rf"\b{re.escape(self.pattern)}\b", collection, re.IGNORECASE) is not None


class SourceGroupingTable:
    """Ordered first-match-wins rules mapping collection names to groups."""

    def __init__(self, rules: Sequence[GroupingRule]):
        self.rules = list(rules)

    def classify(
        self, collections: Iterable[str], epoch: str | None = None
    ) -> tuple[SourceGroup, str]:
        for collection in collections:
            for rule in self.rules:
                if rule.matches(collection, epoch):
                    return rule.group, rule.organization
        return SourceGroup.UNKNOWN, "unknown"

    def group_for(self, collections: Iterable[str], epoch: str | None = None) -> SourceGroup:
        return self.classify(collections, epoch)[0]

    @classmethod
    def from_file(cls, path) -> "SourceGroupingTable":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"grouping table {path}: {e}", field="grouping") from e
        return cls.from_rows(raw)

    @classmethod
    def from_rows(cls, rows) -> "SourceGroupingTable":
        rules = []
        for i, row in enumerate(rows):
            try:
                rules.append(
                    GroupingRule(
                        pattern=row["pattern"],
                        group=SourceGroup(row["group"]),
                        organization=row.get("organization", row["pattern"]),
                        epoch=row.get("epoch"),
                    )
                )
            except (KeyError, ValueError) as e:
                raise ConfigError(f"grouping rule {i}: {e}", field="grouping") from e
        return cls(rules)

    @classmethod
    def default(cls) -> "SourceGroupingTable":
        data = resources.files("tempex.data").joinpath("grouping.json").read_text("utf-8")
        return cls.from_rows(json.loads(data))


@dataclass(frozen=True)
class ProvenanceRecord:
    capture: CaptureRef
    collections: tuple[str, ...]
    group: SourceGroup
    organization: str
    partner: str | None
    epoch: str
    agency: str


def fetch_provenance(
    capture: CaptureRef,
    epoch: str,
    backend,
    table: SourceGroupingTable,
    limiter: RateLimiter | None = None,
    agency: str | None = None,
) -> ProvenanceRecord:
    """Pull one capture's collection labels and assign its source group.

    A capture the backend knows nothing about yields Unknown with empty
    collections; only transport failures raise.
    """
    if limiter is None:
        limiter = RateLimiter(PROVENANCE_POLICY)
    limiter.wait()
    info = backend.provenance(capture.original.source_url, format_ts14(capture.datetime))
    collections = tuple(info.get("collections", ()))
    group, organization = table.classify(collections, epoch)
    return ProvenanceRecord(
        capture=capture,
        collections=collections,
        group=group,
        organization=organization,
        partner=info.get("partner"),
        epoch=epoch,
        agency=agency if agency is not None else registrable_domain(capture.original.host),
    )


def distribution(records: Iterable[ProvenanceRecord], by: str) -> dict[str, Counter]:
    """Group counts per agency, epoch, or Archive-It partner.

    Rows with a zero count never appear; summing every counter reproduces
    the input size (minus partner-less records for ``by="partner"``).
    """
    if by not in ("agency", "epoch", "partner"):
        raise ValueError(f"unknown dimension {by!r}")
    table: dict[str, Counter] = {}
    for record in records:
        if by == "agency":
            dim = record.agency
        elif by == "epoch":
            dim = record.epoch
        else:
            if record.partner is None:
                continue
            dim = record.partner
        table.setdefault(dim, Counter())[record.group.value] += 1
    return table


def group_totals(records: Iterable[ProvenanceRecord]) -> Counter:
    counts = Counter()
    for record in records:
        counts[record.group.value] += 1
    return counts


def organization_totals(records: Iterable[ProvenanceRecord]) -> Counter:
    """Counts at the contributing-organization level (finer than groups:
    the large imported crawls split back into their separate crawlers)."""
    counts = Counter()
    for record in records:
        counts[record.organization] += 1
    return counts


class TrendShape(Enum):
    ALWAYS_GROWING = "AlwaysGrowing"
    ALWAYS_SHRINKING = "AlwaysShrinking"
    GROW_THEN_SHRINK = "GrowThenShrink"
    SHRINK_THEN_GROW = "ShrinkThenGrow"


def classify_trend(counts: Sequence[int]) -> TrendShape:
    """Shape of a three-epoch count series.

    A flat segment inherits the direction of the other segment; a fully
    flat series counts as AlwaysGrowing by convention.
    """
    if len(counts) != 3:
        raise FewerThanThreeEpochs(f"need exactly 3 epoch counts, got {len(counts)}")
    d1 = counts[1] - counts[0]
    d2 = counts[2] - counts[1]
    if d1 == 0:
        d1 = d2
    if d2 == 0:
        d2 = d1
    if d1 >= 0 and d2 >= 0:
        return TrendShape.ALWAYS_GROWING
    if d1 <= 0 and d2 <= 0:
        return TrendShape.ALWAYS_SHRINKING
    if d1 > 0 > d2:
        return TrendShape.GROW_THEN_SHRINK
    return TrendShape.SHRINK_THEN_GROW


def trend_shape(per_epoch_counts: Mapping[str, Sequence[int]]) -> dict[str, TrendShape]:
    return {group: classify_trend(counts) for group, counts in per_epoch_counts.items()}


def mine_dataset(
    tuples,
    backend,
    table: SourceGroupingTable,
    limiter: RateLimiter | None = None,
) -> list[ProvenanceRecord]:
    """Provenance for the cited capture of every epoch of every tuple."""
    if limiter is None:
        limiter = RateLimiter(PROVENANCE_POLICY)
    records: list[ProvenanceRecord] = []
    for tup in tuples:
        for epoch_name in tup.captures:
            records.append(
                fetch_provenance(
                    tup.captures[epoch_name],
                    epoch_name,
                    backend,
                    table,
                    limiter,
                    agency=tup.agency,
                )
            )
    return records
