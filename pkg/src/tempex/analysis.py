"""Term-change analysis across epochs: extraction, attribution, trends,
tracked-term tables, and decay/redirect classification.

Attribution is purely presence-based over the three snapshots: a term is
"deleted" when it is present in the middle epoch and absent in the late one,
and it was "added" under the middle administration when the early snapshot
lacks it. A term that came and went entirely between snapshots is invisible;
that is an accepted limit of snapshot sampling, not something to paper over.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from html.parser import HTMLParser
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, MalformedUrl, MissingEpochBody
from .urlkeys import DepthClass, canonicalize, classify_depth, registrable_domain

# -- administration windows ---------------------------------------------------


@dataclass(frozen=True)
class AdminWindow:
    label: str
    party: str
    start: str | None  # 14-digit stamp; None = open-ended
    end: str | None


class AdministrationWindows:
    """Ordered, non-overlapping administration windows (metadata for reports)."""

    def __init__(self, windows: Sequence[AdminWindow]):
        if len(windows) < 3:
            raise ConfigError("need at least prior/middle/late windows", field="windows")
        for a, b in zip(windows, windows[1:]):
            if a.end is None or b.start is None or a.end >= b.start:
                raise ConfigError(
                    f"windows {a.label!r} and {b.label!r} overlap or are unordered",
                    field="windows",
                )
        self.windows = list(windows)

    @classmethod
    def from_file(cls, path) -> "AdministrationWindows":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"windows file {path}: {e}", field="windows") from e
        return cls._from_rows(raw)

    @classmethod
    def default(cls) -> "AdministrationWindows":
        data = resources.files("tempex.data").joinpath("windows.json").read_text("utf-8")
        return cls._from_rows(json.loads(data))

    @classmethod
    def _from_rows(cls, rows) -> "AdministrationWindows":
        try:
            return cls([
                AdminWindow(r["label"], r["party"], r.get("start"), r.get("end")) for r in rows
            ])
        except (KeyError, TypeError) as e:
            raise ConfigError(f"bad windows entry: {e}", field="windows") from e

    def rows(self) -> list[dict]:
        return [
            {"label": w.label, "party": w.party, "start": w.start, "end": w.end}
            for w in self.windows
        ]


# -- text extraction ----------------------------------------------------------

_SKIP_CONTENT = {"script", "style", "noscript"}


class _TextCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_CONTENT:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in _SKIP_CONTENT and self._skip_depth > 0:
            self._skip_depth -= 1

    def handle_data(self, data):
        if self._skip_depth == 0 and data:
            self.chunks.append(data)


def extract_text(body: str) -> str:
    """Visible text of an HTML body: tags gone, entities decoded,
    whitespace collapsed, lowercased. Never raises; empty in, empty out."""
    if not body:
        return ""
    collector = _TextCollector()
    try:
        collector.feed(body)
        collector.close()
    except Exception:
        pass
    return " ".join(" ".join(collector.chunks).lower().split())


_TOKEN_TRIM = ".,;:!?'\"()[]{}<>|/\\"


def tokenize(text: str, min_len: int = 3) -> list[str]:
    """Whitespace tokens with edge punctuation trimmed, shortest dropped.

    No stop-word filtering: years and stop words are real trend signals in
    this domain and get removed only when the caller opts in.
    """
    tokens = []
    for raw in text.split():
        token = raw.strip(_TOKEN_TRIM)
        if len(token) >= min_len:
            tokens.append(token)
    return tokens


def vocabulary(text: str, min_len: int = 3, drop_stop_words: bool = False) -> set[str]:
    vocab = set(tokenize(text, min_len))
    if drop_stop_words:
        vocab -= _STOP_WORDS
    return vocab


_STOP_WORDS = frozenset(
    "the and for are but not you all any can had her was one our out his has have "
    "this that with from they will what when where which their there been more".split()
)

_STEM_SUFFIX = r"(?:e?s|ed|ing)?"


def _stemmed_token(token: str) -> str:
    # an e-final stem absorbs its e before -ed/-ing (regulate -> regulated)
    if token.endswith("e"):
        return re.escape(token[:-1]) + "e?" + _STEM_SUFFIX
    return re.escape(token) + _STEM_SUFFIX


def term_present(text: str, term: str, stemming: bool = False) -> bool:
    """Word-boundary presence of a term or phrase in normalized text.

    Phrases tolerate any internal whitespace run. The optional light
    stemming also accepts s/es/ed/ing suffixes on the final token.
    """
    tokens = term.lower().split()
    if not tokens:
        return False
    if stemming:
        parts = [re.escape(t) for t in tokens[:-1]] + [_stemmed_token(tokens[-1])]
    else:
        parts = [re.escape(t) for t in tokens]
    core = r"\s+".join(parts)
    return re.search(rf"(?<!\w){core}(?!\w)", text) is not None


# -- change attribution --------------------------------------------------------


class AddedUnder(Enum):
    PRIOR_ADMIN = "PriorAdmin"
    MIDDLE_ADMIN = "MiddleAdmin"


class PageCategory(Enum):
    UNCHANGED = "Unchanged"
    CHANGED_NO_TRACKED_DELETION = "ChangedNoTrackedDeletion"
    DELETED_BOTH_ORIGINS = "DeletedBothOrigins"
    DELETED_MIDDLE_ONLY = "DeletedMiddleOnly"
    DELETED_PRIOR_ONLY = "DeletedPriorOnly"


@dataclass(frozen=True)
class DeletedTerm:
    term: str
    added_under: AddedUnder


@dataclass
class TermChangeReport:
    page: str  # SURT key
    agency: str
    presence: dict  # term -> tuple of per-epoch booleans
    deleted_terms: list[DeletedTerm]
    changed: bool
    page_category: PageCategory


def attribute_changes(
    page: str,
    agency: str,
    bodies: Mapping[str, str],
    epoch_order: Sequence[str],
    terms: Iterable[str],
    stemming: bool = False,
    texts_extracted: bool = False,
) -> TermChangeReport:
    """Per-term presence vectors and deletion attribution for one page.

    ``bodies`` maps each of exactly three epoch names to its HTML body (or
    pre-extracted text when ``texts_extracted``). Raises MissingEpochBody
    when any epoch has no body.
    """
    if len(epoch_order) != 3:
        raise ValueError(f"attribution needs exactly 3 epochs, got {len(epoch_order)}")
    texts = []
    for name in epoch_order:
        body = bodies.get(name)
        if body is None:
            raise MissingEpochBody(f"{page}: no body for epoch {name!r}")
        texts.append(body if texts_extracted else extract_text(body))
    early_text, middle_text, late_text = texts

    presence = {}
    deleted: list[DeletedTerm] = []
    for term in terms:
        vector = tuple(term_present(t, term, stemming) for t in texts)
        presence[term] = vector
        early, middle, late = vector
        if middle and not late:
            deleted.append(
                DeletedTerm(
                    term=term,
                    added_under=AddedUnder.PRIOR_ADMIN if early else AddedUnder.MIDDLE_ADMIN,
                )
            )
    deleted.sort(key=lambda d: d.term)

    changed = early_text != late_text
    origins = {d.added_under for d in deleted}
    if origins == {AddedUnder.PRIOR_ADMIN, AddedUnder.MIDDLE_ADMIN}:
        category = PageCategory.DELETED_BOTH_ORIGINS
    elif origins == {AddedUnder.MIDDLE_ADMIN}:
        category = PageCategory.DELETED_MIDDLE_ONLY
    elif origins == {AddedUnder.PRIOR_ADMIN}:
        category = PageCategory.DELETED_PRIOR_ONLY
    elif changed:
        category = PageCategory.CHANGED_NO_TRACKED_DELETION
    else:
        category = PageCategory.UNCHANGED

    return TermChangeReport(
        page=page,
        agency=agency,
        presence=presence,
        deleted_terms=deleted,
        changed=changed,
        page_category=category,
    )


# -- aggregation ----------------------------------------------------------------


@dataclass
class CategorySummary:
    counts: dict
    total_pages: int
    changed_pages: int
    pages_with_deletions: int
    percent_middle_only: float | None
    percent_any_middle: float | None
    percent_changed: float | None

    def as_dict(self) -> dict:
        return {
            "page_categories": dict(sorted(self.counts.items())),
            "total_pages": self.total_pages,
            "changed_pages": self.changed_pages,
            "pages_with_deletions": self.pages_with_deletions,
            "percentages": {
                "middle_only_of_deletions": self.percent_middle_only,
                "any_middle_of_deletions": self.percent_any_middle,
                "changed_of_all": self.percent_changed,
            },
        }


def _pct(numerator: int, denominator: int) -> float | None:
    if denominator == 0:
        return None
    return round(100.0 * numerator / denominator, 1)


def summarize_counts(
    both: int,
    middle_only: int,
    prior_only: int,
    pages_with_deletions: int,
    changed_pages: int,
    total_pages: int,
    extra_counts: dict | None = None,
) -> CategorySummary:
    """Percentage arithmetic over category counts.

    Split out from report aggregation so externally reported count sets can
    be fed straight through; zero denominators yield None, never zero.
    """
    counts = {
        PageCategory.DELETED_BOTH_ORIGINS.value: both,
        PageCategory.DELETED_MIDDLE_ONLY.value: middle_only,
        PageCategory.DELETED_PRIOR_ONLY.value: prior_only,
    }
    if extra_counts:
        counts.update(extra_counts)
    return CategorySummary(
        counts=counts,
        total_pages=total_pages,
        changed_pages=changed_pages,
        pages_with_deletions=pages_with_deletions,
        percent_middle_only=_pct(middle_only, pages_with_deletions),
        percent_any_middle=_pct(both + middle_only, pages_with_deletions),
        percent_changed=_pct(changed_pages, total_pages),
    )


def aggregate_categories(reports: Iterable[TermChangeReport]) -> CategorySummary:
    reports = list(reports)
    by_category = Counter(r.page_category for r in reports)
    with_deletions = (
        by_category[PageCategory.DELETED_BOTH_ORIGINS]
        + by_category[PageCategory.DELETED_MIDDLE_ONLY]
        + by_category[PageCategory.DELETED_PRIOR_ONLY]
    )
    return summarize_counts(
        both=by_category[PageCategory.DELETED_BOTH_ORIGINS],
        middle_only=by_category[PageCategory.DELETED_MIDDLE_ONLY],
        prior_only=by_category[PageCategory.DELETED_PRIOR_ONLY],
        pages_with_deletions=with_deletions,
        changed_pages=sum(1 for r in reports if r.changed),
        total_pages=len(reports),
        extra_counts={
            PageCategory.UNCHANGED.value: by_category[PageCategory.UNCHANGED],
            PageCategory.CHANGED_NO_TRACKED_DELETION.value: by_category[
                PageCategory.CHANGED_NO_TRACKED_DELETION
            ],
        },
    )


# -- change trends ----------------------------------------------------------------


@dataclass(frozen=True)
class ChangeTrend:
    agency: str
    term: str
    page_count: int


def mine_trends(reports: Iterable[TermChangeReport], threshold: int = 5) -> list[ChangeTrend]:
    """Terms deleted on at least ``threshold`` distinct pages of one agency.

    Reports must have been built with the full middle-epoch token vocabulary
    as their term set; a tracked-list report understates trends.
    """
    pages_per: dict[tuple[str, str], set[str]] = {}
    for report in reports:
        for deleted in report.deleted_terms:
            pages_per.setdefault((report.agency, deleted.term), set()).add(report.page)
    trends = [
        ChangeTrend(agency=agency, term=term, page_count=len(pages))
        for (agency, term), pages in pages_per.items()
        if len(pages) >= threshold
    ]
    trends.sort(key=lambda t: (t.agency, -t.page_count, t.term))
    return trends


# -- tracked terms ------------------------------------------------------------------


@dataclass(frozen=True)
class TrackedTerm:
    term: str
    category: str  # climate | regulation


class TrackedTermList:
    def __init__(self, terms: Sequence[TrackedTerm]):
        if not terms:
            raise ConfigError("tracked term list is empty", field="terms")
        normalized = []
        for t in terms:
            if t.category not in ("climate", "regulation"):
                raise ConfigError(f"bad category {t.category!r} for {t.term!r}", field="terms")
            normalized.append(TrackedTerm(" ".join(t.term.lower().split()), t.category))
        self.terms = normalized

    def term_strings(self) -> list[str]:
        return [t.term for t in self.terms]

    def category_of(self, term: str) -> str:
        for t in self.terms:
            if t.term == term:
                return t.category
        raise KeyError(term)

    @classmethod
    def from_file(cls, path) -> "TrackedTermList":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"terms file {path}: {e}", field="terms") from e
        return cls([TrackedTerm(r["term"], r["category"]) for r in raw])

    @classmethod
    def default(cls) -> "TrackedTermList":
        data = resources.files("tempex.data").joinpath("terms.json").read_text("utf-8")
        return cls([TrackedTerm(r["term"], r["category"]) for r in json.loads(data)])


@dataclass(frozen=True)
class TrackedTermRow:
    term: str
    category: str
    count: int


def tracked_term_table(
    reports: Iterable[TermChangeReport], tracked: TrackedTermList
) -> list[TrackedTermRow]:
    """Pages per tracked term where the term was deleted after being added
    under the middle administration. Descending by count, ties lexicographic."""
    counts = Counter()
    for report in reports:
        for deleted in report.deleted_terms:
            if deleted.added_under is AddedUnder.MIDDLE_ADMIN:
                counts[deleted.term] += 1
    rows = [
        TrackedTermRow(term=t.term, category=t.category, count=counts.get(t.term, 0))
        for t in tracked.terms
    ]
    rows.sort(key=lambda r: (-r.count, r.term))
    return rows


# -- decay / redirect classification ---------------------------------------------


class RedirectKind(Enum):
    NON_WWW_TO_WWW = "NonWwwToWww"
    OLD_TO_NEW_3XX = "OldToNew3xx"
    OLD_TO_NEW_404 = "OldToNew404"
    SUBDOMAIN_CHANGE = "SubdomainChange"
    SINK = "Sink"
    ERRONEOUS_INDEX = "ErroneousIndex"


class RedirectCategory(Enum):
    CANONICAL = "Canonical"
    NON_CANONICAL = "NonCanonical"
    SOFT_404 = "Soft404"
    DATA_QUALITY = "DataQuality"


KIND_CATEGORY = {
    RedirectKind.NON_WWW_TO_WWW: RedirectCategory.CANONICAL,
    RedirectKind.OLD_TO_NEW_3XX: RedirectCategory.NON_CANONICAL,
    RedirectKind.OLD_TO_NEW_404: RedirectCategory.NON_CANONICAL,
    RedirectKind.SUBDOMAIN_CHANGE: RedirectCategory.NON_CANONICAL,
    RedirectKind.SINK: RedirectCategory.SOFT_404,
    RedirectKind.ERRONEOUS_INDEX: RedirectCategory.DATA_QUALITY,
}


@dataclass(frozen=True)
class ProbeResponse:
    """Recorded outcome of probing an old URL in a later era.

    ``status`` is the first response status at the old URL; the chain holds
    every hop that was followed, machine-readable or recorded by hand
    (meta refresh / script hops captured in fixtures).
    """

    status: int
    redirect_chain: tuple[str, ...]
    final_url: str
    final_body: str = ""
    flagged_erroneous: bool = False


@dataclass(frozen=True)
class RedirectClassification:
    kind: RedirectKind
    category: RedirectCategory


def _host_of(url: str) -> str:
    return canonicalize(url).host


def _www_only_difference(old_url: str, final_url: str) -> bool:
    old_host = old_url.split("://", 1)[-1].split("/", 1)[0].lower().split(":")[0]
    final_host = final_url.split("://", 1)[-1].split("/", 1)[0].lower().split(":")[0]
    if old_host == final_host:
        return False
    strip = lambda h: h[4:] if h.startswith("www.") else h  # noqa: E731
    if strip(old_host) != strip(final_host):
        return False
    return canonicalize(old_url).key == canonicalize(final_url).key


def classify_decay(
    old_url: str,
    response: ProbeResponse,
    sibling_landing_count: int = 0,
    sink_sibling_threshold: int = 3,
    high_threshold: int = 1,
) -> RedirectClassification:
    """Classify how one decayed page moved or died.

    ``sibling_landing_count`` is how many *other* probes landed on the same
    final URL; landing pages shared that widely mark a soft-404 sink rather
    than a real relocation. ErroneousIndex is never inferred, only honored
    from the probe's operator flag.
    """
    try:
        old_key = canonicalize(old_url).key
        final_key = canonicalize(response.final_url).key
    except MalformedUrl:
        raise
    if response.flagged_erroneous:
        kind = RedirectKind.ERRONEOUS_INDEX
    elif _www_only_difference(old_url, response.final_url):
        kind = RedirectKind.NON_WWW_TO_WWW
    elif (
        classify_depth(old_url, high_threshold).depth is DepthClass.DEEP
        and classify_depth(response.final_url, high_threshold).depth is DepthClass.HIGH
        and final_key != old_key
        and sibling_landing_count >= sink_sibling_threshold
    ):
        kind = RedirectKind.SINK
    elif (
        _host_of(old_url) != _host_of(response.final_url)
        and registrable_domain(_host_of(old_url)) == registrable_domain(_host_of(response.final_url))
    ):
        kind = RedirectKind.SUBDOMAIN_CHANGE
    elif response.status == 404:
        kind = RedirectKind.OLD_TO_NEW_404
    elif 300 <= response.status < 400:
        kind = RedirectKind.OLD_TO_NEW_3XX
    else:
        raise ValueError(
            f"probe of {old_url} shows no decay (status {response.status}, same URL)"
        )
    return RedirectClassification(kind=kind, category=KIND_CATEGORY[kind])


def classify_decay_batch(
    probes: Sequence[tuple[str, ProbeResponse]],
    context: Sequence[ProbeResponse] = (),
    sink_sibling_threshold: int = 3,
    high_threshold: int = 1,
) -> list[RedirectClassification]:
    """Classify a probe set together so shared landing pages are visible.

    ``context`` probes contribute to landing-page counts without being
    classified themselves (e.g. extra directory siblings probed only to
    establish that a landing page is a sink)."""
    landing = Counter()
    for _, response in probes:
        landing[canonicalize(response.final_url).key] += 1
    for response in context:
        landing[canonicalize(response.final_url).key] += 1
    results = []
    for old_url, response in probes:
        siblings = landing[canonicalize(response.final_url).key] - 1
        results.append(
            classify_decay(
                old_url,
                response,
                sibling_landing_count=siblings,
                sink_sibling_threshold=sink_sibling_threshold,
                high_threshold=high_threshold,
            )
        )
    return results


def load_probes(path) -> tuple[list[tuple[str, ProbeResponse]], list[ProbeResponse]]:
    """Read a probes JSON file: {"probes": [...], "context": [...]}."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))

    def to_response(row) -> ProbeResponse:
        return ProbeResponse(
            status=int(row["status"]),
            redirect_chain=tuple(row.get("redirect_chain", ())),
            final_url=row["final_url"],
            final_body=row.get("final_body", ""),
            flagged_erroneous=bool(row.get("flagged_erroneous", False)),
        )

    probes = [(row["old_url"], to_response(row)) for row in raw.get("probes", ())]
    context = [to_response(row) for row in raw.get("context", ())]
    return probes, context
