import json
from collections import deque

import pytest

from tempex.crawler import (
    CrawlConfig,
    RejectReason,
    StickyTimePolicy,
    TrapConfig,
    TrapReason,
    crawl,
    detect_trap,
    extract_links,
    fetch_at,
)
from tempex.epochs import utc
from tempex.urlkeys import ScopeRule, canonicalize

from conftest import FIXTURES


class TestFetchAt:
    def test_2007_capture_accepted(self, crawl_graph_store):
        # seed page is dated 2008-02-15; both 2007 and 2008 are in policy
        outcome = fetch_at("http://www.epa.gov/sect0", StickyTimePolicy(), crawl_graph_store)
        assert outcome.accepted
        assert outcome.capture.datetime.year in (2007, 2008)
        assert outcome.body

    def test_2009_capture_rejected_out_of_window(self, crawl_graph_store):
        outcome = fetch_at(
            "http://www.epa.gov/reorg/hub.html", StickyTimePolicy(), crawl_graph_store
        )
        assert not outcome.accepted
        assert outcome.reason is RejectReason.OUT_OF_WINDOW

    def test_2006_nearest_capture_rejected(self, crawl_graph_store):
        outcome = fetch_at(
            "http://www.epa.gov/legacy/old.html", StickyTimePolicy(), crawl_graph_store
        )
        assert not outcome.accepted
        assert outcome.reason is RejectReason.OUT_OF_WINDOW

    def test_non_success_rejected(self, paper_mini):
        # funnel pages 90..95 have only a 302 in the early window
        outcome = fetch_at(
            "http://www.epa.gov/programs/office/p0090.html", StickyTimePolicy(), paper_mini
        )
        assert not outcome.accepted
        assert outcome.reason is RejectReason.NON_SUCCESS_STATUS

    def test_no_capture(self, crawl_graph_store):
        outcome = fetch_at("http://www.epa.gov/absent", StickyTimePolicy(), crawl_graph_store)
        assert not outcome.accepted
        assert outcome.reason is RejectReason.NO_CAPTURE

    def test_accept_years_configurable(self, crawl_graph_store):
        policy = StickyTimePolicy(target=utc(2009, 1, 1), accept_years=frozenset({2009}))
        outcome = fetch_at("http://www.epa.gov/reorg/hub.html", policy, crawl_graph_store)
        assert outcome.accepted


class TestExtractLinks:
    def test_absolute_and_relative(self):
        body = (
            '<html><body><a href="http://epa.gov/a">a</a>'
            '<a href="/b">b</a><a href="c.html">c</a></body></html>'
        )
        links = extract_links(body, base="http://epa.gov/dir/page.html")
        assert links == [
            "http://epa.gov/a",
            "http://epa.gov/b",
            "http://epa.gov/dir/c.html",
        ]

    def test_dedupe_by_canonical_key(self):
        body = (
            '<a href="http://epa.gov/a">1</a>'
            '<a href="http://WWW.EPA.GOV/a">2</a>'
            '<a href="https://epa.gov/a#x">3</a>'
        )
        assert len(extract_links(body, "http://epa.gov/")) == 1

    def test_skips_non_http_targets(self):
        body = (
            '<a href="mailto:x@epa.gov">m</a><a href="javascript:void(0)">j</a>'
            '<a href="#top">t</a><a href="ftp://epa.gov/f">f</a>'
        )
        assert extract_links(body, "http://epa.gov/") == []

    def test_malformed_html_best_effort(self):
        body = '<a href="http://epa.gov/ok">ok<div><<<<a href="http://epa.gov/also"'
        links = extract_links(body, "http://epa.gov/")
        assert "http://epa.gov/ok" in links

    def test_empty_body(self):
        assert extract_links("", "http://epa.gov/") == []

    def test_fire_ak_fixture_page_has_five_outlinks(self, paper_mini):
        capture = paper_mini.nearest_capture("http://fire.ak.blm.gov/", utc(2008, 1, 1))
        links = extract_links(paper_mini.body(capture), "http://fire.ak.blm.gov/")
        in_scope_links = [l for l in links if canonicalize(l).host.endswith("blm.gov")]
        assert len(in_scope_links) == 5


# Independent oracle for the repeated-segment rule.
import re

REPEAT_ORACLE = re.compile(r"(?:^|/)([^/]+)(?:/\1){2}(?:/|$)")


class TestDetectTrap:
    def test_repeated_segment(self):
        verdict = detect_trap("http://gc.gov/news/cookie/cookie/cookie/x")
        assert verdict.is_trap and verdict.reason is TrapReason.REPEATED_SEGMENT
        assert REPEAT_ORACLE.search("/news/cookie/cookie/cookie/x")

    def test_repeat_threshold_not_met(self):
        verdict = detect_trap("http://gc.gov/news/cookie/cookie/x")
        assert not verdict.is_trap
        assert not REPEAT_ORACLE.search("/news/cookie/cookie/x")

    def test_path_depth_explosion_beats_calendar(self):
        url = "http://gc.gov/calendar/2008/01/01/2008/01/02/2008/01/03/2008/01/04/x/y"
        verdict = detect_trap(url)
        assert verdict.reason is TrapReason.PATH_DEPTH_EXPLOSION

    def test_calendar_grid(self):
        verdict = detect_trap("http://gc.gov/events/2008/01/05/2008/01/06/view.html")
        assert verdict.reason is TrapReason.CALENDAR_PATTERN

    def test_single_date_needs_siblings(self):
        url = "http://gc.gov/events/2008/01/05"
        assert not detect_trap(url, siblings_seen=0).is_trap
        assert detect_trap(url, siblings_seen=50).reason is TrapReason.CALENDAR_PATTERN

    def test_session_param(self):
        verdict = detect_trap("http://gc.gov/page?phpsessid=abc123")
        assert verdict.reason is TrapReason.SESSION_PARAM

    def test_clean_url(self):
        verdict = detect_trap("http://epa.gov/acidrain")
        assert not verdict.is_trap and verdict.reason is TrapReason.NONE

    def test_oracle_agreement_on_repeats(self):
        urls = [
            ("http://a.gov/x/x/x", True),
            ("http://a.gov/x/y/x/y", False),
            ("http://a.gov/a/b/b/b/c", True),
            ("http://a.gov/b/b", False),
        ]
        for url, expected in urls:
            path = url.split(".gov")[1]
            assert bool(REPEAT_ORACLE.search(path)) is expected
            got = detect_trap(url).reason is TrapReason.REPEATED_SEGMENT
            assert got is expected


def bfs_oracle(graph: dict) -> set[str]:
    """Independent breadth-first reachability over the fixture graph,
    restricted to accepted (200 + in-year) nodes and skipping traps."""
    accepted = set(graph["accepted"])
    traps = set(graph["trap"])
    seen = set()
    queue = deque([graph["seed"]])
    while queue:
        url = queue.popleft()
        if url in seen or url in traps or url not in accepted:
            continue
        seen.add(url)
        for nxt in graph["edges"].get(url, []):
            queue.append(nxt)
    return seen


class CountingBackend:
    def __init__(self, inner):
        self.inner = inner
        self.fetches = []

    def nearest_capture(self, url, target):
        self.fetches.append(canonicalize(url).key)
        return self.inner.nearest_capture(url, target)

    def body(self, capture):
        return self.inner.body(capture)


@pytest.fixture(scope="module")
def graph():
    return json.loads((FIXTURES / "crawl-graph" / "graph.json").read_text())


class TestCrawl:

    def test_matches_bfs_oracle(self, crawl_graph_store, graph):
        report = crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), crawl_graph_store)
        got = {c.url for c in report.candidates}
        assert got == bfs_oracle(graph)
        assert len(got) == 9

    def test_rejection_and_trap_counters_exact(self, crawl_graph_store, graph):
        report = crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), crawl_graph_store)
        assert report.rejections[RejectReason.OUT_OF_WINDOW.value] == 2
        assert sum(report.traps.values()) == 1

    def test_stale_hub_prunes_subtree(self, crawl_graph_store, graph):
        report = crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), crawl_graph_store)
        got = {c.url for c in report.candidates}
        for url in graph["unreachable_subtree"]:
            assert url not in got
            # yet the pages are indexed and would have been accepted
            assert crawl_graph_store.nearest_capture(url, utc(2008, 1, 1)).status == "200"

    def test_out_of_scope_seeds(self, crawl_graph_store):
        report = crawl(
            ["http://example.com/", "http://nothing.org/"],
            StickyTimePolicy(),
            CrawlConfig(),
            crawl_graph_store,
        )
        assert report.candidates == []
        assert report.rejections[RejectReason.OUT_OF_SCOPE.value] == 2

    def test_no_revisit(self, crawl_graph_store, graph):
        backend = CountingBackend(crawl_graph_store)
        crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), backend)
        assert len(backend.fetches) == len(set(backend.fetches))

    def test_visited_within_fixture(self, crawl_graph_store, graph):
        backend = CountingBackend(crawl_graph_store)
        crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), backend)
        assert set(backend.fetches) <= set(crawl_graph_store.index)

    def test_scope_and_sticky_soundness(self, crawl_graph_store, graph):
        scope = ScopeRule((".gov",))
        policy = StickyTimePolicy()
        report = crawl([graph["seed"]], policy, CrawlConfig(scope=scope), crawl_graph_store)
        for cand in report.candidates:
            assert cand.surt.host.endswith(".gov") or cand.surt.host == "gov"
            capture = crawl_graph_store.nearest_capture(cand.url, policy.target)
            assert capture.status == "200"
            assert capture.datetime.year in policy.accept_years

    def test_worker_pool_gives_same_candidates(self, crawl_graph_store, graph):
        sequential = crawl(
            [graph["seed"]], StickyTimePolicy(), CrawlConfig(workers=1), crawl_graph_store
        )
        parallel = crawl(
            [graph["seed"]], StickyTimePolicy(), CrawlConfig(workers=4), crawl_graph_store
        )
        assert [c.surt.key for c in sequential.candidates] == [
            c.surt.key for c in parallel.candidates
        ]

    def test_max_depth_zero_fetches_only_seeds(self, crawl_graph_store, graph):
        report = crawl(
            [graph["seed"]], StickyTimePolicy(), CrawlConfig(max_depth=0), crawl_graph_store
        )
        assert [c.url for c in report.candidates] == [graph["seed"]]

    def test_trap_never_fetched(self, crawl_graph_store, graph):
        backend = CountingBackend(crawl_graph_store)
        crawl([graph["seed"]], StickyTimePolicy(), CrawlConfig(), backend)
        trap_key = canonicalize(graph["trap"][0]).key
        assert trap_key not in backend.fetches

    def test_per_host_delay_gates_fetches(self, crawl_graph_store, graph):
        from tempex.clock import RateLimitPolicy, VirtualClock

        clock = VirtualClock()
        config = CrawlConfig(host_delay=RateLimitPolicy(1.0, 1.0))
        report = crawl([graph["seed"]], StickyTimePolicy(), config, crawl_graph_store, clock)
        # 12 same-host fetches, gated one second apart after the first
        assert clock.now() == report.fetched - 1
