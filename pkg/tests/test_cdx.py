import json

import pytest
from hypothesis import given, strategies as st

from tempex.cdx import (
    CdxQuery,
    FetchStats,
    MatchType,
    WindowStatus,
    capture_status_in_window,
    expand_bound,
    parse_cdx_line,
)
from tempex.epochs import EpochSpec, utc
from tempex.errors import BackendUnreachable, ParseError, RateLimited

from conftest import FIXTURES, RecordingBackend, make_gateway


def rec(ts, status="200", urlkey="gov,epa)/x", original="http://epa.gov/x"):
    return parse_cdx_line(f"{urlkey} {ts} {original} text/html {status} ABCD1234 512")


EARLY = EpochSpec("2008", utc(2007, 1, 1), utc(2008, 12, 31, 23, 59, 59), utc(2008, 1, 1))
LATE = EpochSpec("2020", utc(2020, 1, 1), utc(2020, 12, 31, 23, 59, 59), utc(2020, 7, 1))


class TestParseCdxLine:
    def test_positional_mapping(self):
        line = "gov,epa)/acidrain 20080101120000 http://www.epa.gov/acidrain text/html 200 AAAABBBB 5120"
        record = parse_cdx_line(line)
        assert record.urlkey == "gov,epa)/acidrain"
        assert record.timestamp == "20080101120000"
        assert record.status == "200"
        assert record.length == 5120

    def test_dash_status_permitted(self):
        record = parse_cdx_line(
            "gov,epa)/x 20200701000000 http://epa.gov/x text/html - SHA123 100"
        )
        assert record.status == "-"
        assert not record.is_success

    @pytest.mark.parametrize(
        "line",
        [
            "bad line",
            "a b c d e f",  # six fields
            "k 2008 http://x text/html 200 D 1",  # short timestamp
            "k 20081301000000 http://x text/html 200 D 1",  # month 13
            "k 20080101000000 http://x text/html 999 D 1",  # status out of range
            "k 20080101000000 http://x text/html 200 D -5",  # negative length
        ],
    )
    def test_parse_errors(self, line):
        with pytest.raises(ParseError):
            parse_cdx_line(line)

    @given(
        st.integers(min_value=2000, max_value=2023),
        st.integers(min_value=1, max_value=12),
        st.integers(min_value=1, max_value=28),
        st.sampled_from(["200", "301", "404", "-"]),
        st.integers(min_value=0, max_value=10**9),
    )
    def test_round_trip(self, year, month, day, status, length):
        line = (
            f"gov,epa)/p {year}{month:02d}{day:02d}031500 http://epa.gov/p "
            f"text/html {status} XYZ {length}"
        )
        assert parse_cdx_line(line).line() == line


class TestWindowClassification:
    def test_success_in_window(self):
        result = capture_status_in_window([rec("20080315000000")], EARLY)
        assert result.status is WindowStatus.SUCCESS
        assert result.record.timestamp == "20080315000000"

    def test_no_capture_when_only_outside(self):
        records = [rec("20170601000000"), rec("20220601000000")]
        assert capture_status_in_window(records, LATE).status is WindowStatus.NO_CAPTURE

    def test_non_success_only(self):
        result = capture_status_in_window([rec("20080315000000", "404")], EARLY)
        assert result.status is WindowStatus.NON_SUCCESS_ONLY

    def test_revisit_rows_are_non_success(self):
        result = capture_status_in_window([rec("20080315000000", "-")], EARLY)
        assert result.status is WindowStatus.NON_SUCCESS_ONLY

    def test_nearest_to_target_wins(self):
        records = [rec("20070102000000"), rec("20081201000000"), rec("20080102000000")]
        result = capture_status_in_window(records, EARLY)
        assert result.record.timestamp == "20080102000000"

    def test_tie_breaks_to_earlier(self):
        # both one day from the 2008-01-01 target
        records = [rec("20080102000000"), rec("20071231000000")]
        result = capture_status_in_window(records, EARLY)
        assert result.record.timestamp == "20071231000000"

    def test_nearest_success_skips_closer_non_success(self):
        records = [rec("20080102000000", "404"), rec("20080901000000", "200")]
        result = capture_status_in_window(records, EARLY)
        assert result.status is WindowStatus.SUCCESS
        assert result.record.timestamp == "20080901000000"


def test_expand_bound():
    assert expand_bound("2008", is_from=True) == "20080101000000"
    assert expand_bound("2008", is_from=False) == "20081231235959"
    assert expand_bound("200803", is_from=True) == "20080301000000"
    assert expand_bound("20080315", is_from=False) == "20080315235959"


class TestFetchAgainstFixture:
    def test_exact_rows_share_key(self, paper_mini):
        store = paper_mini
        gateway = make_gateway(store)
        records = gateway.fetch(CdxQuery.exact("http://www.epa.gov/p0010"))
        assert records
        assert {r.urlkey for r in records} == {"gov,epa)/p0010"}

    def test_pagination_completeness(self, paper_mini):
        store = paper_mini
        """Union of rows over all pages equals the unpaginated manifest dump."""
        gateway = make_gateway(store)
        query = CdxQuery.prefix("http://www.globalchange.gov/", from_ts="2008", to_ts="2008")
        stats = FetchStats()
        records = gateway.fetch(query, stats)
        assert stats.pages == store.cdx_page_count(query)
        assert stats.pages > 1

        manifest = json.loads((FIXTURES / "paper-mini" / "manifest.json").read_text())
        expected = set()
        for page in manifest["pages"]:
            if not page["url"].startswith("http://www.globalchange.gov/"):
                continue
            for cap in page["captures"]:
                if cap["ts"].startswith("2008"):
                    expected.add((page["url"], cap["ts"]))
        assert {(r.original, r.timestamp) for r in records} == expected

    def test_prefix_page_count_in_expected_range(self, paper_mini):
        store = paper_mini
        query = CdxQuery.prefix("http://www.globalchange.gov/", from_ts="2008", to_ts="2008")
        assert 38 <= store.cdx_page_count(query) <= 600

    def test_domain_returns_subdomains_prefix_does_not(self, paper_mini):
        store = paper_mini
        gateway = make_gateway(store)
        domain_rows = gateway.fetch(CdxQuery.domain("osmre.gov"))
        prefix_rows = gateway.fetch(CdxQuery.prefix("http://osmre.gov/"))
        domain_hosts = {r.urlkey.split(")")[0] for r in domain_rows}
        prefix_hosts = {r.urlkey.split(")")[0] for r in prefix_rows}
        assert "gov,osmre,techtransfer" in domain_hosts
        assert "gov,osmre,techtransfer" not in prefix_hosts

    def test_domain_superset_of_prefix(self, paper_mini):
        store = paper_mini
        gateway = make_gateway(store)
        domain_rows = {
            (r.urlkey, r.timestamp) for r in gateway.fetch(CdxQuery.domain("osmre.gov"))
        }
        prefix_rows = {
            (r.urlkey, r.timestamp) for r in gateway.fetch(CdxQuery.prefix("http://osmre.gov/"))
        }
        assert prefix_rows <= domain_rows
        extra_hosts = {key.split(")")[0] for key, _ in domain_rows - prefix_rows}
        assert all(host.startswith("gov,osmre,") for host in extra_hosts)


class TestPoliteness:
    def test_page_gaps_within_policy(self, paper_mini):
        from tempex.clock import VirtualClock

        gateway = make_gateway(paper_mini, min_delay=8.0, max_delay=11.0)
        clock = gateway.limiter.clock
        assert isinstance(clock, VirtualClock)
        recorder = RecordingBackend(paper_mini, clock)
        gateway.backend = recorder
        gateway.fetch(CdxQuery.prefix("http://www.globalchange.gov/", from_ts="2008", to_ts="2008"))
        times = recorder.cdx_page_times
        assert len(times) > 50
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert all(8.0 <= gap <= 11.0 for gap in gaps)


class FlakyBackend:
    """Fails a fixed number of times before succeeding."""

    def __init__(self, inner, failures, exc):
        self.inner = inner
        self.remaining = failures
        self.exc = exc

    def cdx_page_count(self, query):
        return self.inner.cdx_page_count(query)

    def cdx_page(self, query, page):
        if self.remaining > 0:
            self.remaining -= 1
            raise self.exc("simulated")
        return self.inner.cdx_page(query, page)


class TestRetries:
    @pytest.mark.parametrize("exc", [RateLimited, BackendUnreachable])
    def test_recovers_within_budget(self, paper_mini, exc):
        backend = FlakyBackend(paper_mini, failures=2, exc=exc)
        gateway = make_gateway(backend)
        records = gateway.fetch(CdxQuery.exact("http://www.epa.gov/p0010"))
        assert records

    def test_gives_up_after_bounded_attempts(self, paper_mini):
        backend = FlakyBackend(paper_mini, failures=99, exc=BackendUnreachable)
        gateway = make_gateway(backend)
        with pytest.raises(BackendUnreachable):
            gateway.fetch(CdxQuery.exact("http://www.epa.gov/p0010"))
        assert backend.remaining == 96  # exactly three attempts spent

    def test_retry_delay_doubles(self, paper_mini):
        backend = FlakyBackend(paper_mini, failures=2, exc=RateLimited)
        gateway = make_gateway(backend, min_delay=1.0, max_delay=1.0)
        clock = gateway.limiter.clock
        start = clock.now()
        gateway.fetch(CdxQuery.exact("http://www.epa.gov/p0010"))
        # two backoffs: 1*2^0*max(1,1)=1 then 2, plus politeness draws
        assert clock.now() - start >= 3.0


class TestRowErrorRecovery:
    def test_bad_rows_skipped_and_recorded(self, paper_mini):
        class Corrupting:
            def __init__(self, inner):
                self.inner = inner

            def cdx_page_count(self, query):
                return self.inner.cdx_page_count(query)

            def cdx_page(self, query, page):
                text = self.inner.cdx_page(query, page)
                return "garbage row\n" + text

        gateway = make_gateway(Corrupting(paper_mini))
        stats = FetchStats()
        records = gateway.fetch(CdxQuery.exact("http://www.epa.gov/p0010"), stats)
        assert len(records) == 3  # one capture per epoch window
        assert len(stats.parse_errors) == stats.pages  # one bad row prepended per page
