import itertools

import pytest

from tempex.assembler import read_triplets
from tempex.clock import RateLimiter, RateLimitPolicy, VirtualClock
from tempex.epochs import parse_ts14
from tempex.errors import FewerThanThreeEpochs
from tempex.provenance import (
    SourceGroup,
    SourceGroupingTable,
    TrendShape,
    classify_trend,
    distribution,
    fetch_provenance,
    group_totals,
    mine_dataset,
    organization_totals,
    trend_shape,
)
from tempex.timemap import CaptureRef
from tempex.urlkeys import canonicalize

TABLE = SourceGroupingTable.default()


class TestGrouping:
    @pytest.mark.parametrize(
        "collections,expected",
        [
            (["Archive Team"], SourceGroup.ARCHIVE_TEAM),
            (["alexa crawls"], SourceGroup.LARGE_IMPORTED_CRAWLS),
            (["Common Crawl"], SourceGroup.LARGE_IMPORTED_CRAWLS),
            (["Save Page Now"], SourceGroup.SAVE_PAGE_NOW),
            (["EDGI Monitoring"], SourceGroup.MONITORING),
            (["End of Term Web Archive 2008"], SourceGroup.END_OF_TERM),
            (["Archive-It Collection 5"], SourceGroup.ARCHIVE_IT),
            (["INA Collection"], SourceGroup.SMALL_IMPORTED_CRAWLS),
            (["Wikipedia Outlinks"], SourceGroup.SOCIAL),
            ([], SourceGroup.UNKNOWN),
            (["Some Unheard-of Crawl"], SourceGroup.UNKNOWN),
        ],
    )
    def test_group_for(self, collections, expected):
        assert TABLE.group_for(collections) is expected

    def test_gdelt_maps_by_epoch(self):
        assert TABLE.group_for(["GDELT Seeds"], epoch="2016") is SourceGroup.INTERNAL_CRAWLS
        assert TABLE.group_for(["GDELT Seeds"], epoch="2020") is SourceGroup.MONITORING
        assert TABLE.group_for(["GDELT Seeds"], epoch="2008") is SourceGroup.UNKNOWN

    def test_word_boundary_matching(self):
        # "ina" must not fire inside unrelated words
        assert TABLE.group_for(["Marina Bay Collection"]) is SourceGroup.UNKNOWN
        assert TABLE.group_for(["INA"]) is SourceGroup.SMALL_IMPORTED_CRAWLS

    def test_determinism(self):
        collections = ["Alexa Crawls", "Archive Team"]
        first = TABLE.classify(collections, "2008")
        assert all(TABLE.classify(collections, "2008") == first for _ in range(5))


def _capture(url="http://www.epa.gov/p0010", ts="20080215000000"):
    return CaptureRef(
        original=canonicalize(url),
        archive_id="web.archive.org",
        datetime=parse_ts14(ts),
        uri_m=f"https://web.archive.org/web/{ts}/{url}",
        status="200",
    )


class TestFetchProvenance:
    def test_labels_resolved(self, paper_mini):
        limiter = RateLimiter(RateLimitPolicy(0, 0), VirtualClock())
        record = fetch_provenance(_capture(), "2008", paper_mini, TABLE, limiter)
        assert record.group is SourceGroup.LARGE_IMPORTED_CRAWLS
        assert record.organization == "alexa"
        assert record.agency == "epa.gov"

    def test_unknown_when_no_sidecar(self, paper_mini):
        limiter = RateLimiter(RateLimitPolicy(0, 0), VirtualClock())
        record = fetch_provenance(
            _capture("http://www.epa.gov/never-indexed"), "2008", paper_mini, TABLE, limiter
        )
        assert record.group is SourceGroup.UNKNOWN
        assert record.collections == ()

    def test_fifteen_second_gate(self, paper_mini):
        clock = VirtualClock()
        limiter = RateLimiter(RateLimitPolicy(15, 15), clock)

        times = []

        class Stamping:
            def provenance(self, url, ts):
                times.append(clock.now())
                return paper_mini.provenance(url, ts)

        backend = Stamping()
        for _ in range(6):
            fetch_provenance(_capture(), "2008", backend, TABLE, limiter)
        gaps = [b - a for a, b in zip(times, times[1:])]
        assert gaps == [15.0] * 5


@pytest.fixture(scope="module")
def mini_records(paper_mini, tmp_path_factory):
    from tempex.pipeline import run_assemble, run_crawl
    from tempex.config import RunConfig

    work = tmp_path_factory.mktemp("prov")
    config = RunConfig(backend_spec=f"fixture:{paper_mini.root}")
    seeds = (paper_mini.root / "seeds.txt").read_text().split()
    run_crawl(config, seeds, work / "candidates.jsonl", backend=paper_mini)
    out = work / "triplets.jsonl"
    run_assemble(
        config,
        f"{paper_mini.root}/pairs.jsonl,{work / 'candidates.jsonl'},{paper_mini.root}/eot.txt",
        out,
        sweep="globalchange.gov,osmre.gov,federalregister.gov",
        backend=paper_mini,
    )
    tuples = read_triplets(out)
    assert len(tuples) == 122
    limiter = RateLimiter(RateLimitPolicy(0, 0), VirtualClock())
    return mine_dataset(tuples, paper_mini, TABLE, limiter)


class TestDistribution:
    def test_marginals_sum_to_total(self, mini_records):
        for dimension in ("agency", "epoch"):
            table = distribution(mini_records, dimension)
            assert sum(sum(c.values()) for c in table.values()) == len(mini_records)

    def test_zero_rows_omitted(self, mini_records):
        table = distribution(mini_records, "agency")
        for counter in table.values():
            assert all(v > 0 for v in counter.values())

    def test_single_record(self, mini_records):
        table = distribution(mini_records[:1], "epoch")
        assert sum(sum(c.values()) for c in table.values()) == 1

    def test_partner_dimension_counts_archive_it_partners(self, mini_records):
        table = distribution(mini_records, "partner")
        assert table  # the Archive-It captures carry partner labels
        assert sum(sum(c.values()) for c in table.values()) == sum(
            1 for r in mini_records if r.partner is not None
        )

    def test_monitoring_modal_for_2020(self, mini_records):
        by_epoch = distribution(mini_records, "epoch")
        late = by_epoch["2020"]
        assert max(late, key=late.get) == SourceGroup.MONITORING.value

    def test_unknown_dimension_rejected(self, mini_records):
        with pytest.raises(ValueError):
            distribution(mini_records, "color")

    def test_2008_organization_marginals(self, mini_records):
        early = [r for r in mini_records if r.epoch == "2008"]
        orgs = organization_totals(early)
        assert orgs["alexa"] == 82
        assert orgs["commoncrawl"] == 22
        assert orgs["internal"] == 8
        assert orgs["eot"] == 6
        assert orgs["archive it"] == 3
        assert orgs.get("ina", 0) <= 1

    def test_group_totals_roll_up_organizations(self, mini_records):
        early = [r for r in mini_records if r.epoch == "2008"]
        groups = group_totals(early)
        assert groups[SourceGroup.LARGE_IMPORTED_CRAWLS.value] == 82 + 22


class TestTrendShape:
    @pytest.mark.parametrize(
        "counts,expected",
        [
            ((0, 2, 9), TrendShape.ALWAYS_GROWING),
            ((82, 40, 5), TrendShape.ALWAYS_SHRINKING),
            ((8, 27, 3), TrendShape.GROW_THEN_SHRINK),
            ((6, 2, 5), TrendShape.SHRINK_THEN_GROW),
        ],
    )
    def test_reference_patterns(self, counts, expected):
        assert classify_trend(counts) is expected

    def test_mapping_variant(self):
        shapes = trend_shape(
            {"monitoring": (0, 2, 9), "large_crawls": (82, 40, 5)}
        )
        assert shapes["monitoring"] is TrendShape.ALWAYS_GROWING
        assert shapes["large_crawls"] is TrendShape.ALWAYS_SHRINKING

    def test_requires_exactly_three(self):
        with pytest.raises(FewerThanThreeEpochs):
            classify_trend((1, 2))
        with pytest.raises(FewerThanThreeEpochs):
            classify_trend((1, 2, 3, 4))

    def test_tie_conventions(self):
        assert classify_trend((5, 5, 9)) is TrendShape.ALWAYS_GROWING
        assert classify_trend((5, 5, 2)) is TrendShape.ALWAYS_SHRINKING
        assert classify_trend((2, 9, 9)) is TrendShape.ALWAYS_GROWING
        assert classify_trend((9, 2, 2)) is TrendShape.ALWAYS_SHRINKING
        assert classify_trend((4, 4, 4)) is TrendShape.ALWAYS_GROWING

    def test_exhaustive_sign_pair_oracle(self):
        """Brute-force case analysis over all (sign, sign) combinations."""
        values = [0, 1, 5]
        for a, b, c in itertools.product(values, repeat=3):
            got = classify_trend((a, b, c))
            d1, d2 = b - a, c - b
            if d1 == 0:
                d1 = d2
            if d2 == 0:
                d2 = d1
            if d1 > 0 and d2 > 0:
                expected = TrendShape.ALWAYS_GROWING
            elif d1 < 0 and d2 < 0:
                expected = TrendShape.ALWAYS_SHRINKING
            elif d1 > 0 > d2:
                expected = TrendShape.GROW_THEN_SHRINK
            elif d1 < 0 < d2:
                expected = TrendShape.SHRINK_THEN_GROW
            else:
                expected = TrendShape.ALWAYS_GROWING  # fully flat
            assert got is expected, (a, b, c)
