from collections import Counter

import pytest
from hypothesis import given, strategies as st

from tempex.analysis import (
    AddedUnder,
    AdministrationWindows,
    PageCategory,
    ProbeResponse,
    RedirectCategory,
    RedirectKind,
    TrackedTerm,
    TrackedTermList,
    aggregate_categories,
    attribute_changes,
    classify_decay,
    classify_decay_batch,
    extract_text,
    load_probes,
    mine_trends,
    summarize_counts,
    term_present,
    tokenize,
    tracked_term_table,
    vocabulary,
)
from tempex.errors import ConfigError, MissingEpochBody

from conftest import FIXTURES

EPOCHS = ("2008", "2016", "2020")


class TestExtractText:
    def test_entities_and_case(self):
        assert extract_text("<p>Climate&nbsp;Change</p>") == "climate change"

    def test_scripts_excluded(self):
        body = "<html><script>var x = 'regulation';</script><p>safety</p></html>"
        text = extract_text(body)
        assert "regulation" not in text
        assert "safety" in text

    def test_styles_excluded(self):
        assert extract_text("<style>.climate { color: red }</style><b>ok</b>") == "ok"

    def test_whitespace_collapsed(self):
        assert extract_text("<p>a\n\n   b\tc</p>") == "a b c"

    def test_empty_body(self):
        assert extract_text("") == ""

    def test_fixture_page_contains_sustainable(self, paper_mini):
        # a deleted-middle archetype page carries the term in its 2016 body
        from tempex.epochs import utc

        capture = paper_mini.nearest_capture("http://www.usgs.gov/water", utc(2016, 7, 1))
        text = extract_text(paper_mini.body(capture))
        assert "sustainable" in text

    @given(st.sampled_from(["id", "class", "data-x"]), st.sampled_from(["a", "b"]))
    def test_attribute_order_and_whitespace_invariance(self, attr, val):
        one = f'<p {attr}="{val}" lang="en">climate   change</p>'
        two = f'<p lang="en" {attr}="{val}">climate change</p>'
        assert extract_text(one) == extract_text(two)
        assert term_present(extract_text(one), "climate change")


class TestTermPresent:
    def test_word_in_phrase(self):
        assert term_present("climate change mitigation", "climate")

    def test_boundary_blocks_substring(self):
        assert not term_present("declimatize now", "climate")
        assert not term_present("economics dept", "economic")

    def test_phrase_whitespace_run(self):
        assert term_present("climate   change", "climate change")

    def test_phrase_not_split_across_words(self):
        assert not term_present("climate of change", "climate change")

    def test_case_insensitive_via_normalized_text(self):
        assert term_present(extract_text("<p>CLIMATE</p>"), "climate")

    def test_hyphen_counts_as_boundary(self):
        assert term_present("climate-change plan", "climate")

    def test_stemming_flag(self):
        assert not term_present("deleted emissions data", "emission")
        assert term_present("deleted emissions data", "emission", stemming=True)
        assert term_present("regulated market", "regulate", stemming=True)
        assert not term_present("regulated market", "regulate")


class TestTokenize:
    def test_min_length_and_trim(self):
        assert tokenize("To the; moon! a") == ["the", "moon"]

    def test_vocabulary_keeps_stop_words_by_default(self):
        vocab = vocabulary("the program and the office")
        assert "the" in vocab and "and" in vocab

    def test_vocabulary_stop_word_flag(self):
        vocab = vocabulary("the program and the office", drop_stop_words=True)
        assert "the" not in vocab and "program" in vocab


def report_for(early, middle, late, terms, page="gov,x)/p", agency="epa.gov"):
    return attribute_changes(
        page, agency, {"2008": early, "2016": middle, "2020": late}, EPOCHS, terms,
        texts_extracted=True,
    )


class TestAttributeChanges:
    def test_middle_added_then_deleted(self):
        report = report_for("base", "base climate", "base", ["climate"])
        assert report.deleted_terms[0].added_under is AddedUnder.MIDDLE_ADMIN
        assert report.page_category is PageCategory.DELETED_MIDDLE_ONLY

    def test_prior_added_then_deleted(self):
        report = report_for("base climate", "base climate", "base", ["climate"])
        assert report.deleted_terms[0].added_under is AddedUnder.PRIOR_ADMIN
        assert report.page_category is PageCategory.DELETED_PRIOR_ONLY

    def test_both_origins(self):
        report = report_for(
            "base safety", "base safety climate", "base", ["climate", "safety"]
        )
        origins = {d.added_under for d in report.deleted_terms}
        assert origins == {AddedUnder.PRIOR_ADMIN, AddedUnder.MIDDLE_ADMIN}
        assert report.page_category is PageCategory.DELETED_BOTH_ORIGINS

    def test_unchanged(self):
        report = report_for("same text", "same text", "same text", ["climate"])
        assert not report.changed
        assert report.page_category is PageCategory.UNCHANGED
        assert report.deleted_terms == []

    def test_changed_without_tracked_deletion(self):
        report = report_for("old words", "old words", "new words", ["climate"])
        assert report.changed
        assert report.page_category is PageCategory.CHANGED_NO_TRACKED_DELETION

    def test_term_surviving_to_late_not_deleted(self):
        report = report_for("x", "x climate", "y climate", ["climate"])
        assert report.deleted_terms == []

    def test_presence_vectors(self):
        report = report_for("a climate", "b", "c climate", ["climate"])
        assert report.presence["climate"] == (True, False, True)

    def test_missing_epoch_body(self):
        with pytest.raises(MissingEpochBody):
            attribute_changes(
                "p", "a.gov", {"2008": "x", "2016": "y"}, EPOCHS, ["climate"],
                texts_extracted=True,
            )

    def test_exactly_three_epochs_required(self):
        with pytest.raises(ValueError):
            attribute_changes(
                "p", "a.gov", {"a": "", "b": ""}, ("a", "b"), [], texts_extracted=True
            )

    def test_category_partition_exhaustive_and_exclusive(self):
        cases = [
            ("s", "s", "s"),
            ("s", "s", "t"),
            ("s climate", "s climate", "s"),
            ("s", "s climate", "s"),
            ("s safety", "s safety climate", "s"),
            ("s", "s", "s climate"),
        ]
        for early, middle, late in cases:
            report = report_for(early, middle, late, ["climate", "safety"])
            assert isinstance(report.page_category, PageCategory)


class TestAggregateArithmetic:
    def test_reference_count_reproduction(self):
        summary = summarize_counts(
            both=373, middle_only=274, prior_only=55,
            pages_with_deletions=740, changed_pages=990, total_pages=1220,
        )
        assert summary.percent_middle_only == 37.0
        assert summary.percent_any_middle == 87.4
        assert summary.percent_changed == 81.1

    def test_zero_denominators_undefined(self):
        summary = summarize_counts(0, 0, 0, 0, 0, 0)
        assert summary.percent_middle_only is None
        assert summary.percent_any_middle is None
        assert summary.percent_changed is None

    def test_aggregate_counts_and_consistency(self):
        reports = [
            report_for("s", "s", "s", ["climate"], page=f"p{i}") for i in range(3)
        ] + [
            report_for("s", "s climate", "s", ["climate"], page=f"q{i}") for i in range(2)
        ] + [
            report_for("s", "s", "t", ["climate"], page="r0")
        ]
        summary = aggregate_categories(reports)
        assert summary.total_pages == 6
        assert summary.counts[PageCategory.UNCHANGED.value] == 3
        assert summary.counts[PageCategory.DELETED_MIDDLE_ONLY.value] == 2
        assert summary.counts[PageCategory.CHANGED_NO_TRACKED_DELETION.value] == 1
        assert sum(summary.counts.values()) == summary.total_pages
        assert summary.pages_with_deletions == 2
        assert summary.percent_middle_only == 100.0

    def test_permutation_invariance(self):
        reports = [
            report_for("s", "s climate", "s", ["climate"], page="a"),
            report_for("s", "s", "t", ["climate"], page="b"),
            report_for("s", "s", "s", ["climate"], page="c"),
        ]
        forward = aggregate_categories(reports)
        backward = aggregate_categories(reversed(reports))
        assert forward.counts == backward.counts

    def test_empty_input(self):
        summary = aggregate_categories([])
        assert summary.total_pages == 0
        assert summary.percent_changed is None


def trend_fixture_reports():
    """8 OSHA pages dropping "exposure", 5 NIH pages dropping "healthier",
    and a NASA agency that never crosses the threshold."""
    reports = []
    base = "permissible limits information for workers"
    for i in range(8):
        middle = base + " exposure"
        reports.append(
            attribute_changes(
                f"gov,osha)/page{i}", "osha.gov",
                {"2008": base, "2016": middle, "2020": base},
                EPOCHS, sorted(vocabulary(middle)), texts_extracted=True,
            )
        )
    base = "community wellness resources portal"
    for i in range(5):
        middle = base + " healthier"
        reports.append(
            attribute_changes(
                f"gov,nih)/page{i}", "nih.gov",
                {"2008": base, "2016": middle, "2020": base},
                EPOCHS, sorted(vocabulary(middle)), texts_extracted=True,
            )
        )
    base = "mission overview launch archive"
    for i in range(4):
        middle = base + " spaceflight"
        reports.append(
            attribute_changes(
                f"gov,nasa)/page{i}", "nasa.gov",
                {"2008": base, "2016": middle, "2020": base},
                EPOCHS, sorted(vocabulary(middle)), texts_extracted=True,
            )
        )
    return reports


class TestMineTrends:
    def test_reference_trend_counts(self):
        trends = mine_trends(trend_fixture_reports(), threshold=5)
        as_tuples = {(t.agency, t.term, t.page_count) for t in trends}
        assert ("osha.gov", "exposure", 8) in as_tuples
        assert ("nih.gov", "healthier", 5) in as_tuples

    def test_below_threshold_agency_has_no_trends(self):
        trends = mine_trends(trend_fixture_reports(), threshold=5)
        assert not any(t.agency == "nasa.gov" for t in trends)

    def test_exactly_reference_trends_and_nothing_else(self):
        trends = mine_trends(trend_fixture_reports(), threshold=5)
        assert {(t.agency, t.term, t.page_count) for t in trends} == {
            ("osha.gov", "exposure", 8),
            ("nih.gov", "healthier", 5),
        }

    def test_agrees_with_brute_force(self):
        reports = trend_fixture_reports()
        threshold = 3
        brute = Counter()
        for report in reports:
            for deleted in report.deleted_terms:
                brute[(report.agency, deleted.term)] += 1
        expected = {
            (agency, term, count)
            for (agency, term), count in brute.items()
            if count >= threshold
        }
        got = {(t.agency, t.term, t.page_count) for t in mine_trends(reports, threshold)}
        assert got == expected

    def test_page_counted_once_per_term(self):
        report = report_for("b", "b exposure", "b", ["exposure"], page="same")
        trends = mine_trends([report, report], threshold=1)
        assert trends[0].page_count == 1


TRACKED = TrackedTermList.default()
REFERENCE_COUNTS = [
    ("regulation", "regulation", 16),
    ("safety", "regulation", 13),
    ("sustainable", "climate", 8),
    ("emission", "climate", 7),
    ("climate", "climate", 5),
    ("economic", "regulation", 4),
    ("pollution", "climate", 3),
    ("wildfires", "climate", 3),
]


def tracked_fixture_reports():
    reports = []
    page = 0
    for term, _, count in REFERENCE_COUNTS:
        for _ in range(count):
            reports.append(
                report_for(
                    "agency information page",
                    f"agency information page {term}",
                    "agency information page",
                    TRACKED.term_strings(),
                    page=f"gov,epa)/t{page}",
                )
            )
            page += 1
    return reports


class TestTrackedTermTable:
    def test_reproduces_reference_table(self):
        rows = tracked_term_table(tracked_fixture_reports(), TRACKED)
        assert [(r.term, r.category, r.count) for r in rows] == REFERENCE_COUNTS

    def test_tie_broken_lexicographically(self):
        rows = tracked_term_table(tracked_fixture_reports(), TRACKED)
        tied = [r.term for r in rows if r.count == 3]
        assert tied == sorted(tied) == ["pollution", "wildfires"]

    def test_sort_oracle(self):
        rows = tracked_term_table(tracked_fixture_reports(), TRACKED)
        assert rows == sorted(rows, key=lambda r: (-r.count, r.term))

    def test_absent_term_counts_zero(self):
        tracked = TrackedTermList([TrackedTerm("unobtainium", "climate")])
        rows = tracked_term_table(tracked_fixture_reports(), tracked)
        assert rows[0].count == 0

    def test_prior_admin_deletions_excluded(self):
        report = report_for(
            "x climate", "x climate", "x", TRACKED.term_strings(), page="p"
        )
        rows = tracked_term_table([report], TRACKED)
        assert all(r.count == 0 for r in rows)

    def test_empty_list_rejected(self):
        with pytest.raises(ConfigError):
            TrackedTermList([])

    def test_bad_category_rejected(self):
        with pytest.raises(ConfigError):
            TrackedTermList([TrackedTerm("x", "politics")])


class TestClassifyDecay:
    def test_non_www_to_www(self):
        cls = classify_decay(
            "http://epa.gov/x",
            ProbeResponse(301, ("http://www.epa.gov/x",), "http://www.epa.gov/x"),
        )
        assert cls.kind is RedirectKind.NON_WWW_TO_WWW
        assert cls.category is RedirectCategory.CANONICAL

    def test_sink_requires_shared_landing(self):
        response = ProbeResponse(302, ("http://www.gc.gov/",), "http://www.gc.gov/")
        old = "http://www.gc.gov/assessments/great-lakes/report.html"
        assert classify_decay(old, response, sibling_landing_count=3).kind is RedirectKind.SINK
        assert classify_decay(old, response, sibling_landing_count=0).kind is RedirectKind.OLD_TO_NEW_3XX

    def test_subdomain_change(self):
        cls = classify_decay(
            "http://www.fws.gov/endangered/x.html",
            ProbeResponse(301, ("http://ecos.fws.gov/x",), "http://ecos.fws.gov/x"),
        )
        assert cls.kind is RedirectKind.SUBDOMAIN_CHANGE
        assert cls.category is RedirectCategory.NON_CANONICAL

    def test_404_with_manually_located_target(self):
        cls = classify_decay(
            "http://www.noaa.gov/old/report.asp",
            ProbeResponse(404, (), "http://www.noaa.gov/reports/new"),
        )
        assert cls.kind is RedirectKind.OLD_TO_NEW_404

    def test_erroneous_index_only_from_flag(self):
        cls = classify_decay(
            "http://www.epa.gov/dyn/page.html",
            ProbeResponse(301, (), "http://www.epa.gov/dyn2", flagged_erroneous=True),
        )
        assert cls.kind is RedirectKind.ERRONEOUS_INDEX
        assert cls.category is RedirectCategory.DATA_QUALITY

    def test_twenty_two_probe_fixture(self):
        probes, context = load_probes(FIXTURES / "redirect-probes.json")
        assert len(probes) == 22
        classifications = classify_decay_batch(probes, context)
        kinds = Counter(c.kind for c in classifications)
        assert kinds == Counter(
            {
                RedirectKind.OLD_TO_NEW_3XX: 8,
                RedirectKind.OLD_TO_NEW_404: 7,
                RedirectKind.NON_WWW_TO_WWW: 4,
                RedirectKind.SUBDOMAIN_CHANGE: 2,
                RedirectKind.SINK: 1,
            }
        )
        categories = Counter(c.category for c in classifications)
        assert categories == Counter(
            {
                RedirectCategory.NON_CANONICAL: 17,
                RedirectCategory.CANONICAL: 4,
                RedirectCategory.SOFT_404: 1,
            }
        )

    def test_batch_stable_across_runs(self):
        probes, context = load_probes(FIXTURES / "redirect-probes.json")
        first = classify_decay_batch(probes, context)
        second = classify_decay_batch(probes, context)
        assert first == second

    def test_alive_probe_rejected(self):
        with pytest.raises(ValueError):
            classify_decay(
                "http://epa.gov/x", ProbeResponse(200, (), "http://epa.gov/x")
            )


class TestAdministrationWindows:
    def test_default_is_ordered(self):
        windows = AdministrationWindows.default()
        assert [w.label for w in windows.windows] == ["prior", "middle", "late"]

    def test_overlap_rejected(self):
        from tempex.analysis import AdminWindow

        with pytest.raises(ConfigError):
            AdministrationWindows(
                [
                    AdminWindow("a", "X", None, "20100101000000"),
                    AdminWindow("b", "Y", "20090101000000", "20120101000000"),
                    AdminWindow("c", "X", "20120102000000", "20200101000000"),
                ]
            )
