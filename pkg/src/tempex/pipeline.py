"""Pipeline stages shared by the CLI and the service's job runner.

Each stage takes a RunConfig plus plain parameters and writes its artifact
to disk, returning a counters dict for progress reporting. Per-item
failures become counters, never exceptions; only configuration, backend,
or output problems escape.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path

from . import analysis, assembler, provenance
from .clock import NO_DELAY, RateLimitPolicy
from .config import RunConfig
from .crawler import CrawlConfig, StickyTimePolicy, crawl
from .decisions import live_decisions
from .errors import ConfigError

LIVE_HOST_DELAY = RateLimitPolicy(1.0, 1.0)


def _write_jsonl_rows(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


def run_crawl(
    config: RunConfig,
    seeds: list[str],
    out,
    target: str = "2008-01-01",
    accept_years: str = "2007,2008",
    max_depth: int = 50,
    backend=None,
) -> dict:
    policy = StickyTimePolicy(
        target=datetime.fromisoformat(target).replace(tzinfo=timezone.utc),
        accept_years=frozenset(int(y) for y in accept_years.split(",")),
    )
    backend = backend if backend is not None else config.make_backend()
    crawl_config = CrawlConfig(
        scope=config.scope(),
        max_depth=max_depth,
        high_threshold=config.high_threshold,
        workers=config.workers,
        host_delay=NO_DELAY if config.is_fixture else LIVE_HOST_DELAY,
    )
    report = crawl(seeds, policy, crawl_config, backend, clock=config.make_clock())
    _write_jsonl_rows(out, (c.row() for c in report.candidates))
    per_agency = report.candidates_per_agency()
    return {
        "candidates": len(report.candidates),
        "fetched": report.fetched,
        "rejections": dict(report.rejections),
        "traps": dict(report.traps),
        "agencies_unrepresented": sorted(
            a for a in config.agencies if per_agency.get(a, 0) == 0
        ),
    }


def typed_sources(spec: str) -> tuple[list[str], list[str], list[str]]:
    """Split a --sources list into (pairs, crawl candidates, external lists).

    .txt files are external URL lists; .jsonl files whose name mentions
    "pairs" are backward-extension pairs; every other .jsonl is a crawl
    candidate file.
    """
    pairs, candidates, external = [], [], []
    for token in (t.strip() for t in spec.split(",") if t.strip()):
        name = Path(token).name.lower()
        if name.endswith(".txt"):
            external.append(token)
        elif "pairs" in name:
            pairs.append(token)
        else:
            candidates.append(token)
    return pairs, candidates, external


def run_assemble(
    config: RunConfig,
    sources: str,
    out,
    summary=None,
    sweep: str = "",
    decisions_path=None,
    ledger: assembler.QuotaLedger | None = None,
    backend=None,
    gateway=None,
) -> dict:
    backend = backend if backend is not None else config.make_backend()
    gateway = gateway if gateway is not None else config.make_gateway(backend)
    scope = config.scope()
    pairs_files, candidate_files, external_files = typed_sources(sources)

    counters: dict = {"funnel": [], "external": []}
    tuple_lists = []

    for path in pairs_files:
        try:
            urls = assembler.read_pairs(path)
        except OSError as e:
            raise ConfigError(f"pairs file {path}: {e}", field="sources") from e
        tuples, funnel = assembler.extend_backward_batch(
            urls, gateway, config.epochs, workers=config.workers,
            high_threshold=config.high_threshold,
        )
        tuple_lists.append(tuples)
        counters["funnel"].append(
            {
                "path": str(path),
                "pairs": funnel.pairs,
                "with_early_capture": funnel.with_early_capture,
                "eliminated_non_success": funnel.eliminated_non_success,
                "tuples": funnel.tuples,
                "stale_pairs": funnel.stale_pairs,
            }
        )

    if ledger is None:
        ledger = assembler.QuotaLedger(target=config.quota, agencies=config.agencies)
    external_streams = []

    def candidate_stream():
        for path in candidate_files:
            try:
                urls = assembler.read_candidate_urls(path)
            except OSError as e:
                raise ConfigError(f"candidates file {path}: {e}", field="sources") from e
            for url in urls:
                yield assembler.Candidate(
                    url=url, source=assembler.Source.PASTWEB_CRAWL,
                    high_threshold=config.high_threshold,
                )
        sweep_list = [d.strip() for d in sweep.split(",") if d.strip()]
        if sweep_list:
            yield from assembler.sweep_domains(
                sweep_list, gateway, config.epochs, backend=backend, scope=scope,
                high_threshold=config.high_threshold,
            )
        if decisions_path:
            for surt, decision in sorted(live_decisions(decisions_path).items()):
                if decision["action"] == "Accept":
                    yield assembler.Candidate(
                        url=decision["url"], source=assembler.Source.MANUAL_CURATION,
                        high_threshold=config.high_threshold,
                    )
        for path in external_files:
            stream = assembler.ingest_external_list(
                path, scope, high_threshold=config.high_threshold
            )
            external_streams.append((str(path), stream))
            yield from stream

    quota_tuples, fill = assembler.fill_quota(
        candidate_stream(), ledger, gateway, config.epochs
    )
    tuple_lists.append(quota_tuples)

    dataset = assembler.merge_and_dedupe(tuple_lists)
    assembler.write_triplets(out, dataset)
    if summary is None:
        summary = str(Path(out).parent / "summary.csv")
    assembler.write_summary_csv(summary, dataset)

    for path, stream in external_streams:
        stats = stream.stats
        counters["external"].append(
            {
                "path": path,
                "emitted": stats.emitted,
                "traps": stats.trap_total,
                "trap_reasons": dict(stats.traps),
                "trap_ratio": stats.trap_ratio,
                "malformed": stats.malformed,
                "out_of_scope": stats.out_of_scope,
            }
        )
    counters.update(
        {
            "tuples": len(dataset),
            "quota": {
                "consumed": fill.consumed,
                "claimed": fill.claimed,
                "skipped_full": fill.skipped_full,
                "failed_early": fill.failed_early,
                "missing_middle": fill.missing_middle,
                "missing_late": fill.missing_late,
            },
        }
    )
    return counters


def run_provenance(config: RunConfig, triplets, out, grouping=None, backend=None) -> dict:
    backend = backend if backend is not None else config.make_backend()
    limiter = config.make_provenance_limiter()
    table = (
        provenance.SourceGroupingTable.from_file(grouping)
        if grouping
        else provenance.SourceGroupingTable.default()
    )
    tuples = assembler.read_triplets(triplets)
    records = provenance.mine_dataset(tuples, backend, table, limiter)
    records.sort(key=lambda r: (r.capture.original.key, r.epoch))
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(
            ["surt", "epoch", "agency", "group", "organization", "partner", "collections"]
        )
        for r in records:
            writer.writerow(
                [
                    r.capture.original.key,
                    r.epoch,
                    r.agency,
                    r.group.value,
                    r.organization,
                    r.partner or "",
                    "|".join(r.collections),
                ]
            )
    return {
        "records": len(records),
        "groups": dict(sorted(provenance.group_totals(records).items())),
        "organizations": dict(sorted(provenance.organization_totals(records).items())),
    }


def run_analyze(
    config: RunConfig,
    triplets,
    out,
    terms=None,
    windows=None,
    probes=None,
    stemming: bool = False,
    backend=None,
) -> dict:
    backend = backend if backend is not None else config.make_backend()
    tracked = (
        analysis.TrackedTermList.from_file(terms) if terms else analysis.TrackedTermList.default()
    )
    admin_windows = (
        analysis.AdministrationWindows.from_file(windows)
        if windows
        else analysis.AdministrationWindows.default()
    )
    tuples = assembler.read_triplets(triplets)
    epoch_names = [e.name for e in config.epochs]
    if len(epoch_names) != 3:
        raise ConfigError("analysis needs exactly 3 epochs", field="epochs")

    tracked_reports = []
    trend_reports = []
    skipped = 0
    for tup in sorted(tuples, key=lambda t: t.surt.key):
        texts = {}
        for name in epoch_names:
            ref = tup.captures.get(name)
            capture = backend.nearest_capture(tup.url, ref.datetime) if ref else None
            if capture is None:
                break
            texts[name] = analysis.extract_text(backend.body(capture))
        if len(texts) != len(epoch_names):
            skipped += 1
            continue
        tracked_reports.append(
            analysis.attribute_changes(
                tup.surt.key, tup.agency, texts, epoch_names,
                tracked.term_strings(), stemming=stemming, texts_extracted=True,
            )
        )
        vocab = sorted(analysis.vocabulary(texts[epoch_names[1]]))
        trend_reports.append(
            analysis.attribute_changes(
                tup.surt.key, tup.agency, texts, epoch_names,
                vocab, texts_extracted=True,
            )
        )

    summary = analysis.aggregate_categories(tracked_reports)
    trends = analysis.mine_trends(trend_reports)
    table = analysis.tracked_term_table(tracked_reports, tracked)

    decay_rows = []
    if probes:
        probe_list, context = analysis.load_probes(probes)
        classifications = analysis.classify_decay_batch(probe_list, context)
        for (old_url, _), cls in zip(probe_list, classifications):
            decay_rows.append(
                {"old_url": old_url, "kind": cls.kind.value, "category": cls.category.value}
            )

    report = {
        "administration_windows": admin_windows.rows(),
        **summary.as_dict(),
        "trends": [
            {"agency": t.agency, "term": t.term, "page_count": t.page_count} for t in trends
        ],
        "tracked_table": [
            {"term": r.term, "category": r.category, "count": r.count} for r in table
        ],
        "decay": decay_rows,
    }
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    return {
        "pages": summary.total_pages,
        "changed": summary.changed_pages,
        "trends": len(trends),
        "skipped": skipped,
    }
