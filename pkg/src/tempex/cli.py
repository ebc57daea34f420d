"""Command-line pipeline: crawl / assemble / provenance / analyze / serve.

Exit codes: 0 success, 2 configuration error, 3 backend unreachable,
4 output path unwritable. Per-item failures inside a run become warning
counters on stderr, not non-zero exits.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import pipeline
from .config import RunConfig, config_from_args
from .errors import BackendUnreachable, ConfigError, FileUnreadable, TempexError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_OUTPUT = 4


def _warn(message: str) -> None:
    print(f"warning: {message}", file=sys.stderr)


def _check_writable(*paths) -> None:
    for path in paths:
        if path is None:
            continue
        parent = Path(path).parent
        if not parent.exists() or not parent.is_dir():
            raise OSError(f"directory {parent} does not exist")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", default="fixture:fixtures/paper-mini",
                        help="fixture:<dir> or live[:<cdx-base>]")
    parser.add_argument("--epochs", help="epochs JSON file (default: 2008/2016/2020)")
    parser.add_argument("--agencies", help="agency config JSON file")
    parser.add_argument("--scope", help="comma-separated host suffixes (default .gov)")
    parser.add_argument("--workers", type=int, default=max(1, os.cpu_count() or 1))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--real-clock", action="store_true",
                        help="use wall-clock politeness even against a fixture")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tempex")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("crawl", help="sticky-time crawl of the archived web")
    _add_common(p)
    p.add_argument("--target", default="2008-01-01")
    p.add_argument("--accept-years", default="2007,2008")
    p.add_argument("--seeds", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-depth", type=int, default=50)

    p = sub.add_parser("assemble", help="verify candidate streams into snapshot tuples")
    _add_common(p)
    p.add_argument("--quota", type=int, default=15)
    p.add_argument("--sources", default="",
                   help="comma list: *pairs*.jsonl backward pairs, other .jsonl crawl "
                        "candidates, .txt external URL lists")
    p.add_argument("--sweep", default="", help="comma list of domains for full-domain sweeps")
    p.add_argument("--decisions", help="curation decision log (JSONL)")
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="agency x depth pivot CSV (default <out dir>/summary.csv)")

    p = sub.add_parser("provenance", help="mine capture provenance for a tuple dataset")
    _add_common(p)
    p.add_argument("--in", dest="triplets", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--grouping", help="grouping table JSON (default packaged)")

    p = sub.add_parser("analyze", help="term-change analysis over a tuple dataset")
    _add_common(p)
    p.add_argument("--triplets", required=True)
    p.add_argument("--terms", help="tracked terms JSON (default packaged)")
    p.add_argument("--windows", help="administration windows JSON (default packaged)")
    p.add_argument("--probes", help="decay probe fixture JSON")
    p.add_argument("--stemming", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the curation API service")
    _add_common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8099)
    p.add_argument("--decisions-log", default="decisions.jsonl")
    p.add_argument("--workdir", default=".")
    p.add_argument("--ui", help="directory of built console assets to serve at /ui")

    return parser


def cmd_crawl(args, config: RunConfig) -> int:
    try:
        seeds = [
            line.strip()
            for line in Path(args.seeds).read_text(encoding="utf-8").splitlines()
            if line.strip() and not line.startswith("#")
        ]
    except OSError as e:
        raise ConfigError(f"seeds file {args.seeds}: {e}", field="seeds") from e
    _check_writable(args.out)
    counters = pipeline.run_crawl(
        config, seeds, args.out,
        target=args.target, accept_years=args.accept_years, max_depth=args.max_depth,
    )
    print(
        f"crawl: {counters['candidates']} candidates, "
        f"rejections={counters['rejections']}, traps={counters['traps']}"
    )
    if counters["agencies_unrepresented"]:
        _warn(
            "agencies with no crawl candidates: "
            + ", ".join(counters["agencies_unrepresented"])
        )
    return EXIT_OK


def cmd_assemble(args, config: RunConfig) -> int:
    _check_writable(args.out, args.summary)
    counters = pipeline.run_assemble(
        config, args.sources, args.out,
        summary=args.summary, sweep=args.sweep, decisions_path=args.decisions,
    )
    for funnel in counters["funnel"]:
        print(
            f"backward {funnel['path']}: pairs={funnel['pairs']} "
            f"early={funnel['with_early_capture']} "
            f"eliminated={funnel['eliminated_non_success']} tuples={funnel['tuples']}"
        )
        if funnel["stale_pairs"]:
            _warn(f"{funnel['stale_pairs']} pairs failed later-epoch re-verification")
    for ext in counters["external"]:
        ratio = ext["trap_ratio"]
        print(
            f"external {ext['path']}: emitted={ext['emitted']} traps={ext['traps']} "
            f"trap_ratio={'n/a' if ratio is None else f'{ratio:.2f}'}"
        )
    quota = counters["quota"]
    print(
        f"quota fill: consumed={quota['consumed']} claimed={quota['claimed']} "
        f"skipped_full={quota['skipped_full']} failed_early={quota['failed_early']} "
        f"missing_middle={quota['missing_middle']} missing_late={quota['missing_late']}"
    )
    print(f"assembled {counters['tuples']} tuples -> {args.out}")
    return EXIT_OK


def cmd_provenance(args, config: RunConfig) -> int:
    _check_writable(args.out)
    counters = pipeline.run_provenance(config, args.triplets, args.out, grouping=args.grouping)
    print(f"provenance: {counters['records']} records, groups={counters['groups']}")
    return EXIT_OK


def cmd_analyze(args, config: RunConfig) -> int:
    _check_writable(args.out)
    counters = pipeline.run_analyze(
        config, args.triplets, args.out,
        terms=args.terms, windows=args.windows, probes=args.probes, stemming=args.stemming,
    )
    if counters["skipped"]:
        _warn(f"{counters['skipped']} tuples had no replayable body for some epoch")
    print(
        f"analyze: {counters['pages']} pages, {counters['changed']} changed, "
        f"{counters['trends']} trends -> {args.out}"
    )
    return EXIT_OK


def cmd_serve(args, config: RunConfig) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    state = ServiceState(
        config=config,
        decisions_path=Path(args.decisions_log),
        workdir=Path(args.workdir),
        ui_dir=Path(args.ui) if args.ui else None,
    )
    app = create_app(state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


COMMANDS = {
    "crawl": cmd_crawl,
    "assemble": cmd_assemble,
    "provenance": cmd_provenance,
    "analyze": cmd_analyze,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        return COMMANDS[args.command](args, config)
    except (ConfigError, FileUnreadable) as e:
        field = f" (field: {e.field})" if getattr(e, "field", None) else ""
        print(f"config error: {e}{field}", file=sys.stderr)
        return EXIT_CONFIG
    except BackendUnreachable as e:
        print(f"backend unreachable: {e}", file=sys.stderr)
        return EXIT_BACKEND
    except OSError as e:
        print(f"output unwritable: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    except TempexError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
