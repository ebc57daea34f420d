"""HTTP service behind the curation console.

Read endpoints are derived views over the archive backend and are safe to
poll; the only mutations are the append-only decision log and job
submission. Accepted candidates flow into the next assemble job through the
same verification path as every other source, so the console cannot bypass
tuple invariants.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import pipeline
from .assembler import QuotaLedger
from .cdx import CdxQuery, capture_status_in_window
from .config import RunConfig
from .crawler import detect_trap, extract_links
from .decisions import append_decision, live_decisions, read_history, surt_to_url
from .epochs import parse_ts14
from .errors import BackendUnreachable, MalformedUrl, TempexError, UnsupportedScheme
from .urlkeys import canonicalize, in_scope

JOB_KINDS = ("Crawl", "Assemble", "Provenance", "Analyze")
_STATUS_ORDER = {"Queued": 0, "Running": 1, "Done": 2, "Failed": 2}


@dataclass
class JobState:
    job_id: int
    kind: str
    config: dict
    status: str = "Queued"
    counters: dict = field(default_factory=dict)
    error: str | None = None
    started: str | None = None
    ended: str | None = None
    outputs: dict = field(default_factory=dict)

    def advance(self, status: str) -> None:
        if _STATUS_ORDER[status] < _STATUS_ORDER[self.status]:
            raise ValueError(f"job {self.job_id}: cannot move {self.status} -> {status}")
        self.status = status

    def view(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "status": self.status,
            "counters": self.counters,
            "error": self.error,
            "started": self.started,
            "ended": self.ended,
            "outputs": self.outputs,
        }


@dataclass
class ServiceState:
    config: RunConfig
    decisions_path: Path
    workdir: Path
    ui_dir: Path | None = None

    def __post_init__(self):
        self.workdir.mkdir(parents=True, exist_ok=True)
        self.backend = self.config.make_backend()
        self.clock = self.config.make_clock()
        self.gateway = self.config.make_gateway(self.backend, self.clock)
        self.ledger = QuotaLedger(target=self.config.quota, agencies=self.config.agencies)
        self.jobs: list[JobState] = []
        self.jobs_lock = threading.Lock()
        self.decisions_lock = threading.Lock()
        self._recover_jobs()
        start = max((job.job_id for job in self.jobs), default=0) + 1
        self._job_ids = itertools.count(start)

    @property
    def jobs_snapshot_path(self) -> Path:
        return self.workdir / "jobs-state.json"

    def _recover_jobs(self) -> None:
        """Reload job views from the last snapshot; jobs that were still
        running when the process died come back as Failed."""
        path = self.jobs_snapshot_path
        if not path.is_file():
            return
        try:
            views = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError):
            return
        for view in views:
            job = JobState(
                job_id=view["job_id"],
                kind=view["kind"],
                config=view.get("config", {}),
                status=view["status"],
                counters=view.get("counters", {}),
                error=view.get("error"),
                started=view.get("started"),
                ended=view.get("ended"),
                outputs=view.get("outputs", {}),
            )
            if job.status in ("Queued", "Running"):
                job.status = "Failed"
                job.error = "interrupted by service restart"
            self.jobs.append(job)

    def snapshot_jobs(self) -> None:
        with self.jobs_lock:
            views = [{**job.view(), "config": job.config} for job in self.jobs]
        tmp = self.jobs_snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(views, sort_keys=True) + "\n", encoding="utf-8")
        tmp.replace(self.jobs_snapshot_path)


class DecisionIn(BaseModel):
    surt: str
    action: str
    note: str | None = None
    actor: str = "console"


class JobIn(BaseModel):
    kind: str
    config: dict = {}


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y%m%d%H%M%S")


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="tempex curation service")
    epochs = state.config.epochs
    early, late = epochs[0], epochs[-1]

    def epoch_by_name(name: str):
        for epoch in epochs:
            if epoch.name == name:
                return epoch
        return None

    def window_state(url: str, epoch) -> str:
        records = state.gateway.fetch(
            CdxQuery.exact(
                url,
                from_ts=epoch.start.strftime("%Y%m%d%H%M%S"),
                to_ts=epoch.end.strftime("%Y%m%d%H%M%S"),
            )
        )
        result = capture_status_in_window(records, epoch)
        return {
            "SuccessCapture": "success",
            "NonSuccessOnly": "non_success",
            "NoCapture": "none",
        }[result.status.value]

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/config")
    def get_config():
        return {
            "epochs": [
                {
                    "name": e.name,
                    "start": e.start.strftime("%Y%m%d%H%M%S"),
                    "end": e.end.strftime("%Y%m%d%H%M%S"),
                    "target": e.target.strftime("%Y%m%d%H%M%S"),
                }
                for e in epochs
            ],
            "scope": list(state.config.scope_suffixes),
            "quota": state.config.quota,
            "agencies": state.config.agencies,
        }

    @app.get("/prefix")
    def prefix_listing(dir: str):
        target = dir if "://" in dir else "http://" + dir
        try:
            if not in_scope(target, state.config.scope()):
                raise HTTPException(status_code=400, detail=f"prefix {dir!r} out of scope")
        except (MalformedUrl, UnsupportedScheme) as e:
            raise HTTPException(status_code=400, detail=str(e)) from e
        try:
            records = state.gateway.fetch(CdxQuery.prefix(target))
        except BackendUnreachable as e:
            raise HTTPException(status_code=502, detail=str(e)) from e

        rejected = {
            surt
            for surt, decision in live_decisions(state.decisions_path).items()
            if decision["action"] == "Reject"
        }
        rows = []
        grouped: dict[str, list] = {}
        for record in records:
            grouped.setdefault(record.urlkey, []).append(record)
        for surt in sorted(grouped):
            if surt in rejected:
                continue
            group = grouped[surt]
            first = min(r.timestamp for r in group)
            last = max(r.timestamp for r in group)
            url = group[0].original
            rows.append(
                {
                    "surt": surt,
                    "url": url,
                    "first_capture": first,
                    "last_capture": last,
                    "had_non_success": any(r.status != "200" for r in group),
                    "had_success": any(r.status == "200" for r in group),
                    "candidate_flag": (
                        parse_ts14(first) < early.target and parse_ts14(last) > late.target
                    ),
                    "trap": detect_trap(url).is_trap,
                }
            )
        return {"dir": dir, "rows": rows}

    @app.get("/replay-links")
    def replay_links(url: str, epoch: str):
        spec = epoch_by_name(epoch)
        if spec is None:
            raise HTTPException(status_code=400, detail=f"unknown epoch {epoch!r}")
        try:
            records = state.gateway.fetch(
                CdxQuery.exact(
                    url,
                    from_ts=spec.start.strftime("%Y%m%d%H%M%S"),
                    to_ts=spec.end.strftime("%Y%m%d%H%M%S"),
                )
            )
        except BackendUnreachable as e:
            raise HTTPException(status_code=502, detail=str(e)) from e
        result = capture_status_in_window(records, spec)
        if not result:
            raise HTTPException(
                status_code=404, detail=f"{url} has no accepted capture in {epoch}"
            )
        capture = state.backend.nearest_capture(url, result.record.datetime)
        if capture is None:
            raise HTTPException(status_code=404, detail=f"{url}: capture body unavailable")
        body = state.backend.body(capture)
        links = []
        for link in extract_links(body, base=url):
            if not in_scope(link, state.config.scope()):
                continue
            availability = {e.name: window_state(link, e) for e in epochs}
            links.append(
                {
                    "url": link,
                    "surt": canonicalize(link).key,
                    "availability": availability,
                    "eligible": all(v == "success" for v in availability.values()),
                }
            )
        return {"url": url, "epoch": epoch, "links": links}

    @app.get("/decisions")
    def get_decisions():
        live = live_decisions(state.decisions_path)
        return {
            "live": [live[surt] for surt in sorted(live)],
            "history_length": len(read_history(state.decisions_path)),
        }

    @app.post("/decisions", status_code=201)
    def post_decision(decision: DecisionIn):
        if decision.action not in ("Accept", "Reject"):
            raise HTTPException(status_code=400, detail=f"bad action {decision.action!r}")
        url = surt_to_url(decision.surt)
        try:
            known = state.backend.has_url(url)
        except TempexError:
            known = False
        if not known:
            raise HTTPException(status_code=404, detail=f"unknown surt {decision.surt!r}")
        with state.decisions_lock:
            live = live_decisions(state.decisions_path)
            current = live.get(decision.surt)
            if current is not None and current["action"] == decision.action:
                raise HTTPException(
                    status_code=409,
                    detail=f"live decision for {decision.surt!r} is already {decision.action}",
                )
            row = append_decision(
                state.decisions_path,
                decision.surt,
                decision.action,
                actor=decision.actor,
                note=decision.note,
                url=url,
            )
        return row

    @app.get("/quota")
    def quota():
        return {"target": state.config.quota, "rows": state.ledger.snapshot()}

    @app.get("/jobs")
    def jobs():
        with state.jobs_lock:
            return {"jobs": [job.view() for job in state.jobs]}

    @app.post("/jobs", status_code=201)
    def submit_job(job_in: JobIn):
        kind = job_in.kind.capitalize()
        if kind not in JOB_KINDS:
            raise HTTPException(status_code=400, detail=f"unknown job kind {job_in.kind!r}")
        config = dict(job_in.config)
        if kind == "Crawl":
            seeds = config.get("seeds") or []
            if not seeds:
                raise HTTPException(status_code=400, detail="crawl job needs seeds")
            scope = state.config.scope()
            for seed in seeds:
                try:
                    if not in_scope(seed, scope):
                        raise HTTPException(
                            status_code=400, detail=f"seed out of scope: {seed}"
                        )
                except (MalformedUrl, UnsupportedScheme) as e:
                    raise HTTPException(status_code=400, detail=str(e)) from e
        if kind in ("Provenance", "Analyze"):
            triplets = config.get("triplets")
            if not triplets or not Path(triplets).is_file():
                raise HTTPException(
                    status_code=400, detail=f"{kind.lower()} job needs an existing triplets file"
                )

        with state.jobs_lock:
            job = JobState(job_id=next(state._job_ids), kind=kind, config=config)
            state.jobs.append(job)
        state.snapshot_jobs()
        thread = threading.Thread(target=_run_job, args=(state, job), daemon=True)
        thread.start()
        return job.view()

    if state.ui_dir is not None and state.ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(state.ui_dir), html=True), name="ui")

    return app


def _run_job(state: ServiceState, job: JobState) -> None:
    job.advance("Running")
    job.started = _now()
    out_base = state.workdir / f"job-{job.job_id}"
    try:
        if job.kind == "Crawl":
            out = f"{out_base}-candidates.jsonl"
            job.counters = pipeline.run_crawl(
                state.config,
                job.config["seeds"],
                out,
                target=job.config.get("target", "2008-01-01"),
                accept_years=job.config.get("accept_years", "2007,2008"),
                max_depth=int(job.config.get("max_depth", 50)),
                backend=state.backend,
            )
            job.outputs = {"candidates": out}
        elif job.kind == "Assemble":
            out = f"{out_base}-triplets.jsonl"
            summary = f"{out_base}-summary.csv"
            ledger = QuotaLedger(target=state.config.quota, agencies=state.config.agencies)
            job.counters = pipeline.run_assemble(
                state.config,
                job.config.get("sources", ""),
                out,
                summary=summary,
                sweep=job.config.get("sweep", ""),
                decisions_path=state.decisions_path,
                ledger=ledger,
                backend=state.backend,
                gateway=state.gateway,
            )
            state.ledger = ledger
            job.outputs = {"triplets": out, "summary": summary}
        elif job.kind == "Provenance":
            out = f"{out_base}-prov.csv"
            job.counters = pipeline.run_provenance(
                state.config, job.config["triplets"], out,
                grouping=job.config.get("grouping"), backend=state.backend,
            )
            job.outputs = {"provenance": out}
        else:  # Analyze
            out = f"{out_base}-report.json"
            job.counters = pipeline.run_analyze(
                state.config, job.config["triplets"], out,
                terms=job.config.get("terms"), windows=job.config.get("windows"),
                probes=job.config.get("probes"), backend=state.backend,
            )
            job.outputs = {"report": out}
        job.advance("Done")
    except Exception as e:  # job failures are reported, never raised into the server
        job.error = f"{type(e).__name__}: {e}"
        job.advance("Failed")
    finally:
        job.ended = _now()
        state.snapshot_jobs()
