import random
from pathlib import Path

import pytest

from tempex.cdx import CdxGateway
from tempex.cli import EXIT_OK, main
from tempex.clock import RateLimiter, RateLimitPolicy, VirtualClock
from tempex.fixture import FixtureStore

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run_cli_pipeline(out_dir: Path) -> None:
    """crawl -> assemble -> provenance -> analyze over paper-mini."""
    out_dir.mkdir(parents=True, exist_ok=True)
    mini = str(FIXTURES / "paper-mini")
    backend = f"fixture:{mini}"
    assert main([
        "crawl", "--backend", backend,
        "--seeds", f"{mini}/seeds.txt",
        "--out", str(out_dir / "candidates.jsonl"),
    ]) == EXIT_OK
    assert main([
        "assemble", "--backend", backend,
        "--sources", f"{mini}/pairs.jsonl,{out_dir / 'candidates.jsonl'},{mini}/eot.txt",
        "--sweep", "globalchange.gov,osmre.gov,federalregister.gov",
        "--out", str(out_dir / "triplets.jsonl"),
        "--summary", str(out_dir / "summary.csv"),
    ]) == EXIT_OK
    assert main([
        "provenance", "--backend", backend,
        "--in", str(out_dir / "triplets.jsonl"),
        "--out", str(out_dir / "prov.csv"),
    ]) == EXIT_OK
    assert main([
        "analyze", "--backend", backend,
        "--triplets", str(out_dir / "triplets.jsonl"),
        "--probes", str(FIXTURES / "redirect-probes.json"),
        "--out", str(out_dir / "report.json"),
    ]) == EXIT_OK


@pytest.fixture(scope="session")
def fixtures_root() -> Path:
    assert FIXTURES.is_dir(), "run `python -m tempex.fixturegen fixtures` first"
    return FIXTURES


@pytest.fixture(scope="session")
def paper_mini(fixtures_root) -> FixtureStore:
    return FixtureStore.load(fixtures_root / "paper-mini")


@pytest.fixture(scope="session")
def crawl_graph_store(fixtures_root) -> FixtureStore:
    return FixtureStore.load(fixtures_root / "crawl-graph")


def make_gateway(backend, min_delay=0.0, max_delay=0.0, seed=0):
    """Gateway over a virtual clock; zero-delay by default so tests that do
    not assert politeness pay nothing for it."""
    limiter = RateLimiter(
        RateLimitPolicy(min_delay, max_delay), VirtualClock(), random.Random(seed)
    )
    return CdxGateway(backend, limiter)


class RecordingBackend:
    """Wraps a backend, stamping the virtual-clock time of every call."""

    def __init__(self, inner, clock):
        self.inner = inner
        self.clock = clock
        self.cdx_page_times = []
        self.preflight_times = []
        self.provenance_times = []

    def cdx_page_count(self, query):
        self.preflight_times.append(self.clock.now())
        return self.inner.cdx_page_count(query)

    def cdx_page(self, query, page):
        self.cdx_page_times.append(self.clock.now())
        return self.inner.cdx_page(query, page)

    def timemap(self, archive_id, url):
        return self.inner.timemap(archive_id, url)

    def nearest_capture(self, url, target):
        return self.inner.nearest_capture(url, target)

    def body(self, capture):
        return self.inner.body(capture)

    def provenance(self, url, ts):
        self.provenance_times.append(self.clock.now())
        return self.inner.provenance(url, ts)

    def has_url(self, url):
        return self.inner.has_url(url)
