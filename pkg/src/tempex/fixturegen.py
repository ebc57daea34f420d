"""Deterministic builders for the shipped fixture archives.

Every fixture the test suite and README walk through is generated here so
it can be rebuilt byte-identically: ``python -m tempex.fixturegen <out-dir>``
writes them all. The paper-mini fixture carries a 1/10-scale candidate
funnel (1067 pairs -> 96 early candidates -> 6 eliminated -> 90 tuples)
plus every other stream the pipeline consumes.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

# -- epoch capture stamps ------------------------------------------------------

TS_EARLY = "20080215000000"
TS_EARLY_BAD = "20080401000000"
TS_MIDDLE = "20160615000000"
TS_LATE = "20200615000000"

FILLER = "Welcome to the agency program office. This page describes agency activities and public resources."

# Page-text archetypes across the three epochs. Tracked terms appear and
# disappear per archetype so the analysis stage has every category to count.
ARCHETYPES = {
    "unchanged": (
        FILLER + " Contact the office for assistance.",
        FILLER + " Contact the office for assistance.",
        FILLER + " Contact the office for assistance.",
    ),
    "changed_no_tracked": (
        FILLER + " Details reviewed quarterly.",
        FILLER + " Details reviewed quarterly.",
        FILLER + " See the modernized portal for current material.",
    ),
    "deleted_middle": (
        FILLER,
        FILLER + " Our sustainable initiatives address community needs.",
        FILLER + " Initiative archive available on request.",
    ),
    "deleted_prior": (
        FILLER + " Workplace safety guidance published here.",
        FILLER + " Workplace safety guidance published here.",
        FILLER,
    ),
    "deleted_both": (
        FILLER + " Workplace safety guidance published here.",
        FILLER + " Workplace safety guidance published here."
        " Our sustainable initiatives address community needs.",
        FILLER,
    ),
}
ARCHETYPE_CYCLE = list(ARCHETYPES)

FUNNEL_AGENCIES = [
    "epa.gov", "noaa.gov", "ferc.gov", "osha.gov", "nih.gov",
    "cdc.gov", "fws.gov", "nasa.gov", "doi.gov", "usda.gov",
]

# Early-epoch provenance labels: scaled reference marginals (1/10).
PROVENANCE_2008 = (
    [("alexa", ["Alexa Crawls"])] * 82
    + [("commoncrawl", ["Common Crawl"])] * 22
    + [("internal", ["Internet Archive Crawls", "Wide Crawl Number 6"])] * 8
    + [("eot", ["End of Term Web Archive 2008"])] * 6
    + [("archiveit", ["Archive-It Collection 1234"])] * 3
    + [("ina", ["INA Collection"])] * 1
)
ARCHIVE_IT_PARTNERS = [
    "State Library of Alaska",
    "Old State University Libraries",
    "K-12 Web Archiving Program",
]
PROVENANCE_2016_CYCLE = [
    ["EDGI Federal Environmental Web Monitoring"],
    ["Internet Archive Crawls"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["Archive Team"],
    ["Archive-It Collection 9876"],
    ["Internet Archive Crawls"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["GDELT Seeds"],
    ["Wikipedia Outlinks"],
    ["Internet Archive Crawls"],
]
PROVENANCE_2020_CYCLE = [
    ["EDGI Federal Environmental Web Monitoring"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["Archive Team"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["Save Page Now"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["GDELT Seeds"],
    ["EDGI Federal Environmental Web Monitoring"],
    ["Perma.cc"],
    ["Archive-It Collection 9876"],
]


def page_html(title: str, text: str, links: list[str] | None = None) -> str:
    items = "".join(f'<li><a href="{href}">{href}</a></li>' for href in (links or []))
    nav = f"<ul>{items}</ul>" if items else ""
    return (
        "<html><head><title>{t}</title><script>var tracker='regulation';</script></head>"
        "<body><h1>{t}</h1><p>{x}</p>{nav}</body></html>"
    ).format(t=title, x=text, nav=nav)


class ManifestBuilder:
    """Accumulates pages/captures and writes a content-addressed fixture."""

    def __init__(self, cdx_page_size: int = 10):
        self.cdx_page_size = cdx_page_size
        self.pages: dict[str, list[dict]] = {}
        self.bodies: dict[str, str] = {}  # rel path -> content

    def _body_ref(self, content: str) -> str:
        digest = hashlib.sha256(content.encode("utf-8")).hexdigest()[:12]
        rel = f"pages/{digest}.html"
        self.bodies[rel] = content
        return rel

    def capture(
        self,
        url: str,
        ts: str,
        status: str = "200",
        body: str | None = None,
        collections: list[str] | None = None,
        partner: str | None = None,
        archive: str = "web.archive.org",
    ) -> None:
        entry: dict = {"ts": ts, "status": status}
        if body is not None:
            rel = self._body_ref(body)
            entry["body"] = rel
            entry["length"] = len(body.encode("utf-8"))
        if collections:
            entry["collections"] = collections
        if partner:
            entry["partner"] = partner
        if archive != "web.archive.org":
            entry["archive"] = archive
        self.pages.setdefault(url, []).append(entry)

    def triple(
        self,
        url: str,
        texts: tuple[str, str, str] | None,
        collections3: tuple[list[str] | None, list[str] | None, list[str] | None] = (None, None, None),
        partner: str | None = None,
        early_body_override: str | None = None,
    ) -> None:
        """One successful capture in each of the three epoch windows."""
        stamps = (TS_EARLY, TS_MIDDLE, TS_LATE)
        for i, ts in enumerate(stamps):
            body = None
            if texts is not None:
                body = page_html(url, texts[i])
            if i == 0 and early_body_override is not None:
                body = early_body_override
            self.capture(
                url,
                ts,
                "200",
                body=body,
                collections=collections3[i],
                partner=partner if i == 0 else None,
            )

    def write(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "cdx_page_size": self.cdx_page_size,
            "pages": [
                {"url": url, "captures": caps}
                for url, caps in sorted(self.pages.items())
            ],
        }
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8"
        )
        for rel, content in sorted(self.bodies.items()):
            path = out_dir / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(content, encoding="utf-8")


def _jsonl(path: Path, rows: list[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")


# -- paper-mini ----------------------------------------------------------------


def build_paper_mini(out_dir: Path) -> dict:
    from .urlkeys import canonicalize

    builder = ManifestBuilder(cdx_page_size=2)
    pairs: list[dict] = []
    tuple_urls: list[str] = []  # generator-order list of the 122 expected tuples
    archetype_of: dict[str, str] = {}

    def assign_archetype(url: str, index: int) -> tuple[str, str, str]:
        name = ARCHETYPE_CYCLE[index % len(ARCHETYPE_CYCLE)]
        archetype_of[url] = name
        return ARCHETYPES[name]

    # (a) funnel: 1067 later-epoch pairs; 96 have an early-window capture,
    # 6 of those only a non-success one, leaving 90 triples.
    for i in range(1067):
        agency = FUNNEL_AGENCIES[i % len(FUNNEL_AGENCIES)]
        if i % 3 == 0:
            url = f"http://www.{agency}/programs/office/p{i:04d}.html"
        else:
            url = f"http://www.{agency}/p{i:04d}"
        pairs.append({"surt": canonicalize(url).key, "url": url})
        if i < 90:
            texts = assign_archetype(url, i)
            tuple_urls.append(url)
            builder.triple(url, texts)
        elif i < 96:
            builder.capture(url, TS_EARLY_BAD, "302")
            builder.capture(url, TS_MIDDLE, "200")
            builder.capture(url, TS_LATE, "200")
        else:
            builder.capture(url, TS_MIDDLE, "200")
            builder.capture(url, TS_LATE, "200")

    # (b) crawlable past web for the pipeline's crawl step: two hubs whose
    # accepted children mostly persist forward (12 crawl tuples).
    crawl_tuples: list[str] = []

    def hub(root: str, children: list[tuple[str, bool]]) -> None:
        links = [child for child, _ in children]
        root_texts = assign_archetype(root, len(tuple_urls))
        builder.triple(
            root,
            root_texts,
            early_body_override=page_html(root, root_texts[0], links=links),
        )
        crawl_tuples.append(root)
        tuple_urls.append(root)
        for child, persists in children:
            if persists:
                texts = assign_archetype(child, len(tuple_urls))
                builder.triple(child, texts)
                crawl_tuples.append(child)
                tuple_urls.append(child)
            else:
                builder.capture(child, TS_EARLY, "200", body=page_html(child, FILLER))

    hub(
        "http://www.usgs.gov/",
        [
            ("http://www.usgs.gov/hazards", True),
            ("http://www.usgs.gov/water", True),
            ("http://www.usgs.gov/maps", True),
            ("http://www.usgs.gov/science/data/r1.html", True),
            ("http://www.usgs.gov/science/data/r2.html", True),
            ("http://www.usgs.gov/science/data/gone.html", False),
        ],
    )
    hub(
        "http://www.nasa.gov/",
        [
            ("http://www.nasa.gov/earth", True),
            ("http://www.nasa.gov/missions", True),
            ("http://www.nasa.gov/centers", True),
            ("http://www.nasa.gov/topics/earth/f1.html", True),
            ("http://www.nasa.gov/topics/earth/f2.html", True),
            ("http://www.nasa.gov/topics/earth/gone.html", False),
        ],
    )

    # (c) sweep domains. globalchange carries enough 2008 rows to paginate a
    # prefix query into the ~100-page range, most of them a cookie trap.
    sweep_tuples: list[str] = []

    def sweep_tuple(url: str, links: list[str] | None = None) -> None:
        texts = assign_archetype(url, len(tuple_urls))
        override = page_html(url, texts[0], links=links) if links else None
        builder.triple(url, texts, early_body_override=override)
        sweep_tuples.append(url)
        tuple_urls.append(url)

    sweep_tuple("http://www.globalchange.gov/")
    sweep_tuple("http://www.globalchange.gov/usimpacts")
    sweep_tuple("http://www.globalchange.gov/whatsnew")
    for i in range(1, 13):
        builder.capture(
            f"http://www.globalchange.gov/policies/comments/{i:04d}.html", TS_EARLY, "200"
        )
    for i in range(185):
        builder.capture(
            f"http://www.globalchange.gov/news/cookie/page{i:03d}.html", TS_EARLY, "200"
        )

    sweep_tuple(
        "http://www.osmre.gov/",
        links=[
            "http://techtransfer.osmre.gov/",
            "http://www.osmre.gov/reclamation",
            "http://www.osmre.gov/programs",
        ],
    )
    sweep_tuple("http://www.osmre.gov/reclamation")
    sweep_tuple("http://www.osmre.gov/programs")
    builder.capture("http://techtransfer.osmre.gov/", TS_EARLY, "200")
    builder.capture("http://techtransfer.osmre.gov/", "20120301000000", "200")
    builder.capture("http://techtransfer.osmre.gov/", "20140601000000", "200")

    sweep_tuple("http://www.federalregister.gov/")
    for name in ("articles/a1.html", "articles/a2.html", "articles/a3.html"):
        builder.capture(f"http://www.federalregister.gov/{name}", "20110501000000", "200")
        builder.capture(f"http://www.federalregister.gov/{name}", "20230101000000", "200")

    # (d) external End of Term list: verifiable URLs, crawler traps, and
    # clean lines that never extend forward.
    external_tuples: list[str] = []
    eot_lines: list[str] = []

    blm_links = [
        "http://fire.ak.blm.gov/aicc.html",
        "http://fire.ak.blm.gov/weather.html",
        "http://fire.ak.blm.gov/fuels.html",
        "http://fire.ak.blm.gov/reports.html",
        "http://fire.ak.blm.gov/maps.html",
    ]
    fire_root = "http://fire.ak.blm.gov/"
    texts = assign_archetype(fire_root, len(tuple_urls))
    builder.triple(
        fire_root, texts, early_body_override=page_html(fire_root, texts[0], links=blm_links)
    )
    external_tuples.append(fire_root)
    tuple_urls.append(fire_root)
    eot_lines.append(fire_root)
    # Curation candidates behind the fire.ak hub: full triples in the index,
    # but absent from every automated stream.
    for child in blm_links:
        builder.triple(child, ARCHETYPES["unchanged"])

    external_verifiable = [
        "http://www.blm.gov/wildfires",
        "http://www.blm.gov/grazing",
        "http://www.blm.gov/energy/oil.html",
        "http://www.blm.gov/energy/coal.html",
        "http://www3.niaid.nih.gov/",
        "http://www3.niaid.nih.gov/topics/allergy.html",
        "http://www.niehs.nih.gov/",
        "http://www.niehs.nih.gov/health/topics.html",
        "http://tools.niehs.nih.gov/",
        "http://www.cdc.gov/asthma/triggers.html",
        "http://www.epa.gov/ttn/atw/hlthef/benzene.html",
        "http://www.epa.gov/ttn/atw/hlthef/toluene.html",
    ]
    for url in external_verifiable:
        texts = assign_archetype(url, len(tuple_urls))
        builder.triple(url, texts)
        external_tuples.append(url)
        tuple_urls.append(url)
        eot_lines.append(url)

    for i in range(10):
        url = f"http://www.blm.gov/fo/field{i}.html"
        builder.capture(url, TS_EARLY, "200")
        eot_lines.append(url)
    for i in range(7):
        eot_lines.append(f"http://www.blm.gov/never/archived{i}.html")
    for i in range(10):
        eot_lines.append(
            f"http://www.blm.gov/news/cookie/cookie/cookie/item{i}.html"
        )
    for i in range(10):
        eot_lines.append(f"http://www.blm.gov/cal/2008/01/{i + 1:02d}/2008/01/{i + 2:02d}/view.html")
    for i in range(10):
        eot_lines.append(f"http://www.blm.gov/search/result{i}.html?phpsessid=ab{i:02d}cd")

    # (e) a directory whose captures straddle the study era: candidate rows
    # for the prefix listing and console highlighting.
    akcache = "http://fire.ak.blm.gov/content/akcache.html"
    builder.capture(akcache, "20060710000000", "200", body=page_html(akcache, FILLER))
    builder.capture(akcache, "20230301000000", "200", body=page_html(akcache, FILLER))
    stale = "http://fire.ak.blm.gov/content/stale.html"
    builder.capture(stale, "20110301000000", "404")
    builder.capture(stale, "20120301000000", "200")

    # provenance labels for every expected tuple
    assert len(tuple_urls) == len(PROVENANCE_2008), (
        f"expected {len(PROVENANCE_2008)} tuples, generator produced {len(tuple_urls)}"
    )
    partner_i = 0
    for i, url in enumerate(tuple_urls):
        group, labels = PROVENANCE_2008[i]
        partner = None
        if group == "archiveit":
            partner = ARCHIVE_IT_PARTNERS[partner_i % len(ARCHIVE_IT_PARTNERS)]
            partner_i += 1
        captures = builder.pages[url]
        for cap in captures:
            if cap["ts"] == TS_EARLY and cap["status"] == "200":
                cap["collections"] = labels
                if partner:
                    cap["partner"] = partner
            elif cap["ts"] == TS_MIDDLE:
                cap["collections"] = PROVENANCE_2016_CYCLE[i % len(PROVENANCE_2016_CYCLE)]
            elif cap["ts"] == TS_LATE:
                cap["collections"] = PROVENANCE_2020_CYCLE[i % len(PROVENANCE_2020_CYCLE)]

    builder.write(out_dir)
    _jsonl(out_dir / "pairs.jsonl", pairs)
    (out_dir / "seeds.txt").write_text(
        "http://www.usgs.gov/\nhttp://www.nasa.gov/\n", encoding="utf-8"
    )
    (out_dir / "eot.txt").write_text("\n".join(eot_lines) + "\n", encoding="utf-8")
    # a ready-made epochs file mirroring the built-in defaults, so the CLI
    # walkthrough can demonstrate --epochs without hand-editing JSON
    epochs_rows = [
        {"name": "2008", "start": "20070101000000", "end": "20081231235959",
         "target": "20080101000000"},
        {"name": "2016", "start": "20160101000000", "end": "20161231235959",
         "target": "20160701000000"},
        {"name": "2020", "start": "20200101000000", "end": "20201231235959",
         "target": "20200701000000"},
    ]
    (out_dir / "epochs.json").write_text(
        json.dumps(epochs_rows, indent=1) + "\n", encoding="utf-8"
    )

    expected = {
        "pairs": len(pairs),
        "pairs_with_early_capture": 96,
        "pairs_eliminated_non_success": 6,
        "funnel_tuples": 90,
        "crawl_tuples": len(crawl_tuples),
        "sweep_tuples": len(sweep_tuples),
        "external_tuples": len(external_tuples),
        "total_tuples": len(tuple_urls),
        "key_count": len(builder.pages),
        "provenance_2008_groups": {
            "LargeImportedCrawls": 82 + 22,
            "InternalCrawls": 8,
            "EndOfTerm": 6,
            "ArchiveIt": 3,
            "SmallImportedCrawls": 1,
        },
        "archetypes": archetype_of,
    }
    (out_dir / "expected.json").write_text(
        json.dumps(expected, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    return expected


# -- crawl acceptance graph -----------------------------------------------------


def build_crawl_graph(out_dir: Path) -> None:
    """12-node crawl-visible graph: 9 accepted, 2 out-of-window, 1 trap;
    the 2009 hub hides a two-page subtree that is indexed but unreachable."""
    builder = ManifestBuilder()
    E = {i: f"http://www.epa.gov/sect{i}" for i in range(9)}
    trap = "http://www.epa.gov/news/cookie/cookie/cookie/index.html"
    old = "http://www.epa.gov/legacy/old.html"  # only a 2006 capture
    hub = "http://www.epa.gov/reorg/hub.html"  # only a 2009 capture
    sub1 = "http://www.epa.gov/reorg/sub1.html"
    sub2 = "http://www.epa.gov/reorg/sub2.html"

    edges = {
        E[0]: [E[1], E[2], E[3], E[4], trap, old, hub],
        E[1]: [E[5], E[6]],
        E[2]: [E[7], E[8]],
        E[3]: [],
        E[4]: [E[1]],
        E[5]: [],
        E[6]: [],
        E[7]: [],
        E[8]: [],
        hub: [sub1, sub2],
    }

    for i in range(9):
        builder.capture(
            E[i], TS_EARLY, "200", body=page_html(E[i], FILLER, links=edges.get(E[i], []))
        )
    builder.capture(old, "20060601000000", "200", body=page_html(old, FILLER))
    builder.capture(hub, "20090301000000", "200", body=page_html(hub, FILLER, links=edges[hub]))
    builder.capture(sub1, TS_EARLY, "200", body=page_html(sub1, FILLER))
    builder.capture(sub2, TS_EARLY, "200", body=page_html(sub2, FILLER))
    builder.capture(trap, TS_EARLY, "200", body=page_html(trap, FILLER))
    builder.write(out_dir)

    graph = {
        "seed": E[0],
        "edges": edges,
        "accepted": [E[i] for i in range(9)],
        "out_of_window": [old, hub],
        "trap": [trap],
        "unreachable_subtree": [sub1, sub2],
    }
    (out_dir / "graph.json").write_text(
        json.dumps(graph, indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )


# -- quota fixtures ---------------------------------------------------------------


def build_quota_usgs(out_dir: Path) -> None:
    """274 crawl candidates; an early prefix of the stream already holds 15
    verifiable High and 15 verifiable Deep pages."""
    from .urlkeys import canonicalize

    builder = ManifestBuilder()
    rows = []
    for i in range(274):
        if i % 2 == 0:
            url = f"http://www.usgs.gov/c{i:03d}"
        else:
            url = f"http://www.usgs.gov/deep/dir/c{i:03d}.html"
        persists = i < 72 and (i // 2) % 2 == 0
        builder.capture(url, TS_EARLY, "200")
        if persists:
            builder.capture(url, TS_MIDDLE, "200")
            builder.capture(url, TS_LATE, "200")
        rows.append(
            {
                "surt": canonicalize(url).key,
                "url": url,
                "depth_class": "High" if i % 2 == 0 else "Deep",
                "accepted_datetime": TS_EARLY,
            }
        )
    builder.write(out_dir)
    _jsonl(out_dir / "candidates.jsonl", rows)


def build_quota_cdc(out_dir: Path) -> None:
    """5 deep pages from the original collection plus a crawl stream whose
    first 15 verifiable deep pages overlap it on 2 URLs -> 18 deep total."""
    from .urlkeys import canonicalize

    builder = ManifestBuilder()
    original = [f"http://www.cdc.gov/nceh/topics/t{i}.html" for i in range(5)]
    crawl_only = [f"http://www.cdc.gov/asthma/data/d{i}.html" for i in range(13)]
    dead = [f"http://www.cdc.gov/flu/archive/x{i}.html" for i in range(6)]
    for url in original + crawl_only:
        builder.triple(url, ARCHETYPES["unchanged"])
    for url in dead:
        builder.capture(url, TS_EARLY, "200")
    builder.write(out_dir)

    _jsonl(
        out_dir / "pairs.jsonl",
        [{"surt": canonicalize(u).key, "url": u} for u in original],
    )
    # crawl stream: 2 overlapping originals + 13 new + 6 that die forward
    stream = [original[0], original[1]] + crawl_only + dead
    _jsonl(
        out_dir / "candidates.jsonl",
        [
            {
                "surt": canonicalize(u).key,
                "url": u,
                "depth_class": "Deep",
                "accepted_datetime": TS_EARLY,
            }
            for u in stream
        ],
    )


# -- external lists ------------------------------------------------------------------


def build_external_lists(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i in range(250):
        if i % 2 == 0:
            lines.append(f"http://www.blm.gov/field/office{i:03d}.html")
        else:
            lines.append(f"http://www.blm.gov/o{i:03d}")
    for i in range(250):
        lines.append(f"http://www.blm.gov/news/cookie/cookie/cookie/item{i:03d}.html")
    for i in range(250):
        a, b = (i % 27) + 1, (i % 26) + 2
        lines.append(f"http://www.blm.gov/cal/2008/01/{a:02d}/2008/02/{b:02d}/e{i:03d}.html")
    for i in range(125):
        lines.append(f"http://www.blm.gov/search/r{i:03d}.html?phpsessid=s{i:05d}")
    for i in range(125):
        segs = "/".join(f"n{j}" for j in range(13))
        lines.append(f"http://www.blm.gov/{segs}/deep{i:03d}.html")
    (out_dir / "blm-eot.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    nih = [
        "http://www3.niaid.nih.gov/",
        "http://www3.niaid.nih.gov/research/topics.html",
        "http://www.niehs.nih.gov/",
        "http://www.niehs.nih.gov/health/assets.html",
        "http://tools.niehs.nih.gov/index.cfm",
        "http://www.nlm.nih.gov/",
        "http://www.ncbi.nlm.nih.gov/pubmed",
        "http://ors.od.nih.gov/",
        "http://www.niams.nih.gov/",
        "http://www.nidcr.nih.gov/",
    ]
    (out_dir / "nih-eot.txt").write_text("\n".join(nih) + "\n", encoding="utf-8")


# -- multi-archive holdings fixture ------------------------------------------------


def build_archives_mini(out_dir: Path) -> None:
    """2008 holdings spread over eight archives at scaled reference
    marginals (1/100): 89/11/3/1/0/0/0/0."""
    builder = ManifestBuilder()
    urls = [f"http://www.epa.gov/holdings/h{i:02d}.html" for i in range(60)]
    for i in range(89):
        builder.capture(urls[i % 60], f"200801{(i % 27) + 1:02d}120000", "200")
    for i in range(10):
        builder.capture(
            urls[i], f"200806{i + 1:02d}090000", "200", archive="wayback.archive-it.org"
        )
    for i in range(3):
        builder.capture(urls[i + 20], f"200809{i + 1:02d}060000", "200", archive="webarchive.loc.gov")
    builder.capture(urls[40], "20081115030000", "200", archive="arquivo.pt")
    # the page whose only 2008 capture lives at Archive-It; its own 11th
    # Archive-It row completes the 89/11/3/1 marginals over the URL set
    only_ai = "http://www.epa.gov/holdings/only-archive-it.html"
    builder.capture(only_ai, "20080704180000", "200", archive="wayback.archive-it.org")
    builder.capture(only_ai, "20120101000000", "200")
    builder.write(out_dir)
    urls.append(only_ai)
    (out_dir / "urls.txt").write_text("\n".join(urls) + "\n", encoding="utf-8")


# -- redirect probes ------------------------------------------------------------------


def build_redirect_probes(path: Path) -> None:
    probes = []
    for i in range(4):
        probes.append(
            {
                "old_url": f"http://epa.gov/canon{i}",
                "status": 301,
                "redirect_chain": [f"http://www.epa.gov/canon{i}"],
                "final_url": f"http://www.epa.gov/canon{i}",
            }
        )
    for i in range(8):
        probes.append(
            {
                "old_url": f"http://www.epa.gov/old/section/a{i}.html",
                "status": 301,
                "redirect_chain": [f"http://www.epa.gov/new/section-a{i}"],
                "final_url": f"http://www.epa.gov/new/section-a{i}",
            }
        )
    for i in range(7):
        probes.append(
            {
                "old_url": f"http://www.noaa.gov/archive/report{i}.asp",
                "status": 404,
                "redirect_chain": [],
                "final_url": f"http://www.noaa.gov/reports/modern-report{i}",
            }
        )
    for i in range(2):
        probes.append(
            {
                "old_url": f"http://www.fws.gov/endangered/species{i}.html",
                "status": 301,
                "redirect_chain": [f"http://ecos.fws.gov/species{i}"],
                "final_url": f"http://ecos.fws.gov/species{i}",
            }
        )
    probes.append(
        {
            "old_url": "http://www.globalchange.gov/assessments/great-lakes/report.html",
            "status": 302,
            "redirect_chain": ["http://www.globalchange.gov/"],
            "final_url": "http://www.globalchange.gov/",
        }
    )
    context = [
        {
            "status": 302,
            "redirect_chain": ["http://www.globalchange.gov/"],
            "final_url": "http://www.globalchange.gov/",
        }
        for _ in range(3)
    ]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps({"probes": probes, "context": context}, indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def build_all(root) -> None:
    root = Path(root)
    build_paper_mini(root / "paper-mini")
    build_crawl_graph(root / "crawl-graph")
    build_quota_usgs(root / "quota-usgs")
    build_quota_cdc(root / "quota-cdc")
    build_external_lists(root / "external-lists")
    build_archives_mini(root / "archives-mini")
    build_redirect_probes(root / "redirect-probes.json")


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    out = argv[0] if argv else "fixtures"
    build_all(out)
    print(f"fixtures written under {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
