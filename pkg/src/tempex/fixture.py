"""Deterministic on-disk archive backend.

A fixture root holds ``manifest.json`` plus a ``pages/`` tree of body files.
The store serves the same four interfaces a live archive stack would: CDX
index pages, Memento TimeMaps, replay bodies, and capture provenance — all
derived from one index, so the interfaces can never disagree with each
other.

Manifest schema::

    {"cdx_page_size": 10,
     "pages": [{"url": ..., "captures": [
         {"ts": "YYYYMMDDhhmmss", "status": "200", "body": "pages/....html",
          "collections": [...], "partner": ..., "archive": ..., "length": N}]}]}

``collections``, ``partner``, ``archive`` (default web.archive.org),
``mimetype`` and ``length`` are optional per capture.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .cdx import CdxQuery, CdxRecord, MatchType, expand_bound
from .epochs import parse_ts14
from .errors import BodyMissing, ChecksumMismatch, ManifestMissing, ParseError
from .timemap import CaptureRef
from .urlkeys import canonicalize

DEFAULT_ARCHIVE = "web.archive.org"
RFC1123 = "%a, %d %b %Y %H:%M:%S GMT"


def replay_url(archive_id: str, ts: str, original: str) -> str:
    return f"https://{archive_id}/web/{ts}/{original}"


def body_digest(data: bytes) -> str:
    return base64.b32encode(hashlib.sha1(data).digest()).decode("ascii")[:32]


@dataclass(frozen=True)
class FixtureCapture:
    surt: str
    url: str
    ts: str
    status: str
    body_path: str
    archive: str
    mimetype: str
    length: int
    digest: str
    collections: tuple[str, ...]
    partner: str | None

    @property
    def datetime(self) -> datetime:
        return parse_ts14(self.ts)

    def cdx_record(self) -> CdxRecord:
        return CdxRecord(
            urlkey=self.surt,
            timestamp=self.ts,
            original=self.url,
            mimetype=self.mimetype,
            status=self.status,
            digest=self.digest,
            length=self.length,
        )

    def capture_ref(self) -> CaptureRef:
        return CaptureRef(
            original=canonicalize(self.url),
            archive_id=self.archive,
            datetime=self.datetime,
            uri_m=replay_url(self.archive, self.ts, self.url),
            status=self.status,
        )


@dataclass
class FixtureStore:
    root: Path
    index: dict[str, list[FixtureCapture]] = field(default_factory=dict)
    cdx_page_size: int = 10

    # -- loading ----------------------------------------------------------

    @classmethod
    def load(cls, root) -> "FixtureStore":
        root = Path(root)
        manifest_path = root / "manifest.json"
        if not manifest_path.is_file():
            raise ManifestMissing(str(manifest_path))
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"manifest.json: {e}") from e

        store = cls(root=root, cdx_page_size=int(manifest.get("cdx_page_size", 10)))
        for page in manifest.get("pages", []):
            url = page["url"]
            surt = canonicalize(url).key
            for cap in page.get("captures", []):
                ts = str(cap["ts"])
                parse_ts14(ts)  # validates; raises ValueError on garbage
                body_rel = cap.get("body")
                data = b""
                if body_rel:
                    body_file = root / body_rel
                    if not body_file.is_file():
                        raise BodyMissing(surt, ts)
                    data = body_file.read_bytes()
                    if "length" in cap and int(cap["length"]) != len(data):
                        raise ChecksumMismatch(
                            f"{body_rel}: recorded {cap['length']} bytes, found {len(data)}"
                        )
                entry = FixtureCapture(
                    surt=surt,
                    url=url,
                    ts=ts,
                    status=str(cap.get("status", "200")),
                    body_path=body_rel or "",
                    archive=cap.get("archive", DEFAULT_ARCHIVE),
                    mimetype=cap.get("mimetype", "text/html"),
                    length=int(cap.get("length", len(data))),
                    digest=body_digest(data),
                    collections=tuple(cap.get("collections", ())),
                    partner=cap.get("partner"),
                )
                store.index.setdefault(surt, []).append(entry)
        for captures in store.index.values():
            captures.sort(key=lambda c: (c.ts, c.archive))
        return store

    # -- shared selection -------------------------------------------------

    def _match(self, query: CdxQuery) -> list[FixtureCapture]:
        target = query.surt_target()
        if query.match_type is MatchType.EXACT:
            selected = list(self.index.get(target, ()))
        elif query.match_type is MatchType.PREFIX:
            selected = [
                c for key, caps in self.index.items() if key.startswith(target) for c in caps
            ]
        else:  # DOMAIN: host subtree, path ignored
            host_part = target.split(")", 1)[0]
            selected = [
                c
                for key, caps in self.index.items()
                if key.split(")", 1)[0] == host_part
                or key.split(")", 1)[0].startswith(host_part + ",")
                for c in caps
            ]
        if query.from_ts:
            lo = expand_bound(query.from_ts, is_from=True)
            selected = [c for c in selected if c.ts >= lo]
        if query.to_ts:
            hi = expand_bound(query.to_ts, is_from=False)
            selected = [c for c in selected if c.ts <= hi]
        selected.sort(key=lambda c: (c.surt, c.ts, c.archive))
        return selected

    # -- CDX interface ----------------------------------------------------

    def cdx_page_count(self, query: CdxQuery) -> int:
        rows = len(self._match(query))
        return (rows + self.cdx_page_size - 1) // self.cdx_page_size

    def cdx_page(self, query: CdxQuery, page: int) -> str:
        rows = self._match(query)
        start = page * self.cdx_page_size
        chunk = rows[start : start + self.cdx_page_size]
        return "\n".join(c.cdx_record().line() for c in chunk)

    # -- TimeMap interface -------------------------------------------------

    def timemap(self, archive_id: str, url: str) -> str:
        surt = canonicalize(url).key
        captures = [c for c in self.index.get(surt, ()) if c.archive == archive_id]
        lines = [f"<{url}>; rel=\"original\""]
        lines.append(
            f"<https://{archive_id}/web/timemap/link/{url}>; "
            f"rel=\"self\"; type=\"application/link-format\""
        )
        for i, cap in enumerate(captures):
            rel = "memento"
            if len(captures) > 1:
                if i == 0:
                    rel = "first memento"
                elif i == len(captures) - 1:
                    rel = "last memento"
            stamp = cap.datetime.strftime(RFC1123)
            lines.append(
                f"<{replay_url(archive_id, cap.ts, url)}>; rel=\"{rel}\"; datetime=\"{stamp}\""
            )
        return ",\n".join(lines) + "\n"

    # -- replay interface ---------------------------------------------------

    def nearest_capture(self, url: str, target: datetime) -> FixtureCapture | None:
        """The capture closest to ``target`` (earlier wins ties), any status."""
        captures = self.index.get(canonicalize(url).key)
        if not captures:
            return None
        return min(captures, key=lambda c: (abs(c.datetime - target), c.datetime))

    def body(self, capture: FixtureCapture) -> str:
        if not capture.body_path:
            return ""
        return (self.root / capture.body_path).read_text(encoding="utf-8")

    # -- provenance interface ------------------------------------------------

    def provenance(self, url: str, ts: str) -> dict:
        for cap in self.index.get(canonicalize(url).key, ()):
            if cap.ts == ts:
                return {"collections": list(cap.collections), "partner": cap.partner}
        return {"collections": [], "partner": None}

    # -- misc ----------------------------------------------------------------

    def has_url(self, url: str) -> bool:
        return canonicalize(url).key in self.index

    def key_count(self) -> int:
        return len(self.index)

    def serve(self, request: dict):
        """Generic dispatch used by transports; unknown lookups yield empty
        protocol-correct responses rather than errors."""
        kind = request.get("kind")
        if kind in ("cdx", "cdx_page_count"):
            q = request["query"]
            query = CdxQuery(
                match_type=MatchType(q.get("match_type", "exact")),
                target=q["target"],
                from_ts=q.get("from"),
                to_ts=q.get("to"),
            )
            if kind == "cdx_page_count":
                return self.cdx_page_count(query)
            return self.cdx_page(query, int(request.get("page", 0)))
        if kind == "timemap":
            return self.timemap(request.get("archive", DEFAULT_ARCHIVE), request["url"])
        if kind == "body":
            cap = self.nearest_capture(request["url"], parse_ts14(request["at"]))
            if cap is None:
                return None
            return {
                "ts": cap.ts,
                "status": cap.status,
                "archive": cap.archive,
                "body": self.body(cap),
            }
        if kind == "provenance":
            return self.provenance(request["url"], request["ts"])
        raise ValueError(f"unknown request kind {kind!r}")


def load(root) -> FixtureStore:
    return FixtureStore.load(root)
