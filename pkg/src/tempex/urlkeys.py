"""URL identity layer: SURT keys, path-depth classes, and host scoping.

Every other part of the toolkit identifies pages by the canonical key
produced here, so the rules are deliberately few and deterministic:
lowercase, drop scheme/fragment/default port, drop a leading "www." label,
reverse the host labels with commas, sort the query parameters, and strip
session-id parameters that would otherwise multiply one page into many keys.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from urllib.parse import parse_qsl, quote, urlencode, urlsplit

from .errors import MalformedUrl, UnsupportedScheme

# Query parameters that encode a session, not a page. Stripping them lets
# crawler-trap variants of one page collapse onto a single key.
SESSION_PARAMS = frozenset({"jsessionid", "phpsessid", "sid"})

DEFAULT_PORTS = {"http": 80, "https": 443}


@dataclass(frozen=True)
class SurtKey:
    """Canonical lookup key for a URL plus one representative original URL."""

    key: str
    source_url: str

    def __str__(self) -> str:
        return self.key

    @property
    def host(self) -> str:
        """Forward-order host reconstructed from the key."""
        labels = self.key.split(")", 1)[0].split(",")
        return ".".join(reversed(labels))

    @property
    def path(self) -> str:
        return self.key.split(")", 1)[1]


class DepthClass(Enum):
    HIGH = "High"
    DEEP = "Deep"


@dataclass(frozen=True)
class PathDepthClass:
    depth: DepthClass
    segment_count: int


@dataclass(frozen=True)
class ScopeRule:
    """Host filter: label-aligned suffix match plus an optional domain allowlist."""

    allowed_suffixes: tuple[str, ...] = (".gov",)
    allowed_domains: tuple[str, ...] | None = None

    @staticmethod
    def from_config(suffixes, domains=None) -> "ScopeRule":
        return ScopeRule(
            allowed_suffixes=tuple(s if s.startswith(".") else "." + s for s in suffixes),
            allowed_domains=tuple(d.lower() for d in domains) if domains else None,
        )


def _split_url(url: str):
    if not isinstance(url, str) or not url.strip():
        raise MalformedUrl(f"empty or non-text URL: {url!r}")
    url = url.strip()
    try:
        parts = urlsplit(url)
    except ValueError as e:
        raise MalformedUrl(f"{url!r}: {e}") from e
    if not parts.scheme:
        raise MalformedUrl(f"not an absolute URL: {url!r}")
    if parts.scheme.lower() not in ("http", "https"):
        raise UnsupportedScheme(f"scheme {parts.scheme!r} in {url!r}")
    try:
        host = parts.hostname
        port = parts.port
    except ValueError as e:
        raise MalformedUrl(f"{url!r}: {e}") from e
    if not host:
        raise MalformedUrl(f"no host in {url!r}")
    return parts, host.lower().rstrip("."), port


def canonicalize(url: str) -> SurtKey:
    """Map ``url`` to its SURT key.

    "http://www.epa.gov/acidrain?b=2&a=1#top" becomes
    "gov,epa)/acidrain?a=1&b=2". Raises MalformedUrl / UnsupportedScheme.
    """
    parts, host, port = _split_url(url)

    labels = host.split(".")
    if labels and labels[0] == "www":
        labels = labels[1:]
    if not labels or any(not lab for lab in labels):
        raise MalformedUrl(f"bad host {host!r} in {url!r}")
    reversed_host = ",".join(reversed(labels))
    if port is not None and port != DEFAULT_PORTS[parts.scheme.lower()]:
        reversed_host += f":{port}"

    path = parts.path or "/"
    # Collapse duplicate slashes and lowercase; 2008-era .gov servers were
    # case-insensitive in practice and mixed-case links are rife.
    path = re.sub(r"/{2,}", "/", path.lower())
    if not path.startswith("/"):
        path = "/" + path
    path = quote(path, safe="/:@!$&'()*+,;=~.-_%")

    query = ""
    if parts.query:
        pairs = [
            (k.lower(), v)
            for k, v in parse_qsl(parts.query, keep_blank_values=True)
            if k.lower() not in SESSION_PARAMS
        ]
        pairs.sort()
        if pairs:
            query = "?" + urlencode(pairs)

    return SurtKey(key=f"{reversed_host}){path}{query}", source_url=url.strip())


def surt_prefix(url_or_dir: str) -> str:
    """SURT form of a URL treated as a directory prefix (for prefix queries)."""
    key = canonicalize(url_or_dir).key
    return key if key.endswith("/") else key + "/"


def path_segments(url: str) -> list[str]:
    parts, _, _ = _split_url(url)
    return [seg for seg in parts.path.split("/") if seg]


def classify_depth(url: str, high_threshold: int = 1) -> PathDepthClass:
    """High when the path has at most ``high_threshold`` non-empty segments."""
    segs = path_segments(url)
    depth = DepthClass.HIGH if len(segs) <= high_threshold else DepthClass.DEEP
    return PathDepthClass(depth=depth, segment_count=len(segs))


def _label_suffix_match(host: str, suffix: str) -> bool:
    suffix = suffix.lower().lstrip(".")
    host_labels = host.split(".")
    suffix_labels = suffix.split(".")
    if len(suffix_labels) > len(host_labels):
        return False
    return host_labels[-len(suffix_labels):] == suffix_labels


# Multi-label public suffixes relevant to the US federal web; registrable
# domain is otherwise the last two host labels.
_EXTRA_PUBLIC_SUFFIXES: tuple[str, ...] = ()


def registrable_domain(host: str, extra_suffixes: tuple[str, ...] = _EXTRA_PUBLIC_SUFFIXES) -> str:
    host = host.lower().rstrip(".")
    labels = host.split(".")
    for suffix in extra_suffixes:
        if _label_suffix_match(host, suffix):
            n = len(suffix.lstrip(".").split(".")) + 1
            return ".".join(labels[-n:]) if len(labels) >= n else host
    return ".".join(labels[-2:]) if len(labels) >= 2 else host


def in_scope(url: str, rule: ScopeRule) -> bool:
    """True when the host suffix-matches the rule with label alignment."""
    _, host, _ = _split_url(url)
    if not any(_label_suffix_match(host, s) for s in rule.allowed_suffixes):
        return False
    if rule.allowed_domains is not None:
        return registrable_domain(host) in rule.allowed_domains
    return True
