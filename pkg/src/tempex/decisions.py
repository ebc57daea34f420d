"""Append-only curation decision log.

One JSON object per line; the live decision for a key is simply the last
line mentioning it, so replaying the file reconstructs current state
exactly and nothing is ever rewritten in place.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path


def surt_to_url(surt: str) -> str:
    """Representative http URL for a SURT key."""
    host_part, _, path = surt.partition(")")
    host = ".".join(reversed(host_part.split(",")))
    return f"http://{host}{path or '/'}"


def append_decision(
    path, surt: str, action: str, actor: str = "console", note: str | None = None,
    url: str | None = None,
) -> dict:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    history = read_history(path)
    decision = {
        "id": len(history) + 1,
        "surt": surt,
        "url": url or surt_to_url(surt),
        "action": action,
        "actor": actor,
        "at": datetime.now(timezone.utc).strftime("%Y%m%d%H%M%S"),
        "note": note,
    }
    with open(path, "a", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(decision, sort_keys=True, separators=(",", ":")) + "\n")
    return decision


def read_history(path) -> list[dict]:
    path = Path(path)
    if not path.is_file():
        return []
    rows = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                rows.append(json.loads(line))
    return rows


def live_decisions(path) -> dict[str, dict]:
    """Current decision per key: later lines supersede earlier ones."""
    live: dict[str, dict] = {}
    for row in read_history(path):
        live[row["surt"]] = row
    return live
