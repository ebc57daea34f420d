"""Epoch windows used for tuple membership, plus 14-digit timestamp helpers.

Archive indexes timestamp captures as YYYYMMDDhhmmss in UTC; everything in
this module converts between that form and aware datetimes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timezone

from .errors import ConfigError

TS14 = "%Y%m%d%H%M%S"


def parse_ts14(ts: str) -> datetime:
    if len(ts) != 14 or not ts.isdigit():
        raise ValueError(f"not a 14-digit timestamp: {ts!r}")
    return datetime.strptime(ts, TS14).replace(tzinfo=timezone.utc)


def format_ts14(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime(TS14)


def utc(year, month=1, day=1, hour=0, minute=0, second=0) -> datetime:
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


@dataclass(frozen=True)
class EpochSpec:
    """One snapshot window: captures inside [start, end] qualify; the capture
    nearest ``target`` is the one the tuple cites."""

    name: str
    start: datetime
    end: datetime
    target: datetime

    def __post_init__(self):
        if not (self.start <= self.target <= self.end):
            raise ConfigError(
                f"epoch {self.name!r}: target {self.target} outside window", field="target"
            )

    def contains(self, dt: datetime) -> bool:
        return self.start <= dt <= self.end


def default_epochs() -> list[EpochSpec]:
    """2008 / 2016 / 2020 windows.

    The early window admits 2007 captures as well, mirroring the sticky-time
    crawl acceptance years; the later windows are calendar years with
    mid-year targets so the cited captures straddle the administration
    boundary months.
    """
    return [
        EpochSpec("2008", utc(2007, 1, 1), utc(2008, 12, 31, 23, 59, 59), utc(2008, 1, 1)),
        EpochSpec("2016", utc(2016, 1, 1), utc(2016, 12, 31, 23, 59, 59), utc(2016, 7, 1)),
        EpochSpec("2020", utc(2020, 1, 1), utc(2020, 12, 31, 23, 59, 59), utc(2020, 7, 1)),
    ]


def load_epochs(path: str) -> list[EpochSpec]:
    """Read an epochs.json file: [{name, start, end, target}] with 14-digit stamps."""
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except OSError as e:
        raise ConfigError(f"cannot read epochs file {path}: {e}", field="epochs") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"epochs file {path} is not valid JSON: {e}", field="epochs") from e
    if not isinstance(raw, list) or not raw:
        raise ConfigError("epochs file must be a non-empty JSON array", field="epochs")
    epochs = []
    for i, entry in enumerate(raw):
        try:
            epochs.append(
                EpochSpec(
                    name=str(entry["name"]),
                    start=parse_ts14(entry["start"]),
                    end=parse_ts14(entry["end"]),
                    target=parse_ts14(entry["target"]),
                )
            )
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigError(f"epochs[{i}]: {e}", field=f"epochs[{i}]") from e
    names = [e.name for e in epochs]
    if len(set(names)) != len(names):
        raise ConfigError("duplicate epoch names", field="epochs")
    return epochs
