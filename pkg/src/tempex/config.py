"""Run configuration: backend selection, scope, epochs, quotas, policies.

Validation happens before any file or network activity; every failure is a
ConfigError naming the offending field so the CLI can exit 2 with a usable
message.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .clock import CDX_PAGE_POLICY, PROVENANCE_POLICY, RateLimitPolicy, RateLimiter, RealClock, VirtualClock
from .cdx import CdxGateway
from .epochs import EpochSpec, default_epochs, load_epochs
from .errors import ConfigError
from .fixture import FixtureStore
from .live import LiveBackend
from .urlkeys import ScopeRule


def load_agency_config(path=None) -> tuple[list[str], dict[str, str]]:
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"agencies file {path}: {e}", field="agencies") from e
    else:
        raw = json.loads(
            resources.files("tempex.data").joinpath("agencies.json").read_text("utf-8")
        )
    return list(raw["agencies"]), dict(raw.get("aliases", {}))


@dataclass
class RunConfig:
    backend_spec: str = "fixture:."
    scope_suffixes: tuple[str, ...] = (".gov",)
    agencies: list[str] = field(default_factory=list)
    aliases: dict = field(default_factory=dict)
    epochs: list[EpochSpec] = field(default_factory=default_epochs)
    quota: int = 15
    workers: int = 1
    seed: int = 0
    real_clock: bool = False
    cdx_policy: RateLimitPolicy = CDX_PAGE_POLICY
    provenance_policy: RateLimitPolicy = PROVENANCE_POLICY
    high_threshold: int = 1

    def __post_init__(self):
        if not self.agencies:
            self.agencies, loaded_aliases = load_agency_config()
            if not self.aliases:
                self.aliases = loaded_aliases
        self.validate()

    def validate(self) -> None:
        kind, _, rest = self.backend_spec.partition(":")
        if kind == "fixture":
            if not rest:
                raise ConfigError("fixture backend needs a directory", field="backend")
            if not (Path(rest) / "manifest.json").is_file():
                raise ConfigError(
                    f"fixture directory {rest!r} has no manifest.json", field="backend"
                )
        elif kind != "live":
            raise ConfigError(f"unknown backend {self.backend_spec!r}", field="backend")
        if self.quota < 0:
            raise ConfigError("quota must be >= 0", field="quota")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1", field="workers")
        if len(self.epochs) < 2:
            raise ConfigError("need at least two epochs", field="epochs")
        if not self.scope_suffixes:
            raise ConfigError("scope requires at least one suffix", field="scope")

    @property
    def is_fixture(self) -> bool:
        return self.backend_spec.startswith("fixture:")

    def scope(self, restrict_to_agencies: bool = False) -> ScopeRule:
        return ScopeRule.from_config(
            self.scope_suffixes, self.agencies if restrict_to_agencies else None
        )

    def make_clock(self):
        # Fixture runs ride a virtual clock so politeness costs nothing but
        # the gap contract still holds in virtual time.
        if self.is_fixture and not self.real_clock:
            return VirtualClock()
        return RealClock()

    def make_backend(self):
        kind, _, rest = self.backend_spec.partition(":")
        if kind == "fixture":
            return FixtureStore.load(rest)
        if rest:
            return LiveBackend(cdx_base=rest)
        return LiveBackend()

    def make_gateway(self, backend=None, clock=None) -> CdxGateway:
        backend = backend if backend is not None else self.make_backend()
        clock = clock if clock is not None else self.make_clock()
        limiter = RateLimiter(self.cdx_policy, clock, random.Random(self.seed))
        return CdxGateway(backend, limiter)

    def make_provenance_limiter(self, clock=None) -> RateLimiter:
        clock = clock if clock is not None else self.make_clock()
        return RateLimiter(self.provenance_policy, clock, random.Random(self.seed + 1))


def config_from_args(args) -> RunConfig:
    """Build a RunConfig from parsed CLI arguments (shared across commands)."""
    epochs = load_epochs(args.epochs) if getattr(args, "epochs", None) else default_epochs()
    agencies, aliases = ([], {})
    if getattr(args, "agencies", None):
        agencies, aliases = load_agency_config(args.agencies)
    kwargs = dict(
        backend_spec=args.backend,
        epochs=epochs,
        agencies=agencies,
        aliases=aliases,
        workers=getattr(args, "workers", 1),
        seed=getattr(args, "seed", 0),
        real_clock=getattr(args, "real_clock", False),
    )
    if getattr(args, "scope", None):
        kwargs["scope_suffixes"] = tuple(s.strip() for s in args.scope.split(",") if s.strip())
    if getattr(args, "quota", None) is not None:
        kwargs["quota"] = args.quota
    return RunConfig(**kwargs)
