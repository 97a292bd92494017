"""Search budgets and run configuration."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace

SEED_ENV = "PLURIGREEN_SEED"
DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class SearchBudget:
    """Effort knobs shared by the disk engine and the lower-bound searches.

    ``restarts`` counts multi-start simplex runs; the first restart always
    starts from the deterministic seed disk. ``target_width`` stops the
    restart loop once the interval is that tight, which keeps larger
    budgets from ever returning a worse bound.
    """

    restarts: int = 32
    degree: int = 6
    hits: int = 2
    boundary_samples: int = 128
    max_boundary_samples: int = 4096
    grid_radii: int = 64
    grid_angles: int = 128
    simplex_evals: int = 600
    annuli: int = 7
    angles: int = 8
    directions: int = 64
    azukawa_radii: int = 7
    target_width: float = 0.01
    use_closed_form: bool = True
    disk_search: bool = True

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool):
                continue
            if isinstance(v, (int, float)) and not v > 0:
                raise ValueError(f"budget field {f.name} must be positive (got {v!r})")
        if self.hits > 2:
            raise ValueError("at most two hits are supported")
        if self.degree < self.hits + 1:
            raise ValueError("degree must exceed the hit count")

    def scaled(self, factor: float) -> "SearchBudget":
        return replace(self, restarts=max(1, int(round(self.restarts * factor))))


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    budget: SearchBudget = field(default_factory=SearchBudget)
    eps: float = 0.1
    tolerance: float = 1e-9
    format: str = "json"
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.format not in ("json", "csv"):
            raise ValueError("format must be json or csv")
        if self.workers < 1:
            raise ValueError("workers must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        budget = SearchBudget(**d.pop("budget", {}))
        return cls(budget=budget, **d)


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    return int(raw)


def load_config(path: str, base: RunConfig) -> RunConfig:
    """Values from a JSON config file override ``base``."""
    with open(path) as fh:
        data = json.load(fh)
    budget = replace(base.budget, **data.pop("budget", {}))
    return replace(base, budget=budget, **data)
