"""Run configuration files (YAML or JSON)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .cells import UnitCell, enumerate_cells
from .lattice import Lattice, lattice_from_config
from .resummation import DEFAULT_TOL
from .samplers import SamplerConfig

DEFAULT_MAX_SITES = {"triangular": 36}
FALLBACK_MAX_SITES = 64


@dataclass
class RunConfig:
    lattice: dict = field(default_factory=lambda: {"name": "triangular"})
    alpha: float = 3.0
    J: float = 1.0
    h: float = 0.0
    h_grid: tuple[float, float, float] | None = None
    range: int = 6
    max_sites: int | None = None
    triangular_index_set: bool | None = None
    include_long_range: bool = True
    tol: float = DEFAULT_TOL
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    output_dir: str = "runs/out"

    def build_lattice(self) -> Lattice:
        return lattice_from_config(self.lattice)

    def resolved_max_sites(self) -> int:
        if self.max_sites is not None:
            return int(self.max_sites)
        return DEFAULT_MAX_SITES.get(self.lattice.get("name", ""), FALLBACK_MAX_SITES)

    def build_cells(self, lattice: Lattice | None = None) -> list[UnitCell]:
        lattice = lattice or self.build_lattice()
        return enumerate_cells(lattice, self.range, self.resolved_max_sites(), self.triangular_index_set)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_sites"] = self.resolved_max_sites()
        return out


_KEY_ALIASES = {
    "hGrid": "h_grid", "maxSites": "max_sites", "includeLongRange": "include_long_range",
    "outputDir": "output_dir", "triangularIndexSet": "triangular_index_set",
    "numReads": "num_reads", "betaSchedule": "beta_schedule", "exchangeDir": "exchange_dir",
    "annealingTime": "annealing_time",
}


def _normalise(block: dict) -> dict:
    return {_KEY_ALIASES.get(k, k): v for k, v in block.items()}


def config_from_dict(data: dict[str, Any]) -> RunConfig:
    data = _normalise(dict(data))
    known = {f.name for f in fields(RunConfig)}
    unknown = set(data) - known - {"seed"}
    if unknown:
        raise ValueError(f"unknown configuration keys: {sorted(unknown)}")
    sampler_block = _normalise(dict(data.pop("sampler", {}) or {}))
    if "seed" in data:
        sampler_block.setdefault("seed", data.pop("seed"))
    if sampler_block.get("beta_schedule") is not None:
        sampler_block["beta_schedule"] = tuple(sampler_block["beta_schedule"])
    if data.get("h_grid") is not None:
        data["h_grid"] = tuple(float(v) for v in data["h_grid"])
    return RunConfig(sampler=SamplerConfig(**sampler_block), **data)


def load_config(path: str | Path) -> RunConfig:
    return config_from_dict(yaml.safe_load(Path(path).read_text()) or {})
