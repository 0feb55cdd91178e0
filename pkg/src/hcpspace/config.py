"""Pipeline configuration, loadable from a JSON document with the same field names."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .evolve import EvolutionConfig
from .solvers import DEFAULT_EXACT_LIMIT, MslsParams, TimingConfig

# stream tags keep per-purpose seeds apart
_HARDNESS, _NOVELTY, _TARGET, _GENERATORS, _SOLVE = 1, 2, 3, 4, 5


@dataclass
class PipelineConfig:
    n: int = 16
    exact_limit: int = DEFAULT_EXACT_LIMIT
    seed: int = 0
    evolution: dict = field(default_factory=dict)  # EvolutionConfig overrides
    msls: dict = field(default_factory=dict)  # MslsParams overrides
    timing_repeats: int = 1
    hardness_runs: int = 15
    novelty_runs: int = 15
    target_runs: int = 15
    targets: list = field(default_factory=lambda: [[1.0, 2.0], [-1.0, -1.0], [2.0, -1.0]])
    generator_er_count: int = 10
    knn_k: int = 100
    split_seed: int = 0
    clamp: list | None = None  # runtime-difference colour range; None -> symmetric, data-driven
    hist_bin_width: float = 0.005
    workers: int = 1
    out_dir: str = "out"

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError("n must be >= 3")
        bad = set(self.evolution) - {f.name for f in dataclasses.fields(EvolutionConfig)}
        if bad:
            raise ValueError(f"unknown evolution option(s): {', '.join(sorted(bad))}")
        bad = set(self.msls) - {f.name for f in dataclasses.fields(MslsParams)}
        if bad:
            raise ValueError(f"unknown msls option(s): {', '.join(sorted(bad))}")
        for t in self.targets:
            if len(t) != 2:
                raise ValueError("targets must be [x, y] pairs")
        MslsParams(**self.msls)
        if self.clamp is not None and (len(self.clamp) != 2 or not self.clamp[0] < self.clamp[1]):
            raise ValueError("clamp must be [lo, hi] with lo < hi")

    # derived settings
    def clamp_range(self) -> tuple[float, float] | None:
        return None if self.clamp is None else (float(self.clamp[0]), float(self.clamp[1]))

    def timing(self) -> TimingConfig:
        return TimingConfig(msls=MslsParams(**self.msls), exact_limit=self.exact_limit, repeats=self.timing_repeats)

    def derived_seed(self, stream: int, index: int) -> int:
        return (self.seed * 1_000_003 + stream * 10_007 + index) % (1 << 63)

    def evolution_config(self, stream: int, index: int, **overrides) -> EvolutionConfig:
        kw = {"n": self.n, "workers": self.workers, "seed": self.derived_seed(stream, index)}
        kw.update(self.evolution)
        kw.update(overrides)
        return EvolutionConfig(**kw)

    def hardness_config(self, run: int) -> EvolutionConfig:
        runs = max(1, self.hardness_runs)
        direction = "maximize" if run % 2 == 0 else "minimize"
        p = round(0.05 + 0.9 * (run + 0.5) / runs, 6)
        over = {"direction": direction}
        if "p" not in self.evolution:
            over["p"] = p
        return self.evolution_config(_HARDNESS, run, **over)

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        bad = set(doc) - names
        if bad:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(bad))}")
        return cls(**doc)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)
