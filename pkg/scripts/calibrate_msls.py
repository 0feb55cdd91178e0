"""Measure how often the multi-start local search matches the exact completion
number on seeded random graphs. This is the protocol behind the pinned value in
tests/fixtures/calibration.json.
"""
from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, fields

import numpy as np

from hcpspace.graph import Graph
from hcpspace.solvers import MslsParams, exact_hcn, msls_hcn


@dataclass
class Calibration:
    trials: int = 500
    seed: int = 0
    n_min: int = 5
    n_max: int = 16
    restarts: int = 32


def run(cfg: Calibration) -> float:
    rng = np.random.default_rng(cfg.seed)
    equal = 0
    gaps: dict[int, int] = {}
    start = time.perf_counter()
    for _ in range(cfg.trials):
        n = int(rng.integers(cfg.n_min, cfg.n_max + 1))
        p = float(rng.uniform(0, 1))
        g = Graph(n, rng.random(n * (n - 1) // 2) < p)
        gap = msls_hcn(g, MslsParams(restarts=cfg.restarts, seed=0)).hcn - exact_hcn(g).hcn
        gaps[gap] = gaps.get(gap, 0) + 1
        equal += gap == 0
    rate = equal / cfg.trials
    print(f"equality rate {rate:.4f} ({equal}/{cfg.trials}); gap histogram {dict(sorted(gaps.items()))}; "
          f"{time.perf_counter() - start:.0f}s")
    return rate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    for f in fields(Calibration):
        ap.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    run(Calibration(**vars(ap.parse_args())))


if __name__ == "__main__":
    main()
