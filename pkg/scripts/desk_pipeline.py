"""Run the full desk pipeline: hardness evolution, generator suite, PCA,
novelty and target filling, kNN report and the figure set.

    python scripts/desk_pipeline.py --out out/desk --hardness-runs 3 --novelty-runs 2 --target-runs 2
    python scripts/desk_pipeline.py --config my_config.json
"""
from __future__ import annotations

import argparse
import logging
import time

from hcpspace.config import PipelineConfig
from hcpspace.pipeline import run_desk_pipeline


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--config", help="JSON file with PipelineConfig fields")
    ap.add_argument("--out", default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--n", type=int, default=None)
    ap.add_argument("--hardness-runs", type=int, default=None)
    ap.add_argument("--novelty-runs", type=int, default=None)
    ap.add_argument("--target-runs", type=int, default=None)
    ap.add_argument("--generations", type=int, default=None, help="generations per evolution run")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    for name in ("seed", "n", "hardness_runs", "novelty_runs", "target_runs", "workers"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    if args.out:
        cfg.out_dir = args.out
    if args.generations is not None:
        cfg.evolution = {**cfg.evolution, "generations": args.generations}

    start = time.perf_counter()
    result = run_desk_pipeline(cfg)
    rep = result["report"]
    model = result["model"]
    print(f"records:            {len(result['records'])}")
    print(f"variance explained: {model.variance_explained[0]:.3f} + {model.variance_explained[1]:.3f}")
    print(f"kNN accuracy:       {rep.accuracy:.3f} (k={rep.k}, test size {rep.test_size})")
    print(f"figures:            {len(result['figures'])} written to {cfg.out_dir}")
    print(f"elapsed:            {time.perf_counter() - start:.0f}s")


if __name__ == "__main__":
    main()
