"""Command-line interface. Commands compose through line-delimited archive files or pipes.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, pipeline, plots, projection
from .archive import append_records, read_archive, write_archive
from .config import _GENERATORS, PipelineConfig
from .errors import CapacityError, FormatError, InsufficientDataError
from .evolve import RuntimeDiffMode, run_evolution, stats_csv
from .features import FEATURE_NAMES, feature_csv
from .graph import GENERATOR_KINDS, GeneratorSpec, standard_generator_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser, archive: bool = True, output: bool = False) -> None:
    p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    p.add_argument("--n", type=int, default=None, help="node count (overrides config)")
    p.add_argument("--config", type=Path, default=None, help="JSON file with PipelineConfig fields")
    p.add_argument("--out", type=Path, default=None, help="output directory for figures/reports")
    if archive:
        p.add_argument("--archive", default="-", help="input archive (default: stdin)")
    if output:
        p.add_argument("--output", "-o", default="-", help="output archive (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hcpspace", description="Instance space analysis for Hamiltonian completion.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate standard graphs")
    _common(p, archive=False)
    p.add_argument("--kind", choices=GENERATOR_KINDS + ("suite",), default="suite")
    p.add_argument("--p", type=float, default=None, help="edge probability (erdos_renyi)")
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--cols", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="edges per new node (preferential_attachment)")
    p.add_argument("--branching", type=int, default=None)
    p.add_argument("--count", type=int, default=1, help="graphs to draw (random kinds)")
    p.add_argument("--archive", default="-", help="archive to append to (default: stdout)")

    p = sub.add_parser("solve", help="solve records exactly and/or heuristically")
    _common(p, output=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_const", dest="which", const="exact")
    g.add_argument("--heuristic", action="store_const", dest="which", const="heuristic")
    g.add_argument("--both", action="store_const", dest="which", const="both")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(which="both")

    p = sub.add_parser("evolve", help="runtime-difference evolution runs")
    _common(p, archive=False)
    p.add_argument("--archive", required=True, help="archive to append hall-of-fame records to")
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--generations", type=int, default=None)

    p = sub.add_parser("fill", help="novelty and target-point evolution over a projected archive")
    _common(p, archive=False)
    p.add_argument("--archive", required=True, help="projected archive; new records are appended")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--novelty-runs", type=int, default=None)
    p.add_argument("--target-runs", type=int, default=None)
    p.add_argument("--target", type=float, nargs=2, action="append", metavar=("X", "Y"))
    p.add_argument("--generations", type=int, default=None)
    p.add_argument("--no-solve", action="store_true")

    p = sub.add_parser("features", help="compute the ten instance features")
    _common(p, output=True)
    p.add_argument("--csv", type=Path, default=None, help="also write a feature CSV")

    p = sub.add_parser("fit-pca", help="fit the 2-D projection model")
    _common(p)
    p.add_argument("--model", type=Path, required=True, help="model file to write")

    p = sub.add_parser("project", help="add landscape coordinates")
    _common(p, output=True)
    p.add_argument("--model", type=Path, required=True)

    p = sub.add_parser("classify", help="kNN dominance classifier on a 50/50 split")
    _common(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--split-seed", type=int, default=None)

    p = sub.add_parser("plot", help="emit SVG figures")
    _common(p)
    p.add_argument("--model", type=Path, default=None)
    p.add_argument("--color", default="runtime_diff", help="runtime_diff or a feature name")
    p.add_argument("--clamp", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    p.add_argument("--all", action="store_true", help="write the full figure set")

    p = sub.add_parser("stats", help="archive summary and runtime histogram CSV")
    _common(p)
    p.add_argument("--bin-width", type=float, default=None)
    p.add_argument("--clamp", type=float, nargs=2, default=None, metavar=("LO", "HI"))
    return ap


def _config(args) -> PipelineConfig:
    doc = PipelineConfig.load(args.config).to_dict() if args.config else {}
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.n is not None:
        doc["n"] = args.n
    if args.out is not None:
        doc["out_dir"] = str(args.out)
    return PipelineConfig.from_dict(doc)


def _out_dir(cfg: PipelineConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args, cfg):
    if args.kind == "suite":
        specs = standard_generator_suite(cfg.n, cfg.derived_seed(_GENERATORS, 0), cfg.generator_er_count)
    else:
        specs = [
            GeneratorSpec(args.kind, cfg.n, seed=cfg.derived_seed(_GENERATORS, i), p=args.p, rows=args.rows,
                          cols=args.cols, m=args.m, branching=args.branching)
            for i in range(args.count if args.kind in ("erdos_renyi", "preferential_attachment") else 1)
        ]
    recs = pipeline.generator_records(specs)
    if args.archive == "-":
        write_archive(None, recs)
    else:
        append_records(args.archive, recs)
    return 0


def cmd_solve(args, cfg):
    recs = read_archive(args.archive)
    write_archive(args.output, pipeline.solve_records(recs, cfg.timing(), args.which, args.overwrite))
    return 0


def cmd_evolve(args, cfg):
    runs = cfg.hardness_runs if args.runs is None else args.runs
    out = _out_dir(cfg)
    for r in range(runs):
        ecfg = cfg.hardness_config(r)
        if args.generations is not None:
            ecfg = type(ecfg)(**{**ecfg.__dict__, "generations": args.generations})
        run = run_evolution(ecfg, RuntimeDiffMode(cfg.timing()))
        run_id = f"hardness-{r}"
        append_records(args.archive, pipeline.records_from_run(run, run_id, "runtime_diff"))
        (out / f"stats_{run_id}.csv").write_text(stats_csv(run.stats))
        print(f"{run_id}: {run.direction} best={run.hof.best.fitness:.6f} hof={len(run.hof)}", file=sys.stderr)
    return 0


def cmd_fill(args, cfg):
    recs = read_archive(args.archive)
    model = projection.load(args.model.read_bytes())
    if args.target:
        cfg.targets = [list(t) for t in args.target]
    if args.generations is not None:
        cfg.evolution = {**cfg.evolution, "generations": args.generations}
    new, stats = pipeline.fill(recs, model, cfg, args.novelty_runs, args.target_runs, solve=not args.no_solve)
    append_records(args.archive, new)
    out = _out_dir(cfg)
    for run_id, st in stats.items():
        (out / f"stats_{run_id}.csv").write_text(stats_csv(st))
    print(f"fill: appended {len(new)} records", file=sys.stderr)
    return 0


def cmd_features(args, cfg):
    recs = pipeline.compute_features(read_archive(args.archive))
    write_archive(args.output, recs)
    if args.csv:
        args.csv.write_text(feature_csv([(r.id, r.feature_vector()) for r in recs]))
    return 0


def cmd_fit_pca(args, cfg):
    recs = read_archive(args.archive)
    model = pipeline.fit_model(recs)
    args.model.write_bytes(projection.save(model))
    ve = model.variance_explained
    print(f"variance explained: {ve[0]:.4f} + {ve[1]:.4f} = {ve.sum():.4f}", file=sys.stderr)
    return 0


def cmd_project(args, cfg):
    model = projection.load(args.model.read_bytes())
    write_archive(args.output, pipeline.project_records(read_archive(args.archive), model))
    return 0


def cmd_classify(args, cfg):
    recs = read_archive(args.archive)
    k = cfg.knn_k if args.k is None else args.k
    seed = cfg.split_seed if args.split_seed is None else args.split_seed
    report = pipeline.classify(recs, k, seed)
    out = _out_dir(cfg)
    (out / "classifier.csv").write_text(report.to_csv())
    (out / "misclassified.txt").write_text("".join(f"{i}\n" for i in report.misclassified))
    sys.stdout.write(report.to_csv())
    return 0


def cmd_plot(args, cfg):
    recs = read_archive(args.archive)
    out = _out_dir(cfg)
    model = projection.load(args.model.read_bytes()) if args.model else None
    clamp = tuple(args.clamp) if args.clamp else cfg.clamp_range()
    if args.all:
        pipeline.write_figures(recs, out, model, clamp, cfg.hist_bin_width, cfg.knn_k, cfg.split_seed)
        return 0
    proj = [r for r in recs if r.px is not None]
    if not proj:
        raise UsageError("plot needs projected records (run project first)")
    if args.color == "runtime_diff":
        proj = [r for r in proj if r.runtime_diff is not None]
        vals = [r.runtime_diff for r in proj]
        if clamp is None and vals:
            clamp = analysis.symmetric_clamp(vals)
    elif args.color in FEATURE_NAMES:
        j = FEATURE_NAMES.index(args.color)
        proj = [r for r in proj if r.features is not None]
        vals = [r.features[j] for r in proj]
        clamp = tuple(args.clamp) if args.clamp else None
    else:
        raise UsageError(f"unknown colour field {args.color!r}")
    if not proj:
        raise UsageError(f"no records carry {args.color}")
    svg = plots.svg_scatter(np.array([[r.px, r.py] for r in proj]), vals, clamp=clamp, legend=args.color,
                            title=f"landscape coloured by {args.color}")
    (out / f"landscape_{args.color}.svg").write_bytes(svg)
    return 0


def cmd_stats(args, cfg):
    recs = read_archive(args.archive)
    diffs = [r.runtime_diff for r in recs if r.runtime_diff is not None]
    kinds: dict[str, int] = {}
    for r in recs:
        kinds[r.provenance.get("kind", "?")] = kinds.get(r.provenance.get("kind", "?"), 0) + 1
    print(f"records: {len(recs)}  " + "  ".join(f"{k}={v}" for k, v in sorted(kinds.items())))
    if diffs:
        print(f"runtime difference range: [{min(diffs):.6f}, {max(diffs):.6f}] s over {len(diffs)} records")
        width = cfg.hist_bin_width if args.bin_width is None else args.bin_width
        hist = analysis.runtime_histogram(diffs, width, tuple(args.clamp) if args.clamp else None)
        (_out_dir(cfg) / "histogram.csv").write_text(analysis.histogram_csv(hist))
    return 0


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "evolve": cmd_evolve,
    "fill": cmd_fill,
    "features": cmd_features,
    "fit-pca": cmd_fit_pca,
    "project": cmd_project,
    "classify": cmd_classify,
    "plot": cmd_plot,
    "stats": cmd_stats,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"hcpspace {args.command}: {exc}", file=sys.stderr)
        return 1
    except (FormatError, CapacityError, InsufficientDataError, ValueError, OSError) as exc:
        print(f"hcpspace {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
