"""Composable pipeline steps over instance records; the CLI and scripts are thin wrappers."""
from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis, plots, projection
from .archive import InstanceRecord
from .config import _GENERATORS, _NOVELTY, _TARGET, PipelineConfig
from .evolve import (
    EvolutionRun,
    GenerationStats,
    NoveltyMode,
    RuntimeDiffMode,
    TargetMode,
    run_evolution,
    stats_csv,
)
from .features import FEATURE_NAMES, feature_vector
from .graph import GeneratorSpec, generate, standard_generator_suite
from .solvers import TimingConfig, timed_pair, timed_solve

log = logging.getLogger(__name__)


def generator_records(specs: Sequence[GeneratorSpec]) -> list[InstanceRecord]:
    out, seen = [], set()
    for spec in specs:
        g = generate(spec)
        rec = InstanceRecord.from_graph(g, {"kind": "generator", "generator": spec.kind, "spec": spec.label()})
        if rec.id not in seen:
            seen.add(rec.id)
            out.append(rec)
    return out


def solve_records(
    records: Sequence[InstanceRecord],
    timing: TimingConfig,
    which: str = "both",
    overwrite: bool = False,
) -> list[InstanceRecord]:
    """Fill solver fields. 'both' times both solvers and sets fitness; 'exact'/'heuristic' solve one side."""
    out = []
    for r in records:
        g = r.graph()
        if which == "both":
            if overwrite or r.t_exact is None or r.t_heuristic is None:
                res = timed_pair(g, timing)
                r = r.with_runtimes(res.exact.cpu_seconds, res.heuristic.cpu_seconds, res.exact.hcn, res.heuristic.hcn)
        elif which in ("exact", "heuristic"):
            done = r.hcn_exact if which == "exact" else r.hcn_heuristic
            if overwrite or done is None:
                res = timed_solve(which, g, timing)
                if which == "exact":
                    r = replace(r, t_exact=res.cpu_seconds, hcn_exact=res.hcn)
                else:
                    r = replace(r, t_heuristic=res.cpu_seconds, hcn_heuristic=res.hcn)
                if r.t_exact is not None and r.t_heuristic is not None:
                    r = replace(r, fitness=r.t_heuristic - r.t_exact)
        else:
            raise ValueError(f"unknown solver selection {which!r}")
        out.append(r)
    return out


def records_from_run(run: EvolutionRun, run_id: str, mode: str) -> list[InstanceRecord]:
    out = []
    for e in run.hof:
        prov = {"kind": "evolved", "run_id": run_id, "generation": e.generation, "mode": mode,
                "direction": run.direction, "objective": e.fitness}
        rec = InstanceRecord.from_graph(e.graph, prov)
        info = e.info
        if "t_exact" in info:
            rec = rec.with_runtimes(info["t_exact"], info["t_heuristic"], info["hcn_exact"], info["hcn_heuristic"])
        if "features" in info:
            rec = replace(rec, features=[float(v) for v in info["features"]])
        if "px" in info:
            rec = replace(rec, px=float(info["px"]), py=float(info["py"]))
        out.append(rec)
    return out


def evolve_hardness(cfg: PipelineConfig, runs: int | None = None) -> tuple[list[InstanceRecord], dict[str, list[GenerationStats]]]:
    runs = cfg.hardness_runs if runs is None else runs
    timing = cfg.timing()
    records: list[InstanceRecord] = []
    all_stats = {}
    for r in range(runs):
        ecfg = cfg.hardness_config(r)
        run_id = f"hardness-{r}"
        log.info("%s: %s, p=%s, seed=%d", run_id, ecfg.direction, ecfg.p, ecfg.seed)
        run = run_evolution(ecfg, RuntimeDiffMode(timing))
        records.extend(records_from_run(run, run_id, "runtime_diff"))
        all_stats[run_id] = run.stats
    return dedupe(records), all_stats


def dedupe(records: Sequence[InstanceRecord]) -> list[InstanceRecord]:
    seen, out = set(), []
    for r in records:
        if r.id not in seen:
            seen.add(r.id)
            out.append(r)
    return out


def compute_features(records: Sequence[InstanceRecord], overwrite: bool = False) -> list[InstanceRecord]:
    out = []
    for r in records:
        if overwrite or r.features is None:
            r = replace(r, features=feature_vector(r.graph()).as_array().tolist())
        out.append(r)
    return out


def fit_model(records: Sequence[InstanceRecord]) -> projection.ProjectionModel:
    feats = [r.features for r in records if r.features is not None]
    if len(feats) != len(records):
        raise ValueError("every record needs features before fitting; run the features step first")
    return projection.fit(np.array(feats, dtype=float))


def project_records(records: Sequence[InstanceRecord], model: projection.ProjectionModel) -> list[InstanceRecord]:
    if not records:
        return []
    if any(r.features is None for r in records):
        raise ValueError("every record needs features before projecting")
    xy = projection.project_many(model, np.array([r.features for r in records], dtype=float))
    return [replace(r, px=float(a), py=float(b)) for r, (a, b) in zip(records, xy)]


def fill(
    records: Sequence[InstanceRecord],
    model: projection.ProjectionModel,
    cfg: PipelineConfig,
    novelty_runs: int | None = None,
    target_runs: int | None = None,
    solve: bool = True,
) -> tuple[list[InstanceRecord], dict[str, list[GenerationStats]]]:
    """Novelty runs (landscape grows after each run) then target runs; returns the new records."""
    novelty_runs = cfg.novelty_runs if novelty_runs is None else novelty_runs
    target_runs = cfg.target_runs if target_runs is None else target_runs
    known = {r.id for r in records}
    landscape = [(r.px, r.py) for r in records if r.px is not None]
    if not landscape:
        raise ValueError("fill needs a projected landscape; run fit-pca and project first")
    new: list[InstanceRecord] = []
    all_stats = {}

    def keep(run: EvolutionRun, run_id: str, mode: str) -> list[InstanceRecord]:
        fresh = [r for r in records_from_run(run, run_id, mode) if r.id not in known]
        for r in fresh:
            known.add(r.id)
        all_stats[run_id] = run.stats
        return fresh

    for r in range(novelty_runs):
        ecfg = cfg.evolution_config(_NOVELTY, r, p=round(0.05 + 0.9 * (r + 0.5) / max(1, novelty_runs), 6))
        run = run_evolution(ecfg, NoveltyMode(np.array(landscape), model))
        fresh = keep(run, f"novelty-{r}", "novelty")
        landscape.extend((x.px, x.py) for x in fresh)
        new.extend(fresh)
    for r in range(target_runs):
        tx, ty = cfg.targets[r % len(cfg.targets)]
        ecfg = cfg.evolution_config(_TARGET, r, p=round(0.05 + 0.9 * (r + 0.5) / max(1, target_runs), 6))
        run = run_evolution(ecfg, TargetMode(float(tx), float(ty), model))
        fresh = keep(run, f"target-{r}", "target")
        for x in fresh:
            x.provenance["target"] = [float(tx), float(ty)]
        new.extend(fresh)
    if solve:
        new = solve_records(new, cfg.timing())
    return new, all_stats


def labeled_points(records: Sequence[InstanceRecord]) -> list[analysis.LabeledPoint]:
    pts = []
    for r in records:
        diff = r.runtime_diff
        if r.px is None or diff is None:
            continue
        pts.append(analysis.LabeledPoint.from_diff(r.px, r.py, diff, r.id))
    return pts


def classify(records: Sequence[InstanceRecord], k: int, split_seed: int) -> analysis.ClassifierReport:
    pts = labeled_points(records)
    k_eff = min(k, max(1, len(pts) // 2))
    if k_eff != k:
        log.warning("k=%d reduced to %d for %d labelled points", k, k_eff, len(pts))
    return analysis.evaluate_classifier(pts, split_seed, k_eff)


def write_figures(
    records: Sequence[InstanceRecord],
    out_dir: str | Path,
    model: projection.ProjectionModel | None = None,
    clamp: tuple[float, float] | None = None,
    bin_width: float = 0.005,
    k: int = 100,
    split_seed: int = 0,
    stats: dict[str, list[GenerationStats]] | None = None,
) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: dict[str, Path] = {}

    def put(name: str, data: bytes) -> None:
        path = out / name
        path.write_bytes(data)
        written[name] = path

    diffs = [r.runtime_diff for r in records if r.runtime_diff is not None]
    if diffs:
        put("histogram.svg", plots.svg_histogram(analysis.runtime_histogram(diffs, bin_width)))
        clamp = tuple(clamp) if clamp is not None else analysis.symmetric_clamp(diffs)
        lo, hi = clamp
        zoom = analysis.runtime_histogram(diffs, bin_width, clamp=(lo, hi)) if hi - lo >= bin_width else None
        if zoom is not None and zoom.counts.size <= 2000:
            put("histogram_zoom.svg", plots.svg_histogram(zoom, title="runtime difference (clamped)"))
    proj = [r for r in records if r.px is not None]
    if proj:
        xy = np.array([[r.px, r.py] for r in proj])
        with_diff = [r for r in proj if r.runtime_diff is not None]
        if with_diff:
            put(
                "landscape.svg",
                plots.svg_scatter(
                    np.array([[r.px, r.py] for r in with_diff]),
                    [r.runtime_diff for r in with_diff],
                    clamp=tuple(clamp),
                    legend="runtime_diff",
                    title="landscape coloured by runtime difference",
                ),
            )
        is_gen = [r.provenance.get("kind") == "generator" for r in proj]
        put("footprint.svg", plots.svg_scatter(xy, highlight=is_gen, legend="generator", title="generator footprint"))
        for name in ("density", "diameter", "degree_std", "degree_skewness"):
            j = FEATURE_NAMES.index(name)
            vals = [r.features[j] for r in proj]
            put(f"landscape_{name}.svg", plots.svg_scatter(xy, vals, legend=name, title=f"landscape coloured by {name}"))
        pts = labeled_points(records)
        if len(pts) >= 2:
            tr, _ = analysis.split_half(len(pts), split_seed)
            train = [pts[i] for i in tr] or pts
            k_eff = min(k, len(train))
            bounds = (*_pad(xy[:, 0]), *_pad(xy[:, 1]))
            xs, ys, grid = analysis.decision_grid(train, k_eff, bounds, resolution=40)
            put(
                "decision_regions.svg",
                plots.svg_decision_regions(
                    xs, ys, grid, np.array([[p.x, p.y] for p in train]), [p.label == "exact_faster" for p in train]
                ),
            )
    if model is not None:
        put("coefficients.svg", plots.svg_coefficients(model.components, model.feature_names))
    for run_id, st in (stats or {}).items():
        put(
            f"fitness_{run_id}.svg",
            plots.svg_curves({"max": [s.max for s in st], "mean": [s.mean for s in st], "min": [s.min for s in st]},
                             title=f"fitness by generation ({run_id})"),
        )
        (out / f"stats_{run_id}.csv").write_text(stats_csv(st))
    return written


def _pad(v: np.ndarray) -> tuple[float, float]:
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    return lo - 0.05 * span, hi + 0.05 * span


def run_desk_pipeline(cfg: PipelineConfig, out_dir: str | Path | None = None) -> dict:
    """Hardness runs, generator suite, features, PCA, fill, projection, kNN report and figures."""
    from .archive import write_archive

    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evolved, stats = evolve_hardness(cfg)
    gens = generator_records(standard_generator_suite(cfg.n, cfg.derived_seed(_GENERATORS, 0), cfg.generator_er_count))
    gens = solve_records([g for g in gens if g.id not in {r.id for r in evolved}], cfg.timing())
    base = compute_features(dedupe(evolved + gens))
    model = fit_model(base)
    base = project_records(base, model)
    filled, fill_stats = fill(base, model, cfg)
    everything = project_records(compute_features(base + filled), model)
    write_archive(out / "archive.jsonl", everything)
    (out / "model.json").write_bytes(projection.save(model))
    report = classify(everything, cfg.knn_k, cfg.split_seed)
    (out / "classifier.csv").write_text(report.to_csv())
    (out / "misclassified.txt").write_text("".join(f"{i}\n" for i in report.misclassified))
    stats.update(fill_stats)
    figures = write_figures(
        everything, out, model, cfg.clamp_range(), cfg.hist_bin_width, report.k, cfg.split_seed, stats
    )
    return {"records": everything, "model": model, "report": report, "figures": figures, "stats": stats}


__all__ = [
    "classify",
    "compute_features",
    "evolve_hardness",
    "fill",
    "fit_model",
    "generator_records",
    "labeled_points",
    "project_records",
    "records_from_run",
    "run_desk_pipeline",
    "solve_records",
    "write_figures",
]
