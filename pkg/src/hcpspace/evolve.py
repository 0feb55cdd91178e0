"""Generational evolution of graph instances under pluggable fitness modes.

One generation: create offspring from the population (clone / mutate / two-point
crossover), evaluate them, then pick the next population from the offspring by
2-tournament selection. A hall of fame keeps the best distinct graphs ever
evaluated.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Protocol, Sequence

import numpy as np

from . import projection
from .features import feature_vector
from .graph import Graph, GeneratorSpec, generate
from .solvers import TimingConfig, timed_pair

Direction = Literal["maximize", "minimize"]

_INIT_STREAM = 0
_OFFSPRING_STREAM = 1
_SELECT_STREAM = 2


@dataclass(frozen=True)
class EvolutionConfig:
    n: int = 16
    pop_size: int = 20
    offspring_count: int = 30
    op_probs: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    mutation_rate: float = 0.03
    generations: int = 100
    extension_generations: int = 100
    extension_window: int = 25
    extension_threshold: float = 1e-3
    hof_size: int = 300
    tournament_size: int = 2
    direction: Direction = "maximize"
    seed: int = 0
    p: float | None = None  # ER edge probability of the initial population; drawn if None
    workers: int = 1

    def __post_init__(self) -> None:
        if len(self.op_probs) != 3 or min(self.op_probs) < 0 or abs(sum(self.op_probs) - 1) > 1e-9:
            raise ValueError("op_probs must be three non-negative probabilities summing to 1")
        for name in ("pop_size", "offspring_count", "hof_size", "tournament_size", "workers", "extension_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.generations < 0 or self.extension_generations < 0:
            raise ValueError("generation counts must be non-negative")
        if not (0 < self.mutation_rate <= 1):
            raise ValueError("mutation_rate must be in (0, 1]")
        if self.direction not in ("maximize", "minimize"):
            raise ValueError(f"unknown direction {self.direction!r}")
        if self.p is not None and not (0 <= self.p <= 1):
            raise ValueError("p must be in [0, 1]")


# ---------------------------------------------------------------------------
# fitness modes

class FitnessMode(Protocol):
    name: str
    direction: Direction | None

    def evaluate(self, g: Graph) -> tuple[float, dict]: ...


@dataclass
class RuntimeDiffMode:
    """Heuristic CPU seconds minus exact CPU seconds."""

    timing: TimingConfig = field(default_factory=TimingConfig)
    name: str = "runtime_diff"
    direction: Direction | None = None

    def evaluate(self, g: Graph) -> tuple[float, dict]:
        res = timed_pair(g, self.timing)
        return res.fitness, {
            "t_exact": res.exact.cpu_seconds,
            "t_heuristic": res.heuristic.cpu_seconds,
            "hcn_exact": res.exact.hcn,
            "hcn_heuristic": res.heuristic.hcn,
        }


def _project_graph(g: Graph, model: projection.ProjectionModel) -> tuple[np.ndarray, np.ndarray]:
    fv = feature_vector(g).as_array()
    return fv, projection.project_many(model, fv[None, :])[0]


def novelty_fitness(g: Graph, landscape: np.ndarray, model: projection.ProjectionModel) -> float:
    _, xy = _project_graph(g, model)
    return float(np.sqrt(((np.asarray(landscape) - xy) ** 2).sum(axis=1).min()))


def target_fitness(g: Graph, x: float, y: float, model: projection.ProjectionModel) -> float:
    _, xy = _project_graph(g, model)
    return float(math.hypot(xy[0] - x, xy[1] - y))


@dataclass
class NoveltyMode:
    """Distance to the nearest point already in the landscape (maximized)."""

    landscape: np.ndarray
    model: projection.ProjectionModel
    name: str = "novelty"
    direction: Direction | None = "maximize"

    def __post_init__(self) -> None:
        self.landscape = np.asarray(self.landscape, dtype=float).reshape(-1, 2)
        if self.landscape.shape[0] == 0:
            raise ValueError("novelty landscape must be non-empty")

    def evaluate(self, g: Graph) -> tuple[float, dict]:
        fv, xy = _project_graph(g, self.model)
        dist = float(np.sqrt(((self.landscape - xy) ** 2).sum(axis=1).min()))
        return dist, {"features": fv.tolist(), "px": float(xy[0]), "py": float(xy[1])}


@dataclass
class TargetMode:
    """Distance to a chosen landscape coordinate (minimized)."""

    x: float
    y: float
    model: projection.ProjectionModel
    name: str = "target"
    direction: Direction | None = "minimize"

    def evaluate(self, g: Graph) -> tuple[float, dict]:
        fv, xy = _project_graph(g, self.model)
        dist = float(math.hypot(xy[0] - self.x, xy[1] - self.y))
        return dist, {"features": fv.tolist(), "px": float(xy[0]), "py": float(xy[1])}


@dataclass
class CallableMode:
    """Wraps a plain graph -> float function (surrogate fitness for experiments and tests)."""

    fn: Callable[[Graph], float]
    name: str = "custom"
    direction: Direction | None = None

    def evaluate(self, g: Graph) -> tuple[float, dict]:
        return float(self.fn(g)), {}


# ---------------------------------------------------------------------------
# hall of fame and stats

@dataclass(frozen=True)
class HofEntry:
    graph: Graph
    fitness: float
    generation: int
    info: dict


class HallOfFame:
    """Best distinct graphs ever evaluated, sorted best first."""

    def __init__(self, capacity: int = 300, direction: Direction = "maximize"):
        self.capacity = capacity
        self.direction = direction
        self._entries: list[HofEntry] = []
        self._keys: list[float] = []
        self._seen: set[bytes] = set()

    def _sort_key(self, fitness: float) -> float:
        return -fitness if self.direction == "maximize" else fitness

    def update(self, g: Graph, fitness: float, generation: int, info: dict | None = None) -> bool:
        if g.key in self._seen:
            return False
        key = self._sort_key(fitness)
        if len(self._entries) >= self.capacity and key >= self._keys[-1]:
            return False
        pos = bisect.bisect_right(self._keys, key)
        self._keys.insert(pos, key)
        self._entries.insert(pos, HofEntry(g, fitness, generation, dict(info or {})))
        self._seen.add(g.key)
        if len(self._entries) > self.capacity:
            dropped = self._entries.pop()
            self._keys.pop()
            self._seen.discard(dropped.graph.key)
        return True

    @property
    def entries(self) -> list[HofEntry]:
        return list(self._entries)

    @property
    def best(self) -> HofEntry:
        return self._entries[0]

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    min: float
    mean: float
    max: float
    mean_edges: float
    hof_best: float


def stats_csv(stats: Sequence[GenerationStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["gen", "min", "mean", "max", "mean_edges"])
    for s in stats:
        w.writerow([s.generation, repr(s.min), repr(s.mean), repr(s.max), repr(s.mean_edges)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# variation operators

MUTATION_OPS = ("add", "remove", "replace")


def mutate(g: Graph, rate: float, rng: np.random.Generator, op: str | None = None) -> Graph:
    """Apply k ~ U{1..max(1, ceil(rate*|E|))} random add/remove/replace edge operations."""
    bits = g.bits.copy()
    upper = max(1, math.ceil(rate * g.edge_count - 1e-9))
    k = int(rng.integers(1, upper + 1))
    for _ in range(k):
        kind = op if op is not None else MUTATION_OPS[int(rng.integers(3))]
        present = np.flatnonzero(bits)
        absent = np.flatnonzero(~bits)
        if kind == "add":
            if absent.size:
                bits[absent[rng.integers(absent.size)]] = True
        elif kind == "remove":
            if present.size:
                bits[present[rng.integers(present.size)]] = False
        elif kind == "replace":
            if present.size and absent.size:
                bits[present[rng.integers(present.size)]] = False
                bits[absent[rng.integers(absent.size)]] = True
        else:
            raise ValueError(f"unknown mutation op {kind!r}")
    return Graph(g.n, bits)


def crossover(
    a: Graph, b: Graph, rng: np.random.Generator, cuts: tuple[int, int] | None = None
) -> Graph:
    """Two-point crossover; returns one of the two children uniformly at random."""
    if a.n != b.n:
        raise ValueError(f"crossover needs equal node counts, got {a.n} and {b.n}")
    L = a.num_slots
    if cuts is None:
        p, q = sorted(int(v) for v in rng.integers(0, L + 1, size=2))
    else:
        p, q = cuts
        if not (0 <= p <= q <= L):
            raise ValueError(f"cut points must satisfy 0 <= p <= q <= {L}")
    first = np.concatenate([a.bits[:p], b.bits[p:q], a.bits[q:]])
    second = np.concatenate([b.bits[:p], a.bits[p:q], b.bits[q:]])
    return Graph(a.n, first if rng.integers(2) == 0 else second)


def make_offspring(pop: Sequence[Graph], cfg: EvolutionConfig, rng: np.random.Generator) -> list[Graph]:
    if len(pop) != cfg.pop_size:
        raise ValueError(f"population has {len(pop)} graphs, expected {cfg.pop_size}")
    probs = np.asarray(cfg.op_probs, dtype=float)
    out = []
    for _ in range(cfg.offspring_count):
        op = int(rng.choice(3, p=probs))
        if op == 0:
            out.append(pop[int(rng.integers(len(pop)))])
        elif op == 1:
            out.append(mutate(pop[int(rng.integers(len(pop)))], cfg.mutation_rate, rng))
        else:
            if len(pop) < 2:
                i = j = 0
            else:
                i, j = (int(v) for v in rng.choice(len(pop), size=2, replace=False))
            out.append(crossover(pop[i], pop[j], rng))
    return out


def _better_or_equal(x: float, y: float, direction: Direction) -> bool:
    return x >= y if direction == "maximize" else x <= y


def tournament_select(
    candidates: Sequence[tuple[Graph, float]],
    cfg: EvolutionConfig,
    rng: np.random.Generator,
    direction: Direction | None = None,
) -> list[tuple[Graph, float]]:
    if not candidates:
        raise ValueError("no candidates to select from")
    direction = direction or cfg.direction
    chosen = []
    for _ in range(cfg.pop_size):
        draws = rng.integers(len(candidates), size=cfg.tournament_size)
        winner = int(draws[0])
        for d in draws[1:]:
            if not _better_or_equal(candidates[winner][1], candidates[int(d)][1], direction):
                winner = int(d)
        chosen.append(candidates[winner])
    return chosen


def extension_rule(
    stats: Sequence[GenerationStats],
    direction: Direction = "maximize",
    threshold: float = 1e-3,
) -> bool:
    """True when the population's best fitness still trends upward (direction-aware)."""
    if len(stats) < 2:
        return False
    best = np.array([s.max if direction == "maximize" else s.min for s in stats], dtype=float)
    signed = best if direction == "maximize" else -best
    x = np.arange(len(signed), dtype=float)
    slope = float(np.polyfit(x, signed, 1)[0])
    return slope > threshold * float(np.abs(best).max())


# ---------------------------------------------------------------------------
# the loop

def _stream(seed: int, *parts: int) -> np.random.Generator:
    return np.random.default_rng([seed % (1 << 64), *parts])


def initial_population(cfg: EvolutionConfig) -> tuple[list[Graph], float]:
    rng = _stream(cfg.seed, _INIT_STREAM)
    p = cfg.p if cfg.p is not None else float(rng.uniform(0.0, 1.0))
    seeds = rng.integers(0, 2**63, size=cfg.pop_size)
    pop = [generate(GeneratorSpec("erdos_renyi", cfg.n, seed=int(s), p=p)) for s in seeds]
    return pop, p


@dataclass
class EvolutionRun:
    hof: HallOfFame
    stats: list[GenerationStats]
    p: float | None
    direction: Direction
    extended: bool
    evaluations: int

    def __iter__(self):
        # unpacks as (hof, stats)
        return iter((self.hof, self.stats))


class _Evaluator:
    def __init__(self, mode: FitnessMode, workers: int):
        self.mode = mode
        self.workers = workers
        self.cache: dict[bytes, tuple[float, dict]] = {}

    def __call__(self, graphs: Sequence[Graph]) -> list[tuple[float, dict]]:
        todo: dict[bytes, Graph] = {}
        for g in graphs:
            if g.key not in self.cache and g.key not in todo:
                todo[g.key] = g
        items = list(todo.values())
        if self.workers > 1 and len(items) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as ex:
                results = list(ex.map(self.mode.evaluate, items))
        else:
            results = [self.mode.evaluate(g) for g in items]
        for g, r in zip(items, results):
            self.cache[g.key] = r
        return [self.cache[g.key] for g in graphs]


def run_evolution(
    cfg: EvolutionConfig,
    mode: FitnessMode,
    initial: Sequence[Graph] | None = None,
    on_generation: Callable[[GenerationStats], None] | None = None,
) -> EvolutionRun:
    direction: Direction = mode.direction or cfg.direction
    if initial is None:
        pop, p = initial_population(cfg)
    else:
        pop, p = list(initial), None
        if len(pop) != cfg.pop_size or any(g.n != cfg.n for g in pop):
            raise ValueError(f"initial population must hold {cfg.pop_size} graphs with n={cfg.n}")
    hof = HallOfFame(cfg.hof_size, direction)
    evaluate = _Evaluator(mode, cfg.workers)
    stats: list[GenerationStats] = []

    def record(gen: int, graphs: Sequence[Graph], fit: Sequence[float]) -> None:
        arr = np.asarray(fit, dtype=float)
        s = GenerationStats(
            generation=gen,
            min=float(arr.min()),
            mean=float(arr.mean()),
            max=float(arr.max()),
            mean_edges=float(np.mean([g.edge_count for g in graphs])),
            hof_best=hof.best.fitness,
        )
        stats.append(s)
        if on_generation is not None:
            on_generation(s)

    results = evaluate(pop)
    for g, (f, info) in zip(pop, results):
        hof.update(g, f, 0, info)
    pop_fit = [f for f, _ in results]
    record(0, pop, pop_fit)

    def advance(gen: int) -> None:
        nonlocal pop, pop_fit
        offspring = make_offspring(pop, cfg, _stream(cfg.seed, _OFFSPRING_STREAM, gen))
        res = evaluate(offspring)
        for g, (f, info) in zip(offspring, res):
            hof.update(g, f, gen, info)
        pool = [(g, f) for g, (f, _) in zip(offspring, res)]
        chosen = tournament_select(pool, cfg, _stream(cfg.seed, _SELECT_STREAM, gen), direction)
        pop = [g for g, _ in chosen]
        pop_fit = [f for _, f in chosen]
        record(gen, pop, pop_fit)

    gen = 0
    for _ in range(cfg.generations):
        gen += 1
        advance(gen)
    extended = False
    if (
        cfg.extension_generations > 0
        and cfg.generations > 0
        and extension_rule(stats[-cfg.extension_window :], direction, cfg.extension_threshold)
    ):
        extended = True
        for _ in range(cfg.extension_generations):
            gen += 1
            advance(gen)
    return EvolutionRun(hof, stats, p, direction, extended, len(evaluate.cache))
