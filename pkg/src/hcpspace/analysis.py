"""Landscape analytics: runtime histograms, generator footprints and kNN dominance prediction."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import InsufficientDataError
from .features import FeatureVector

Label = Literal["exact_faster", "heuristic_faster"]
LABELS: tuple[Label, Label] = ("exact_faster", "heuristic_faster")


def label_for(runtime_diff: float) -> Label:
    # zero difference counts as a win for the exact solver
    return "exact_faster" if runtime_diff >= 0 else "heuristic_faster"


@dataclass(frozen=True)
class LabeledPoint:
    x: float
    y: float
    label: Label
    runtime_diff: float
    instance_id: str

    @classmethod
    def from_diff(cls, x: float, y: float, runtime_diff: float, instance_id: str) -> "LabeledPoint":
        return cls(float(x), float(y), label_for(runtime_diff), float(runtime_diff), str(instance_id))


# ---------------------------------------------------------------------------
# histograms

@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray  # len(counts) + 1 bin boundaries
    counts: np.ndarray

    def rows(self) -> list[tuple[float, float, int]]:
        return [(float(a), float(b), int(c)) for a, b, c in zip(self.edges[:-1], self.edges[1:], self.counts)]


def runtime_histogram(
    diffs: Iterable[float],
    bin_width: float,
    clamp: tuple[float, float] | None = None,
) -> Histogram:
    """Half-open bins [lo + k*w, lo + (k+1)*w). With `clamp`, values outside land in the edge bins."""
    if not bin_width > 0:
        raise ValueError("bin width must be positive")
    x = np.asarray(list(diffs), dtype=float)
    if x.size == 0:
        raise ValueError("no runtime differences to histogram")
    if clamp is not None:
        lo, hi = float(clamp[0]), float(clamp[1])
        if not hi > lo:
            raise ValueError("clamp range must satisfy lo < hi")
        nbins = max(1, math.ceil((hi - lo) / bin_width - 1e-12))
    else:
        lo = math.floor(x.min() / bin_width) * bin_width
        nbins = int(math.floor(x.max() / bin_width) - math.floor(x.min() / bin_width)) + 1
    idx = np.floor((x - lo) / bin_width).astype(np.int64)
    idx = np.clip(idx, 0, nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    edges = lo + bin_width * np.arange(nbins + 1)
    return Histogram(edges, counts)


def symmetric_clamp(values: Iterable[float], percentile: float = 98.0) -> tuple[float, float]:
    """Colour range centred on zero that covers `percentile` % of |values|."""
    v = np.abs(np.asarray(list(values), dtype=float))
    m = float(np.percentile(v, percentile)) if v.size else 0.0
    if not m > 0:
        m = float(v.max()) if v.size and v.max() > 0 else 1.0
    return -m, m


def histogram_csv(h: Histogram) -> str:
    lines = ["lo,hi,count"]
    lines.extend(f"{a!r},{b!r},{c}" for a, b, c in h.rows())
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# footprints

def provenance_tags(provenance: dict) -> set[str]:
    tags = {str(provenance.get("kind", ""))}
    for key in ("generator", "mode"):
        if key in provenance:
            tags.add(str(provenance[key]))
            tags.add(f"{provenance.get('kind')}:{provenance[key]}")
    return tags


def footprint(records: Iterable, tag: str) -> list:
    """Records whose provenance matches `tag` (a kind like 'generator', or 'evolved:novelty')."""
    out = []
    for r in records:
        prov = r.provenance if hasattr(r, "provenance") else r.get("provenance", {})
        if tag in provenance_tags(prov or {}):
            out.append(r)
    return out


# ---------------------------------------------------------------------------
# k nearest neighbours

class KnnModel:
    """Brute-force kNN over 2-D points with deterministic tie-breaking."""

    def __init__(self, train: Sequence[LabeledPoint]):
        if not train:
            raise ValueError("empty training set")
        order = sorted(range(len(train)), key=lambda i: train[i].instance_id)
        pts = [train[i] for i in order]
        self.ids = [p.instance_id for p in pts]
        self.xy = np.array([[p.x, p.y] for p in pts], dtype=float)
        self.is_exact = np.array([p.label == "exact_faster" for p in pts], dtype=bool)

    def _neighbors(self, x: float, y: float, k: int) -> np.ndarray:
        k = max(1, min(k, len(self.ids)))
        d2 = (self.xy[:, 0] - x) ** 2 + (self.xy[:, 1] - y) ** 2
        # rows are in id order, so a stable sort on distance breaks ties by smaller id
        if k < len(d2):
            cutoff = np.partition(d2, k - 1)[k - 1]
            cand = np.flatnonzero(d2 <= cutoff)
            cand = cand[np.argsort(d2[cand], kind="stable")]
            return cand[:k]
        return np.argsort(d2, kind="stable")

    def classify(self, x: float, y: float, k: int) -> Label:
        nb = self._neighbors(x, y, k)
        votes_exact = int(self.is_exact[nb].sum())
        votes_heur = nb.size - votes_exact
        if votes_exact != votes_heur:
            return "exact_faster" if votes_exact > votes_heur else "heuristic_faster"
        return "exact_faster" if self.is_exact[nb[0]] else "heuristic_faster"

    def classify_many(self, xy: np.ndarray, k: int) -> list[Label]:
        return [self.classify(float(a), float(b), k) for a, b in np.asarray(xy, dtype=float)]


def knn_classify(train: Sequence[LabeledPoint], query: tuple[float, float], k: int) -> Label:
    if k < 1:
        raise ValueError("k must be >= 1")
    return KnnModel(train).classify(float(query[0]), float(query[1]), k)


@dataclass
class ClassifierReport:
    k: int
    train_size: int
    test_size: int
    accuracy: float
    confusion: dict[tuple[str, str], int]  # (true, predicted) -> count
    misclassified: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "train_size", "test_size", "accuracy", *[f"{t}->{p}" for t in LABELS for p in LABELS]])
        w.writerow([self.k, self.train_size, self.test_size, repr(self.accuracy),
                    *[self.confusion.get((t, p), 0) for t in LABELS for p in LABELS]])
        return buf.getvalue()


def split_half(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    perm = np.random.default_rng(seed).permutation(n)
    half = n // 2
    return perm[:half], perm[half:]


def evaluate_classifier(points: Sequence[LabeledPoint], split_seed: int = 0, k: int = 100) -> ClassifierReport:
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(points) < 2 * k:
        raise InsufficientDataError(f"need at least 2k = {2 * k} labelled points, got {len(points)}")
    tr, te = split_half(len(points), split_seed)
    train = [points[i] for i in tr]
    test = [points[i] for i in te]
    model = KnnModel(train)
    predicted = model.classify_many(np.array([[p.x, p.y] for p in test]), k)
    confusion: Counter = Counter()
    wrong = []
    for p, pred in zip(test, predicted):
        confusion[(p.label, pred)] += 1
        if pred != p.label:
            wrong.append(p.instance_id)
    correct = len(test) - len(wrong)
    return ClassifierReport(
        k=k,
        train_size=len(train),
        test_size=len(test),
        accuracy=correct / len(test),
        confusion=dict(confusion),
        misclassified=wrong,
    )


def decision_grid(
    train: Sequence[LabeledPoint], k: int, bounds: tuple[float, float, float, float], resolution: int = 60
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Predicted labels on a regular grid: (xs, ys, is_exact[ny, nx])."""
    x0, x1, y0, y1 = bounds
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    model = KnnModel(train)
    grid = np.zeros((resolution, resolution), dtype=bool)
    for iy, yv in enumerate(ys):
        for ix, xv in enumerate(xs):
            grid[iy, ix] = model.classify(float(xv), float(yv), k) == "exact_faster"
    return xs, ys, grid


# ---------------------------------------------------------------------------
# threshold rule for instances that are very hard for the heuristic

@dataclass(frozen=True)
class DominanceThresholds:
    density_range: tuple[float, float] = (0.25, 0.35)
    diameter: int = 2
    max_skewness: float = 0.0  # strict upper bound


def dominance_prediction_rule(
    fv: FeatureVector, thresholds: DominanceThresholds | None = None
) -> Literal["very_hard_for_heuristic", "normal"]:
    t = thresholds or DominanceThresholds()
    lo, hi = t.density_range
    hit = lo <= fv.density <= hi and fv.diameter == t.diameter and fv.degree_skewness < t.max_skewness
    return "very_hard_for_heuristic" if hit else "normal"
