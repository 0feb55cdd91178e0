"""The ten structural graph features that span the instance space."""
from __future__ import annotations

from dataclasses import astuple, dataclass, fields

import numpy as np

from .graph import Graph, degree_sequence, num_pairs
from .linalg import jacobi_eigvalsh

FEATURE_SET_VERSION = 1

FEATURE_NAMES = (
    "density",
    "clustering_coefficient",
    "energy",
    "max_degree",
    "degree_std",
    "degree_skewness",
    "degree_kurtosis",
    "diameter",
    "pct_degree1",
    "pct_degree2",
)


@dataclass(frozen=True)
class FeatureVector:
    density: float
    clustering_coefficient: float
    energy: float
    max_degree: int
    degree_std: float
    degree_skewness: float
    degree_kurtosis: float
    diameter: int
    pct_degree1: float
    pct_degree2: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_sequence(cls, values) -> "FeatureVector":
        vals = [float(v) for v in values]
        if len(vals) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} feature values, got {len(vals)}")
        kw = dict(zip(FEATURE_NAMES, vals))
        kw["max_degree"] = int(round(kw["max_degree"]))
        kw["diameter"] = int(round(kw["diameter"]))
        return cls(**kw)

    def as_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def density(g: Graph) -> float:
    return g.edge_count / num_pairs(g.n)


def clustering_coefficient(g: Graph) -> float:
    """Average local clustering; nodes with degree < 2 count as 0."""
    A = g.adjacency.astype(np.int64)
    deg = A.sum(axis=1)
    closed = np.einsum("ij,jk,ki->i", A, A, A) / 2  # triangles through each node
    pairs = deg * (deg - 1) / 2
    local = np.divide(closed, pairs, out=np.zeros(g.n), where=pairs > 0)
    return float(local.mean())


def energy(g: Graph) -> float:
    if g.edge_count == 0:
        return 0.0
    return float(np.abs(jacobi_eigvalsh(g.adjacency.astype(float))).sum())


def degree_stats(g: Graph) -> tuple[int, float, float, float]:
    """(max degree, std, skewness, non-excess kurtosis) using population moments."""
    d = degree_sequence(g).astype(float)
    c = d - d.mean()
    m2 = float(np.mean(c**2))
    if m2 <= 1e-15:
        return int(d.max()), 0.0, 0.0, 0.0
    m3 = float(np.mean(c**3))
    m4 = float(np.mean(c**4))
    return int(d.max()), float(np.sqrt(m2)), m3 / m2**1.5, m4 / m2**2


def diameter(g: Graph) -> int:
    """Longest shortest path in edges; a disconnected graph returns n."""
    n = g.n
    A = g.adjacency.astype(np.int64)
    reached = np.eye(n, dtype=bool)
    frontier = reached.copy()
    depth = 0
    while True:
        nxt = ((frontier.astype(np.int64) @ A) > 0) & ~reached
        if not nxt.any():
            break
        depth += 1
        reached |= nxt
        frontier = nxt
    return depth if reached.all() else n


def degree_fractions(g: Graph) -> tuple[float, float]:
    d = degree_sequence(g)
    return float(np.mean(d == 1)), float(np.mean(d == 2))


def feature_vector(g: Graph) -> FeatureVector:
    max_deg, std, skew, kurt = degree_stats(g)
    p1, p2 = degree_fractions(g)
    return FeatureVector(
        density=density(g),
        clustering_coefficient=clustering_coefficient(g),
        energy=energy(g),
        max_degree=max_deg,
        degree_std=std,
        degree_skewness=skew,
        degree_kurtosis=kurt,
        diameter=diameter(g),
        pct_degree1=p1,
        pct_degree2=p2,
    )


def feature_csv(rows: list[tuple[str, FeatureVector]]) -> str:
    lines = ["id," + ",".join(FEATURE_NAMES)]
    for ident, fv in rows:
        lines.append(ident + "," + ",".join(repr(float(v)) for v in fv.as_array()))
    return "\n".join(lines) + "\n"
