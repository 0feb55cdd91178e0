"""Fixed-size undirected simple graphs stored as an unrolled upper-triangular bitvector.

Pair (i, j), i < j, lives at a row-major index over the upper triangle:
(0,1), (0,2), ..., (0,n-1), (1,2), ...
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

MIN_NODES = 3
MAX_NODES = 4096


def num_pairs(n: int) -> int:
    return n * (n - 1) // 2


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < MIN_NODES or n > MAX_NODES:
        raise ValueError(f"node count must be an integer in [{MIN_NODES}, {MAX_NODES}], got {n!r}")


def edge_index(i: int, j: int, n: int) -> int:
    """Linear position of pair {i, j} in the bitvector (requires i < j)."""
    if not (0 <= i < j < n):
        raise ValueError(f"need 0 <= i < j < n, got i={i}, j={j}, n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@lru_cache(maxsize=64)
def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column arrays of every pair, in edge_index order (read-only)."""
    rows, cols = np.triu_indices(n, 1)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        _check_n(self.n)
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 1 or bits.shape[0] != num_pairs(self.n):
            raise ValueError(
                f"bitvector length must be {num_pairs(self.n)} for n={self.n}, got {bits.shape}"
            )
        if bits is self.bits and bits.flags.writeable:
            bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "bits", bits)

    # construction helpers
    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros(num_pairs(n), dtype=bool))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, np.ones(num_pairs(n), dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        bits = np.zeros(num_pairs(n), dtype=bool)
        for a, b in edges:
            i, j = (a, b) if a < b else (b, a)
            bits[edge_index(i, j, n)] = True
        return cls(n, bits)

    @classmethod
    def from_hex(cls, n: int, text: str) -> "Graph":
        raw = np.frombuffer(bytes.fromhex(text), dtype=np.uint8)
        L = num_pairs(n)
        if raw.size != (L + 7) // 8:
            raise ValueError(f"hex payload has {raw.size} bytes, expected {(L + 7) // 8} for n={n}")
        bits = np.unpackbits(raw, bitorder="little")
        if bits[L:].any():
            raise ValueError("nonzero padding bits in hex payload")
        return cls(n, bits[:L].astype(bool))

    # queries
    @property
    def num_slots(self) -> int:
        return self.bits.shape[0]

    @cached_property
    def edge_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    @cached_property
    def adjacency(self) -> np.ndarray:
        return decode(self)

    @cached_property
    def key(self) -> bytes:
        return np.packbits(self.bits, bitorder="little").tobytes()

    def to_hex(self) -> str:
        return self.key.hex()

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = pair_arrays(self.n)
        idx = np.flatnonzero(self.bits)
        return [(int(rows[k]), int(cols[k])) for k in idx]

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        a, b = (i, j) if i < j else (j, i)
        return bool(self.bits[edge_index(a, b, self.n)])

    def with_edges(self, extra: Iterable[tuple[int, int]]) -> "Graph":
        bits = self.bits.copy()
        for a, b in extra:
            i, j = (a, b) if a < b else (b, a)
            bits[edge_index(i, j, self.n)] = True
        return Graph(self.n, bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.n, self.key))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count})"


def encode(adjacency: np.ndarray | Sequence[Sequence[int]]) -> Graph:
    A = np.asarray(adjacency)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be a square matrix")
    if not np.isin(A, (0, 1)).all():
        raise ValueError("adjacency entries must be 0/1")
    if not np.array_equal(A, A.T):
        raise ValueError("adjacency must be symmetric")
    if np.any(np.diag(A) != 0):
        raise ValueError("adjacency must have a zero diagonal")
    n = A.shape[0]
    _check_n(n)
    rows, cols = pair_arrays(n)
    return Graph(n, A[rows, cols].astype(bool))


def decode(g: Graph) -> np.ndarray:
    A = np.zeros((g.n, g.n), dtype=np.uint8)
    rows, cols = pair_arrays(g.n)
    A[rows, cols] = g.bits
    A[cols, rows] = g.bits
    A.setflags(write=False)
    return A


def degree_sequence(g: Graph) -> np.ndarray:
    return g.adjacency.sum(axis=1, dtype=np.int64)


def connected_components(g: Graph) -> int:
    A = g.adjacency
    seen = np.zeros(g.n, dtype=bool)
    count = 0
    for s in range(g.n):
        if seen[s]:
            continue
        count += 1
        frontier = np.zeros(g.n, dtype=bool)
        frontier[s] = True
        seen[s] = True
        while frontier.any():
            nxt = A[frontier].any(axis=0) & ~seen
            seen |= nxt
            frontier = nxt
    return count


def check_tour(tour: Sequence[int], n: int) -> np.ndarray:
    t = np.asarray(tour, dtype=np.int64)
    if t.ndim != 1 or t.shape[0] != n or not np.array_equal(np.sort(t), np.arange(n)):
        raise ValueError(f"tour must be a permutation of 0..{n - 1}")
    return t


def tour_edges(tour: Sequence[int]) -> list[tuple[int, int]]:
    t = list(int(v) for v in tour)
    out = []
    for a, b in zip(t, t[1:] + t[:1]):
        out.append((a, b) if a < b else (b, a))
    return out


def is_hamiltonian_witness(g: Graph, tour: Sequence[int]) -> int:
    """Number of cycle edges of `tour` that are absent from `g` (0 iff Hamiltonian cycle)."""
    t = check_tour(tour, g.n)
    A = g.adjacency
    return int(g.n - A[t, np.roll(t, -1)].sum())


# ---------------------------------------------------------------------------
# generators

GENERATOR_KINDS = (
    "erdos_renyi",
    "circle",
    "grid",
    "star",
    "preferential_attachment",
    "structured_tree",
)


def default_grid_dims(n: int) -> tuple[int, int]:
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return rows, n // rows


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    n: int
    seed: int = 0
    p: float | None = None
    rows: int | None = None
    cols: int | None = None
    m: int | None = None
    branching: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        _check_n(self.n)
        if self.kind == "erdos_renyi":
            if self.p is None or not (0.0 <= self.p <= 1.0):
                raise ValueError("erdos_renyi needs p in [0, 1]")
        if self.kind == "grid":
            rows, cols = self.grid_dims()
            if rows < 1 or cols < 1 or rows * cols != self.n:
                raise ValueError(f"grid {rows}x{cols} does not have {self.n} nodes")
        if self.kind == "preferential_attachment":
            m = 2 if self.m is None else self.m
            if not (1 <= m < self.n):
                raise ValueError(f"preferential_attachment needs 1 <= m < n, got m={m}")
        if self.kind == "structured_tree" and self.branching is not None and self.branching < 1:
            raise ValueError("branching must be >= 1")

    def grid_dims(self) -> tuple[int, int]:
        if self.rows is None and self.cols is None:
            return default_grid_dims(self.n)
        if self.rows is None:
            return self.n // self.cols, self.cols
        if self.cols is None:
            return self.rows, self.n // self.rows
        return self.rows, self.cols

    def label(self) -> str:
        if self.kind == "erdos_renyi":
            return f"erdos_renyi(p={self.p:g})"
        if self.kind == "grid":
            r, c = self.grid_dims()
            return f"grid({r}x{c})"
        if self.kind == "preferential_attachment":
            return f"preferential_attachment(m={self.m or 2})"
        if self.kind == "structured_tree":
            return f"structured_tree(b={self.branching or 2})"
        return self.kind


def generate(spec: GeneratorSpec) -> Graph:
    n = spec.n
    if spec.kind == "erdos_renyi":
        rng = np.random.default_rng(spec.seed)
        return Graph(n, rng.random(num_pairs(n)) < spec.p)
    if spec.kind == "circle":
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if spec.kind == "star":
        return Graph.from_edges(n, [(0, i) for i in range(1, n)])
    if spec.kind == "grid":
        rows, cols = spec.grid_dims()
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return Graph.from_edges(n, edges)
    if spec.kind == "structured_tree":
        b = spec.branching or 2
        return Graph.from_edges(n, [((i - 1) // b, i) for i in range(1, n)])
    if spec.kind == "preferential_attachment":
        return _preferential_attachment(n, spec.m or 2, np.random.default_rng(spec.seed))
    raise AssertionError(spec.kind)


def _preferential_attachment(n: int, m: int, rng: np.random.Generator) -> Graph:
    A = np.zeros((n, n), dtype=np.uint8)
    core = m + 1
    A[:core, :core] = 1
    np.fill_diagonal(A, 0)
    deg = A.sum(axis=1).astype(float)
    for v in range(core, n):
        weights = deg[:v] / deg[:v].sum()
        targets = rng.choice(v, size=m, replace=False, p=weights)
        A[v, targets] = 1
        A[targets, v] = 1
        deg[targets] += 1
        deg[v] = m
    return encode(A)


def standard_generator_suite(n: int, seed: int = 0, er_count: int = 10) -> list[GeneratorSpec]:
    """A sweep over the six standard generator families for node count `n`."""
    specs: list[GeneratorSpec] = []
    for k in range(er_count):
        p = (k + 1) / (er_count + 1)
        specs.append(GeneratorSpec("erdos_renyi", n, seed=seed + k, p=round(p, 6)))
    specs.append(GeneratorSpec("circle", n, seed=seed))
    specs.append(GeneratorSpec("star", n, seed=seed))
    for rows in range(1, math.isqrt(n) + 1):
        if n % rows == 0 and rows > 1:
            specs.append(GeneratorSpec("grid", n, seed=seed, rows=rows, cols=n // rows))
    for m in (1, 2, 3, 4):
        if m < n - 1:
            specs.append(GeneratorSpec("preferential_attachment", n, seed=seed + m, m=m))
    for b in (2, 3, 4):
        specs.append(GeneratorSpec("structured_tree", n, seed=seed, branching=b))
    return specs


# ---------------------------------------------------------------------------
# edge-list text format

def to_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{i} {j}" for i, j in g.edges())
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((lineno, int(parts[0]), int(parts[1])))
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise ValueError("empty edge list")
    _, n, m = rows[0]
    body = rows[1:]
    if len(body) != m:
        raise ValueError(f"header announces {m} edges, found {len(body)}")
    _check_n(n)
    bits = np.zeros(num_pairs(n), dtype=bool)
    last = -1
    for lineno, i, j in body:
        if not (0 <= i < j < n):
            raise ValueError(f"line {lineno}: edge ({i}, {j}) must satisfy 0 <= i < j < {n}")
        k = edge_index(i, j, n)
        if k <= last:
            raise ValueError(f"line {lineno}: edges must be strictly ascending by index")
        last = k
        bits[k] = True
    return Graph(n, bits)
