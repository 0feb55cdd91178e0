"""Exact and heuristic Hamiltonian completion solvers and the CPU-timed fitness harness.

The exact route reduces a graph to a symmetric TSP with 0/1 weights (weight 0 on
existing edges) and solves it with Held-Karp dynamic programming over subsets.
Because every weight is 0 or 1 the DP table is kept in threshold form: for a
budget c, ``R_c[S]`` is the bitset of end nodes j such that some path from node 0
through exactly the nodes of S ends at j with weight <= c. The classic table
entry is recovered as ``dp[S][j] = min{c : j in R_c[S]}``. Budgets are tried in
increasing order, so solving a graph with completion number k costs k + 1 sweeps.
"""
from __future__ import annotations

import itertools
import statistics
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Literal

import numpy as np

from .errors import CapacityError
from .graph import Graph, check_tour, num_pairs, tour_edges

DEFAULT_EXACT_LIMIT = 20
BRUTE_FORCE_LIMIT = 9


@dataclass(frozen=True, eq=False)
class TspInstance:
    """Complete graph with 0/1 pair weights, parallel to the source graph's bitvector."""

    n: int
    weight_bits: np.ndarray

    def weight_matrix(self) -> np.ndarray:
        rows, cols = np.triu_indices(self.n, 1)
        W = np.zeros((self.n, self.n), dtype=np.int64)
        W[rows, cols] = self.weight_bits
        W[cols, rows] = self.weight_bits
        return W

    def weight(self, i: int, j: int) -> int:
        if i == j:
            raise ValueError("no weight on the diagonal")
        return int(self.weight_matrix()[i, j])

    def tour_weight(self, tour) -> int:
        t = check_tour(tour, self.n)
        W = self.weight_matrix()
        return int(W[t, np.roll(t, -1)].sum())


@dataclass(frozen=True)
class SolveResult:
    hcn: int
    added_edges: list[tuple[int, int]]
    tour: list[int]
    cpu_seconds: float = 0.0


@dataclass(frozen=True)
class MslsParams:
    restarts: int = 32
    max_no_improve: int | None = None  # None -> 50 * n
    seed: int = 0
    early_stop_at_zero: bool = True

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if self.max_no_improve is not None and self.max_no_improve < 1:
            raise ValueError("max_no_improve must be positive")

    def no_improve_limit(self, n: int) -> int:
        return 50 * n if self.max_no_improve is None else self.max_no_improve


def reduce_to_tsp(g: Graph) -> TspInstance:
    w = ~g.bits
    w.setflags(write=False)
    return TspInstance(g.n, w)


def _result_from_tour(g: Graph, tour, cpu_seconds: float = 0.0) -> SolveResult:
    tour = [int(v) for v in tour]
    added = [e for e in tour_edges(tour) if not g.has_edge(*e)]
    added.sort()
    return SolveResult(len(added), added, tour, cpu_seconds)


# ---------------------------------------------------------------------------
# Held-Karp subset layers

@lru_cache(maxsize=4)
def _subset_layers(m: int) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """For each popcount s >= 2: (masks, set-bit positions, masks minus each bit)."""
    dtype = np.int32 if m <= 30 else np.int64
    masks = np.arange(1 << m, dtype=dtype)
    pop = np.zeros(1 << m, dtype=np.int8)
    for b in range(m):
        pop += (masks >> b) & 1
    layers = []
    for s in range(2, m + 1):
        M = masks[pop == s]
        bits = ((M[:, None] >> np.arange(m, dtype=dtype)) & 1).astype(bool)
        B = np.nonzero(bits)[1].reshape(M.shape[0], s).astype(dtype)
        P = M[:, None] ^ (np.ones((), dtype=dtype) << B)
        for a in (M, B, P):
            a.setflags(write=False)
        layers.append((M, B, P))
    return layers


def _threshold_tables(A: np.ndarray) -> tuple[list[np.ndarray], int]:
    """Build R_0, R_1, ... until a closed tour fits the budget; return (tables, optimum)."""
    n = A.shape[0]
    m = n - 1
    dtype = np.int32 if m <= 30 else np.int64
    one = np.ones((), dtype=dtype)
    shifts = one << np.arange(m, dtype=dtype)
    # neighbour bitsets over nodes 1..n-1 (node v -> bit v-1)
    nbr = (A[1:, 1:].astype(dtype) * shifts[None, :]).sum(axis=1).astype(dtype)
    nbr0 = A[0, 1:].astype(bool)
    full = (1 << m) - 1
    layers = _subset_layers(m)
    nbr_layers = [nbr[B] for _, B, _ in layers]
    close_mask = int((nbr0.astype(dtype) * shifts).sum())

    tables: list[np.ndarray] = []
    for c in range(n + 1):
        R = np.zeros(1 << m, dtype=dtype)
        R[shifts] = np.where(nbr0 | (c >= 1), shifts, 0)
        lower = tables[-1] if tables else None
        for (M, B, P), NB in zip(layers, nbr_layers):
            hit = (R[P] & NB) != 0
            if lower is not None:
                hit |= lower[P] != 0
            R[M] = np.bitwise_or.reduce(np.where(hit, one << B, 0), axis=1)
        tables.append(R)
        ends = int(R[full])
        if ends & close_mask or (lower is not None and int(lower[full]) != 0):
            return tables, c
    raise AssertionError("a tour of weight n always exists")


def _lex_smallest_tour(A: np.ndarray, tables: list[np.ndarray], opt: int) -> list[int]:
    n = A.shape[0]
    remaining = (1 << (n - 1)) - 1
    budget = opt
    u = 0
    tour = [0]
    while remaining:
        for v in range(1, n):
            bit = 1 << (v - 1)
            if not remaining & bit:
                continue
            w = 0 if A[u, v] else 1
            rest = budget - w
            # v must end a 0-rooted path through `remaining` within `rest`; reversed, that
            # path continues the tour from v through the rest and back to 0
            if rest >= 0 and int(tables[rest][remaining]) & bit:
                break
        else:
            raise AssertionError("reconstruction lost the optimum")
        tour.append(v)
        budget = rest
        remaining ^= bit
        u = v
    return tour


def exact_hcn(g: Graph, exact_limit: int = DEFAULT_EXACT_LIMIT) -> SolveResult:
    """Optimal completion via Held-Karp; ties resolved by the lexicographically smallest tour."""
    if g.n > exact_limit:
        raise CapacityError(f"exact solver limited to n <= {exact_limit} (exact_limit), got n={g.n}")
    A = g.adjacency.astype(bool)
    tables, opt = _threshold_tables(A)
    tour = _lex_smallest_tour(A, tables, opt)
    res = _result_from_tour(g, tour)
    assert res.hcn == opt
    return res


def held_karp_tour_weight(tsp: TspInstance) -> int:
    """Plain min-plus Held-Karp on the weight matrix; returns the optimal tour weight."""
    n = tsp.n
    if n > 16:
        raise CapacityError(f"min-plus Held-Karp limited to n <= 16, got n={n}")
    W = tsp.weight_matrix()
    m = n - 1
    big = 1 << 40
    dp = np.full((1 << m, m), big, dtype=np.int64)
    for b in range(m):
        dp[1 << b, b] = W[0, b + 1]
    Wsub = W[1:, 1:]
    for M, B, P in _subset_layers(m):
        prev = dp[P]  # (C, s, m): best path over mask-minus-j ending at k
        step = Wsub[:, B].transpose(1, 2, 0)  # (C, s, m): weight k -> j
        dp[M[:, None], B] = np.minimum((prev + step).min(axis=2), big)
    full = (1 << m) - 1
    return int((dp[full] + W[1:, 0]).min())


def brute_force_hcn(g: Graph) -> int:
    if g.n > BRUTE_FORCE_LIMIT:
        raise CapacityError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}, got n={g.n}")
    perms = _cyclic_tours(g.n)
    A = g.adjacency
    present = A[perms, np.roll(perms, -1, axis=1)].sum(axis=1)
    return int(g.n - present.max())


@lru_cache(maxsize=16)
def _cyclic_tours(n: int) -> np.ndarray:
    # node 0 first, one orientation per cycle
    rows = [(0,) + p for p in itertools.permutations(range(1, n)) if n < 3 or p[0] < p[-1]]
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


# ---------------------------------------------------------------------------
# multi-start local search

def _two_opt_mask(n: int) -> np.ndarray:
    i, j = np.indices((n, n))
    valid = j >= i + 2
    valid[0, n - 1] = False
    return valid


def _or_opt_mask(n: int) -> np.ndarray:
    i, k = np.indices((n, n))
    return (k != i) & (k != (i - 1) % n)


@lru_cache(maxsize=32)
def _masks(n: int) -> tuple[np.ndarray, int, np.ndarray, int]:
    two = _two_opt_mask(n)
    orr = _or_opt_mask(n)
    return two, int(two.sum()), orr, int(orr.sum())


def _tour_cost(W: np.ndarray, t: np.ndarray) -> int:
    return int(W[t, np.roll(t, -1)].sum())


def _two_opt_deltas(W: np.ndarray, t: np.ndarray) -> np.ndarray:
    nxt = np.roll(t, -1)
    e = W[t, nxt]
    return W[np.ix_(t, t)] + W[np.ix_(nxt, nxt)] - e[:, None] - e[None, :]


def _or_opt_deltas(W: np.ndarray, t: np.ndarray) -> np.ndarray:
    prv = np.roll(t, 1)
    nxt = np.roll(t, -1)
    e = W[t, nxt]
    removal = W[prv, nxt] - W[prv, t] - W[t, nxt]
    insertion = W[np.ix_(t, t)] + W[np.ix_(t, nxt)] - e[None, :]
    return removal[:, None] + insertion


def _apply_two_opt(t: np.ndarray, i: int, j: int) -> np.ndarray:
    t = t.copy()
    t[i + 1 : j + 1] = t[i + 1 : j + 1][::-1]
    return t


def _apply_or_opt(t: np.ndarray, i: int, k: int) -> np.ndarray:
    x = t[i]
    anchor = t[k]
    rest = np.delete(t, i)
    pos = int(np.flatnonzero(rest == anchor)[0])
    return np.insert(rest, pos + 1, x)


def _local_search(W, t, rng, limit: int) -> tuple[np.ndarray, int]:
    n = t.shape[0]
    two_valid, two_count, or_valid, or_count = _masks(n)
    cost = _tour_cost(W, t)
    no_improve = 0
    use_two_opt = True
    while cost > 0 and no_improve < limit:
        if use_two_opt:
            D, valid, count, apply = _two_opt_deltas(W, t), two_valid, two_count, _apply_two_opt
        else:
            D, valid, count, apply = _or_opt_deltas(W, t), or_valid, or_count, _apply_or_opt
        use_two_opt = not use_two_opt
        if count == 0:
            no_improve += 1
            continue
        D = np.where(valid, D, 1 << 20)
        flat = int(np.argmin(D))
        best = int(D.flat[flat])
        if best < 0:
            t = apply(t, *divmod(flat, n))
            cost += best
            no_improve = 0
            continue
        no_improve += count
        # plateau walk: take a random sideways move so restarts do not freeze on 0/1 ties
        sideways = np.flatnonzero(D == 0)
        if sideways.size:
            t = apply(t, *divmod(int(sideways[rng.integers(sideways.size)]), n))
    return t, cost


def msls_hcn(g: Graph, params: MslsParams | None = None) -> SolveResult:
    params = params or MslsParams()
    n = g.n
    W = 1 - g.adjacency.astype(np.int64)
    np.fill_diagonal(W, 0)
    rng = np.random.default_rng(params.seed)
    limit = params.no_improve_limit(n)
    best_tour, best_cost = None, n + 1
    for _ in range(params.restarts):
        t0 = rng.permutation(n)
        t, cost = _local_search(W, t0, rng, limit)
        if cost < best_cost:
            best_tour, best_cost = t, cost
        if params.early_stop_at_zero and best_cost == 0:
            break
    return _result_from_tour(g, best_tour)


# ---------------------------------------------------------------------------
# timing harness

Which = Literal["exact", "heuristic"]


@dataclass(frozen=True)
class TimingConfig:
    msls: MslsParams = field(default_factory=MslsParams)
    exact_limit: int = DEFAULT_EXACT_LIMIT
    repeats: int = 1


def timed_solve(which: Which, g: Graph, params: TimingConfig | None = None) -> SolveResult:
    """Solve with thread-CPU timing around the solver call only (median over repeats)."""
    params = params or TimingConfig()
    if params.repeats < 1:
        raise ValueError("repeats must be positive")
    if which == "exact":
        call = lambda: exact_hcn(g, params.exact_limit)  # noqa: E731
    elif which == "heuristic":
        call = lambda: msls_hcn(g, params.msls)  # noqa: E731
    else:
        raise ValueError(f"unknown solver {which!r}")
    times = []
    res = None
    for _ in range(params.repeats):
        start = time.thread_time()
        res = call()
        times.append(time.thread_time() - start)
    return SolveResult(res.hcn, res.added_edges, res.tour, max(0.0, statistics.median(times)))


@dataclass(frozen=True)
class RuntimeDiff:
    """Both timed solves of one graph; fitness = heuristic seconds - exact seconds."""

    exact: SolveResult
    heuristic: SolveResult

    @property
    def fitness(self) -> float:
        return self.heuristic.cpu_seconds - self.exact.cpu_seconds


def timed_pair(g: Graph, params: TimingConfig | None = None) -> RuntimeDiff:
    params = params or TimingConfig()
    if g.n > params.exact_limit:
        raise CapacityError(
            f"exact solver limited to n <= {params.exact_limit} (exact_limit), got n={g.n}"
        )
    return RuntimeDiff(timed_solve("exact", g, params), timed_solve("heuristic", g, params))


def runtime_difference_fitness(g: Graph, params: TimingConfig | None = None) -> float:
    return timed_pair(g, params).fitness


__all__ = [
    "DEFAULT_EXACT_LIMIT",
    "MslsParams",
    "RuntimeDiff",
    "SolveResult",
    "TimingConfig",
    "TspInstance",
    "brute_force_hcn",
    "exact_hcn",
    "held_karp_tour_weight",
    "msls_hcn",
    "num_pairs",
    "reduce_to_tsp",
    "runtime_difference_fitness",
    "timed_pair",
    "timed_solve",
]
