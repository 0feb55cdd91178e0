import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcpspace.features import (
    FEATURE_NAMES,
    FeatureVector,
    clustering_coefficient,
    degree_fractions,
    degree_stats,
    density,
    diameter,
    energy,
    feature_csv,
    feature_vector,
)
from hcpspace.graph import Graph, decode, encode
from hcpspace.linalg import jacobi_eigh, jacobi_eigvalsh

from conftest import cycle, petersen, random_graph


def star(n: int) -> Graph:
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def brute_clustering(g: Graph) -> float:
    A = decode(g)
    vals = []
    for v in range(g.n):
        nb = np.flatnonzero(A[v])
        k = len(nb)
        if k < 2:
            vals.append(0.0)
            continue
        links = sum(A[a, b] for i, a in enumerate(nb) for b in nb[i + 1 :])
        vals.append(links / (k * (k - 1) / 2))
    return float(np.mean(vals))


# --- individual features -------------------------------------------------------

def test_density_bounds():
    assert density(Graph.complete(7)) == 1.0
    assert density(Graph.empty(7)) == 0.0
    assert density(cycle(5)) == 0.5


def test_clustering_canonical_values():
    assert clustering_coefficient(Graph.complete(4)) == 1.0
    assert clustering_coefficient(star(6)) == 0.0
    chorded = cycle(5).with_edges([(0, 2)])
    # nodes 0 and 2 each see one closed pair out of three, node 1 sees its only pair closed
    assert clustering_coefficient(chorded) == pytest.approx(1 / 3, abs=1e-12)


def test_clustering_matches_brute_force():
    rng = np.random.default_rng(4)
    for _ in range(50):
        g = random_graph(rng, int(rng.integers(3, 20)))
        assert clustering_coefficient(g) == pytest.approx(brute_clustering(g), abs=1e-12)


@pytest.mark.parametrize(
    "g,expected",
    [
        (Graph.complete(5), 8.0),
        (Graph.from_edges(4, [(0, 1)]), 2.0),
        (Graph.empty(6), 0.0),
    ],
)
def test_energy_canonical(g, expected):
    assert energy(g) == pytest.approx(expected, abs=1e-9)


def test_energy_of_c5():
    # cycle spectrum is 2cos(2πk/n)
    expected = sum(abs(2 * math.cos(2 * math.pi * k / 5)) for k in range(5))
    assert energy(cycle(5)) == pytest.approx(expected, abs=1e-9)
    assert energy(cycle(5)) == pytest.approx(6.472, abs=1e-3)


def test_energy_matches_numpy_oracle():
    rng = np.random.default_rng(8)
    for _ in range(30):
        g = random_graph(rng, int(rng.integers(3, 25)))
        oracle = np.abs(np.linalg.eigvalsh(decode(g).astype(float))).sum()
        assert energy(g) == pytest.approx(oracle, abs=1e-8)


def test_degree_stats_star():
    mx, std, skew, kurt = degree_stats(star(5))
    assert mx == 4
    assert std == pytest.approx(1.2)
    # degrees 4,1,1,1,1: centred values 2.4 and -0.6
    assert skew == pytest.approx((2.4**3 + 4 * (-0.6) ** 3) / 5 / 1.2**3)
    assert kurt == pytest.approx((2.4**4 + 4 * 0.6**4) / 5 / 1.2**4)


def test_degree_stats_regular_graph_is_flat():
    assert degree_stats(cycle(9)) == (2, 0.0, 0.0, 0.0)
    assert degree_stats(Graph.empty(4)) == (0, 0.0, 0.0, 0.0)


def test_diameters(completion_example):
    assert diameter(completion_example) == 3
    assert diameter(cycle(8)) == 4
    assert diameter(Graph.complete(6)) == 1
    assert diameter(petersen()) == 2
    disconnected = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4)])
    assert diameter(disconnected) == 6


def test_degree_fractions():
    assert degree_fractions(star(5)) == (0.8, 0.0)
    assert degree_fractions(cycle(6)) == (0.0, 1.0)


# --- the vector ----------------------------------------------------------------------

def test_feature_vector_order_and_roundtrip():
    fv = feature_vector(petersen())
    assert tuple(fv.as_dict()) == FEATURE_NAMES
    arr = fv.as_array()
    assert arr.shape == (10,)
    assert FeatureVector.from_sequence(arr) == fv
    with pytest.raises(ValueError):
        FeatureVector.from_sequence(arr[:9])


def test_feature_vector_is_deterministic_and_finite():
    rng = np.random.default_rng(9)
    for _ in range(20):
        g = random_graph(rng, 16)
        a, b = feature_vector(g), feature_vector(g)
        assert np.array_equal(a.as_array(), b.as_array())
        assert np.all(np.isfinite(a.as_array()))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 18))
def test_features_are_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, n)
    perm = rng.permutation(n)
    A = decode(g)
    h = encode(A[np.ix_(perm, perm)])
    np.testing.assert_allclose(feature_vector(g).as_array(), feature_vector(h).as_array(), atol=1e-8)


def test_feature_csv_header():
    text = feature_csv([("a", feature_vector(cycle(5)))])
    header, row = text.strip().split("\n")
    assert header.split(",")[1:] == list(FEATURE_NAMES)
    assert row.startswith("a,")


# --- eigen solver --------------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 5, 12, 30])
def test_jacobi_reconstructs_random_symmetric(n):
    rng = np.random.default_rng(n)
    M = rng.normal(size=(n, n))
    S = (M + M.T) / 2
    w, V = jacobi_eigh(S)
    np.testing.assert_allclose(V @ np.diag(w) @ V.T, S, atol=1e-9)
    np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-9)
    np.testing.assert_allclose(w, np.linalg.eigvalsh(S), atol=1e-9)
    assert w.sum() == pytest.approx(np.trace(S), abs=1e-9)


def test_jacobi_rejects_bad_input():
    with pytest.raises(ValueError):
        jacobi_eigvalsh(np.ones((2, 3)))
    with pytest.raises(ValueError):
        jacobi_eigvalsh(np.array([[0.0, 1.0], [2.0, 0.0]]))
