import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcpspace import projection
from hcpspace.errors import FormatError, InsufficientDataError
from hcpspace.features import feature_vector
from hcpspace.projection import fit, load, log_transform, project, project_many, save

from conftest import random_graph


def rank2_table(seed: int, rows: int = 200, d: int = 10) -> np.ndarray:
    # log-space data of rank two, mapped back through exp so the log step recovers it
    rng = np.random.default_rng(seed)
    latent = rng.normal(size=(rows, 2)) * [3.0, 1.0]
    basis = rng.normal(size=(2, d))
    return np.exp(0.3 * latent @ basis)


def isotropic_table(seed: int, rows: int = 5000, d: int = 10) -> np.ndarray:
    return np.exp(np.random.default_rng(seed).normal(size=(rows, d)))


def graph_table(seed: int, rows: int = 80) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.array([feature_vector(random_graph(rng, 12)).as_array() for _ in range(rows)])


def test_rank_two_data_is_fully_explained():
    model = fit(rank2_table(1))
    assert model.variance_explained.sum() == pytest.approx(1.0, abs=1e-6)
    assert model.variance_explained[0] >= model.variance_explained[1]


def test_isotropic_data_spreads_variance():
    model = fit(isotropic_table(2))
    for frac in model.variance_explained:
        assert abs(frac - 0.1) <= 0.02


def test_components_are_orthonormal():
    model = fit(graph_table(3))
    np.testing.assert_allclose(model.components @ model.components.T, np.eye(2), atol=1e-9)


def test_sign_convention():
    model = fit(graph_table(4))
    for row in model.components:
        assert row[np.argmax(np.abs(row))] > 0


def test_training_mean_projects_to_origin():
    X = graph_table(5)
    model = fit(X)
    P = project_many(model, X)
    np.testing.assert_allclose(P.mean(axis=0), [0.0, 0.0], atol=1e-9)


def test_projected_variance_equals_eigenvalues():
    X = graph_table(6)
    model = fit(X)
    P = project_many(model, X)
    np.testing.assert_allclose(P.var(axis=0), model.eigenvalues, rtol=1e-8)


def test_fit_is_order_independent():
    X = graph_table(7)
    a = fit(X)
    b = fit(X[np.random.default_rng(0).permutation(len(X))])
    assert a == b


def test_log_offsets_handle_nonpositive_columns():
    X = np.array([[-2.0, 0.0, 1.0], [0.0, 1.0, 2.0], [3.0, 2.0, 5.0]])
    offs = projection.log_offsets(X)
    np.testing.assert_array_equal(offs, [3.0, 1.0, 0.0])
    assert np.isfinite(log_transform(X, offs)).all()


def test_constant_features_are_dropped():
    X = graph_table(8)
    X[:, 9] = 0.25
    model = fit(X)
    assert model.stds[9] == 0.0
    assert np.all(model.components[:, 9] == 0.0)


def test_out_of_range_inputs_stay_finite():
    X = graph_table(9)
    model = fit(X)
    low = X.min(axis=0) - 5.0
    assert np.isfinite(project(model, low)).all()


@pytest.mark.parametrize("rows", [0, 1, 2])
def test_too_few_vectors(rows):
    with pytest.raises(InsufficientDataError):
        fit(graph_table(10)[:rows].reshape(rows, 10))


def test_identical_vectors_rejected():
    X = np.tile(graph_table(11)[:1], (5, 1))
    with pytest.raises(InsufficientDataError):
        fit(X)


def test_save_load_roundtrip_is_exact():
    X = graph_table(12)
    model = fit(X)
    again = load(save(model))
    assert again == model
    np.testing.assert_array_equal(project_many(model, X), project_many(again, X))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_save_load_property(seed):
    model = fit(rank2_table(seed, rows=30))
    assert load(save(model)) == model


@pytest.mark.parametrize(
    "blob",
    [b"", b"garbage", b"\xff\xfe", b"[1,2,3]", b'{"format": "other"}', b'{"format": "hcpspace.projection", "version": 99}'],
)
def test_load_rejects_garbage(blob):
    with pytest.raises(FormatError):
        load(blob)


def test_load_rejects_truncated_model():
    text = save(fit(graph_table(13))).decode()
    with pytest.raises(FormatError):
        load(text[: len(text) // 2].encode())
