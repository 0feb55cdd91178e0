"""Log-transform, z-score and two-component PCA of feature vectors."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import FormatError, InsufficientDataError
from .features import FEATURE_NAMES, FeatureVector
from .linalg import jacobi_eigh

MODEL_FORMAT = "hcpspace.projection"
MODEL_VERSION = 1
LOG_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class ProjectionModel:
    offsets: np.ndarray  # (d,)
    means: np.ndarray  # (d,) in log space
    stds: np.ndarray  # (d,) in log space; 0 marks a dropped constant feature
    components: np.ndarray  # (2, d), rows orthonormal
    variance_explained: np.ndarray  # (2,)
    eigenvalues: np.ndarray  # (2,) variance of the training projection per axis
    mins: np.ndarray  # (d,) raw training minima; inputs are clamped up to these
    fitted_on: str
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProjectionModel):
            return NotImplemented
        return (
            self.fitted_on == other.fitted_on
            and self.feature_names == other.feature_names
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("offsets", "means", "stds", "components", "variance_explained", "eigenvalues", "mins")
            )
        )

    @property
    def retained(self) -> np.ndarray:
        return self.stds > 0


def _as_matrix(features) -> np.ndarray:
    if isinstance(features, np.ndarray):
        X = np.asarray(features, dtype=float)
    else:
        X = np.array(
            [f.as_array() if isinstance(f, FeatureVector) else np.asarray(f, dtype=float) for f in features],
            dtype=float,
        )
    if X.ndim != 2:
        raise ValueError("features must form a 2-D table")
    return X


def log_offsets(X: np.ndarray) -> np.ndarray:
    mins = X.min(axis=0)
    return np.where(mins <= 0, 1.0 - mins, 0.0)


def log_transform(X: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    return np.log(X + offsets + LOG_EPS)


def fit(features: Sequence[FeatureVector] | np.ndarray, names: Sequence[str] = FEATURE_NAMES) -> ProjectionModel:
    X = _as_matrix(features)
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature values")
    if X.shape[0] < 3 or np.unique(X, axis=0).shape[0] < 2:
        raise InsufficientDataError("need at least 3 feature vectors, not all identical")
    # lexicographic row order makes the fit independent of input order
    X = X[np.lexsort(X.T[::-1])]
    d = X.shape[1]
    offsets = log_offsets(X)
    L = log_transform(X, offsets)
    means = L.mean(axis=0)
    stds = L.std(axis=0)
    keep = stds > 1e-12 * np.maximum(1.0, np.abs(means))
    stds = np.where(keep, stds, 0.0)
    if keep.sum() < 2:
        raise InsufficientDataError("fewer than two non-constant features")
    Z = (L[:, keep] - means[keep]) / stds[keep]
    cov = (Z.T @ Z) / Z.shape[0]
    w, V = jacobi_eigh(cov, tol=1e-13)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    w = np.clip(w, 0.0, None)
    comps = np.zeros((2, d))
    for r in range(2):
        v = V[:, r]
        if v[int(np.argmax(np.abs(v)))] < 0:
            v = -v
        comps[r, keep] = v
    total = float(w.sum())
    var_expl = w[:2] / total
    fingerprint = hashlib.sha256(np.ascontiguousarray(X).tobytes()).hexdigest()[:16]
    return ProjectionModel(
        offsets=offsets,
        means=means,
        stds=stds,
        components=comps,
        variance_explained=var_expl,
        eigenvalues=w[:2].copy(),
        mins=X.min(axis=0),
        fitted_on=fingerprint,
        feature_names=tuple(names),
    )


def normalize(model: ProjectionModel, X: np.ndarray) -> np.ndarray:
    L = log_transform(np.maximum(X, model.mins), model.offsets)
    safe = np.where(model.retained, model.stds, 1.0)
    return np.where(model.retained, (L - model.means) / safe, 0.0)


def project_many(model: ProjectionModel, features) -> np.ndarray:
    X = _as_matrix(features)
    if not np.isfinite(X).all():
        raise ValueError("non-finite feature value")
    return normalize(model, X) @ model.components.T


def project(model: ProjectionModel, fv: FeatureVector | Sequence[float]) -> tuple[float, float]:
    xy = project_many(model, [fv])[0]
    return float(xy[0]), float(xy[1])


# ---------------------------------------------------------------------------
# serialization

def save(model: ProjectionModel) -> bytes:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "feature_names": list(model.feature_names),
        "offsets": model.offsets.tolist(),
        "means": model.means.tolist(),
        "stds": model.stds.tolist(),
        "components": model.components.tolist(),
        "variance_explained": model.variance_explained.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "mins": model.mins.tolist(),
        "fitted_on": model.fitted_on,
    }
    # json renders floats with repr(), which round-trips exactly
    return (json.dumps(doc, indent=1) + "\n").encode()


def load(data: bytes) -> ProjectionModel:
    try:
        doc = json.loads(data.decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"not a projection model: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise FormatError("not a projection model")
    if doc.get("version") != MODEL_VERSION:
        raise FormatError(f"unsupported model version {doc.get('version')!r}")
    try:
        names = tuple(doc["feature_names"])
        d = len(names)
        arr = {k: np.array(doc[k], dtype=float) for k in ("offsets", "means", "stds", "variance_explained", "eigenvalues", "mins")}
        comps = np.array(doc["components"], dtype=float)
        fitted_on = str(doc["fitted_on"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"incomplete projection model: {exc}") from None
    if comps.shape != (2, d) or any(arr[k].shape != (d,) for k in ("offsets", "means", "stds", "mins")):
        raise FormatError("projection model arrays have inconsistent shapes")
    if arr["variance_explained"].shape != (2,) or not all(math.isfinite(v) for v in comps.ravel()):
        raise FormatError("projection model arrays are malformed")
    return ProjectionModel(
        offsets=arr["offsets"],
        means=arr["means"],
        stds=arr["stds"],
        components=comps,
        variance_explained=arr["variance_explained"],
        eigenvalues=arr["eigenvalues"],
        mins=arr["mins"],
        fitted_on=fitted_on,
        feature_names=names,
    )
