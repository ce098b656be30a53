"""2D projections of a dataset: external coordinates or a PCA fallback.

External projections (t-SNE, UMAP, whatever produced the scatterplot)
are ingested as a two-column CSV and passed through untouched — the
engine never recomputes or rescales coordinates it was given. When no
projection exists, :func:`pca_project` provides a deterministic
first-two-principal-components view via power iteration with deflation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, load_csv
from .errors import AlignmentError, DegenerateDataError, ValidationError

_POWER_TOL = 1e-9
_POWER_MAX_ITER = 1000


@dataclass(frozen=True)
class Projection2D:
    """Per-row 2D coordinates, aligned with dataset row order."""

    coords: np.ndarray  # (n, 2) float64
    method_tag: str

    def __post_init__(self):
        coords = np.asarray(self.coords, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2:
            raise ValidationError(f"projection must be (n, 2), got {coords.shape}")
        if not np.isfinite(coords).all():
            raise ValidationError("projection coordinates must be finite")
        object.__setattr__(self, "coords", coords)

    @property
    def n_rows(self) -> int:
        return self.coords.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "method": self.method_tag,
            "coords": [[float(x), float(y)] for x, y in self.coords],
        }

    @classmethod
    def from_json_dict(cls, doc) -> "Projection2D":
        return cls(np.asarray(doc["coords"], dtype=np.float64), doc["method"])


def ingest_projection(source, dataset: Dataset, method_tag: str = "external") -> Projection2D:
    """Parse a two-column coordinate CSV aligned with ``dataset`` rows.

    Coordinate values are stored exactly as parsed — no centering,
    scaling, or reordering.
    """
    parsed = load_csv(source, name="projection")
    if parsed.n_features != 2:
        raise ValidationError(
            f"projection CSV must have exactly 2 columns, got {parsed.n_features}"
        )
    if parsed.n_rows != dataset.n_rows:
        raise AlignmentError(
            f"projection has {parsed.n_rows} rows, dataset has {dataset.n_rows}"
        )
    coords = parsed.matrix()
    if np.isnan(coords).any():
        raise ValidationError("projection coordinates contain missing values")
    return Projection2D(coords, method_tag)


def _orthogonalize(v, basis):
    for u in basis:
        v = v - (v @ u) * u
    return v


def _start_vector(d: int, basis, nudged: bool):
    """Normalized all-ones start; the nudged variant adds 1e-6 to the
    first coordinate before renormalizing (for starts that are orthogonal
    to the invariant subspace or to remaining variance)."""
    v = np.ones(d, dtype=np.float64) / np.sqrt(d)
    if nudged:
        v = v.copy()
        v[0] += 1e-6
        v /= np.linalg.norm(v)
    v = _orthogonalize(v, basis)
    norm = np.linalg.norm(v)
    if norm < 1e-12:
        return None
    return v / norm


def _complete_basis(basis, d: int) -> np.ndarray:
    """Deterministic orthonormal completion: first standard basis vector
    with a non-negligible residual against the found components."""
    for k in range(d):
        cand = np.zeros(d, dtype=np.float64)
        cand[k] = 1.0
        cand = _orthogonalize(cand, basis)
        norm = np.linalg.norm(cand)
        if norm >= 1e-6:
            return cand / norm
    raise DegenerateDataError("cannot extend orthonormal basis")  # d <= len(basis)


def _power_component(matrix, basis, scale):
    """Dominant eigenvector of ``matrix`` restricted to the complement of
    ``basis``. Falls back to a basis completion when the matrix is
    numerically zero on that subspace (e.g. rank-deficient data)."""
    d = matrix.shape[0]
    nudged = False
    v = _start_vector(d, basis, nudged)
    if v is None:
        nudged = True
        v = _start_vector(d, basis, nudged)
    if v is None:
        return _complete_basis(basis, d)
    for _ in range(_POWER_MAX_ITER):
        w = matrix @ v
        w = _orthogonalize(w, basis)
        norm = np.linalg.norm(w)
        if norm <= scale * 1e-14:
            if not nudged:
                nudged = True
                restart = _start_vector(d, basis, nudged)
                if restart is not None:
                    v = restart
                    continue
            return _complete_basis(basis, d)
        w /= norm
        if np.linalg.norm(w - v) < _POWER_TOL:
            return w
        v = w
    return v


def _orient(v: np.ndarray) -> np.ndarray:
    """Sign convention: the largest-magnitude loading is positive."""
    return -v if v[int(np.argmax(np.abs(v)))] < 0 else v


def pca_project(dataset: Dataset) -> Projection2D:
    """First two principal components of the mean-centered data.

    Power iteration with deflation; fixed all-ones start and a fixed
    sign convention make the output deterministic across platforms.
    Missing values are not imputed — supply an external projection for
    data with missing cells.
    """
    X = dataset.matrix()
    if np.isnan(X).any():
        raise DegenerateDataError(
            "dataset has missing values; PCA fallback needs complete rows"
        )
    n, d = X.shape
    if d < 2:
        raise DegenerateDataError("PCA fallback needs at least 2 features")
    Xc = X - X.mean(axis=0)
    cov = (Xc.T @ Xc) / (n - 1)
    scale = float(np.trace(cov))
    if scale <= 0.0:
        raise DegenerateDataError("dataset has zero variance; nothing to project")
    components = []
    work = cov.copy()
    for _ in range(2):
        v = _power_component(work, components, scale)
        v = _orient(v)
        components.append(v)
        lam = float(v @ work @ v)
        work = work - lam * np.outer(v, v)
    coords = Xc @ np.column_stack(components)
    return Projection2D(coords, "pca")


def explained_variance(dataset: Dataset, projection: Projection2D) -> np.ndarray:
    """Sample variance (ddof=1) of each projected axis."""
    return projection.coords.var(axis=0, ddof=1)
