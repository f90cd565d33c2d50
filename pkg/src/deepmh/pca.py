"""Linear point-distribution shape model fitted with PCA.

Shapes are flat vectors of interleaved vertex coordinates
``(x0, y0, x1, y1, ...)``. A fitted model maps ``k`` whitened scores plus
a global 2-D shift to a shape:

    shape = U @ (sqrt(S) * z) + mean + tile(shift)

with column-orthonormal ``U`` and per-component variances ``S``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .exceptions import ModelFileError, RankDeficiencyError, ValidationError
from .validation import as_matrix, as_vector, check_int_at_least

PCA_MAGIC = "deepmh-pca v1"


class PcaShapeModel(BaseEstimator, TransformerMixin):
    """PCA over a training set of shapes.

    Parameters
    ----------
    n_components : int
        Number of principal components ``k`` to keep.

    Attributes
    ----------
    mean_ : ndarray, shape (2V,)
        Sample mean shape.
    components_ : ndarray, shape (2V, k)
        Column-orthonormal principal directions.
    variances_ : ndarray, shape (k,)
        Per-component variances (squared singular values over ``n - 1``).
    explained_variance_ratio_ : ndarray, shape (k,)
        Fraction of total variance captured by each kept component.
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, shapes, y=None):
        k = check_int_at_least(self.n_components, 1, "n_components")
        shapes = as_matrix(shapes, name="shapes")
        n, width = shapes.shape
        if width % 2 != 0:
            raise ValidationError(
                f"shapes must have an even number of columns (got {width})"
            )
        if n < k + 1:
            raise ValidationError(
                f"need at least n_components + 1 = {k + 1} shapes, got {n}"
            )
        self.mean_ = shapes.mean(axis=0)
        centered = shapes - self.mean_
        _, svals, vt = np.linalg.svd(centered, full_matrices=False)
        tol = (svals[0] if svals.size else 0.0) * max(n, width) * np.finfo(float).eps
        rank = int(np.sum(svals > tol))
        if k > rank:
            raise RankDeficiencyError(
                f"requested {k} components but the centered shapes have rank "
                f"{rank}; achievable n_components = {rank}"
            )
        self.components_ = vt[:k].T
        self.variances_ = svals[:k] ** 2 / (n - 1)
        total = float(np.sum(svals**2))
        self.explained_variance_ratio_ = svals[:k] ** 2 / total
        self.n_vertices_ = width // 2
        self.n_features_in_ = width
        return self

    def _check_fitted(self):
        if not hasattr(self, "components_"):
            raise NotFittedError("fit must be called first")

    @property
    def n_components_(self) -> int:
        self._check_fitted()
        return self.components_.shape[1]

    def transform(self, shapes) -> np.ndarray:
        """Whitened scores of shapes: ``z = S^{-1/2} U^T (y - mean)``."""
        self._check_fitted()
        shapes = as_matrix(shapes, self.mean_.shape[0], name="shapes")
        return (shapes - self.mean_) @ self.components_ / np.sqrt(self.variances_)

    def inverse_transform(self, z) -> np.ndarray:
        """Shapes reconstructed from whitened scores (no shift)."""
        self._check_fitted()
        z = as_matrix(z, self.n_components_, name="z")
        return z * np.sqrt(self.variances_) @ self.components_.T + self.mean_

    def shape_from_params(self, z, shift=(0.0, 0.0)) -> np.ndarray:
        """One shape from scores ``z`` and a global 2-D shift.

        The shift is added to every vertex's (x, y) coordinates.
        """
        self._check_fitted()
        z = as_vector(z, self.n_components_, "z")
        shift = as_vector(shift, 2, "shift")
        shape = self.components_ @ (np.sqrt(self.variances_) * z) + self.mean_
        return shape + np.tile(shift, self.n_vertices_)

    def shapes_from_params(self, params) -> np.ndarray:
        """Vectorized :meth:`shape_from_params` for rows of ``(z, shift)``."""
        self._check_fitted()
        k = self.n_components_
        params = as_matrix(params, k + 2, name="params")
        shapes = params[:, :k] * np.sqrt(self.variances_) @ self.components_.T
        return shapes + self.mean_ + np.tile(params[:, k:], self.n_vertices_)

    def project_with_shift(self, shape):
        """Least-squares ``(z, shift)`` whose reconstruction is closest to ``shape``."""
        self._check_fitted()
        shape = as_vector(shape, self.mean_.shape[0], "shape")
        scaled = self.components_ * np.sqrt(self.variances_)
        tiles = np.tile(np.eye(2), (self.n_vertices_, 1))
        design = np.hstack([scaled, tiles])
        sol, *_ = np.linalg.lstsq(design, shape - self.mean_, rcond=None)
        return sol[: self.n_components_], sol[self.n_components_ :]


def save_pca(model: PcaShapeModel, path, shift_box=None) -> None:
    """Write a fitted shape model (and optional shift box) as text."""
    model._check_fitted()
    lines = [
        PCA_MAGIC,
        f"dims: {model.mean_.shape[0]} {model.n_components_}",
    ]
    if shift_box is not None:
        box = as_matrix(np.asarray(shift_box, dtype=float), 2, name="shift_box")
        lines.append("shift_box: " + " ".join(repr(float(v)) for v in box.ravel()))
    fmt = lambda row: " ".join(repr(float(v)) for v in row)
    lines.append("mu")
    lines.append(fmt(model.mean_))
    lines.append("S")
    lines.append(fmt(model.variances_))
    lines.append("U")
    for row in model.components_:
        lines.append(fmt(row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def _expect(lines, pos, token, path):
    if pos >= len(lines) or lines[pos] != token:
        found = lines[pos] if pos < len(lines) else "<end of file>"
        raise ModelFileError(f"{path}:{pos + 1}: expected {token!r}, got {found!r}")
    return pos + 1


def _row(lines, pos, width, path):
    if pos >= len(lines):
        raise ModelFileError(f"{path}:{len(lines)}: file truncated")
    parts = lines[pos].split()
    if len(parts) != width:
        raise ModelFileError(
            f"{path}:{pos + 1}: expected {width} values, found {len(parts)}"
        )
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ModelFileError(f"{path}:{pos + 1}: bad number ({exc})") from None


def load_pca(path):
    """Read a shape model saved by :func:`save_pca`.

    Returns ``(model, shift_box)``; ``shift_box`` is ``None`` when the file
    does not carry one.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != PCA_MAGIC:
        raise ModelFileError(f"{path}:1: missing '{PCA_MAGIC}' header")
    if len(lines) < 2 or not lines[1].startswith("dims: "):
        raise ModelFileError(f"{path}:2: missing 'dims:' line")
    try:
        width, k = (int(p) for p in lines[1][len("dims: "):].split())
    except ValueError:
        raise ModelFileError(f"{path}:2: malformed dims line {lines[1]!r}") from None

    pos = 2
    shift_box = None
    if pos < len(lines) and lines[pos].startswith("shift_box: "):
        parts = lines[pos][len("shift_box: "):].split()
        if len(parts) != 4:
            raise ModelFileError(
                f"{path}:{pos + 1}: shift_box needs 4 values, found {len(parts)}"
            )
        try:
            shift_box = np.array([float(p) for p in parts]).reshape(2, 2)
        except ValueError as exc:
            raise ModelFileError(f"{path}:{pos + 1}: bad number ({exc})") from None
        pos += 1
    pos = _expect(lines, pos, "mu", path)
    mean = _row(lines, pos, width, path)
    pos += 1
    pos = _expect(lines, pos, "S", path)
    variances = _row(lines, pos, k, path)
    pos += 1
    pos = _expect(lines, pos, "U", path)
    components = np.empty((width, k))
    for r in range(width):
        components[r] = _row(lines, pos + r, k, path)

    if np.any(variances <= 0):
        raise ModelFileError(f"{path}: non-positive variances in S")
    model = PcaShapeModel(n_components=k)
    model.mean_ = mean
    model.components_ = components
    model.variances_ = variances
    model.n_vertices_ = width // 2
    model.n_features_in_ = width
    return model, shift_box
