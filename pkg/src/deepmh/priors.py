"""Evaluable log-priors over sampling targets.

Every prior exposes the same small surface: ``dim`` (parameter dimension),
``log_density`` (unnormalized, ``-inf`` outside the support),
``sample`` (one draw, used for random chain initialization),
``to_target`` (maps parameters to the network-output space; identity for
all priors except the shape prior, which assembles a shape from scores and
shift), and ``block_sizes`` (how proposal scales split across parameter
blocks).

Normalization constants are omitted wherever they cancel in acceptance
ratios, so ``log_density`` is not a log of a normalized density except for
the 1-D KDE, whose natural form is already normalized.
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from .exceptions import ValidationError
from .metrics import silverman_bandwidth
from .pca import PcaShapeModel
from .validation import as_vector, check_positive


class TargetPrior:
    """Shared behaviour for all priors; subclasses set ``dim``."""

    dim: int

    @property
    def block_sizes(self) -> tuple:
        return (self.dim,)

    def log_density(self, value) -> float:
        raise NotImplementedError

    def sample(self, rng) -> np.ndarray:
        raise NotImplementedError

    def to_target(self, params) -> np.ndarray:
        return as_vector(params, self.dim, "params")

    def to_target_batch(self, params) -> np.ndarray:
        return np.asarray(params, dtype=float)


class StandardGaussianPrior(TargetPrior):
    """N(0, I) with the normalization constant omitted: ``-||v||^2 / 2``."""

    def __init__(self, dim: int):
        self.dim = int(dim)
        if self.dim < 1:
            raise ValidationError(f"dim must be >= 1, got {dim!r}")

    def log_density(self, value) -> float:
        v = as_vector(value, self.dim, "value")
        return -0.5 * float(v @ v)

    def sample(self, rng) -> np.ndarray:
        return rng.standard_normal(self.dim)


class UniformBoxPrior(TargetPrior):
    """Axis-aligned box: 0 inside (constant omitted), ``-inf`` outside."""

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise ValidationError("lo and hi must be 1-D arrays of equal length")
        if not np.all(self.lo < self.hi):
            raise ValidationError("every lo must be strictly below its hi")
        self.dim = self.lo.shape[0]

    def log_density(self, value) -> float:
        v = as_vector(value, self.dim, "value")
        inside = np.all(v >= self.lo) and np.all(v <= self.hi)
        return 0.0 if inside else -np.inf

    def sample(self, rng) -> np.ndarray:
        return rng.uniform(self.lo, self.hi)


class Kde1dPrior(TargetPrior):
    """Gaussian-kernel mixture over 1-D support points (a true density)."""

    dim = 1

    def __init__(self, points, bandwidth: float | None = None):
        self.points = as_vector(points, name="points")
        if self.points.shape[0] < 1:
            raise ValidationError("KDE prior needs at least one support point")
        if bandwidth is None:
            bandwidth = silverman_bandwidth(self.points)
        self.bandwidth = check_positive(bandwidth, "bandwidth")

    def log_density(self, value) -> float:
        v = as_vector(value, 1, "value")
        z = (v[0] - self.points) / self.bandwidth
        n = self.points.shape[0]
        return float(
            logsumexp(-0.5 * z * z)
            - np.log(n * self.bandwidth * np.sqrt(2.0 * np.pi))
        )

    def sample(self, rng) -> np.ndarray:
        center = self.points[rng.integers(self.points.shape[0])]
        return np.array([center + self.bandwidth * rng.standard_normal()])


class PcaShapeTargetPrior(TargetPrior):
    """Joint prior over (scores, shift) for a PCA shape model.

    Scores are standard Gaussian; the 2-D shift is uniform over
    ``shift_box`` (rows ``(lo, hi)`` per axis). ``to_target`` assembles the
    proposal shape, which is what the likelihood sees.
    """

    def __init__(self, model: PcaShapeModel, shift_box):
        model._check_fitted()
        self.model = model
        box = np.asarray(shift_box, dtype=float)
        if box.shape != (2, 2):
            raise ValidationError(
                f"shift_box must have shape (2, 2), got {box.shape}"
            )
        if not np.all(box[:, 0] < box[:, 1]):
            raise ValidationError("shift_box lo bounds must be below hi bounds")
        self.shift_box = box
        self.n_components = model.n_components_
        self.dim = self.n_components + 2

    @property
    def block_sizes(self) -> tuple:
        return (self.n_components, 2)

    def log_density(self, value) -> float:
        v = as_vector(value, self.dim, "value")
        z, s = v[: self.n_components], v[self.n_components :]
        inside = np.all(s >= self.shift_box[:, 0]) and np.all(
            s <= self.shift_box[:, 1]
        )
        if not inside:
            return -np.inf
        return -0.5 * float(z @ z)

    def sample(self, rng) -> np.ndarray:
        z = rng.standard_normal(self.n_components)
        s = rng.uniform(self.shift_box[:, 0], self.shift_box[:, 1])
        return np.concatenate([z, s])

    def to_target(self, params) -> np.ndarray:
        v = as_vector(params, self.dim, "params")
        return self.model.shape_from_params(
            v[: self.n_components], v[self.n_components :]
        )

    def to_target_batch(self, params) -> np.ndarray:
        return self.model.shapes_from_params(params)


def central_box(lo, hi, fraction: float = 0.6) -> np.ndarray:
    """The central ``fraction`` of the per-axis interval ``[lo, hi]``.

    Used as the default shift box: a band around each axis midpoint
    covering that fraction of the full extent.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction must lie in (0, 1], got {fraction!r}")
    mid = 0.5 * (lo + hi)
    half = 0.5 * fraction * (hi - lo)
    return np.stack([mid - half, mid + half], axis=1)
