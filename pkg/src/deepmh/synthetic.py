"""Seeded synthetic regression tasks at desk scale.

Three generators cover the demonstration needs: a two-branch task whose
posterior is genuinely bimodal in part of the input range, a
heteroscedastic curve task whose conditional spread grows away from the
origin, and a linear-factor ellipse shape task for the shape-model
pipeline.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ValidationError
from .validation import check_int_at_least, check_positive

AMBIGUOUS_HALF_WIDTH = 0.3


def bimodal_1d(n: int, noise_std: float = 0.05, seed: int = 0):
    """Two-branch 1-D task: ``y = s * (1 + x^2) + eps``.

    For ``|x| < 0.3`` the branch sign ``s`` is +1 or -1 with equal
    probability, so the input does not determine the output there; outside
    that band ``s`` is always +1. Returns ``(X, Y)`` with shapes (n, 1).
    """
    check_int_at_least(n, 1, "n")
    check_positive(noise_std, "noise_std", strict=False)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=n)
    sign = np.where(
        np.abs(x) < AMBIGUOUS_HALF_WIDTH,
        rng.choice([-1.0, 1.0], size=n),
        1.0,
    )
    y = sign * (1.0 + x * x) + noise_std * rng.standard_normal(n)
    return x[:, None], y[:, None]


def hetero_mean(x):
    """Conditional mean of the heteroscedastic task."""
    x = np.asarray(x, dtype=float)
    return x + x**3


def hetero_scale(x, noise_std: float):
    """Conditional noise scale of the heteroscedastic task; grows with |x|."""
    x = np.asarray(x, dtype=float)
    return noise_std * (0.05 + np.abs(x))


def heteroscedastic_1d(n: int, noise_std: float = 0.3, seed: int = 0):
    """1-D curve task with input-dependent noise: ``y = x + x^3 + s(x) eps``.

    The noise scale ``s(x) = noise_std * (0.05 + |x|)`` makes ground-truth
    predictive spread a monotone function of ``|x|``. Returns ``(X, Y)``
    with shapes (n, 1).
    """
    check_int_at_least(n, 1, "n")
    check_positive(noise_std, "noise_std", strict=False)
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=n)
    y = hetero_mean(x) + hetero_scale(x, noise_std) * rng.standard_normal(n)
    return x[:, None], y[:, None]


def _ellipse_basis(n_vertices: int, n_factors: int) -> np.ndarray:
    """Orthogonal-enough linear factor basis, one (2V,) column per factor.

    Factors: overall scale, aspect, diagonal shift, then radial boundary
    harmonics. All shape variation is linear in the coefficients, so the
    centered training matrix has rank ``n_factors``.
    """
    theta = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    cos_t, sin_t = np.cos(theta), np.sin(theta)

    def interleave(xs, ys):
        out = np.empty(2 * n_vertices)
        out[0::2] = xs
        out[1::2] = ys
        return out

    columns = [
        interleave(cos_t, sin_t),                      # scale
        interleave(cos_t, -sin_t),                     # aspect
        interleave(np.ones(n_vertices), np.ones(n_vertices)) / np.sqrt(2.0),
    ]
    harmonic = 2
    while len(columns) < n_factors:
        columns.append(interleave(np.cos(harmonic * theta) * cos_t,
                                  np.cos(harmonic * theta) * sin_t))
        if len(columns) < n_factors:
            columns.append(interleave(np.sin(harmonic * theta) * cos_t,
                                      np.sin(harmonic * theta) * sin_t))
        harmonic += 1
    basis = np.stack(columns[:n_factors], axis=1)
    rank = np.linalg.matrix_rank(basis)
    if rank < n_factors:
        raise ValidationError(
            f"{n_factors} factors need more vertices: basis rank is only "
            f"{rank} with n_vertices={n_vertices}"
        )
    return basis


ELLIPSE_CENTER = 2.0
_COEF_SCALES = {"scale": 0.25, "aspect": 0.2, "shift": 0.5, "harmonic": 0.08}


def ellipse_shapes(
    n: int,
    n_vertices: int = 8,
    n_factors: int = 3,
    noise_std: float = 0.02,
    seed: int = 0,
):
    """Ellipse-like polygon shapes with a linear generative model.

    Each shape is a unit circle around (2, 2) plus ``n_factors`` random
    linear deformations (scale, aspect, diagonal shift, boundary
    harmonics). Inputs are the vertex distances from the origin corrupted
    by Gaussian noise, so shapes are only noisily identifiable from
    features. Returns ``(X, Y)`` with shapes (n, V) and (n, 2V); Y rows
    interleave vertex coordinates (x0, y0, x1, y1, ...).
    """
    check_int_at_least(n, 1, "n")
    check_int_at_least(n_vertices, 3, "n_vertices")
    check_int_at_least(n_factors, 1, "n_factors")
    check_positive(noise_std, "noise_std", strict=False)
    basis = _ellipse_basis(n_vertices, n_factors)

    theta = 2.0 * np.pi * np.arange(n_vertices) / n_vertices
    base = np.empty(2 * n_vertices)
    base[0::2] = ELLIPSE_CENTER + np.cos(theta)
    base[1::2] = ELLIPSE_CENTER + np.sin(theta)

    scales = np.full(n_factors, _COEF_SCALES["harmonic"])
    for i, name in enumerate(("scale", "aspect", "shift")):
        if i < n_factors:
            scales[i] = _COEF_SCALES[name]

    rng = np.random.default_rng(seed)
    coefs = rng.uniform(-1.0, 1.0, size=(n, n_factors)) * scales
    shapes = base + coefs @ basis.T

    radii = np.hypot(shapes[:, 0::2], shapes[:, 1::2])
    features = radii + noise_std * rng.standard_normal(radii.shape)
    return features, shapes
