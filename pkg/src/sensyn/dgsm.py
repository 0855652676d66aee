"""Forward finite-difference gradients and derivative-based sensitivity.

The derivative measure of input i is the mean squared partial derivative
over the input law.  Gradients are forward differences with a shared base
evaluation, d+1 model calls per point; for stochastic models the base and
the shifted evaluations draw independent noise, so noise of scale k inflates
every squared derivative by about 2*k**2/h**2.  That amplification is the
characteristic failure mode of derivative measures on noisy models and is
deliberately left intact.
"""

from __future__ import annotations

import numpy as np

from .errors import InputDomainError
from .models import Model, sample_inputs
from .randkit import RngStream

_BASE, _NOISE = 0, 2


def fd_gradient(model: Model, z, h: float, rng: RngStream | None = None) -> np.ndarray:
    """Forward-difference gradient at a single point: (f(z + h e_i) - f(z))/h."""
    if h <= 0.0:
        raise InputDomainError("finite-difference increment must be positive")
    z = np.asarray(z, dtype=np.float64)
    if z.ndim != 1 or len(z) != model.d:
        raise InputDomainError(f"expected a point of dimension {model.d}")
    noise = rng.substream(_NOISE) if rng is not None else None
    fz = model.evaluate(z, rng=None if noise is None else noise.substream(0))
    g = np.empty(model.d)
    for i in range(model.d):
        zi = z.copy()
        zi[i] += h
        fzi = model.evaluate(zi, rng=None if noise is None else noise.substream(i + 1))
        g[i] = (fzi - fz) / h
        if not np.isfinite(g[i]):
            raise InputDomainError(f"non-finite derivative for input {i + 1}")
    return g


def gradient_matrix(model: Model, n: int, h: float, rng: RngStream) -> np.ndarray:
    """Forward-difference gradients at n sampled points, as an (n, d) array.

    All d partial differences of one point share its base evaluation; every
    evaluation batch draws independent noise for stochastic models.
    """
    if n < 1:
        raise InputDomainError("gradient sampling needs n >= 1")
    if h <= 0.0:
        raise InputDomainError("finite-difference increment must be positive")
    z = sample_inputs(model, n, rng.substream(_BASE))
    noise = rng.substream(_NOISE)
    fz = model.evaluate(z, rng=noise.substream(0))
    g = np.empty((n, model.d))
    for i in range(model.d):
        zi = z.copy()
        zi[:, i] += h
        fzi = model.evaluate(zi, rng=noise.substream(i + 1))
        g[:, i] = (fzi - fz) / h
    if not np.all(np.isfinite(g)):
        bad = int(np.nonzero(~np.all(np.isfinite(g), axis=0))[0][0])
        raise InputDomainError(f"non-finite derivative for input {bad + 1}")
    return g


def dgsm_from_gradients(g: np.ndarray) -> np.ndarray:
    """Mean squared partial derivatives, one value per input."""
    return np.mean(np.asarray(g, dtype=np.float64) ** 2, axis=0)


def dgsm(model: Model, n: int, h: float, rng: RngStream) -> np.ndarray:
    """Derivative-based global sensitivity measure of every input."""
    return dgsm_from_gradients(gradient_matrix(model, n, h, rng))
