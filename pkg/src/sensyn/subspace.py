"""Gradient and finite-slope sensitivity matrices and their scores.

Two symmetric PSD matrices are estimated here:

* the gradient outer-product matrix (AS), averaging ``grad f grad f'`` over
  sampled points, with forward-difference gradients; and
* the finite-slope matrix (GAS), averaging outer products of difference
  quotients ``(f(v_i, z_-i) - f(z)) / (v_i - z_i)`` where one coordinate at a
  time is replaced by a fresh draw.

Scores attribute subspace energy back to inputs: the score of input i over
the leading m eigenpairs is ``sum_j<=m lambda_j * u_ij**2``; at m = d it
reproduces the matrix diagonal.

Two implementation choices make the slope matrix usable beyond smooth
noise-free models:

* ``slope_window``: the (base, freeze) coordinate pair of each quotient is
  drawn from the product law conditioned on a minimum separation (a fixed
  fraction of the marginal's scale).  Raw quotients have heavy tails whenever
  the integrand does not smooth out as the pair coincides (discontinuous
  response, evaluation noise); a separation floor bounds the quotient
  denominators while leaving multilinear slopes untouched and quadratic
  second moments exactly unbiased under normal marginals (the pair midpoint
  is independent of the pair gap).
* evaluation noise is drawn once per replicate and shared by the replicate's
  evaluations, so common-mode noise cancels inside each difference quotient.
  This is what keeps the slope matrix stable on stochastic models while
  derivative measures degrade.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dgsm import gradient_matrix
from .errors import InputDomainError
from .linalg import SpectralDecomposition, select_m, sym_eig
from .models import Model, sample_inputs
from .randkit import RngStream

DEFAULT_SLOPE_WINDOW = 0.35
_COINCIDENT_TOL = 1e-12

_BASE, _FREEZE, _NOISE, _REDRAW = 0, 1, 2, 3


@dataclass(frozen=True)
class SubspaceResult:
    """A sensitivity matrix with its eigendecomposition and chosen rank."""

    kind: str  # "AS" or "GAS"
    matrix: np.ndarray
    spectrum: SpectralDecomposition
    m_selected: int

    @property
    def d(self) -> int:
        return self.spectrum.dim

    def scores(self, m: int | None = None) -> np.ndarray:
        """Per-input scores over the leading ``m`` eigenpairs (default: the
        selected m)."""
        return scores(self.spectrum, self.m_selected if m is None else m)


def scores(spec: SpectralDecomposition, m: int) -> np.ndarray:
    """Energy of each input over the top ``m`` eigenpairs."""
    if not 1 <= m <= spec.dim:
        raise InputDomainError(f"m must lie in 1..{spec.dim}")
    u = spec.eigenvectors[:, :m]
    return (u * u) @ spec.eigenvalues[:m]


def _mean_outer(d_mat: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """(1/n) * sum of row outer products, accumulated in a fixed order.

    Chunked einsum keeps the reduction off multithreaded BLAS paths so the
    result is bitwise reproducible across thread counts.
    """
    n, d = d_mat.shape
    acc = np.zeros((d, d))
    for start in range(0, n, chunk):
        block = d_mat[start:start + chunk]
        acc += np.einsum("ni,nj->ij", block, block)
    return acc / n


def finite_slope(model: Model, v, z, rng: RngStream) -> np.ndarray:
    """Vector of one-coordinate difference quotients at a single point pair.

    Component i is ``(f(v_i, z_-i) - f(z)) / (v_i - z_i)``.  Coordinates of
    ``v`` closer to ``z`` than 1e-12 of the marginal scale are resampled
    from their marginal (at most 100 retries each).  For stochastic models
    every evaluation draws independent noise.
    """
    z = np.asarray(z, dtype=np.float64)
    v = np.array(v, dtype=np.float64)
    if z.shape != (model.d,) or v.shape != (model.d,):
        raise InputDomainError(f"expected points of dimension {model.d}")
    resample = rng.substream(_REDRAW)
    for i, dist in enumerate(model.marginals):
        tol = _COINCIDENT_TOL * dist.scale
        retries = 0
        stream = resample.substream(i)
        while abs(v[i] - z[i]) < tol:
            if retries >= 100:
                raise InputDomainError(
                    f"could not separate coordinate {i + 1} from the base point")
            v[i] = float(dist.inv_cdf(stream.uniforms(1))[0])
            retries += 1
    noise = rng.substream(_NOISE)
    fz = model.evaluate(z, rng=noise.substream(0))
    out = np.empty(model.d)
    for i in range(model.d):
        zi = z.copy()
        zi[i] = v[i]
        fvi = model.evaluate(zi, rng=noise.substream(i + 1))
        out[i] = (fvi - fz) / (v[i] - z[i])
    return out


def estimate_c_gas(model: Model, m1: int, m2: int, rng: RngStream,
                   slope_window: float = DEFAULT_SLOPE_WINDOW) -> np.ndarray:
    """Monte Carlo estimate of the finite-slope sensitivity matrix.

    Averages ``m1 * m2`` outer products of slope vectors: ``m1`` base points,
    each paired with ``m2`` fresh freeze vectors.  One base evaluation is
    shared by the d quotients of a replicate (d+1 calls), except where the
    separation floor forces a redrawn coordinate pair (two extra calls for
    that coordinate).  Stochastic models draw one noise variate per base
    point, shared by all of its evaluations.
    """
    if m1 < 1 or m2 < 1:
        raise InputDomainError("sample sizes m1 and m2 must be at least 1")
    if not 0.0 <= slope_window < 0.9:
        raise InputDomainError("slope_window must lie in [0, 0.9)")

    d = model.d
    z = sample_inputs(model, m1, rng.substream(_BASE))
    eps = None
    if model.noise_scale > 0.0:
        eps = rng.substream(_NOISE).standard_normals(m1)
    fz = model.evaluate(z, noise=eps)

    gaps = np.array([max(slope_window * dist.scale, _COINCIDENT_TOL * dist.scale)
                     for dist in model.marginals])
    acc = np.zeros((d, d))
    freeze_root = rng.substream(_FREEZE)
    redraw_root = rng.substream(_REDRAW)
    slopes = np.empty((m1, d))
    for j in range(m2):
        v = sample_inputs(model, m1, freeze_root.substream(j))
        redraw_j = redraw_root.substream(j)
        for i in range(d):
            dist = model.marginals[i]
            a = z[:, i].copy()
            b = v[:, i]
            bad = np.abs(b - a) < gaps[i]
            stream = redraw_j.substream(i)
            rounds = 0
            while bad.any():
                if rounds >= 10_000:
                    raise InputDomainError(
                        f"could not separate coordinate {i + 1}; "
                        "slope_window too large for this marginal")
                nb = int(bad.sum())
                a[bad] = dist.inv_cdf(stream.uniforms(nb))
                b[bad] = dist.inv_cdf(stream.uniforms(nb))
                bad = np.abs(b - a) < gaps[i]
                rounds += 1

            zb = z.copy()
            zb[:, i] = b
            fb = model.evaluate(zb, noise=eps)
            fa = fz
            redrawn = a != z[:, i]
            if redrawn.any():
                za = z[redrawn].copy()
                za[:, i] = a[redrawn]
                fa = fz.copy()
                fa[redrawn] = model.evaluate(
                    za, noise=None if eps is None else eps[redrawn])
            slopes[:, i] = (fb - fa) / (b - a)
        acc += _mean_outer(slopes)
    return acc / m2


def c_as_from_gradients(g: np.ndarray) -> np.ndarray:
    """Gradient outer-product matrix from precomputed gradient samples."""
    return _mean_outer(np.asarray(g, dtype=np.float64))


def estimate_c_as(model: Model, n: int, h: float, rng: RngStream) -> np.ndarray:
    """Monte Carlo estimate of the gradient outer-product matrix."""
    return c_as_from_gradients(gradient_matrix(model, n, h, rng))


def subspace_analysis(model: Model, kind: str, rng: RngStream, *,
                      n: int = 10_000, m2: int = 1, h: float = 1e-3,
                      threshold: float = 0.9,
                      slope_window: float = DEFAULT_SLOPE_WINDOW) -> SubspaceResult:
    """Estimate one sensitivity matrix, decompose it, and pick its rank by
    the cumulative-eigenvalue rule."""
    kind = kind.upper()
    if kind == "AS":
        matrix = estimate_c_as(model, n, h, rng)
    elif kind == "GAS":
        matrix = estimate_c_gas(model, n, m2, rng, slope_window=slope_window)
    else:
        raise InputDomainError("kind must be 'AS' or 'GAS'")
    spectrum = sym_eig(matrix)
    return SubspaceResult(kind=kind, matrix=matrix, spectrum=spectrum,
                          m_selected=select_m(spectrum, threshold))
