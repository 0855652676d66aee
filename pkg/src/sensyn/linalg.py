"""Dense symmetric eigendecomposition and spectrum utilities.

The solver is a cyclic Jacobi iteration: the sensitivity matrices handled
here are small (d <= a few hundred) and Jacobi delivers high relative
accuracy with fully deterministic, platform-independent arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError, InputDomainError


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order with matched orthonormal eigenvectors.

    ``eigenvectors[:, j]`` pairs with ``eigenvalues[j]``.  Each eigenvector
    is sign-fixed so that its largest-magnitude component is positive (first
    such index on ties), which keeps repeated runs and cross-method plots
    comparable.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


def sym_eig(a, *, tol_factor: float = 1e-14, max_sweeps: int = 100) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Stops when the off-diagonal Frobenius norm falls below
    ``tol_factor * ||a||_F``.  Raises :class:`InputDomainError` for
    non-finite or asymmetric input.
    """
    a = np.array(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputDomainError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise InputDomainError("matrix entries must be finite")
    if not np.array_equal(a, a.T):
        raise InputDomainError("matrix must be exactly symmetric")

    d = a.shape[0]
    v = np.eye(d)
    if d == 1:
        return _finalize(np.array([a[0, 0]]), v)

    norm = np.linalg.norm(a)
    if norm == 0.0:
        return _finalize(np.zeros(d), v)
    stop = tol_factor * norm

    idx = np.arange(d)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.tril(a, -1) ** 2))
        if off <= stop:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) < 1e-36 * abs(diff):
                    t = apq / diff  # rotation angle below round-off
                else:
                    theta = diff / (2.0 * apq)
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta == 0.0:
                        t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)

                app, aqq = a[p, p], a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0

                rest = idx[(idx != p) & (idx != q)]
                aip = a[rest, p].copy()
                aiq = a[rest, q].copy()
                a[rest, p] = aip - s * (aiq + tau * aip)
                a[rest, q] = aiq + s * (aip - tau * aiq)
                a[p, rest] = a[rest, p]
                a[q, rest] = a[rest, q]

                vip = v[:, p].copy()
                viq = v[:, q].copy()
                v[:, p] = vip - s * (viq + tau * vip)
                v[:, q] = viq + s * (vip - tau * viq)

    return _finalize(np.diag(a).copy(), v)


def _finalize(values: np.ndarray, vectors: np.ndarray) -> SpectralDecomposition:
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        lead = int(np.argmax(np.abs(col)))
        if col[lead] < 0.0:
            vectors[:, j] = -col
    values.setflags(write=False)
    vectors.setflags(write=False)
    return SpectralDecomposition(values, vectors)


def normalized_cumsum(spec: SpectralDecomposition) -> np.ndarray:
    """Running eigenvalue share: entry m-1 is sum(lambda_1..m) / sum(all).

    Eigenvalues that are tiny and negative (round-off of a PSD matrix) are
    clamped to zero so the result is nondecreasing with final entry 1.
    """
    lam = np.maximum(spec.eigenvalues, 0.0)
    total = lam.sum()
    if total <= 0.0:
        raise DegenerateSpectrumError("all-zero spectrum has no normalized cumulative sum")
    cs = np.cumsum(lam)
    return cs / cs[-1]


def select_m(spec: SpectralDecomposition, threshold: float = 0.9) -> int:
    """Smallest m whose normalized cumulative eigenvalue sum strictly exceeds
    ``threshold``; m = d always qualifies for a nonzero spectrum."""
    if not 0.0 <= threshold < 1.0:
        raise InputDomainError("threshold must lie in [0, 1)")
    cs = normalized_cumsum(spec)
    above = np.nonzero(cs > threshold)[0]
    return int(above[0]) + 1
