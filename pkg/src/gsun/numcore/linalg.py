"""Dense symmetric linear algebra with explicit numerical contracts.

Factorizations are delegated to LAPACK (via numpy); this module owns the
symmetry checks, the jitter-retry policy, and the eigenvector sign fix
that makes spectral decompositions pure functions of their input.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

from ..errors import NoConvergence, NotPositiveDefinite, ShapeMismatch

SYMMETRY_TOL = 1e-10
JITTER_SCALE = 1e-10


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in descending order with sign-fixed orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_symmetric(a, tol=SYMMETRY_TOL):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise ShapeMismatch("matrix is not symmetric within tolerance")
    return a


def cholesky(a) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T == a.

    On failure the factorization is retried once with ``1e-10 * trace/n``
    added to the diagonal before NotPositiveDefinite is raised.
    """
    a = _check_symmetric(a)
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pass
    n = a.shape[0]
    jitter = JITTER_SCALE * np.trace(a) / n
    if jitter <= 0:
        raise NotPositiveDefinite("non-positive trace; matrix cannot be SPD")
    try:
        return np.linalg.cholesky(a + jitter * np.eye(n))
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(
            f"Cholesky failed for {n}x{n} matrix even with jitter {jitter:.3e}"
        ) from None


def sym_eigen(a) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric matrix, descending and sign-fixed.

    The sign fix makes the result deterministic: in each eigenvector the
    first component of largest magnitude is made non-negative.
    """
    a = _check_symmetric(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigensolver did not converge: {exc}") from None
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    flip = v[np.argmax(np.abs(v), axis=0), np.arange(v.shape[1])] < 0
    v[:, flip] *= -1.0
    return SpectralDecomposition(w, v)


def solve_lower(lower, b):
    """Solve L x = b for lower-triangular L."""
    return scipy.linalg.solve_triangular(lower, b, lower=True, check_finite=False)


def spd_solve(chol_lower, b):
    """Solve A x = b given A's lower Cholesky factor (never forms A^-1)."""
    y = scipy.linalg.solve_triangular(chol_lower, b, lower=True, check_finite=False)
    return scipy.linalg.solve_triangular(chol_lower.T, y, lower=False, check_finite=False)


def spd_logdet(chol_lower) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(chol_lower))))


def nearest_spd_jitter(a, max_tries=12):
    """Symmetrize and add escalating diagonal jitter until Cholesky passes."""
    a = 0.5 * (np.asarray(a, dtype=float) + np.asarray(a, dtype=float).T)
    n = a.shape[0]
    base = max(np.trace(a) / n, 1e-12)
    jitter = 0.0
    for k in range(max_tries):
        try:
            np.linalg.cholesky(a + jitter * np.eye(n))
            return a + jitter * np.eye(n)
        except np.linalg.LinAlgError:
            jitter = base * (10.0 ** (k - 10))
    raise NotPositiveDefinite("could not repair matrix to SPD with bounded jitter")
