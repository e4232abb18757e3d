"""Pure-numpy reference kernels.

These are the fallback implementations of the two hot loops: the
separation-of-variables sweep behind the multivariate normal cdf and the
coordinate-wise Gibbs scan behind truncated-normal sampling.  The compiled
twin in ``_speedups.pyx`` mirrors the arithmetic exactly (same special
functions, same branch structure) so both backends agree to the last few
ulps given identical inputs.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

_TINY = np.finfo(float).tiny
_UMAX = 1.0 - np.finfo(float).epsneg


def trunc_std_normal(a, u):
    """Inverse-cdf draw of a standard normal truncated to (a, inf).

    ``a`` and ``u`` broadcast; u must lie in (0, 1).  For a > 0 the
    complementary (survival) form keeps full precision far in the tail.
    Every returned value strictly exceeds a.
    """
    a = np.asarray(a, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.empty(np.broadcast(a, u).shape)
    a_b = np.broadcast_to(a, out.shape)
    u_b = np.broadcast_to(u, out.shape)
    neg = a_b <= 0.0
    if np.any(neg):
        pa = ndtr(a_b[neg])
        out[neg] = ndtri(np.clip(pa + u_b[neg] * (1.0 - pa), _TINY, _UMAX))
    pos = ~neg
    if np.any(pos):
        sf = ndtr(-a_b[pos])
        out[pos] = -ndtri(np.clip(sf * (1.0 - u_b[pos]), _TINY, _UMAX))
    # support is open on the left; rounding may land exactly on the bound
    low = np.nextafter(a_b, np.inf)
    return np.maximum(out, low)


def mvn_sov_batch(chol, b, gen, shift, k0, count):
    """Sum of separation-of-variables integrand products over lattice points.

    Points k0..k0+count-1 of the shifted Kronecker lattice
    w = |2 frac(k * gen + shift) - 1| are pushed through the sequential
    conditioning recursion for the upper-orthant probability with
    (reordered) Cholesky factor ``chol`` and upper limits ``b``.
    """
    d = b.shape[0]
    k = np.arange(k0, k0 + count, dtype=float)
    e = np.full(count, ndtr(b[0] / chol[0, 0]))
    prod = e.copy()
    if d == 1:
        return float(prod.sum())
    w = np.abs(2.0 * ((k[:, None] * gen[None, :] + shift[None, :]) % 1.0) - 1.0)
    y = np.empty((count, d - 1))
    for i in range(1, d):
        y[:, i - 1] = ndtri(np.clip(w[:, i - 1] * e, _TINY, _UMAX))
        num = b[i] - y[:, :i] @ chol[i, :i]
        e = ndtr(num / chol[i, i])
        prod *= e
    return float(prod.sum())


def gibbs_sweep_block(x, mu, w, csd, lower, u):
    """Run full Gibbs sweeps in place over all chains.

    x : (chains, d) current states, updated in place
    mu : (d,) unconditional mean
    w : (d, d) precision ratios Lambda[i, j] / Lambda[i, i], zero diagonal
    csd : (d,) conditional standard deviations 1 / sqrt(Lambda[i, i])
    lower : (d,) truncation bounds
    u : (sweeps, chains, d) uniforms in (0, 1), consumed in order
    """
    sweeps = u.shape[0]
    d = mu.shape[0]
    for t in range(sweeps):
        for i in range(d):
            m = mu[i] - (x - mu) @ w[i]
            a = (lower[i] - m) / csd[i]
            x[:, i] = m + csd[i] * trunc_std_normal(a, u[t, :, i])
            np.maximum(x[:, i], np.nextafter(lower[i], np.inf), out=x[:, i])
