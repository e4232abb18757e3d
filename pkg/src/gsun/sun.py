"""The re-parameterized unified skew-normal distribution.

A law on R^d built from the convolution Y = xi + H U + W, where U is an
m-dimensional standard-scale normal truncated below -tau with correlation
gamma_bar, and W is an independent N(0, psi).  m = 0 is accepted and means
"plain Gaussian", which lets the comparison models share this code path.

All Phi_m evaluations route through numcore.mvn_cdf; log ratios are formed
from the two cdf results so callers can see the attained error bounds.
Explicit matrix inverses are avoided: every A^-1 b is a Cholesky solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import truncmvn
from .errors import IndexOutOfRange, ShapeMismatch, SingularBlock
from .numcore import RngStream, cholesky, mvn_cdf, nearest_spd_jitter, spd_logdet, spd_solve
from .numcore.mvncdf import DEFAULT_BUDGET, MvnCdfResult

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SunParams:
    """Parameter five-tuple (xi, psi, h_mat, tau, gamma_bar)."""

    xi: np.ndarray
    psi: np.ndarray
    h_mat: np.ndarray
    tau: np.ndarray
    gamma_bar: np.ndarray

    def __post_init__(self):
        xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        psi = np.atleast_2d(np.asarray(self.psi, dtype=float))
        tau = np.asarray(self.tau, dtype=float).ravel()
        d = xi.shape[0]
        m = tau.shape[0]
        h = np.asarray(self.h_mat, dtype=float).reshape(d, m)
        gb = np.asarray(self.gamma_bar, dtype=float).reshape(m, m)
        if psi.shape != (d, d):
            raise ShapeMismatch(f"psi must be {d}x{d}, got {psi.shape}")
        cholesky(psi)
        if m > 0:
            if np.max(np.abs(np.diag(gb) - 1.0)) > 1e-8:
                raise ShapeMismatch("gamma_bar must have a unit diagonal")
            cholesky(gb)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "h_mat", h)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "gamma_bar", gb)

    @property
    def dim(self) -> int:
        return self.xi.shape[0]

    @property
    def latent_dim(self) -> int:
        return self.tau.shape[0]

    def is_gaussian(self) -> bool:
        return self.latent_dim == 0 or not np.any(self.h_mat)

    def omega(self) -> np.ndarray:
        """Dispersion of the selection representation: psi + H gamma_bar H^T."""
        if self.latent_dim == 0:
            return self.psi
        return self.psi + self.h_mat @ self.gamma_bar @ self.h_mat.T

    def latent_spec(self) -> truncmvn.TruncMvnSpec:
        return truncmvn.TruncMvnSpec(-self.tau, np.zeros(self.latent_dim), self.gamma_bar)


class QuadResult(NamedTuple):
    """A quadrature-backed value with its attained error bound."""

    value: float
    error_bound: float
    converged: bool


class ConditionalResult(NamedTuple):
    """Conditional law of the first block given the second, plus the
    diagonal rescaling that restores a unit-diagonal latent correlation."""

    params: SunParams
    gamma_diag: np.ndarray


class SunMoments(NamedTuple):
    mean: np.ndarray
    cov: np.ndarray
    mean_se: np.ndarray
    cov_se: np.ndarray


def sample(p: SunParams, count: int, rng: RngStream) -> np.ndarray:
    """Draws as a (dim, count) matrix via the convolution representation."""
    if count < 1:
        raise ShapeMismatch("count must be at least 1")
    chol_psi = cholesky(p.psi)
    w = rng.child("gaussian").normal(size=(count, p.dim)) @ chol_psi.T
    y = p.xi + w
    if p.latent_dim > 0:
        u = truncmvn.sample(p.latent_spec(), count, rng.child("latent"))
        y = y + u @ p.h_mat.T
    return y.T


def _log_mvn_pdf(y, mean, chol_lower):
    dev = y - mean
    z = spd_solve(chol_lower, dev)
    return -0.5 * (len(y) * _LOG_2PI + spd_logdet(chol_lower) + float(dev @ z))


def latent_cdf(p: SunParams, tol=1e-6, rel_tol=1e-4, budget=DEFAULT_BUDGET,
               rng=None) -> MvnCdfResult:
    """Phi_m(tau; 0, gamma_bar) — the normalizing orthant probability."""
    m = p.latent_dim
    return mvn_cdf(p.tau, np.zeros(m), p.gamma_bar, tol=tol, rel_tol=rel_tol,
                   budget=budget, rng=rng)


def logpdf(p: SunParams, y, tol=1e-6, rel_tol=1e-4, budget=DEFAULT_BUDGET,
           rng=None) -> QuadResult:
    """Log density at y with the attained quadrature error bound.

    The bound is on the log scale: the relative errors of the two
    orthant-probability factors added together.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != p.dim:
        raise ShapeMismatch(f"point has dimension {y.shape[0]}, expected {p.dim}")
    chol_om = cholesky(p.omega())
    base = _log_mvn_pdf(y, p.xi, chol_om)
    if p.is_gaussian() and p.latent_dim == 0:
        return QuadResult(base, 0.0, True)
    gh = p.gamma_bar @ p.h_mat.T
    solved = spd_solve(chol_om, np.column_stack([y - p.xi, gh.T]))
    mu = gh @ solved[:, 0]
    sigma = p.gamma_bar - gh @ solved[:, 1:]
    sigma = nearest_spd_jitter(sigma)
    num = mvn_cdf(mu + p.tau, np.zeros(p.latent_dim), sigma, tol=tol,
                  rel_tol=rel_tol, budget=budget, rng=rng)
    den = latent_cdf(p, tol=tol, rel_tol=rel_tol, budget=budget, rng=rng)
    if num.value <= 0.0:
        return QuadResult(-np.inf, np.inf, num.converged and den.converged)
    err = num.error_bound / num.value + den.error_bound / den.value
    value = base + math.log(num.value) - math.log(den.value)
    return QuadResult(value, err, num.converged and den.converged)


def cdf(p: SunParams, x, tol=1e-6, rel_tol=1e-4, budget=DEFAULT_BUDGET,
        rng=None, denominator: MvnCdfResult | None = None) -> QuadResult:
    """P(Y <= x) as the ratio of two Gaussian orthant probabilities.

    ``denominator`` lets callers reuse Phi_m(tau; gamma_bar) across many
    evaluations with the same parameters.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != p.dim:
        raise ShapeMismatch(f"point has dimension {x.shape[0]}, expected {p.dim}")
    m = p.latent_dim
    if m == 0:
        res = mvn_cdf(x, p.xi, p.psi, tol=tol, rel_tol=rel_tol, budget=budget, rng=rng)
        return QuadResult(res.value, res.error_bound, res.converged)
    hg = p.h_mat @ p.gamma_bar
    omega_star = np.block([[p.omega(), -hg], [-hg.T, p.gamma_bar]])
    upper = np.concatenate([x, p.tau])
    center = np.concatenate([p.xi, np.zeros(m)])
    num = mvn_cdf(upper, center, omega_star, tol=tol, rel_tol=rel_tol,
                  budget=budget, rng=rng)
    den = denominator if denominator is not None else latent_cdf(
        p, tol=tol, rel_tol=rel_tol, budget=budget, rng=rng)
    if den.value <= 0.0:
        return QuadResult(np.nan, np.inf, False)
    value = min(1.0, max(0.0, num.value / den.value))
    err = value * (den.error_bound / den.value)
    if num.value > 0:
        err += value * (num.error_bound / num.value)
    else:
        err += num.error_bound / den.value
    return QuadResult(value, err, num.converged and den.converged)


def moments(p: SunParams, draws: int = 10_000, rng: RngStream | None = None) -> SunMoments:
    """Mean and covariance via the convolution identities.

    E(Y) = xi + H E(U) and var(Y) = H var(U) H^T + psi, with the truncated
    moments estimated by Monte Carlo.  The Gaussian case is exact.
    """
    if p.is_gaussian():
        z = np.zeros(p.dim)
        return SunMoments(p.xi.copy(), p.psi.copy(), z, np.zeros_like(p.psi))
    if rng is None:
        raise ShapeMismatch("moments of a skewed law require an RngStream")
    um = truncmvn.moments(p.latent_spec(), draws, rng)
    mean = p.xi + p.h_mat @ um.mean
    cov = p.h_mat @ um.cov @ p.h_mat.T + p.psi
    habs = np.abs(p.h_mat)
    mean_se = habs @ um.mean_se
    cov_se = habs @ um.cov_se @ habs.T
    return SunMoments(mean, cov, mean_se, cov_se)


def _check_indices(idx, d):
    idx = np.asarray(idx, dtype=int).ravel()
    if idx.size == 0:
        raise IndexOutOfRange("index set must be non-empty")
    if np.any(idx < 0) or np.any(idx >= d) or len(set(idx.tolist())) != idx.size:
        raise IndexOutOfRange(f"invalid index set {idx} for dimension {d}")
    return idx


def marginal(p: SunParams, keep) -> SunParams:
    """Marginal law of the kept coordinates; (tau, gamma_bar) are untouched."""
    keep = _check_indices(keep, p.dim)
    return SunParams(p.xi[keep], p.psi[np.ix_(keep, keep)], p.h_mat[keep], p.tau,
                     p.gamma_bar)


def conditional(p: SunParams, first, second, z2) -> ConditionalResult:
    """Law of the first block given the second block equals z2.

    The location uses the correction H_c Gb_c gamma_c H2^T Psi22^-1, which
    is the form consistent with joint = marginal x conditional; the latent
    correlation of the result has a unit diagonal by construction.
    """
    first = _check_indices(first, p.dim)
    second = _check_indices(second, p.dim)
    if np.intersect1d(first, second).size > 0 or first.size + second.size != p.dim:
        raise IndexOutOfRange("first/second must partition the coordinates")
    z2 = np.asarray(z2, dtype=float).ravel()
    if z2.shape[0] != second.size:
        raise ShapeMismatch("z2 length does not match the conditioning block")

    psi11 = p.psi[np.ix_(first, first)]
    psi12 = p.psi[np.ix_(first, second)]
    psi22 = p.psi[np.ix_(second, second)]
    h1 = p.h_mat[first]
    h2 = p.h_mat[second]
    try:
        chol22 = cholesky(psi22)
    except Exception as exc:
        raise SingularBlock(f"conditioning block is not positive definite: {exc}") from None

    dev = z2 - p.xi[second]
    rhs = np.column_stack([dev, h2, psi12.T])
    solved = spd_solve(chol22, rhs)
    b = solved[:, 0]                 # Psi22^-1 (z2 - xi2)
    a = solved[:, 1 : 1 + p.latent_dim]   # Psi22^-1 H2
    c = solved[:, 1 + p.latent_dim :]     # Psi22^-1 Psi21

    psi_c = psi11 - psi12 @ c
    if p.latent_dim == 0:
        params = SunParams(p.xi[first] + psi12 @ b, nearest_spd_jitter(psi_c),
                           np.zeros((first.size, 0)), p.tau, p.gamma_bar)
        return ConditionalResult(params, np.zeros(0))

    chol_gb = cholesky(p.gamma_bar)
    k = spd_solve(chol_gb, np.eye(p.latent_dim)) + h2.T @ a
    k = 0.5 * (k + k.T)
    try:
        chol_k = cholesky(k)
    except Exception as exc:
        raise SingularBlock(f"latent information matrix is singular: {exc}") from None
    gamma_full = spd_solve(chol_k, np.eye(p.latent_dim))
    gamma_full = 0.5 * (gamma_full + gamma_full.T)
    gam = np.sqrt(np.diag(gamma_full))
    gb_c = gamma_full / np.outer(gam, gam)
    np.fill_diagonal(gb_c, 1.0)

    h_eff = h1 - psi12 @ a
    h_c = h_eff * gam[None, :]
    tau_c = (p.tau + gamma_full @ (h2.T @ b)) / gam
    xi_c = p.xi[first] + psi12 @ b + h_eff @ (gamma_full @ (h2.T @ b))
    params = SunParams(xi_c, nearest_spd_jitter(psi_c), h_c, tau_c, gb_c)
    return ConditionalResult(params, gam)
