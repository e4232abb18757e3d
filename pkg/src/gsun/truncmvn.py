"""Sampling and moments for normals truncated below a componentwise bound.

The support is the open orthant {w : w > lower}.  Sampling auto-selects
between vectorized rejection (when the acceptance probability is at least
1e-3), an exact inverse-cdf product sampler (diagonal covariance), and
coordinate-wise Gibbs with burn-in 500 and thinning 5 otherwise.  Every
draw satisfies the support constraint strictly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import AcceptanceTooLow, NotPositiveDefinite, ShapeMismatch
from .numcore import RngStream, cholesky, mvn_cdf, nearest_spd_jitter, spd_solve

BURN_IN = 500
THINNING = 5
REJECTION_MIN_ACCEPTANCE = 1e-3
_MAX_CHAINS = 32
_SWEEP_BLOCK = 256


@dataclass(frozen=True)
class TruncMvnSpec:
    """A normal N(mean, cov) conditioned on every coordinate exceeding lower."""

    lower: np.ndarray
    mean: np.ndarray
    cov: np.ndarray
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = np.atleast_2d(np.asarray(self.cov, dtype=float))
        d = lower.shape[0]
        if mean.shape != (d,) or cov.shape != (d, d):
            raise ShapeMismatch(
                f"inconsistent dimensions: lower {lower.shape}, mean {mean.shape}, cov {cov.shape}"
            )
        chol = cholesky(cov)  # raises NotPositiveDefinite on bad input
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_chol", chol)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def is_diagonal(self) -> bool:
        off = self.cov - np.diag(np.diag(self.cov))
        return not np.any(off)


class TruncMvnMoments(NamedTuple):
    mean: np.ndarray
    cov: np.ndarray
    mean_se: np.ndarray
    cov_se: np.ndarray


def acceptance_probability(spec: TruncMvnSpec, tol=1e-3, budget=40_000) -> float:
    """P(X > lower) for the untruncated law, via the mvn cdf of -X."""
    res = mvn_cdf(-spec.lower, -spec.mean, spec.cov, tol=tol, budget=budget, rel_tol=0.05)
    return res.value


def _sample_diagonal(spec, count, rng):
    sd = np.sqrt(np.diag(spec.cov))
    a = (spec.lower - spec.mean) / sd
    u = rng.open_uniform(size=(count, spec.dim))
    return spec.mean + sd * _kernels.trunc_std_normal(a, u)


def _sample_rejection(spec, count, rng, acc):
    d = spec.dim
    out = np.empty((count, d))
    have = 0
    # cap total proposals at ~50x the expectation to guarantee termination
    proposals_left = int(50 * count / max(acc, 1e-6)) + 10_000
    while have < count:
        batch = min(int(1.2 * (count - have) / max(acc, 1e-6)) + 64, 4_000_000)
        batch = min(batch, proposals_left)
        if batch <= 0:
            raise AcceptanceTooLow(
                f"rejection sampler exhausted its proposal budget (acceptance ~{acc:.2e})"
            )
        z = rng.normal(size=(batch, d))
        x = spec.mean + z @ spec._chol.T
        keep = x[np.all(x > spec.lower, axis=1)]
        take = min(count - have, keep.shape[0])
        out[have : have + take] = keep[:take]
        have += take
        proposals_left -= batch
    return out


def _gibbs_setup(spec):
    d = spec.dim
    prec = spd_solve(spec._chol, np.eye(d))
    prec = 0.5 * (prec + prec.T)
    diag = np.diag(prec).copy()
    if np.any(diag <= 0):
        raise NotPositiveDefinite("precision matrix has non-positive diagonal")
    w = prec / diag[:, None]
    np.fill_diagonal(w, 0.0)
    csd = 1.0 / np.sqrt(diag)
    return np.ascontiguousarray(w), csd


def _sample_gibbs(spec, count, rng):
    d = spec.dim
    w, csd = _gibbs_setup(spec)
    chains = min(count, _MAX_CHAINS)
    per_chain = -(-count // chains)
    sd = np.sqrt(np.diag(spec.cov))
    x0 = np.maximum(spec.mean, spec.lower + 0.5 * sd)
    x = np.tile(x0, (chains, 1))
    total_sweeps = BURN_IN + THINNING * per_chain
    out = np.empty((chains * per_chain, d))
    kept = 0
    done_sweeps = 0
    while done_sweeps < total_sweeps:
        block = min(_SWEEP_BLOCK, total_sweeps - done_sweeps)
        u = rng.open_uniform(size=(block, chains, d))
        for t in range(block):
            _kernels.gibbs_sweep_block(x, spec.mean, w, csd, spec.lower, u[t : t + 1])
            done_sweeps += 1
            post = done_sweeps - BURN_IN
            if post > 0 and post % THINNING == 0:
                out[kept : kept + chains] = x
                kept += chains
    return out[:count]


def sample(spec: TruncMvnSpec, count: int, rng: RngStream) -> np.ndarray:
    """Draw ``count`` rows from the truncated law; shape (count, dim)."""
    if count < 1:
        raise ShapeMismatch("count must be at least 1")
    if spec.is_diagonal():
        draws = _sample_diagonal(spec, count, rng.child("diag"))
    else:
        acc = acceptance_probability(spec)
        if acc >= REJECTION_MIN_ACCEPTANCE:
            draws = _sample_rejection(spec, count, rng.child("reject"), acc)
        else:
            draws = _sample_gibbs(spec, count, rng.child("gibbs"))
    if not np.all(draws > spec.lower):
        raise AssertionError("internal error: a draw violated the support constraint")
    return draws


def moments(spec: TruncMvnSpec, draws: int, rng: RngStream) -> TruncMvnMoments:
    """Monte Carlo mean and covariance with standard errors.

    The returned covariance is symmetrized and jitter-repaired so that it
    always passes Cholesky.
    """
    if draws < 10_000:
        raise ShapeMismatch("moment estimation requires at least 1e4 draws")
    x = sample(spec, draws, rng)
    mean = x.mean(axis=0)
    c = x - mean
    cov = (c.T @ c) / (draws - 1)
    cov = nearest_spd_jitter(cov)
    mean_se = c.std(axis=0, ddof=1) / math.sqrt(draws)
    c2 = c * c
    second = (c2.T @ c2) / draws
    cov_se = np.sqrt(np.maximum(second - cov * cov, 0.0) / draws)
    return TruncMvnMoments(mean, cov, mean_se, cov_se)
