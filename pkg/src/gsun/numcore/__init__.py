"""Numerical foundations: linear algebra, special functions, rng, mvn cdf."""

from .bessel import bessel_k
from .linalg import (
    SpectralDecomposition,
    cholesky,
    nearest_spd_jitter,
    spd_logdet,
    spd_solve,
    sym_eigen,
)
from .mvncdf import MvnCdfResult, bvn_cdf, mvn_cdf
from .rng import RngStream

__all__ = [
    "MvnCdfResult",
    "RngStream",
    "SpectralDecomposition",
    "bessel_k",
    "bvn_cdf",
    "cholesky",
    "mvn_cdf",
    "nearest_spd_jitter",
    "spd_logdet",
    "spd_solve",
    "sym_eigen",
]
