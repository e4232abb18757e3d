"""Skew-normal spatial processes with amortized neural estimation.

Subpackages and modules
-----------------------
numcore   linear algebra, Bessel K, random streams, multivariate normal cdf
truncmvn  truncated multivariate normal sampling and moments
sun       the re-parameterized unified skew-normal distribution
process   the spatial process: Matern structure, simulation, kriging
pitzoo    Gaussian / Tukey comparison models and PIT diagnostics
nn        reverse-mode autodiff engine and network layers
estimator graph construction, the attention estimator, training, UQ
cli       batch command-line front end
"""

from ._kernels import HAVE_COMPILED, backend_name

__version__ = "0.1.0"

__all__ = ["HAVE_COMPILED", "backend_name", "__version__"]
