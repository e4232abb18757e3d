"""Modified Bessel function of the second kind, as used by Matern kernels."""

from __future__ import annotations

import numpy as np
from scipy.special import kv

from ..errors import DomainError


def bessel_k(order, x):
    """K_nu(x) for non-negative order and x > 0.

    Vectorized over ``x``; raises DomainError for any x <= 0 and for a
    negative order.  Relative accuracy is 1e-9 or better on
    x in [1e-6, 50], order in [0.1, 5].
    """
    if order < 0:
        raise DomainError(f"order must be non-negative, got {order}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_k requires x > 0")
    out = kv(order, x)
    if x.ndim == 0:
        return float(out)
    return out
