"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the numpy
reference implementation is the fallback.  Set ``GSUN_KERNELS=fallback``
to force the reference path (used by the benchmark and equivalence tests).
"""

import os

from . import _ref

if os.environ.get("GSUN_KERNELS", "").lower() == "fallback":
    _impl = _ref
    HAVE_COMPILED = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        _impl = _ref
        HAVE_COMPILED = False

mvn_sov_batch = _impl.mvn_sov_batch
gibbs_sweep_block = _impl.gibbs_sweep_block
trunc_std_normal = _ref.trunc_std_normal


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "fallback"
