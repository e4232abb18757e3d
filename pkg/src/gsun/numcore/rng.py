"""Reproducible random-number streams.

Streams are keyed by a 64-bit seed plus a hierarchical name path; the key
feeds a counter-based Philox generator, so identical (seed, path) pairs
replay identical draws and distinct paths never overlap.  A stream is
single-owner: parallel consumers must each hold their own child stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

ALGORITHM = "philox4x64"


def _derive_key(seed: int, path: str) -> np.ndarray:
    digest = hashlib.sha256(f"{seed}:{path}".encode()).digest()
    return np.frombuffer(digest[:16], dtype=np.uint64)


class RngStream:
    """A named, counter-based random stream.

    Parameters
    ----------
    seed : int
        64-bit master seed shared by every stream of one run.
    path : str
        Stream name; children extend it with "/" separators.
    """

    __slots__ = ("seed", "path", "_gen")

    def __init__(self, seed: int, path: str = "root"):
        self.seed = int(seed)
        self.path = path
        self._gen = np.random.Generator(np.random.Philox(key=_derive_key(self.seed, path)))

    @property
    def algorithm(self) -> str:
        return ALGORITHM

    def child(self, name) -> "RngStream":
        """Split off an independent stream; `name` may be any printable value."""
        return RngStream(self.seed, f"{self.path}/{name}")

    # thin wrappers over the owned generator -------------------------------
    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def open_uniform(self, size=None):
        """Uniform draws guaranteed inside the open interval (0, 1)."""
        u = self._gen.random(size)
        tiny = np.finfo(float).tiny
        return np.clip(u, tiny, 1.0 - np.finfo(float).epsneg)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def choice(self, a, size=None, replace=True):
        return self._gen.choice(a, size=size, replace=replace)

    def permutation(self, x):
        return self._gen.permutation(x)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path!r})"
