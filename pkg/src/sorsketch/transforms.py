"""Fast orthonormal transforms with exact, known coherence.

The workhorse is an in-place Walsh-Hadamard butterfly compiled with numba:
log-linear time, unit-stride inner loops, no recursion. After the 1/sqrt(n)
scaling the transform is orthonormal and its own inverse, and every matrix
entry has magnitude exactly 1/sqrt(n) (coherence 1, the best case for row
subsampling). A seeded permutation of the identity is provided as the
opposite extreme: equally orthonormal, but maximally coherent (sqrt(n)), so
subsampled rows see single coordinates instead of spread-out energy.

All functions are pure and reentrant; buffers are only mutated when the
caller hands in a contiguous float64 array.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .rng import stream

__all__ = [
    "MATERIALIZE_LIMIT",
    "WALSH_HADAMARD",
    "IDENTITY_PERMUTED",
    "PowerOfTwoError",
    "MaterializeLimitError",
    "OrthonormalTransform",
    "walsh_hadamard",
    "identity_permuted",
    "is_power_of_two",
    "next_power_of_two",
    "pad_to_power_of_two",
    "fwht_inplace",
    "apply_transform",
    "apply_transform_rows",
    "materialize",
    "coherence",
]

MATERIALIZE_LIMIT = 4096

WALSH_HADAMARD = "walsh_hadamard"
IDENTITY_PERMUTED = "identity_permuted"


class PowerOfTwoError(ValueError):
    """Raised when a butterfly transform gets a non-power-of-two length."""


class MaterializeLimitError(ValueError):
    """Raised when a dense materialization would exceed the size guard."""


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def next_power_of_two(n: int) -> int:
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    return 1 << (n - 1).bit_length()


def pad_to_power_of_two(x: np.ndarray) -> np.ndarray:
    """Zero-pad a vector (or rows of a matrix) to the next power-of-two length."""
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[-1]
    target = next_power_of_two(n)
    if target == n:
        return x
    pad = [(0, 0)] * (x.ndim - 1) + [(0, target - n)]
    return np.pad(x, pad)


@njit(cache=True, nogil=True)
def _butterfly(buf):  # pragma: no cover - compiled
    n = buf.shape[0]
    h = 1
    while h < n:
        step = 2 * h
        for start in range(0, n, step):
            for j in range(start, start + h):
                a = buf[j]
                b = buf[j + h]
                buf[j] = a + b
                buf[j + h] = a - b
        h = step


@njit(cache=True, nogil=True)
def _butterfly_rows(mat):  # pragma: no cover - compiled
    for i in range(mat.shape[0]):
        _butterfly(mat[i])


def _as_f64(x: np.ndarray) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not arr.flags.c_contiguous:
        arr = np.ascontiguousarray(arr)
    return arr


def fwht_inplace(buffer: np.ndarray) -> np.ndarray:
    """Orthonormal Walsh-Hadamard transform of a length-2^k vector.

    Transforms in place when given a contiguous float64 vector, otherwise a
    converted copy is transformed; the transformed array is returned either
    way. Applying the function twice returns the input (the scaled transform
    is symmetric orthonormal).
    """
    buf = _as_f64(buffer)
    if buf.ndim != 1:
        raise ValueError(f"expected a 1-d buffer, got shape {buf.shape}")
    n = buf.shape[0]
    if not is_power_of_two(n):
        raise PowerOfTwoError(f"length must be a power of two, got {n}")
    _butterfly(buf)
    buf *= 1.0 / math.sqrt(n)
    return buf


@dataclass(frozen=True)
class OrthonormalTransform:
    """Square orthonormal map with fast apply and known coherence.

    ``delta_coherence`` is sqrt(n) times the largest entry magnitude of the
    materialized matrix; 1 for the Walsh-Hadamard kind, sqrt(n) for the
    permuted identity. ``seed`` only matters for the permuted identity,
    where it fixes the permutation.
    """

    kind: str
    n: int
    delta_coherence: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (WALSH_HADAMARD, IDENTITY_PERMUTED):
            raise ValueError(f"unknown transform kind {self.kind!r}")
        if self.kind == WALSH_HADAMARD and not is_power_of_two(self.n):
            raise PowerOfTwoError(
                f"walsh_hadamard needs a power-of-two dimension, got {self.n}"
            )
        if self.n < 1:
            raise ValueError(f"dimension must be positive, got {self.n}")

    @property
    def permutation(self) -> np.ndarray | None:
        if self.kind != IDENTITY_PERMUTED:
            return None
        return _cached_permutation(self.n, self.seed)

    def descriptor(self) -> dict:
        d = {"kind": self.kind, "n": self.n}
        if self.kind == IDENTITY_PERMUTED:
            d["seed"] = self.seed
        return d


@functools.lru_cache(maxsize=None)
def _cached_permutation(n: int, seed: int) -> np.ndarray:
    perm = stream(seed, "identity-permutation").permutation(n)
    perm.setflags(write=False)
    return perm


def walsh_hadamard(n: int) -> OrthonormalTransform:
    return OrthonormalTransform(WALSH_HADAMARD, n, 1.0)


def identity_permuted(n: int, seed: int = 0) -> OrthonormalTransform:
    return OrthonormalTransform(IDENTITY_PERMUTED, n, math.sqrt(n), seed=seed)


def transform_from_descriptor(d: dict) -> OrthonormalTransform:
    if d["kind"] == WALSH_HADAMARD:
        return walsh_hadamard(int(d["n"]))
    return identity_permuted(int(d["n"]), seed=int(d.get("seed", 0)))


def apply_transform(t: OrthonormalTransform, x: np.ndarray) -> np.ndarray:
    """Apply the orthonormal map to a length-n vector (input left untouched)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (t.n,):
        raise ValueError(f"expected shape ({t.n},), got {x.shape}")
    if t.kind == WALSH_HADAMARD:
        out = np.array(x)  # fresh contiguous copy
        _butterfly(out)
        out *= 1.0 / math.sqrt(t.n)
        return out
    return x[t.permutation]


def apply_transform_rows(t: OrthonormalTransform, rows: np.ndarray) -> np.ndarray:
    """Apply the map to every row of a (k, n) array."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != t.n:
        raise ValueError(f"expected shape (k, {t.n}), got {rows.shape}")
    if t.kind == WALSH_HADAMARD:
        out = np.array(rows, order="C")  # one fresh contiguous copy
        _butterfly_rows(out)
        out *= 1.0 / math.sqrt(t.n)
        return out
    return rows[:, t.permutation]


def materialize(t: OrthonormalTransform) -> np.ndarray:
    """Dense n-by-n matrix of the transform; column j is the image of e_j."""
    if t.n > MATERIALIZE_LIMIT:
        raise MaterializeLimitError(
            f"n={t.n} exceeds the materialization guard ({MATERIALIZE_LIMIT})"
        )
    if t.kind == WALSH_HADAMARD:
        mat = np.eye(t.n)
        _butterfly_rows(mat)
        mat *= 1.0 / math.sqrt(t.n)
        return mat  # symmetric, so rows == columns
    return np.eye(t.n)[t.permutation]


def coherence(t: OrthonormalTransform) -> float:
    """sqrt(n) times the largest entry magnitude; exact, no materialization."""
    if t.kind == WALSH_HADAMARD:
        return 1.0
    return math.sqrt(t.n)
