"""Seeded sketching operators: signed subsampled orthonormal rows vs dense Gaussian.

The structured operator multiplies the input by a random sign diagonal,
applies a fast orthonormal transform, keeps m uniformly sampled rows, and
rescales by sqrt(n/m) so the squared norm is preserved in expectation. The
Gaussian operator is the dense baseline with i.i.d. N(0, 1/m) entries. Both
are reconstructed bit-for-bit from (kind, n, m, seed): operators are stored
structurally and only densified for small oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import transforms
from .rng import stream
from .transforms import (
    IDENTITY_PERMUTED,
    WALSH_HADAMARD,
    OrthonormalTransform,
    _butterfly,
    _butterfly_rows,
)

__all__ = [
    "SORS",
    "GAUSSIAN",
    "SketchOperator",
    "build_sors",
    "build_gaussian",
    "apply",
    "apply_rows",
    "materialize_sketch",
    "descriptor",
    "from_descriptor",
]

SORS = "sors"
GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class SketchOperator:
    """Immutable m-by-n sketching map, fully determined by its descriptor.

    For the structured kind, ``row_indices`` are the sampled transform rows,
    ``signs`` the +-1 diagonal, and ``scale`` = sqrt(n/m). The Gaussian kind
    stores its dense matrix directly.
    """

    kind: str
    n: int
    m: int
    seed: int
    replacement: bool = True
    transform: OrthonormalTransform | None = None
    row_indices: np.ndarray | None = None
    signs: np.ndarray | None = None
    scale: float = 1.0
    dense: np.ndarray | None = None


def build_sors(
    transform: OrthonormalTransform,
    m: int,
    seed: int,
    replacement: bool = True,
) -> SketchOperator:
    """Subsample m rows of the signed transform, uniformly at random.

    ``replacement=True`` draws the rows i.i.d.; ``replacement=False`` draws
    distinct rows, which is never worse in practice and makes m = n an exact
    isometry.
    """
    n = transform.n
    if not 1 <= m <= n:
        raise ValueError(f"sketch dimension m={m} out of range [1, {n}]")
    row_rng = stream(seed, "sors-rows")
    if replacement:
        rows = row_rng.integers(0, n, size=m, dtype=np.int64)
    else:
        rows = row_rng.choice(n, size=m, replace=False).astype(np.int64)
    signs = stream(seed, "sors-signs").integers(0, 2, size=n, dtype=np.int64) * 2 - 1
    return SketchOperator(
        kind=SORS,
        n=n,
        m=m,
        seed=seed,
        replacement=replacement,
        transform=transform,
        row_indices=rows,
        signs=signs.astype(np.float64),
        scale=math.sqrt(n / m),
    )


def build_gaussian(n: int, m: int, seed: int) -> SketchOperator:
    """Dense baseline with i.i.d. N(0, 1/m) entries derived from the seed."""
    if m < 1:
        raise ValueError(f"sketch dimension m={m} must be positive")
    if n < 1:
        raise ValueError(f"ambient dimension n={n} must be positive")
    dense = stream(seed, "gaussian-entries").standard_normal((m, n))
    dense *= 1.0 / math.sqrt(m)
    return SketchOperator(kind=GAUSSIAN, n=n, m=m, seed=seed, dense=dense)


def apply(op: SketchOperator, x: np.ndarray) -> np.ndarray:
    """Sketch one vector; O(n log n + m) for the structured kind."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (op.n,):
        raise ValueError(f"expected shape ({op.n},), got {x.shape}")
    if op.kind == GAUSSIAN:
        return op.dense @ x
    t = op.transform
    z = op.signs * x
    if t.kind == WALSH_HADAMARD:
        _butterfly(z)
        return z[op.row_indices] * (op.scale / math.sqrt(op.n))
    # permuted identity: row i of the transform reads coordinate perm[i]
    return z[t.permutation[op.row_indices]] * op.scale


def apply_rows(op: SketchOperator, xs: np.ndarray) -> np.ndarray:
    """Sketch every row of a (k, n) array; returns (k, m)."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != op.n:
        raise ValueError(f"expected shape (k, {op.n}), got {xs.shape}")
    if op.kind == GAUSSIAN:
        return xs @ op.dense.T
    t = op.transform
    z = np.ascontiguousarray(xs * op.signs)
    if t.kind == WALSH_HADAMARD:
        _butterfly_rows(z)
        return z[:, op.row_indices] * (op.scale / math.sqrt(op.n))
    return z[:, t.permutation[op.row_indices]] * op.scale


def materialize_sketch(op: SketchOperator) -> np.ndarray:
    """Dense m-by-n matrix agreeing with ``apply``; guarded to n <= 4096."""
    if op.n > transforms.MATERIALIZE_LIMIT:
        raise transforms.MaterializeLimitError(
            f"n={op.n} exceeds the materialization guard ({transforms.MATERIALIZE_LIMIT})"
        )
    if op.kind == GAUSSIAN:
        return op.dense.copy()
    fmat = transforms.materialize(op.transform)
    return (fmat[op.row_indices] * op.signs[np.newaxis, :]) * op.scale


def descriptor(op: SketchOperator) -> dict:
    """JSON-ready description sufficient for bit-exact reconstruction."""
    d = {"kind": op.kind, "n": op.n, "m": op.m, "seed": op.seed}
    if op.kind == SORS:
        d["replacement"] = op.replacement
        d["transform"] = op.transform.descriptor()
    return d


def from_descriptor(d: dict) -> SketchOperator:
    if d["kind"] == GAUSSIAN:
        return build_gaussian(int(d["n"]), int(d["m"]), int(d["seed"]))
    t = transforms.transform_from_descriptor(d["transform"])
    return build_sors(t, int(d["m"]), int(d["seed"]), replacement=bool(d["replacement"]))
