"""Test-set families, Gaussian mean width, and embedding-dimension calculators.

A set family is one of four variants with closed-form support functions:

* ``finite_points``: an explicit list of vectors.
* ``sparse_unit``: unit vectors with at most s nonzeros.
* ``subspace_ball``: the unit ball of a k-dimensional subspace.
* ``l1_ball``: the scaled cross-polytope of radius r.

Each variant exposes an exact sup of <g, v> over the set, a membership test,
a point sampler, and its maximum Euclidean norm. The mean width is estimated
by plain Monte Carlo over standard Gaussian draws; the estimator is 1-
Lipschitz per draw, so the reported standard error is honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .parallel import pmap
from .rng import stream

__all__ = [
    "FINITE_POINTS",
    "SPARSE_UNIT",
    "SUBSPACE_BALL",
    "L1_BALL",
    "SetFamily",
    "WidthEstimate",
    "finite_points",
    "sparse_unit",
    "subspace_ball",
    "l1_ball",
    "sup_gaussian",
    "width_estimate",
    "max_norm",
    "sample_point",
    "extreme_points",
    "contains",
    "family_descriptor",
    "family_from_descriptor",
    "gordon_bound",
    "sors_bound",
]

FINITE_POINTS = "finite_points"
SPARSE_UNIT = "sparse_unit"
SUBSPACE_BALL = "subspace_ball"
L1_BALL = "l1_ball"

_WIDTH_BLOCK = 4096  # trials per RNG block; fixed so results ignore worker count


@dataclass(frozen=True)
class SetFamily:
    variant: str
    n: int
    points: np.ndarray | None = None  # finite_points: (p, n)
    s: int | None = None  # sparse_unit
    basis: np.ndarray | None = None  # subspace_ball: (n, k), orthonormal columns
    radius: float | None = None  # l1_ball


@dataclass(frozen=True)
class WidthEstimate:
    omega_hat: float
    stderr: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "omega_hat": self.omega_hat,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
        }


def finite_points(points: np.ndarray) -> SetFamily:
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        raise ValueError("finite_points needs at least one point")
    return SetFamily(FINITE_POINTS, n=pts.shape[1], points=pts)


def sparse_unit(n: int, s: int) -> SetFamily:
    if not 1 <= s <= n:
        raise ValueError(f"sparsity s={s} out of range [1, {n}]")
    return SetFamily(SPARSE_UNIT, n=n, s=s)


def subspace_ball(basis: np.ndarray) -> SetFamily:
    b = np.asarray(basis, dtype=np.float64)
    if b.ndim != 2:
        raise ValueError(f"basis must be (n, k), got shape {b.shape}")
    gram = b.T @ b
    if not np.allclose(gram, np.eye(b.shape[1]), atol=1e-10):
        raise ValueError("basis columns must be orthonormal to 1e-10")
    return SetFamily(SUBSPACE_BALL, n=b.shape[0], basis=b)


def l1_ball(n: int, radius: float) -> SetFamily:
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return SetFamily(L1_BALL, n=n, radius=float(radius))


def _check_dim(family: SetFamily, g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (family.n,):
        raise ValueError(f"expected shape ({family.n},), got {g.shape}")
    return g


def sup_gaussian(family: SetFamily, g: np.ndarray) -> float:
    """Exact supremum of <g, v> over the family.

    Closed forms per variant: max dot product over finite points; Euclidean
    norm of the s largest-magnitude entries (ties to the lowest index) for
    sparse unit vectors; norm of the subspace projection; radius times the
    largest entry magnitude for the l1 ball.
    """
    g = _check_dim(family, g)
    if family.variant == FINITE_POINTS:
        return float((family.points @ g).max())
    if family.variant == SPARSE_UNIT:
        order = np.argsort(-np.abs(g), kind="stable")[: family.s]
        return float(np.linalg.norm(g[order]))
    if family.variant == SUBSPACE_BALL:
        return float(np.linalg.norm(family.basis.T @ g))
    return float(family.radius * np.abs(g).max())


def _sup_rows(family: SetFamily, gs: np.ndarray) -> np.ndarray:
    """Vectorized sup over the family for each row of (b, n) draws."""
    if family.variant == FINITE_POINTS:
        return (gs @ family.points.T).max(axis=1)
    if family.variant == SPARSE_UNIT:
        if family.s == family.n:
            return np.linalg.norm(gs, axis=1)
        top = np.partition(np.abs(gs), family.n - family.s, axis=1)[:, family.n - family.s :]
        return np.linalg.norm(top, axis=1)
    if family.variant == SUBSPACE_BALL:
        return np.linalg.norm(gs @ family.basis, axis=1)
    return family.radius * np.abs(gs).max(axis=1)


def width_estimate(
    family: SetFamily, trials: int, seed: int, workers: int = 1
) -> WidthEstimate:
    """Monte-Carlo mean of the Gaussian supremum over the family.

    Draws are organized in fixed-size blocks with per-block streams, so the
    estimate is identical for any worker count.
    """
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    blocks = [
        (b, min(_WIDTH_BLOCK, trials - b * _WIDTH_BLOCK))
        for b in range((trials + _WIDTH_BLOCK - 1) // _WIDTH_BLOCK)
    ]

    def run_block(block: tuple[int, int]) -> np.ndarray:
        index, size = block
        gs = stream(seed, "width-trials", index).standard_normal((size, family.n))
        return _sup_rows(family, gs)

    sups = np.concatenate(pmap(run_block, blocks, workers=workers))
    omega_hat = float(sups.mean())
    stderr = float(sups.std(ddof=1) / math.sqrt(trials))
    return WidthEstimate(omega_hat=omega_hat, stderr=stderr, trials=trials, seed=seed)


def max_norm(family: SetFamily) -> float:
    """Largest Euclidean norm over the family (exact per variant)."""
    if family.variant == FINITE_POINTS:
        return float(np.linalg.norm(family.points, axis=1).max())
    if family.variant == L1_BALL:
        return float(family.radius)
    return 1.0


def sample_point(family: SetFamily, seed: int, index: int) -> np.ndarray:
    """A member point, deterministic per (seed, index).

    Finite families return one of their points; sparse unit vectors get a
    random support with uniform sphere coordinates; the subspace ball is
    sampled on its unit sphere; the l1 ball is sampled vertex-biased (half
    the draws are exact extreme points +-r e_i).
    """
    rng = stream(seed, "sample-point", index)
    n = family.n
    if family.variant == FINITE_POINTS:
        return family.points[rng.integers(0, family.points.shape[0])].copy()
    if family.variant == SPARSE_UNIT:
        support = rng.choice(n, size=family.s, replace=False)
        coords = rng.standard_normal(family.s)
        norm = np.linalg.norm(coords)
        while norm == 0.0:  # vanishing probability, but stay total
            coords = rng.standard_normal(family.s)
            norm = np.linalg.norm(coords)
        x = np.zeros(n)
        x[support] = coords / norm
        return x
    if family.variant == SUBSPACE_BALL:
        k = family.basis.shape[1]
        coords = rng.standard_normal(k)
        norm = np.linalg.norm(coords)
        while norm == 0.0:
            coords = rng.standard_normal(k)
            norm = np.linalg.norm(coords)
        return family.basis @ (coords / norm)
    # l1 ball: exact vertices half the time, interior Dirichlet otherwise
    if rng.random() < 0.5:
        x = np.zeros(n)
        i = rng.integers(0, n)
        x[i] = family.radius * (1.0 if rng.random() < 0.5 else -1.0)
        return x
    weights = rng.dirichlet(np.ones(n))
    signs = rng.integers(0, 2, size=n) * 2 - 1
    shrink = rng.random()
    return family.radius * shrink * weights * signs


def extreme_points(family: SetFamily) -> np.ndarray:
    """Extreme points the family exposes for worst-case probing.

    Finite families expose every point, the l1 ball its 2n vertices, the
    subspace ball its basis directions; sparse unit vectors expose none.
    """
    n = family.n
    if family.variant == FINITE_POINTS:
        return family.points.copy()
    if family.variant == L1_BALL:
        eye = np.eye(n) * family.radius
        return np.concatenate([eye, -eye], axis=0)
    if family.variant == SUBSPACE_BALL:
        return family.basis.T.copy()
    return np.empty((0, n))


def contains(family: SetFamily, x: np.ndarray, tol: float = 1e-12) -> bool:
    """Membership test used by samplers' contracts."""
    x = _check_dim(family, x)
    if family.variant == FINITE_POINTS:
        return bool(np.any(np.linalg.norm(family.points - x, axis=1) <= tol))
    if family.variant == SPARSE_UNIT:
        nnz = int(np.count_nonzero(x))
        return nnz <= family.s and abs(np.linalg.norm(x) - 1.0) <= tol
    if family.variant == SUBSPACE_BALL:
        proj = family.basis @ (family.basis.T @ x)
        return (
            np.linalg.norm(proj - x) <= tol * max(1.0, np.linalg.norm(x))
            and np.linalg.norm(x) <= 1.0 + tol
        )
    return bool(np.abs(x).sum() <= family.radius + tol)


def family_descriptor(family: SetFamily) -> dict:
    d: dict = {"variant": family.variant, "n": family.n}
    if family.variant == FINITE_POINTS:
        d["points"] = family.points.tolist()
    elif family.variant == SPARSE_UNIT:
        d["s"] = family.s
    elif family.variant == SUBSPACE_BALL:
        d["basis"] = family.basis.tolist()
    else:
        d["radius"] = family.radius
    return d


def family_from_descriptor(d: dict) -> SetFamily:
    variant = d["variant"]
    if variant == FINITE_POINTS:
        return finite_points(np.asarray(d["points"], dtype=np.float64))
    if variant == SPARSE_UNIT:
        return sparse_unit(int(d["n"]), int(d["s"]))
    if variant == SUBSPACE_BALL:
        return subspace_ball(np.asarray(d["basis"], dtype=np.float64))
    if variant == L1_BALL:
        return l1_ball(int(d["n"]), float(d["radius"]))
    raise ValueError(f"unknown family variant {variant!r}")


def gordon_bound(omega: float, eta: float, delta: float) -> int:
    """Embedding dimension sufficient for a Gaussian map on a sphere subset:
    ceil((omega + eta)^2 / delta^2)."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if omega < 0 or eta < 0:
        raise ValueError("omega and eta must be nonnegative")
    return math.ceil((omega + eta) ** 2 / delta**2)


def sors_bound(
    omega: float,
    rad: float,
    eta: float,
    delta: float,
    n: float,
    coherence: float = 1.0,
    constant: float = 1.0,
) -> int:
    """Embedding dimension sufficient for the signed subsampled ensemble:

    ceil(C Delta^2 (1+eta)^2 log^4(n) max(1, omega^2/rad^2) / delta^2).
    """
    if min(rad, delta, n, coherence, constant) <= 0 or omega < 0 or eta < 0:
        raise ValueError("arguments must be positive (omega, eta nonnegative)")
    shape_factor = max(1.0, omega**2 / rad**2)
    value = (
        constant
        * coherence**2
        * (1.0 + eta) ** 2
        * math.log(n) ** 4
        * shape_factor
        / delta**2
    )
    return math.ceil(value)
