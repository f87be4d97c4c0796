"""Independent oracles used to derive expected values.

Everything here is written from scratch against the definitions, without
importing the implementations under test, so agreement is evidence rather
than tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, stats


def sylvester_hadamard(n: int) -> np.ndarray:
    """Dense orthonormal Hadamard matrix by the doubling recursion."""
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"n must be a power of two, got {n}")
    h = np.array([[1.0]])
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return h / math.sqrt(n)


def brute_force_rip_epsilon(matrix: np.ndarray, s: int) -> float:
    """Max over all size-s supports of the Gram deviation's spectral norm."""
    mat = np.asarray(matrix, dtype=np.float64)
    n = mat.shape[1]
    worst = 0.0
    for support in itertools.combinations(range(n), min(s, n)):
        sub = mat[:, support]
        gram = sub.T @ sub
        eigs = np.linalg.eigvalsh(gram - np.eye(len(support)))
        worst = max(worst, float(np.abs(eigs).max()))
    return worst


def sampled_sparse_distortion(
    matrix: np.ndarray, s: int, num_samples: int, seed: int = 0
) -> float:
    """Max |  ||Ax||^2 - 1 | over random unit s-sparse vectors."""
    mat = np.asarray(matrix, dtype=np.float64)
    n = mat.shape[1]
    rng = np.random.default_rng(seed)
    worst = 0.0
    block = 4096
    for start in range(0, num_samples, block):
        count = min(block, num_samples - start)
        coords = rng.standard_normal((count, s))
        coords /= np.linalg.norm(coords, axis=1, keepdims=True)
        supports = np.argsort(rng.random((count, n)), axis=1)[:, :s]
        xs = np.zeros((count, n))
        np.put_along_axis(xs, supports, coords, axis=1)
        sketched = xs @ mat.T
        dev = np.abs(np.einsum("ij,ij->i", sketched, sketched) - 1.0)
        worst = max(worst, float(dev.max()))
    return worst


def bisection_sample_bound(
    n: float,
    s: float,
    delta: float,
    eta: float,
    coherence: float = 1.0,
    constant: float = 1.0,
) -> int:
    """Least integer m with m >= C D^2 s (log^3(n) log(m) + eta) / delta^2,
    found by doubling then bisection on the (eventually monotone) predicate."""
    log3n = math.log(n) ** 3

    def ok(m: int) -> bool:
        return m >= constant * coherence**2 * s * (log3n * math.log(m) + eta) / delta**2

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    if lo == 0:
        return hi
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi if not ok(lo) else lo


def chi2_mean_absolute_deviation(m: int) -> float:
    """E | X/m - 1 | for X ~ chi-square with m degrees of freedom."""
    dist = stats.chi2(df=m)
    value, _ = integrate.quad(lambda x: abs(x / m - 1.0) * dist.pdf(x), 0, np.inf, limit=200)
    return value


def sampled_family_sup(variant: str, g: np.ndarray, num_samples: int, seed: int = 0, **kw) -> float:
    """Max of <g, v> over randomly sampled member points (own samplers)."""
    rng = np.random.default_rng(seed)
    n = g.shape[0]
    if variant == "sparse_unit":
        s = kw["s"]
        supports = np.argsort(rng.random((num_samples, n)), axis=1)[:, :s]
        coords = rng.standard_normal((num_samples, s))
        coords /= np.linalg.norm(coords, axis=1, keepdims=True)
        xs = np.zeros((num_samples, n))
        np.put_along_axis(xs, supports, coords, axis=1)
    elif variant == "subspace_ball":
        basis = kw["basis"]
        k = basis.shape[1]
        coords = rng.standard_normal((num_samples, k))
        coords /= np.linalg.norm(coords, axis=1, keepdims=True)
        xs = coords @ basis.T
    elif variant == "l1_ball":
        r = kw["radius"]
        half = num_samples // 2
        verts = np.zeros((half, n))
        idx = rng.integers(0, n, half)
        verts[np.arange(half), idx] = r * np.where(rng.random(half) < 0.5, 1.0, -1.0)
        weights = rng.dirichlet(np.ones(n), num_samples - half)
        signs = np.where(rng.random((num_samples - half, n)) < 0.5, 1.0, -1.0)
        xs = np.vstack([verts, r * weights * signs])
    elif variant == "finite_points":
        pts = kw["points"]
        xs = pts[rng.integers(0, pts.shape[0], num_samples)]
    else:
        raise ValueError(variant)
    return float((xs @ g).max())


def two_point_chain_optimum(a: np.ndarray, b: np.ndarray, max_level: int = 2) -> float:
    """Exhaustive best chain value for a two-point set.

    Level 0 is forced to one cell; each later level either keeps the pair
    together (center = midpoint, distance d/2) or splits it (distance 0).
    """
    d = float(np.linalg.norm(np.asarray(b, float) - np.asarray(a, float)))
    best = math.inf
    for split_level in range(1, max_level + 2):
        # pair splits at split_level (or never, when split_level > max_level)
        value = sum(
            2.0 ** (lv / 2.0) * (d / 2.0)
            for lv in range(0, min(split_level, max_level + 1))
        )
        best = min(best, value)
    return best


def circumradius_equilateral(side: float) -> float:
    return side / math.sqrt(3.0)


def gaussian_norm_mean(n: int) -> float:
    """E ||g|| for standard Gaussian g in R^n (chi distribution mean)."""
    return math.sqrt(2.0) * math.gamma((n + 1) / 2.0) / math.gamma(n / 2.0)
