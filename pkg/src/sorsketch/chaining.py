"""Successive covers and a chaining-functional upper estimate.

A hierarchy of refining partitions is built greedily over a finite point
set: level l may use at most N_l = 2^(2^l) cells (N_0 = 1), each parent
cell is split by farthest-point traversal, and each cell is represented by
the center of its (approximate) minimum enclosing ball. The chaining value
reported for a point v is

    sum over levels l of 2^(l/2) * e_l(v),

where e_l(v) is the distance from v to the nearest center seen up to level
l (the running minimum keeps e_l nonincreasing; a greedy level on its own
does not guarantee that). The supremum of this sum over test points is an
upper proxy for the optimal admissible-sequence value, which is infeasible
to optimize exactly; reports therefore label it ``gamma2_upper``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "CoverHierarchy",
    "build_covers",
    "gamma2_estimate",
    "enclosing_radius",
    "enclosing_ball",
    "cover_capacity",
]

MAX_LEVEL_LIMIT = 6
MEB_ITERATIONS = 100


def cover_capacity(level: int) -> int:
    """Cell budget at a level: 1 at level 0, else 2^(2^level)."""
    return 1 if level == 0 else 2 ** (2**level)


def enclosing_ball(points: np.ndarray, iterations: int = MEB_ITERATIONS) -> tuple[np.ndarray, float]:
    """Approximate minimum enclosing ball: (center, radius).

    Frank-Wolfe on the dual with exact line search, started from the
    centroid; each step moves weight to the farthest point. The returned
    radius is the realized max distance from the final center, a valid upper
    bound within about 1/iterations of optimal.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    p = pts.shape[0]
    if p == 0:
        raise ValueError("need at least one point")
    sq_norms = np.einsum("ij,ij->i", pts, pts)
    weights = np.full(p, 1.0 / p)
    center = weights @ pts
    mean_sq = float(weights @ sq_norms)
    for _ in range(iterations):
        d2 = sq_norms - 2.0 * (pts @ center) + center @ center
        j = int(np.argmax(d2))
        r2 = mean_sq - float(center @ center)
        gap = float(d2[j]) - r2
        if gap <= 1e-15 * max(1.0, float(d2[j])):
            break
        lam = min(1.0, gap / (2.0 * float(d2[j])))
        weights *= 1.0 - lam
        weights[j] += lam
        center = (1.0 - lam) * center + lam * pts[j]
        mean_sq = (1.0 - lam) * mean_sq + lam * float(sq_norms[j])
    diff = pts - center
    return center, math.sqrt(float(np.einsum("ij,ij->i", diff, diff).max()))


def enclosing_radius(points: np.ndarray, iterations: int = MEB_ITERATIONS) -> float:
    """Radius of the approximate minimum enclosing ball."""
    return enclosing_ball(points, iterations=iterations)[1]


@dataclass(frozen=True)
class CoverHierarchy:
    """Refining covers with per-point chain distances over the build set."""

    points: np.ndarray  # (p, n)
    levels: tuple[np.ndarray, ...]  # centers per level, each (k_l, n)
    cells: tuple[tuple[np.ndarray, ...], ...]  # index partition per level
    distortions: np.ndarray  # (p, num_levels) running-min distances
    gamma2_upper: float

    def to_dict(self) -> dict:
        return {
            "num_points": int(self.points.shape[0]),
            "dimension": int(self.points.shape[1]),
            "levels": [
                {
                    "level": lv,
                    "capacity": cover_capacity(lv),
                    "num_centers": int(centers.shape[0]),
                    "max_distortion": float(self.distortions[:, lv].max()),
                    "centers": centers.tolist(),
                }
                for lv, centers in enumerate(self.levels)
            ],
            "gamma2_upper": self.gamma2_upper,
        }


def _farthest_point_split(pts: np.ndarray, indices: np.ndarray, k: int) -> list[np.ndarray]:
    """Split a cell into at most k sub-cells by farthest-point traversal.

    Seeded at the largest-norm point; every later seed maximizes the
    distance to the chosen seeds. All ties break to the lowest index.
    """
    cell = pts[indices]
    size = len(indices)
    if size <= 1 or k <= 1:
        return [indices]
    norms = np.einsum("ij,ij->i", cell, cell)
    seeds = [int(np.argmax(norms))]
    dist2 = np.einsum("ij,ij->i", cell - cell[seeds[0]], cell - cell[seeds[0]])
    while len(seeds) < min(k, size):
        far = int(np.argmax(dist2))
        if dist2[far] <= 0.0:
            break  # remaining points duplicate the seeds
        seeds.append(far)
        cand = np.einsum("ij,ij->i", cell - cell[far], cell - cell[far])
        dist2 = np.minimum(dist2, cand)
    centers = cell[seeds]
    d2 = (
        np.einsum("ij,ij->i", cell, cell)[:, None]
        - 2.0 * cell @ centers.T
        + np.einsum("ij,ij->i", centers, centers)[None, :]
    )
    owner = np.argmin(d2, axis=1)  # ties: earliest seed
    return [indices[owner == c] for c in range(len(seeds)) if np.any(owner == c)]


def build_covers(points: np.ndarray, max_level: int = 4) -> CoverHierarchy:
    """Greedy refining covers of a finite point set.

    Level 0 is the whole set with its enclosing-ball center. Each later
    level splits every parent cell by farthest-point traversal, with the
    level budget divided equally among parents so the partition refines and
    the total stays within capacity. Cell centers are enclosing-ball centers.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        raise ValueError("need at least one point")
    if not 0 <= max_level <= MAX_LEVEL_LIMIT:
        raise ValueError(f"max_level must be in [0, {MAX_LEVEL_LIMIT}], got {max_level}")
    p = pts.shape[0]

    cells: list[list[np.ndarray]] = [[np.arange(p)]]
    for lv in range(1, max_level + 1):
        parents = cells[-1]
        budget = max(1, cover_capacity(lv) // len(parents))
        children: list[np.ndarray] = []
        for parent in parents:
            children.extend(_farthest_point_split(pts, parent, budget))
        cells.append(children)

    levels: list[np.ndarray] = []
    for level_cells in cells:
        centers = np.stack([enclosing_ball(pts[idx])[0] for idx in level_cells])
        levels.append(centers)

    distortions = _chain_distances(pts, levels)
    gamma2_upper = _chain_value(distortions)
    return CoverHierarchy(
        points=pts,
        levels=tuple(levels),
        cells=tuple(tuple(c) for c in cells),
        distortions=distortions,
        gamma2_upper=gamma2_upper,
    )


def _nearest_distances(points: np.ndarray, centers: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Distance to the nearest center, via direct differences (the expanded
    quadratic form loses the zero exactly when a point is its own center)."""
    out = np.empty(points.shape[0])
    for lo in range(0, points.shape[0], chunk):
        block = points[lo : lo + chunk]
        diff = block[:, None, :] - centers[None, :, :]
        out[lo : lo + len(block)] = np.sqrt(
            np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
        )
    return out


def _chain_distances(test_points: np.ndarray, levels: list[np.ndarray]) -> np.ndarray:
    """Running-min distance from each test point to the centers up to each level."""
    dists = np.empty((test_points.shape[0], len(levels)))
    for lv, centers in enumerate(levels):
        nearest = _nearest_distances(test_points, centers)
        dists[:, lv] = nearest if lv == 0 else np.minimum(dists[:, lv - 1], nearest)
    return dists


def _chain_value(distortions: np.ndarray) -> float:
    weights = 2.0 ** (np.arange(distortions.shape[1]) / 2.0)
    return float((distortions * weights).sum(axis=1).max())


def gamma2_estimate(hierarchy: CoverHierarchy, test_points: np.ndarray) -> float:
    """Chaining upper value over the given test points.

    The hierarchy must have been built over a superset of the test points
    for the result to mean anything; this is the caller's contract.
    """
    pts = np.atleast_2d(np.asarray(test_points, dtype=np.float64))
    if pts.size == 0:
        raise ValueError("need at least one test point")
    return _chain_value(_chain_distances(pts, list(hierarchy.levels)))
