"""Restricted-isometry certification at desk scale, plus sample-size calculators.

The certified quantity for a matrix A at sparsity s is

    epsilon = max over supports S, |S| <= s, of  || A_S^T A_S - I ||_2,

which equals the worst relative squared-norm distortion over s-sparse
vectors. The distortion parameter delta solves max(delta, delta^2) =
epsilon; delta is deliberately allowed above 1. Enumeration is exact up to
the eigensolver and is refused beyond a support budget (certification is
NP-hard in general); a randomized-support fallback reports itself honestly.

The multiresolution variant checks a geometric ladder of (distortion,
sparsity) levels, doubling sparsity and growing distortion by sqrt(2) per
level until all of R^n is covered.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .rng import stream

__all__ = [
    "SupportBudgetError",
    "RipReport",
    "MripLevels",
    "MripLevelReport",
    "MripReport",
    "delta_from_epsilon",
    "rip_constant_exact",
    "rip_constant_randomized",
    "rip_check",
    "mrip_levels",
    "mrip_check",
    "rip_sample_bound",
    "mrip_sample_bound",
    "kw_requirements",
    "theorem31_params",
]

DEFAULT_BUDGET = 10**6
DEFAULT_RANDOM_SUPPORTS = 10**5

EXACT_ENUMERATION = "exact_enumeration"
RANDOMIZED_SUPPORTS = "randomized_supports"


class SupportBudgetError(RuntimeError):
    """Support enumeration would exceed the budget; use the randomized path."""

    def __init__(self, message: str, level: int | None = None):
        super().__init__(message)
        self.level = level


@dataclass(frozen=True)
class RipReport:
    """Certified worst-case distortion at one sparsity level."""

    s: int
    epsilon: float
    delta: float
    worst_support: tuple[int, ...]
    method: str

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "worst_support": list(self.worst_support),
            "method": self.method,
        }


@dataclass(frozen=True)
class MripLevels:
    """Geometric (distortion, sparsity) ladder: level l has (2^(l/2) d, 2^l s)."""

    L: int
    levels: tuple[tuple[int, float, int], ...]  # (level, delta_level, s_level)


@dataclass(frozen=True)
class MripLevelReport:
    level: int
    delta_level: float
    s_level: int
    s_checked: int  # min(s_level, n): sparsity n already covers all vectors
    passed: bool
    report: RipReport

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "delta_level": self.delta_level,
            "s_level": self.s_level,
            "s_checked": self.s_checked,
            "passed": self.passed,
            "report": self.report.to_dict(),
        }


@dataclass(frozen=True)
class MripReport:
    passed: bool
    s: int
    delta: float
    levels: tuple[MripLevelReport, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "s": self.s,
            "delta": self.delta,
            "levels": [lv.to_dict() for lv in self.levels],
        }


def delta_from_epsilon(epsilon: float) -> float:
    """Unique nonnegative delta with max(delta, delta^2) = epsilon."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    return epsilon if epsilon <= 1.0 else math.sqrt(epsilon)


def _colex_supports(n: int, s: int) -> Iterator[tuple[int, ...]]:
    # colexicographic: ordered by largest element, then recursively below it
    if s == 0:
        yield ()
        return
    for top in range(s - 1, n):
        for rest in _colex_supports(top, s - 1):
            yield rest + (top,)


def _support_epsilons(gram: np.ndarray, supports: np.ndarray, chunk: int = 1 << 16) -> np.ndarray:
    count, s = supports.shape
    out = np.empty(count)
    eye = np.eye(s)
    for lo in range(0, count, chunk):
        sub = supports[lo : lo + chunk]
        grams = gram[sub[:, :, None], sub[:, None, :]]
        eigs = np.linalg.eigvalsh(grams - eye)
        out[lo : lo + len(sub)] = np.abs(eigs).max(axis=1)
    return out


def _matrix_f64(matrix: np.ndarray) -> np.ndarray:
    mat = np.asarray(matrix, dtype=np.float64)
    if mat.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {mat.shape}")
    return mat


def rip_constant_exact(
    matrix: np.ndarray, s: int, budget: int = DEFAULT_BUDGET
) -> RipReport:
    """Exact worst-case distortion by full support enumeration.

    Raises SupportBudgetError when C(n, min(s, n)) exceeds the budget; ties
    for the worst support are broken by colexicographic first-found.
    """
    mat = _matrix_f64(matrix)
    n = mat.shape[1]
    if s < 1:
        raise ValueError(f"sparsity must be positive, got {s}")
    s_eff = min(s, n)
    count = math.comb(n, s_eff)
    if count > budget:
        raise SupportBudgetError(
            f"C({n},{s_eff}) = {count} supports exceed the enumeration budget {budget}"
        )
    supports = np.fromiter(
        (i for sup in _colex_supports(n, s_eff) for i in sup),
        dtype=np.int64,
        count=count * s_eff,
    ).reshape(count, s_eff)
    eps = _support_epsilons(mat.T @ mat, supports)
    k = int(np.argmax(eps))  # first occurrence: colex-first tie break
    return RipReport(
        s=s,
        epsilon=float(eps[k]),
        delta=delta_from_epsilon(float(eps[k])),
        worst_support=tuple(int(i) for i in supports[k]),
        method=EXACT_ENUMERATION,
    )


def rip_constant_randomized(
    matrix: np.ndarray,
    s: int,
    num_supports: int = DEFAULT_RANDOM_SUPPORTS,
    seed: int = 0,
) -> RipReport:
    """Lower bound on the distortion from uniformly sampled supports."""
    mat = _matrix_f64(matrix)
    n = mat.shape[1]
    s_eff = min(s, n)
    rng = stream(seed, "rip-random-supports")
    sampled = np.empty((num_supports, s_eff), dtype=np.int64)
    for i in range(num_supports):
        sampled[i] = np.sort(rng.choice(n, size=s_eff, replace=False))
    eps = _support_epsilons(mat.T @ mat, sampled)
    k = int(np.argmax(eps))
    return RipReport(
        s=s,
        epsilon=float(eps[k]),
        delta=delta_from_epsilon(float(eps[k])),
        worst_support=tuple(int(i) for i in sampled[k]),
        method=RANDOMIZED_SUPPORTS,
    )


def rip_check(
    matrix: np.ndarray, s: int, delta: float, budget: int = DEFAULT_BUDGET
) -> tuple[bool, RipReport]:
    """True iff the certified distortion is at most delta."""
    report = rip_constant_exact(matrix, s, budget=budget)
    return report.delta <= delta, report


def mrip_levels(n: int, s: int, delta: float) -> MripLevels:
    """The ladder (2^(l/2) delta, 2^l s) for l = 1..ceil(log2 n)."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    L = math.ceil(math.log2(n)) if n > 1 else 0
    levels = tuple(
        (lv, (2.0 ** (lv / 2.0)) * delta, (2**lv) * s) for lv in range(1, L + 1)
    )
    return MripLevels(L=L, levels=levels)


def mrip_check(
    matrix: np.ndarray, s: int, delta: float, budget: int = DEFAULT_BUDGET
) -> MripReport:
    """Check the full multiresolution ladder; all levels must pass.

    Sparsities beyond n are checked at n (they constrain the same set of
    vectors). A budget overrun raises SupportBudgetError tagged with the
    offending level.
    """
    mat = _matrix_f64(matrix)
    n = mat.shape[1]
    ladder = mrip_levels(n, s, delta)
    reports = []
    passed = True
    for lv, delta_lv, s_lv in ladder.levels:
        s_checked = min(s_lv, n)
        try:
            ok, report = rip_check(mat, s_checked, delta_lv, budget=budget)
        except SupportBudgetError as err:
            raise SupportBudgetError(f"level {lv}: {err}", level=lv) from None
        passed = passed and ok
        reports.append(
            MripLevelReport(
                level=lv,
                delta_level=delta_lv,
                s_level=s_lv,
                s_checked=s_checked,
                passed=ok,
                report=report,
            )
        )
    return MripReport(passed=passed, s=s, delta=delta, levels=tuple(reports))


def rip_sample_bound(
    n: float,
    s: float,
    delta: float,
    eta: float = 0.0,
    coherence: float = 1.0,
    constant: float = 1.0,
    max_iterations: int = 100,
) -> int:
    """Smallest integer m with m >= C * Delta^2 * s * (log^3(n) log(m) + eta) / delta^2.

    The right-hand side grows with m, so the least solution is found by
    monotone fixed-point iteration from below; if the iteration has not
    settled after ``max_iterations`` the current upper bracket is returned.
    """
    if min(n, s, delta, coherence, constant) <= 0 or eta < 0:
        raise ValueError("all parameters must be positive (eta nonnegative)")
    log3n = math.log(n) ** 3

    def rhs(m: int) -> float:
        return constant * coherence**2 * s * (log3n * math.log(m) + eta) / delta**2

    m = 1
    for _ in range(max_iterations):
        nxt = max(1, math.ceil(rhs(m)))
        if nxt <= m:
            break
        m = nxt
    # trim ceiling artifacts: walk down while the inequality still holds
    while m > 1 and (m - 1) >= rhs(m - 1):
        m -= 1
    return m


def mrip_sample_bound(
    n: float,
    s: float,
    delta: float,
    eta: float = 0.0,
    coherence: float = 1.0,
    constant: float = 1.0,
) -> int:
    """Closed-form ladder sample bound: ceil(C (1+eta) Delta^2 s log^4(n) / delta^2)."""
    if min(n, s, delta, coherence, constant) <= 0 or eta < 0:
        raise ValueError("all parameters must be positive (eta nonnegative)")
    return math.ceil(constant * (1.0 + eta) * coherence**2 * s * math.log(n) ** 4 / delta**2)


def kw_requirements(set_size: int, epsilon: float, eta: float = 0.0) -> tuple[int, float]:
    """Sparsity and distortion a certificate needs for a finite-set embedding.

    Returns (s, delta) = (ceil(40 (log(4 |T|) + eta)), epsilon / 4); callers
    cap s at the ambient dimension. A matrix certified at (s, delta), with a
    fresh random sign diagonal, embeds any |T|-point set with squared-norm
    distortion max(epsilon, epsilon^2).
    """
    if set_size < 1:
        raise ValueError(f"set size must be at least 1, got {set_size}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    s_required = math.ceil(40.0 * (math.log(4.0 * set_size) + eta))
    return s_required, epsilon / 4.0


def theorem31_params(
    omega: float,
    rad: float,
    delta: float,
    eta: float = 0.0,
    constant: float = 1.0,
) -> tuple[float, float]:
    """Ladder levels sufficient for a set-wide embedding guarantee.

    Returns (s, delta_tilde) = (150 (1 + eta), delta * rad / (C * max(rad,
    omega))): certify the unsigned matrix at these multiresolution levels and
    the signed version distorts squared norms on the set by at most
    max(delta, delta^2) * rad^2.
    """
    if rad <= 0:
        raise ValueError(f"rad must be positive, got {rad}")
    if constant <= 0:
        raise ValueError(f"constant must be positive, got {constant}")
    s = 150.0 * (1.0 + eta)
    delta_tilde = delta * rad / (constant * max(rad, omega))
    return s, delta_tilde
