import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import bisection_sample_bound, brute_force_rip_epsilon, sampled_sparse_distortion
from sorsketch import rip, sketch, transforms
from sorsketch.rip import (
    SupportBudgetError,
    delta_from_epsilon,
    kw_requirements,
    mrip_check,
    mrip_levels,
    mrip_sample_bound,
    rip_check,
    rip_constant_exact,
    rip_constant_randomized,
    rip_sample_bound,
    theorem31_params,
)


def test_identity_has_zero_distortion():
    for s in (1, 2, 4):
        report = rip_constant_exact(np.eye(4), s)
        assert report.epsilon == pytest.approx(0.0, abs=1e-12)
        assert report.delta == pytest.approx(0.0, abs=1e-12)


def test_diagonal_example():
    report = rip_constant_exact(np.array([[1.0, 0.0], [0.0, 2.0]]), 1)
    assert report.epsilon == pytest.approx(3.0)
    assert report.delta == pytest.approx(math.sqrt(3.0))
    assert report.worst_support == (1,)


def test_zero_matrix():
    report = rip_constant_exact(np.zeros((3, 4)), 1)
    assert report.epsilon == pytest.approx(1.0)
    assert report.delta == pytest.approx(1.0)


def test_delta_epsilon_inverse_pinned_values():
    assert delta_from_epsilon(0.5) == pytest.approx(0.5)
    assert delta_from_epsilon(1.0) == pytest.approx(1.0)
    assert delta_from_epsilon(3.0) == pytest.approx(math.sqrt(3.0))


@settings(max_examples=100, deadline=None)
@given(epsilon=st.floats(0.0, 50.0, allow_nan=False))
def test_delta_epsilon_inverse_property(epsilon):
    delta = delta_from_epsilon(epsilon)
    assert max(delta, delta**2) == pytest.approx(epsilon, abs=1e-12)
    assert delta >= 0.0


def test_rip_check_cases():
    ok, _ = rip_check(np.eye(5), 2, 0.1)
    assert ok
    ok, _ = rip_check(np.array([[1.0, 0.0], [0.0, 2.0]]), 1, 1.0)
    assert not ok
    f = transforms.materialize(transforms.walsh_hadamard(16))
    for s in (1, 3, 16):
        ok, _ = rip_check(f, s, 1e-6)
        assert ok


def test_oracle_equivalence_small_matrices():
    rng = np.random.default_rng(123)
    for _ in range(10):
        mat = rng.standard_normal((6, 12)) / math.sqrt(6)
        for s in (1, 2, 3):
            exact = rip_constant_exact(mat, s).epsilon
            assert exact == pytest.approx(brute_force_rip_epsilon(mat, s), abs=1e-10)


def test_enumeration_dominates_sampling():
    # eigen-extremes over supports upper-bound any sampled s-sparse distortion
    rng = np.random.default_rng(5)
    mat = rng.standard_normal((6, 12)) / math.sqrt(6)
    exact = rip_constant_exact(mat, 3).epsilon
    sampled = sampled_sparse_distortion(mat, 3, 100_000, seed=7)
    assert sampled <= exact + 1e-12
    assert (exact - sampled) / exact <= 0.05


def test_monotone_in_sparsity():
    rng = np.random.default_rng(17)
    mat = rng.standard_normal((5, 8)) / math.sqrt(5)
    eps = [rip_constant_exact(mat, s).epsilon for s in (1, 2, 3, 4)]
    assert all(a <= b + 1e-12 for a, b in zip(eps, eps[1:]))


def test_worst_support_cardinality():
    report = rip_constant_exact(np.eye(3), 5)
    assert len(report.worst_support) <= 3


def test_budget_error_and_randomized_fallback():
    rng = np.random.default_rng(3)
    mat = rng.standard_normal((4, 40)) / 2.0
    with pytest.raises(SupportBudgetError):
        rip_constant_exact(mat, 10, budget=10**5)
    report = rip_constant_randomized(mat, 10, num_supports=2000, seed=1)
    assert report.method == "randomized_supports"
    assert report.epsilon > 0


def test_randomized_is_lower_bound():
    rng = np.random.default_rng(31)
    mat = rng.standard_normal((6, 10)) / math.sqrt(6)
    exact = rip_constant_exact(mat, 2).epsilon
    sampled = rip_constant_randomized(mat, 2, num_supports=500, seed=0).epsilon
    assert sampled <= exact + 1e-12


def test_mrip_schedule_small():
    ladder = mrip_levels(8, 1, 0.2)
    assert ladder.L == 3
    expected = [
        (1, math.sqrt(2) * 0.2, 2),
        (2, 0.4, 4),
        (3, math.sqrt(2) * 0.4, 8),
    ]
    for (lv, d, s), (elv, ed, es) in zip(ladder.levels, expected):
        assert lv == elv and s == es
        assert d == pytest.approx(ed, rel=1e-15)


def test_mrip_top_level_covers_everything():
    for n in (4, 7, 8, 100):
        ladder = mrip_levels(n, 1, 0.3)
        assert ladder.levels[-1][2] >= n


def test_mrip_identity_passes():
    report = mrip_check(np.eye(4), 1, 0.1)
    assert report.passed
    assert len(report.levels) == 2


def test_mrip_zero_matrix_fails_at_level_one():
    report = mrip_check(np.zeros((4, 4)), 1, 0.5)
    assert not report.passed
    first = report.levels[0]
    # distortion 1 exceeds max(delta_1, delta_1^2) at delta_1 = 0.5 sqrt(2)
    assert not first.passed


def test_mrip_level_one_matches_direct_rip():
    rng = np.random.default_rng(8)
    mat = rng.standard_normal((6, 8)) / math.sqrt(6)
    report = mrip_check(mat, 1, 0.4)
    direct_ok, direct = rip_check(mat, 2, math.sqrt(2) * 0.4)
    first = report.levels[0]
    assert first.report.epsilon == direct.epsilon
    assert first.report.worst_support == direct.worst_support
    assert first.passed == direct_ok


def test_mrip_full_scale_bounds_dense_vectors():
    rng = np.random.default_rng(9)
    mat = rng.standard_normal((6, 8)) / math.sqrt(6)
    top = mrip_check(mat, 1, 0.4).levels[-1]
    xs = rng.standard_normal((100, 8))
    xs /= np.linalg.norm(xs, axis=1, keepdims=True)
    dev = np.abs(np.einsum("ij,ij->i", xs @ mat.T, xs @ mat.T) - 1.0)
    assert dev.max() <= top.report.epsilon + 1e-12


def test_mrip_budget_error_carries_level():
    rng = np.random.default_rng(10)
    mat = rng.standard_normal((4, 64)) / 2.0
    with pytest.raises(SupportBudgetError) as err:
        mrip_check(mat, 1, 0.5, budget=50)
    assert err.value.level is not None


def test_full_orthonormal_sors_passes_mrip():
    op = sketch.build_sors(transforms.walsh_hadamard(8), 8, seed=0, replacement=False)
    report = mrip_check(sketch.materialize_sketch(op), 1, 1e-6)
    assert report.passed


def test_rip_sample_bound_frozen_oracle_value():
    # independent bisection oracle, value frozen: n=1024, s=10, delta=0.5, eta=1
    assert rip_sample_bound(1024, 10, 0.5, 1.0) == 159634
    assert bisection_sample_bound(1024, 10, 0.5, 1.0) == 159634


@pytest.mark.parametrize(
    "args",
    [(256, 4, 0.3, 0.5), (1024, 10, 0.5, 1.0), (4096, 2, 1.5, 0.0), (64, 1, 0.1, 2.0)],
)
def test_rip_sample_bound_matches_bisection(args):
    n, s, delta, eta = args
    assert rip_sample_bound(n, s, delta, eta) == bisection_sample_bound(n, s, delta, eta)


def test_rip_sample_bound_scalings():
    # doubling delta shrinks m about fourfold and doubling s about doubles it;
    # the drift above the nominal factor is exactly the log(m) term moving
    log3n = math.log(1024) ** 3
    weight = lambda m: log3n * math.log(m) + 1.0
    base = rip_sample_bound(1024, 10, 0.25, 1.0)
    doubled_delta = rip_sample_bound(1024, 10, 0.5, 1.0)
    ratio = base / doubled_delta
    assert 4.0 <= ratio <= 4.6
    assert ratio == pytest.approx(4.0 * weight(base) / weight(doubled_delta), rel=1e-3)
    doubled_s = rip_sample_bound(1024, 20, 0.25, 1.0)
    ratio_s = doubled_s / base
    assert 2.0 <= ratio_s <= 2.2
    assert ratio_s == pytest.approx(2.0 * weight(doubled_s) / weight(base), rel=1e-3)


def test_mrip_sample_bound_values():
    # doubling the distortion quarters the bound (up to the two ceilings)
    assert abs(mrip_sample_bound(256, 4, 0.1) - 4 * mrip_sample_bound(256, 4, 0.2)) <= 3
    # unit substitution: log n = 1 leaves ceil(1/delta^2)
    assert mrip_sample_bound(math.e, 1, 0.5) == 4
    assert mrip_sample_bound(math.e, 1, 0.1) == 100
    # arithmetic cross-check (independent evaluation)
    expected = math.ceil(1.0 * 2.0 * 1.0 * 150 * math.log(1024) ** 4 / 0.1**2)
    assert mrip_sample_bound(1024, 150, 0.1, eta=1.0) == expected == 69250530


def test_kw_requirements():
    s, d = kw_requirements(1, 0.4)
    assert s == 56  # ceil(40 log 4)
    assert d == pytest.approx(0.1)
    # doubling the set size adds 40 log 2 before the ceiling
    raw = lambda p: 40.0 * math.log(4.0 * p)
    assert raw(34) - raw(17) == pytest.approx(40.0 * math.log(2.0))
    assert kw_requirements(34, 0.4)[0] - kw_requirements(17, 0.4)[0] in (27, 28)


def test_theorem31_params():
    s, dt = theorem31_params(0.5, 1.0, 0.3)
    assert s == 150.0
    assert dt == pytest.approx(0.3)  # omega <= rad: rad cancels
    assert theorem31_params(10.0, 1.0, 0.5)[1] == pytest.approx(0.05)
    assert theorem31_params(1.0, 1.0, 0.5, eta=0.5)[0] == pytest.approx(225.0)
    # rad cancellation holds for any rad when omega <= rad
    assert theorem31_params(1.0, 7.0, 0.3)[1] == pytest.approx(0.3)


def test_parameter_validation():
    with pytest.raises(ValueError):
        rip_constant_exact(np.eye(3), 0)
    with pytest.raises(ValueError):
        rip_sample_bound(10, 1, -0.5)
    with pytest.raises(ValueError):
        mrip_sample_bound(10, 1, 0.0)
    with pytest.raises(ValueError):
        kw_requirements(0, 0.5)
    with pytest.raises(ValueError):
        theorem31_params(1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        delta_from_epsilon(-0.1)
