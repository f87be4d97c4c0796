import math

import numpy as np
import pytest

from oracles import chi2_mean_absolute_deviation
from sorsketch import geometry, harness, sketch, transforms
from sorsketch.harness import (
    bench,
    build_ensemble,
    distortion_sweep,
    empirical_distortion,
    implied_delta,
    jl_check,
)
from sorsketch.rng import derive_seed


def _full_sors(n, seed=0):
    return sketch.build_sors(transforms.walsh_hadamard(n), n, seed=seed, replacement=False)


def test_full_isometry_has_zero_distortion():
    fam = geometry.sparse_unit(16, 16)
    assert empirical_distortion(fam, _full_sors(16), 64, seed=0) < 1e-10


def test_zero_vector_contributes_nothing():
    fam = geometry.finite_points(np.zeros((1, 8)))
    op = sketch.build_gaussian(8, 4, seed=1)
    assert empirical_distortion(fam, op, 16, seed=0) == 0.0


def test_dimension_mismatch():
    fam = geometry.sparse_unit(8, 2)
    op = sketch.build_gaussian(16, 4, seed=0)
    with pytest.raises(ValueError):
        empirical_distortion(fam, op, 8, seed=0)


def test_extremes_are_probed():
    # worst l1-ball distortion is attained at a vertex; sampling zero points
    # must still probe all 2n of them
    fam = geometry.l1_ball(8, 1.0)
    op = sketch.build_gaussian(8, 4, seed=3)
    verts = geometry.extreme_points(fam)
    vert_dev = np.abs(
        np.einsum("ij,ij->i", verts @ op.dense.T, verts @ op.dense.T)
        - np.einsum("ij,ij->i", verts, verts)
    ).max()
    assert empirical_distortion(fam, op, 0, seed=0) == pytest.approx(vert_dev)


def test_nested_samples_monotone_in_num_points():
    fam = geometry.sparse_unit(32, 4)
    op = sketch.build_gaussian(32, 8, seed=5)
    d_small = empirical_distortion(fam, op, 16, seed=9)
    d_large = empirical_distortion(fam, op, 64, seed=9)
    assert d_small <= d_large + 1e-15


def test_single_point_distortion_matches_chi_square_mean():
    # gaussian sketch of a fixed unit vector: ||Ax||^2 ~ chi^2_m / m
    m, n, trials = 16, 32, 10_000
    x = np.random.default_rng(1).standard_normal(n)
    x /= np.linalg.norm(x)
    fam = geometry.finite_points(x[np.newaxis, :])
    devs = np.empty(trials)
    for t in range(trials):
        op = sketch.build_gaussian(n, m, seed=t)
        devs[t] = empirical_distortion(fam, op, 1, seed=0)
    expected = chi2_mean_absolute_deviation(m)
    stderr = devs.std(ddof=1) / math.sqrt(trials)
    assert abs(devs.mean() - expected) <= 3 * stderr


def test_jl_check_full_isometry():
    res = jl_check(np.random.default_rng(0).standard_normal((20, 16)), _full_sors(16), 1e-6)
    assert res.passed
    assert res.worst_deviation < 1e-10


def test_jl_check_zero_point_passes():
    pts = np.zeros((1, 16))
    res = jl_check(pts, sketch.build_gaussian(16, 4, seed=2), 0.0)
    assert res.passed and res.worst_ratio == 1.0


def test_jl_check_delta_zero_fails_generically():
    pts = np.random.default_rng(3).standard_normal((1, 64))
    failures = sum(
        not jl_check(pts, sketch.build_gaussian(64, 16, seed=s), 0.0).passed
        for s in range(100)
    )
    assert failures == 100


def test_jl_check_reports_worst_point():
    pts = np.eye(8)
    op = sketch.build_gaussian(8, 4, seed=7)
    res = jl_check(pts, op, 10.0)
    norms = np.linalg.norm(pts @ op.dense.T, axis=1)
    assert res.worst_index == int(np.argmax(np.abs(norms - 1.0)))


def test_sweep_validates_inputs():
    fam = geometry.sparse_unit(16, 16)
    with pytest.raises(ValueError):
        distortion_sweep(fam, "gaussian", [8], trials=20, seed=0)
    with pytest.raises(ValueError):
        distortion_sweep(fam, "gaussian", [8, 4, 16], trials=20, seed=0)
    with pytest.raises(ValueError):
        distortion_sweep(fam, "gaussian", [4, 8, 16], trials=5, seed=0)


def test_sweep_scaling_family_scales_reports():
    pts = np.random.default_rng(4).standard_normal((12, 16))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    c = math.sqrt(2.0)
    base, _ = distortion_sweep(
        geometry.finite_points(pts), "sors", [4, 8, 16], trials=20, seed=6, num_points=8
    )
    scaled, _ = distortion_sweep(
        geometry.finite_points(c * pts), "sors", [4, 8, 16], trials=20, seed=6, num_points=8
    )
    for r_base, r_scaled in zip(base, scaled):
        assert r_scaled.p95 == pytest.approx(2.0 * r_base.p95, rel=1e-12)
        assert r_scaled.p_max == pytest.approx(2.0 * r_base.p_max, rel=1e-12)


def test_sweep_slope_reference_gaussian():
    # dense Gaussian on the unit sphere: p95 distortion decays like m^(-1/2)
    fam = geometry.sparse_unit(64, 64)
    _, slope = distortion_sweep(fam, "gaussian", [16, 32, 64, 128], trials=30, seed=8)
    assert -0.8 <= slope <= -0.25


def test_sweep_worker_count_does_not_change_results():
    fam = geometry.sparse_unit(32, 32)
    a, slope_a = distortion_sweep(fam, "sors", [8, 16, 32], trials=20, seed=9, workers=1)
    b, slope_b = distortion_sweep(fam, "sors", [8, 16, 32], trials=20, seed=9, workers=4)
    assert slope_a == slope_b
    assert all(x.p95 == y.p95 and x.p50 == y.p50 for x, y in zip(a, b))


def test_implied_delta():
    assert implied_delta("gaussian", 25, 64, omega=4.0, rad=1.0, eta=1.0) == pytest.approx(1.0)
    expected = math.sqrt(math.log(64) ** 4 / 100.0)
    assert implied_delta("sors", 100, 64, omega=0.5, rad=1.0) == pytest.approx(expected)


def test_build_ensemble_kinds():
    assert build_ensemble("gaussian", 16, 4, 0).kind == "gaussian"
    op = build_ensemble("sors", 16, 4, 0, transform_kind=transforms.IDENTITY_PERMUTED)
    assert op.transform.kind == transforms.IDENTITY_PERMUTED
    with pytest.raises(ValueError):
        build_ensemble("butterfly", 16, 4, 0)


def test_bench_table_shape_and_ordering():
    table = bench([2**12, 2**13], m=256, trials=9, seed=0)
    assert len(table["rows"]) == 4  # |n_grid| x ensembles
    by_kind = {
        (r["ensemble"], r["n"]): r["median_seconds"] for r in table["rows"]
    }
    # structured apply beats the dense baseline once n outgrows m
    assert by_kind[("sors", 2**13)] < by_kind[("gaussian", 2**13)]
    with pytest.raises(ValueError):
        bench([1000], m=16, trials=3)


@pytest.mark.slow
def test_bench_exponent_ordering_proportional_m():
    # m growing with n: dense cost is quadratic, structured stays log-linear
    table = bench([2**10, 2**11, 2**12, 2**13], m=0, trials=9, seed=1, m_fraction=1 / 16)
    assert table["exponents"]["sors"] < table["exponents"]["gaussian"]


def test_trial_seed_derivation_is_stable():
    assert derive_seed(0, "sweep-op", 8, 3) == derive_seed(0, "sweep-op", 8, 3)
    assert derive_seed(0, "sweep-op", 8, 3) != derive_seed(0, "sweep-op", 8, 4)
    assert derive_seed(1, "sweep-op", 8, 3) != derive_seed(0, "sweep-op", 8, 3)
