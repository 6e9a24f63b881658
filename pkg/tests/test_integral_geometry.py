import numpy as np
import pytest

from normalcycle import shapes
from normalcycle.complex import build_complex
from normalcycle.errors import IllConditioned, MixedDimension, NotConvex, UnsupportedDimension
from normalcycle.integral_geometry import (
    TubeExperiment,
    crofton_estimate,
    default_radii,
    distance_to_complex,
    fit_tube_polynomial,
    hausdorff_measure_exact,
    intrinsic_volumes_convex,
    tube_volume_mc,
    unit_ball_volume,
)


def test_unit_ball_volumes():
    assert [unit_ball_volume(p) for p in range(4)] == pytest.approx([1, 2, np.pi, 4 * np.pi / 3])


def test_distance_to_triangle():
    X = shapes.triangle()
    d = distance_to_complex(X, [[0.3, 0.2], [0.5, -1.0], [-3.0, -4.0]])
    assert d == pytest.approx([0.0, 1.0, 5.0])


def test_distance_to_cube_diagonal_point():
    X = shapes.unit_cube()
    assert distance_to_complex(X, [[2.0, 2.0, 2.0]])[0] == pytest.approx(np.sqrt(3))


@pytest.mark.parametrize(
    "X,r,area",
    [
        (shapes.point(2), 1.0, np.pi),
        (shapes.segment(2), 0.5, 1.0 + np.pi / 4),
        (shapes.unit_square(), 0.5, 3.0 + np.pi / 4),
    ],
)
def test_tube_areas(X, r, area):
    est, se = tube_volume_mc(X, r, samples=200_000, seed=1)
    assert abs(est - area) < 4 * se


def test_tube_is_deterministic():
    X = shapes.triangle()
    assert tube_volume_mc(X, 0.3, 50_000, seed=9) == tube_volume_mc(X, 0.3, 50_000, seed=9)


def steiner(mu, n, radii):
    m = len(mu) - 1
    return np.array([sum(mu[j] * unit_ball_volume(n - j) * r ** (n - j) for j in range(m + 1)) for r in radii])


@pytest.mark.parametrize("mu,n", [([1, 2, 1], 2), ([1, 3, 3, 1], 3), ([1, 2.5], 2)])
def test_fit_recovers_exact_steiner_data(mu, n):
    radii = np.array([0.25, 0.5, 0.75, 1.0, 1.25])
    exp = TubeExperiment(radii, steiner(mu, n, radii), np.zeros(5), 0, 0)
    fit = fit_tube_polynomial(exp, len(mu) - 1, n)
    assert fit.mu[: len(mu)] == pytest.approx(mu)


def test_fit_point_in_space():
    radii = np.array([0.5, 1.0])
    exp = TubeExperiment(radii, 4 / 3 * np.pi * radii**3, np.zeros(2), 0, 0)
    assert fit_tube_polynomial(exp, 0, 3).mu == pytest.approx([1, 0, 0, 0])


def test_fit_refuses_clustered_radii():
    radii = 1.0 + 1e-7 * np.arange(5)
    exp = TubeExperiment(radii, steiner([1, 3, 3, 1], 3, radii), np.zeros(5), 0, 0)
    with pytest.raises(IllConditioned):
        fit_tube_polynomial(exp, 3, 3)


def test_exact_volumes_from_angles():
    assert intrinsic_volumes_convex(shapes.unit_square()).mu == pytest.approx([1, 2, 1])
    assert intrinsic_volumes_convex(shapes.unit_cube()).mu == pytest.approx([1, 3, 3, 1])
    assert intrinsic_volumes_convex(shapes.segment(2, 2.5)).mu == pytest.approx([1, 2.5, 0])
    tri = intrinsic_volumes_convex(shapes.triangle()).mu
    per = hausdorff_measure_exact(build_complex(shapes.triangle().points, [[0, 1], [1, 2], [2, 0]]), 1)
    assert tri == pytest.approx([1, per / 2, 0.45])


def test_nonconvex_rejected():
    with pytest.raises(NotConvex):
        intrinsic_volumes_convex(shapes.l_polygon())


def test_hausdorff_measures():
    assert hausdorff_measure_exact(shapes.circle(4), 1) == pytest.approx(4 * np.sqrt(2))
    assert hausdorff_measure_exact(shapes.unit_cube(), 3) == pytest.approx(1.0)
    mixed = build_complex([[0, 0], [1, 0], [5, 5]], [[0, 1], [2]])
    assert hausdorff_measure_exact(mixed, 1) == pytest.approx(1.0)
    with pytest.raises(MixedDimension):
        hausdorff_measure_exact(mixed, 1, strict=True)
    with pytest.raises(MixedDimension):
        hausdorff_measure_exact(shapes.triangle(), 1)


def test_crofton_two_segments():
    X = build_complex([[0, 0], [1, 0], [0, 1], [0.6, 1.8]], [[0, 1], [2, 3]])
    est, se = crofton_estimate(X, 1, samples=200_000, seed=2, calibration_samples=200_000)
    exact = hausdorff_measure_exact(X, 1)
    assert abs(est - exact) < 4 * se


def test_crofton_needs_planar_curve():
    with pytest.raises(UnsupportedDimension):
        crofton_estimate(shapes.segment(3), 1, samples=10)


def test_hausdorff_examples():
    right = build_complex([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])
    assert hausdorff_measure_exact(right, 2) == pytest.approx(0.5)
    tri = shapes.polygon_boundary(shapes.regular_polygon_points(3, 1 / np.sqrt(3)))
    assert hausdorff_measure_exact(tri, 1) == pytest.approx(3.0)
    assert hausdorff_measure_exact(shapes.segment(3), 1) == pytest.approx(1.0)


def test_default_radii_stay_below_feature_size():
    X = shapes.unit_square(subdiv=4)
    r = default_radii(X)
    assert len(r) == 5 and np.all(np.diff(r) > 0)
    assert r[-1] == pytest.approx(0.2 * 0.25)


def test_fitted_top_volume_is_the_volume():
    X = shapes.unit_square()
    radii = np.array([0.1, 0.2, 0.3])
    exp = TubeExperiment(radii, steiner([1, 2, 1], 2, radii), np.zeros(3), 0, 0)
    fit = fit_tube_polynomial(exp, 2, 2)
    assert fit.mu[2] == pytest.approx(hausdorff_measure_exact(X, 2))


def test_tube_experiment_validates():
    from normalcycle.errors import ValidationError

    with pytest.raises(ValidationError):
        TubeExperiment([0.5, 0.25], [1.0, 1.0], [0.0, 0.0], 0, 0)
    with pytest.raises(ValidationError):
        tube_volume_mc(shapes.point(), -1.0)
