import math

import numpy as np
import pytest
from scipy import stats

from conftest import make_grid, make_map
from uav_search_model import (
    CameraSpec,
    DistributionSpec,
    GaussianComponent,
    InvalidAreaError,
    InvalidCameraError,
    InvalidDistributionError,
    StartCorner,
    build_map,
    decompose_area,
    footprint,
    sample_target,
)


# -------- footprint --------


@pytest.mark.parametrize("H, alpha, beta, w, l", [
    (25.0, math.pi / 3, math.pi / 3, 28.867513459481287, 28.867513459481287),
    (10.0, math.pi / 2, math.pi / 2, 20.0, 20.0),
    (10.0, math.pi / 2, math.pi / 3, 20.0, 20 * math.tan(math.pi / 6)),
])
def test_footprint(H, alpha, beta, w, l):
    got_w, got_l = footprint(CameraSpec(H, alpha, beta))
    assert got_w == pytest.approx(w, rel=1e-12)
    assert got_l == pytest.approx(l, rel=1e-12)


def test_footprint_monotone():
    angles = np.linspace(0.05, math.pi - 0.05, 40)
    widths = [footprint(CameraSpec(10.0, a, 1.0))[0] for a in angles]
    assert np.all(np.diff(widths) > 0)
    heights = [footprint(CameraSpec(h, 1.0, 1.0))[0] for h in (1.0, 2.0, 5.0, 50.0)]
    assert np.all(np.diff(heights) > 0)
    assert footprint(CameraSpec(1.0, 1e-6, 1.0))[0] > 0


@pytest.mark.parametrize("kwargs", [
    dict(altitude=0.0, vertical_angle=1.0, horizontal_angle=1.0),
    dict(altitude=-5.0, vertical_angle=1.0, horizontal_angle=1.0),
    dict(altitude=10.0, vertical_angle=0.0, horizontal_angle=1.0),
    dict(altitude=10.0, vertical_angle=1.0, horizontal_angle=math.pi),
])
def test_invalid_camera(kwargs):
    with pytest.raises(InvalidCameraError):
        CameraSpec(**kwargs)


# -------- decompose_area --------


CAMERA_20 = CameraSpec(10.0, math.pi / 2, math.pi / 2)


@pytest.mark.parametrize("width, height, r, rows, cols", [
    (100.0, 100.0, 0.0, 5, 5),
    (100.0, 100.0, 0.5, 10, 10),
    (15.0, 15.0, 0.0, 1, 1),
    (110.0, 50.0, 0.0, 3, 6),
])
def test_decompose_area(width, height, r, rows, cols):
    grid = decompose_area(width, height, CAMERA_20, r, r)
    assert (grid.rows, grid.cols) == (rows, cols)
    assert grid.M == rows * cols
    assert len(grid.waypoints) == grid.M
    assert grid.cols * grid.stride_x >= width - 1e-9
    assert grid.rows * grid.stride_y >= height - 1e-9


def test_waypoints_row_major():
    grid = decompose_area(100.0, 60.0, CAMERA_20)
    assert grid.waypoints[0] == pytest.approx([10.0, 10.0])
    assert grid.waypoints[1] == pytest.approx([30.0, 10.0])
    assert grid.waypoints[grid.cols] == pytest.approx([10.0, 30.0])
    assert grid.waypoints[-1] == pytest.approx([90.0, 50.0])
    for k in range(grid.M):
        row, col = grid.row_col(k)
        assert grid.cell_of(*grid.waypoints[k]) == k
        assert grid.index(row, col) == k


@pytest.mark.parametrize("width, height, r", [
    (0.0, 100.0, 0.0),
    (100.0, -1.0, 0.0),
    (100.0, 100.0, 1.0),
    (100.0, 100.0, -0.1),
])
def test_invalid_area(width, height, r):
    with pytest.raises(InvalidAreaError):
        decompose_area(width, height, CAMERA_20, r, r)


def test_grid_helpers():
    grid = make_grid(3, 4)
    assert grid.neighbors(0) == [1, 4]
    assert grid.neighbors(5) == [1, 4, 6, 9]
    assert grid.neighbors(11) == [7, 10]
    assert grid.grid_distance(0, 11) == 5
    assert grid.corner_cell(StartCorner.BOTTOM_LEFT) == 0
    assert grid.corner_cell(StartCorner.BOTTOM_RIGHT) == 3
    assert grid.corner_cell(StartCorner.TOP_LEFT) == 8
    assert grid.corner_cell(StartCorner.TOP_RIGHT) == 11
    frame = grid.to_frame()
    assert list(frame.columns) == ["cell", "row", "col", "x", "y"]
    assert len(frame) == 12


# -------- build_map --------


def test_uniform_map():
    grid = make_grid(2, 2)
    prior = build_map(grid, DistributionSpec(kind="uniform"), seed=7)
    assert np.array_equal(prior.p, [0.25, 0.25, 0.25, 0.25])


def test_single_gaussian_peak():
    grid = make_grid(5, 5)
    target = grid.index(3, 1)
    x, y = grid.waypoints[target]
    dist = DistributionSpec(kind="gaussian_mixture", components=[GaussianComponent(1.0, (x, y), (2.0, 2.0))])
    prior = build_map(grid, dist)
    assert int(np.argmax(prior.p)) == target
    assert abs(prior.p.sum() - 1) < 1e-9


def test_bimodal_symmetry():
    grid = make_grid(6, 10)
    a, b = grid.index(3, 2), grid.index(3, 7)
    dist = DistributionSpec(kind="gaussian_mixture", components=[
        GaussianComponent(0.5, tuple(grid.waypoints[a]), (30.0, 30.0)),
        GaussianComponent(0.5, tuple(grid.waypoints[b]), (30.0, 30.0)),
    ])
    prior = build_map(grid, dist)
    assert prior.p[a] == pytest.approx(prior.p[b], abs=1e-9)
    assert abs(prior.p.sum() - 1) < 1e-9


def test_gaussian_uniform_mixture_floor():
    grid = make_grid(10, 10)
    dist = DistributionSpec(
        kind="gaussian_uniform_mixture",
        components=[GaussianComponent(0.6, (20.0, 20.0), (15.0, 15.0))],
        uniform_weight=0.4,
    )
    prior = build_map(grid, dist)
    assert prior.p.min() >= 0.4 / grid.M * 0.99
    assert abs(prior.p.sum() - 1) < 1e-9


def test_map_is_read_only():
    prior = build_map(make_grid(2, 2), DistributionSpec(kind="uniform"))
    with pytest.raises(ValueError):
        prior.p[0] = 1.0


@pytest.mark.parametrize("kwargs", [
    dict(kind="gaussian_mixture", components=[]),
    dict(kind="gaussian_mixture", components=[GaussianComponent(0.7, (0, 0), (1, 1))]),
    dict(kind="gaussian_mixture", components=[GaussianComponent(1.0, (0, 0), (0, 1))]),
    dict(kind="gaussian_uniform_mixture", components=[GaussianComponent(0.5, (0, 0), (1, 1))], uniform_weight=0.4),
])
def test_invalid_distribution(kwargs):
    with pytest.raises(InvalidDistributionError):
        DistributionSpec(**kwargs)


def test_zero_mass_map():
    grid = make_grid(3, 3)
    far = DistributionSpec(kind="gaussian_mixture", components=[GaussianComponent(1.0, (1e6, 1e6), (1.0, 1.0))])
    with pytest.raises(InvalidDistributionError):
        build_map(grid, far)


# -------- sample_target --------


def test_sample_point_mass(rng):
    prior = make_map([1.0, 0.0, 0.0])
    assert all(sample_target(prior, rng) == 0 for _ in range(200))


@pytest.mark.parametrize("p", [[0.25, 0.25, 0.25, 0.25], [0.7, 0.3]])
def test_sample_frequencies(rng, p):
    draws = sample_target(make_map(p), rng, size=100_000)
    freq = np.bincount(draws, minlength=len(p)) / len(draws)
    assert np.allclose(freq, p, atol=0.01)


def test_sample_chi_square(rng):
    prior = make_map(rng.dirichlet(np.ones(16)), rows=4, cols=4)
    draws = sample_target(prior, rng, size=100_000)
    counts = np.bincount(draws, minlength=16)
    _, pvalue = stats.chisquare(counts, prior.p * len(draws))
    assert pvalue > 0.01


def test_sample_skips_zero_cells(rng):
    prior = make_map([0.0, 0.5, 0.0, 0.5])
    draws = sample_target(prior, rng, size=10_000)
    assert set(np.unique(draws)) == {1, 3}
