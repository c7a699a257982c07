import numpy as np
import pytest

from conftest import make_grid, make_map, random_map
from uav_search_model import (
    DistributionSpec,
    GaussianComponent,
    NaivePlanner,
    PlannerName,
    PlannerState,
    PlannerStuckError,
    ProbabilityMap,
    RegionGrid,
    SensorModel,
    StartCorner,
    WindowingPlanner,
    WindowPlannerConfig,
    ZigzagPlanner,
    build_map,
    choose_next_region,
    make_planner,
    naive_next,
    next_cell_window,
    region_aggregate,
    update_no_detection,
    window_expected_time,
    windowing_planner_step,
    zigzag_plan,
)
from uav_search_model.planners import probability_order, region_bias, region_focus, straight_path


def fly(planner, prior: ProbabilityMap, start: int, steps: int, sensor=SensorModel(e_d=0.1)) -> list[int]:
    """目标不存在时的访问序列：每次观测后按未检测更新"""
    prob_map = prior
    current = start
    planner.reset(current, prob_map)
    trace = [current]
    for _ in range(steps - 1):
        prob_map = update_no_detection(prob_map, current, sensor)
        current = planner.next_cell(current, prob_map)
        trace.append(current)
    return trace


def assert_legal(grid, trace):
    for a, b in zip(trace, trace[1:]):
        assert 0 <= b < grid.M
        assert grid.grid_distance(a, b) <= 1


def gaussian_map(rows, cols, peaks, std_cells):
    grid = make_grid(rows, cols)
    comps = [
        GaussianComponent(1.0 / len(peaks), tuple(grid.waypoints[grid.index(r, c)]), (20.0 * std_cells,) * 2)
        for r, c in peaks
    ]
    return build_map(grid, DistributionSpec(kind="gaussian_mixture", components=comps))


# -------- Zigzag --------


def test_zigzag_3x3():
    assert zigzag_plan(make_grid(3, 3)) == [0, 1, 2, 5, 4, 3, 6, 7, 8]


def test_zigzag_single_row():
    assert zigzag_plan(make_grid(1, 6)) == list(range(6))


@pytest.mark.parametrize("corner", list(StartCorner))
@pytest.mark.parametrize("rows, cols", [(3, 3), (4, 5), (1, 4), (5, 1)])
def test_zigzag_coverage(corner, rows, cols):
    grid = make_grid(rows, cols)
    plan = zigzag_plan(grid, corner)
    assert plan[0] == grid.corner_cell(corner)
    assert sorted(plan) == list(range(grid.M))
    assert_legal(grid, plan)
    assert all(grid.grid_distance(a, b) == 1 for a, b in zip(plan, plan[1:]))


def test_zigzag_ping_pong():
    grid = make_grid(2, 3)
    prior = make_map(np.full(6, 1 / 6), rows=2, cols=3)
    trace = fly(ZigzagPlanner(grid), prior, 0, 12)
    assert trace == [0, 1, 2, 5, 4, 3, 4, 5, 2, 1, 0, 1]


def test_zigzag_single_cell():
    grid = make_grid(1, 1)
    planner = ZigzagPlanner(grid)
    planner.reset(0, None)
    assert planner.next_cell(0, None) == 0


# -------- Naive --------


def test_probability_order_ties():
    p = np.array([0.1, 0.3, 0.0, 0.3, 0.3 - 1e-15])
    assert list(probability_order(p)) == [1, 3, 4, 0]


def test_naive_uniform_2x2():
    prior = make_map(np.full(4, 0.25), rows=2, cols=2)
    trace = fly(NaivePlanner(prior.grid), prior, 0, 8)
    assert trace == [0, 1, 0, 2, 3, 2, 0, 1]


def test_naive_point_mass():
    grid = make_grid(4, 4)
    p = np.zeros(16)
    p[grid.index(3, 2)] = 1.0
    prior = ProbabilityMap(grid, p)
    planner = NaivePlanner(grid)
    planner.reset(0, prior)
    current, trace = 0, [0]
    for _ in range(10):
        current = planner.next_cell(current, prior)
        trace.append(current)
    assert trace[:6] == [0, 1, 2, 6, 10, 14]
    assert all(c == 14 for c in trace[5:])
    assert planner.committed_target == 14


def test_naive_ignores_updates():
    prior = make_map([0.1, 0.2, 0.3, 0.4], rows=2, cols=2)
    cell_a = naive_next(prior, 0, None)
    assert cell_a == 1
    updated = update_no_detection(prior, 3, SensorModel(e_d=0.0))
    planner = NaivePlanner(prior.grid)
    planner.reset(0, prior)
    assert planner.next_cell(0, updated) == cell_a
    assert planner.committed_target == 3


def test_naive_next_advances_on_arrival():
    prior = make_map([0.1, 0.2, 0.3, 0.4], rows=2, cols=2)
    # 已到达承诺目标 3，改为承诺 2
    assert naive_next(prior, 3, 3) == 2
    assert naive_next(prior, 0, 2) == 2
    assert naive_next(prior, 1, 2) == 0


def test_naive_oscillates_between_peaks():
    prior = gaussian_map(5, 20, [(2, 1), (2, 18)], std_cells=1.0)
    trace = fly(NaivePlanner(prior.grid), prior, 0, 300)
    assert_legal(prior.grid, trace)
    cols = np.array([prior.grid.row_col(c)[1] for c in trace])
    inner = np.mean((cols >= 5) & (cols <= 14))
    assert inner >= 0.3


# -------- 区域划分 --------


def test_region_uniform_6x6():
    regions = region_aggregate(make_map(np.full(36, 1 / 36), rows=6, cols=6), 3)
    assert regions.n_regions == 4
    assert np.allclose(regions.region_prob, 0.25)


def test_region_identity(rng):
    prior = random_map(rng, 4, 5)
    regions = region_aggregate(prior, 1)
    assert np.allclose(regions.region_prob, prior.p)


def test_region_9x9(rng):
    prior = random_map(rng, 9, 9)
    regions = region_aggregate(prior, 3, current_cell=80)
    assert (regions.region_rows, regions.region_cols) == (3, 3)
    assert abs(regions.region_prob.sum() - 1) < 1e-9
    assert regions.current_region == 8
    assert regions.region_prob[4] == pytest.approx(prior.as_grid()[3:6, 3:6].sum())


def test_region_ragged(rng):
    prior = random_map(rng, 5, 7)
    regions = region_aggregate(prior, 3)
    assert (regions.region_rows, regions.region_cols) == (2, 3)
    assert abs(regions.region_prob.sum() - 1) < 1e-9
    assert regions.region_of(prior.grid.index(4, 6)) == 5
    assert regions.region_prob[5] == pytest.approx(prior.as_grid()[3:5, 6:7].sum())
    assert regions.adjacent(4) == [1, 3, 5]
    assert regions.distance(0, 1) == pytest.approx(regions.distance(1, 0))
    assert regions.distance(2, 2) == 0.0


def regions_3x3(probs, current):
    centers = np.array([(c, r) for r in range(3) for c in range(3)], dtype=float)
    return RegionGrid(
        W=3,
        region_rows=3,
        region_cols=3,
        region_prob=np.asarray(probs, dtype=float),
        region_centers=centers,
        cell_region=np.arange(9),
        current_region=current,
    )


def test_choose_far_region():
    # R_c=0, R_max=2 (距离 2), R_max_local=3 (距离 1)，R_p=1
    probs = [0.1, 0.05, 0.5, 0.2, 0.03, 0.03, 0.03, 0.03, 0.03]
    assert choose_next_region(regions_3x3(probs, 0)) == 1


def test_choose_local_region():
    probs = [0.1, 0.05, 0.35, 0.2, 0.06, 0.06, 0.06, 0.06, 0.06]
    assert choose_next_region(regions_3x3(probs, 0)) == 3


def test_choose_adjacent_max():
    probs = [0.1, 0.4, 0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05]
    assert choose_next_region(regions_3x3(probs, 0)) == 1


def test_choose_uniform_lowest_index():
    assert choose_next_region(regions_3x3(np.full(9, 1 / 9), 4)) == 1


def test_choose_stay_when_current_is_max():
    probs = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]
    assert choose_next_region(regions_3x3(probs, 4)) == 4


def test_choose_empty_neighbourhood():
    # 相邻区域全为 0 时朝 R_max 方向前进
    probs = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]
    assert choose_next_region(regions_3x3(probs, 0)) == 1
    assert choose_next_region(regions_3x3(probs, 1)) == 4


# -------- 窗口评分 --------


@pytest.mark.parametrize("probs, M, expected", [
    ([0.1, 0.3], 9, 4.9),
    ([0.0, 0.0], 9, 7.0),
    ([0.25, 0.75], 2, 1.75),
])
def test_window_expected_time(probs, M, expected):
    prior = make_map(list(probs) + [1 - sum(probs)] if sum(probs) < 1 else probs)
    path = list(range(len(probs)))
    assert window_expected_time(path, prior, M) == pytest.approx(expected)


def test_next_cell_window_example():
    prior = make_map([0.0, 0.0, 0.0, 0.1, 0.9])
    state = PlannerState(current=2)
    assert next_cell_window(state, prior, WindowPlannerConfig(W=2, M=5)) == 3


@pytest.mark.parametrize("W", [1, 2, 3])
def test_next_cell_window_point_mass(W):
    grid = make_grid(4, 4)
    for n in grid.neighbors(5):
        p = np.zeros(16)
        p[n] = 1.0
        state = PlannerState(current=5)
        assert next_cell_window(state, ProbabilityMap(grid, p), WindowPlannerConfig(W=W, M=16)) == n


def test_next_cell_window_symmetric():
    prior = make_map(np.full(9, 1 / 9), rows=3, cols=3)
    state = PlannerState(current=4)
    assert next_cell_window(state, prior, WindowPlannerConfig(W=1, M=9)) == 1


def test_next_cell_window_no_candidates():
    prior = make_map(np.full(4, 0.25), rows=2, cols=2)
    with pytest.raises(PlannerStuckError):
        next_cell_window(PlannerState(current=0), prior, WindowPlannerConfig(W=1, M=4), allowed=[3])


def test_straight_path_truncated():
    grid = make_grid(3, 4)
    assert straight_path(grid, 5, 6, 3) == [6, 7]
    assert straight_path(grid, 5, 1, 3) == [1]
    assert straight_path(grid, 0, 4, 3) == [4, 8]


def _brute_force_window(grid, p, current, W, M, allowed):
    row, col = grid.row_col(current)
    scored = []
    for d_row, d_col in ((-1, 0), (0, -1), (0, 1), (1, 0)):
        path = []
        r, c = row + d_row, col + d_col
        while len(path) < W and 0 <= r < grid.rows and 0 <= c < grid.cols:
            path.append(r * grid.cols + c)
            r, c = r + d_row, c + d_col
        if not path or (allowed is not None and path[0] not in allowed):
            continue
        captured = sum(p[k] for k in path)
        score = sum((i + 1) * p[k] for i, k in enumerate(path)) + (M - len(path)) * (1 - captured)
        scored.append((score, path[0]))
    best = min(s for s, _ in scored)
    return min(cell for s, cell in scored if s <= best + 1e-12)


def test_next_cell_window_oracle(rng):
    for case in range(500):
        rows, cols = (int(x) for x in rng.integers(1, 6, size=2))
        if rows * cols < 2:
            rows, cols = 2, 2
        M = rows * cols
        kind = case % 3
        if kind == 0:
            prior = random_map(rng, rows, cols)
        elif kind == 1:
            prior = random_map(rng, rows, cols, zeros=True)
        else:
            prior = make_map(np.full(M, 1 / M), rows=rows, cols=cols)
        W = int(rng.choice([w for w in (1, 2, 3) if w * w <= M]))
        current = int(rng.integers(M))
        neighbors = prior.grid.neighbors(current)
        allowed = None
        if rng.random() < 0.3:
            keep = rng.random(len(neighbors)) < 0.6
            keep[int(rng.integers(len(neighbors)))] = True
            allowed = [n for n, k in zip(neighbors, keep) if k]

        got = next_cell_window(PlannerState(current=current), prior, WindowPlannerConfig(W=W, M=M), allowed)
        expected = _brute_force_window(prior.grid, prior.p, current, W, M, allowed)
        assert got == expected, f"case {case}: {rows}x{cols} W={W} current={current}"


# -------- 窗口规划器 --------


def test_window_config_validation():
    with pytest.raises(ValueError):
        WindowPlannerConfig(W=0, M=9)
    with pytest.raises(ValueError):
        WindowPlannerConfig(W=4, M=9)
    prior = make_map(np.full(9, 1 / 9), rows=3, cols=3)
    with pytest.raises(ValueError):
        windowing_planner_step(PlannerState(current=0), prior, WindowPlannerConfig(W=3, M=9))


def test_windowing_uniform_w1_stays_in_grid():
    prior = make_map(np.full(25, 1 / 25), rows=5, cols=5)
    trace = fly(WindowingPlanner(prior.grid, window=1), prior, 0, 200)
    assert_legal(prior.grid, trace)


def test_windowing_approaches_single_peak():
    prior = gaussian_map(9, 9, [(4, 4)], std_cells=3.0)
    grid = prior.grid
    peak = grid.index(4, 4)
    trace = fly(WindowingPlanner(grid, window=3), prior, 0, 40)
    assert_legal(grid, trace)
    assert peak in trace
    approach = trace[:trace.index(peak) + 1]
    dist = [grid.grid_distance(c, peak) for c in approach]
    assert all(b <= a for a, b in zip(dist, dist[1:]))


def test_windowing_covers_both_modes():
    prior = gaussian_map(6, 12, [(3, 2), (3, 9)], std_cells=1.5)
    grid = prior.grid
    trace = fly(WindowingPlanner(grid, window=3), prior, 0, 5 * grid.M)
    assert_legal(grid, trace)
    assert grid.index(3, 2) in trace
    assert grid.index(3, 9) in trace


def test_region_bias_prefers_closer():
    prior = make_map(np.full(36, 1 / 36), rows=6, cols=6)
    regions = region_aggregate(prior, 3, 0)
    assert sorted(region_bias(prior.grid, 0, regions, 1)) == [1, 6]
    assert region_bias(prior.grid, 4, regions, 1) is None


def test_region_bias_drops_sideways_move():
    # W=2 时区域中心落在单元之间，横向移动与当前距离相等
    prior = make_map(np.full(16, 1 / 16), rows=4, cols=4)
    regions = region_aggregate(prior, 2, 4)
    assert region_bias(prior.grid, 4, regions, 1) == [5]


def test_region_focus():
    prior = make_map([0.05, 0.3, 0.05, 0.05, 0.3, 0.05, 0.1, 0.05, 0.05], rows=3, cols=3)
    regions = region_aggregate(prior, 1, 0)
    assert region_focus(prior, regions, 4) == 4
    regions = region_aggregate(prior, 3, 0)
    # 平局取编号小者
    assert region_focus(prior, regions, 0) == 1


def step_states(prior: ProbabilityMap, steps: int, window: int = 3):
    """直接驱动 windowing_planner_step，逐步产出 ((移动前单元, 目标区域, searched), 移动后的状态)"""
    cfg = WindowPlannerConfig(W=window, M=prior.grid.M)
    state = PlannerState(current=0, window=window)
    prob_map = prior
    for _ in range(steps):
        prob_map = update_no_detection(prob_map, state.current, SensorModel(e_d=0.1))
        before = (state.current, state.target_region, state.searched)
        windowing_planner_step(state, prob_map, cfg)
        yield before, state


def test_windowing_holds_region_until_searched():
    prior = gaussian_map(9, 15, [(1, 1), (7, 13)], std_cells=1.5)
    changes = 0
    for (_, target, searched), state in step_states(prior, 3 * prior.grid.M):
        if target is not None and state.target_region != target:
            changes += 1
            assert searched
    assert changes > 0


def test_windowing_walks_to_region_focus():
    prior = gaussian_map(9, 15, [(1, 1), (7, 13)], std_cells=1.5)
    grid = prior.grid

    def dist(a, b):
        return np.hypot(*(grid.waypoints[a] - grid.waypoints[b]))

    for (here, _, _), state in step_states(prior, 3 * grid.M):
        if state.focus_cell is not None and not state.searched:
            assert state.regions.region_of(here) == state.target_region
            assert dist(state.current, state.focus_cell) < dist(here, state.focus_cell)


@pytest.mark.parametrize("name", list(PlannerName))
def test_planners_deterministic(name, rng):
    prior = random_map(rng, 4, 6)
    a = fly(make_planner(name, prior.grid, window=2), prior, 0, 60)
    b = fly(make_planner(name, prior.grid, window=2), prior, 0, 60)
    assert a == b
    assert_legal(prior.grid, a)


def test_make_planner_types():
    grid = make_grid(3, 3)
    assert isinstance(make_planner("zigzag", grid), ZigzagPlanner)
    assert isinstance(make_planner(PlannerName.NAIVE, grid), NaivePlanner)
    planner = make_planner("windowing", grid, window=3)
    assert isinstance(planner, WindowingPlanner)
    assert planner.cfg == WindowPlannerConfig(W=3, M=9)
    with pytest.raises(ValueError):
        make_planner("gmm", grid)
