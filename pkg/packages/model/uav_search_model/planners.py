"""
路径规划器

三种规划器共用 Planner 接口，由仿真器逐步驱动:
    - ZigzagPlanner:    往返（牛耕式）全覆盖扫描，基准算法
    - NaivePlanner:     按先验概率从高到低逐个飞往单元，不更新概率
    - WindowingPlanner: 窗口化滚动时域规划（区域选择 + 期望时间最小化）

每个时间步只能停留或移动到 4 邻接单元。所有 argmax/argmin 的平局取编号最小者。
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import PlannerStuckError
from .models import (
    GridSpec,
    Observation,
    PlannerState,
    ProbabilityMap,
    RegionGrid,
    StartCorner,
    WindowPlannerConfig,
)

logger = logging.getLogger("uav-search-model")

# 概率排序前的舍入位数，使镜像对称单元严格打平
_ORDER_DECIMALS = 12


class PlannerName(str, Enum):
    ZIGZAG = "zigzag"
    NAIVE = "naive"
    WINDOWING = "windowing"


class Planner(ABC):
    """规划器接口：每个试验独占一个实例"""

    name: PlannerName

    def __init__(self, grid: GridSpec):
        self.grid = grid

    def reset(self, start: int, prob_map: ProbabilityMap):
        """新试验开始，无人机位于 start 且已观测过该单元"""

    @abstractmethod
    def next_cell(self, current: int, prob_map: ProbabilityMap) -> int:
        """返回下一个要访问的单元（当前单元或其 4 邻接单元）"""

    def notify(self, observation: Observation, prob_map: ProbabilityMap):
        """观测及更新后的概率图回调"""


# -------- Zigzag --------


def zigzag_plan(grid: GridSpec, start: StartCorner = StartCorner.BOTTOM_LEFT) -> list[int]:
    """牛耕式扫描顺序：逐行往返，相邻两格恰好 4 邻接"""
    start = StartCorner(start)
    bottom = start in (StartCorner.BOTTOM_LEFT, StartCorner.BOTTOM_RIGHT)
    left = start in (StartCorner.BOTTOM_LEFT, StartCorner.TOP_LEFT)
    row_order = range(grid.rows) if bottom else range(grid.rows - 1, -1, -1)

    plan = []
    for k, row in enumerate(row_order):
        cols = range(grid.cols) if (k % 2 == 0) == left else range(grid.cols - 1, -1, -1)
        plan.extend(grid.index(row, col) for col in cols)
    return plan


class ZigzagPlanner(Planner):
    """
    沿扫描序列往返飞行。

    一轮扫描结束后沿原路反向扫描（跳过掉头处的重复单元），
    保证每步都是相邻移动。
    """

    name = PlannerName.ZIGZAG

    def __init__(self, grid: GridSpec, start: StartCorner = StartCorner.BOTTOM_LEFT):
        super().__init__(grid)
        self.plan = zigzag_plan(grid, start)
        self._position = {cell: k for k, cell in enumerate(self.plan)}
        self._pos = 0
        self._dir = 1

    def reset(self, start: int, prob_map: ProbabilityMap):
        self._pos = self._position[start]
        self._dir = 1

    def next_cell(self, current: int, prob_map: ProbabilityMap) -> int:
        if len(self.plan) == 1:
            return current
        nxt = self._pos + self._dir
        if not 0 <= nxt < len(self.plan):
            self._dir = -self._dir
            nxt = self._pos + self._dir
        self._pos = nxt
        return self.plan[nxt]


# -------- Naive --------


def probability_order(p: np.ndarray, *, positive_only: bool = True) -> np.ndarray:
    """单元按概率降序排列，平局取编号小者；positive_only 时去掉概率为 0 的单元"""
    idx = np.arange(len(p))
    order = np.lexsort((idx, -np.round(p, _ORDER_DECIMALS)))
    if positive_only:
        return order[p[order] > 0]
    return order


def step_toward(grid: GridSpec, current: int, target: int) -> int:
    """沿最短网格路径向 target 走一步：先对齐列，再对齐行"""
    row, col = grid.row_col(current)
    t_row, t_col = grid.row_col(target)
    if col != t_col:
        col += 1 if t_col > col else -1
    elif row != t_row:
        row += 1 if t_row > row else -1
    return grid.index(row, col)


def _commit(order: Sequence[int], current: int, committed_target: Optional[int]) -> int:
    """承诺的目标单元：未承诺或已到达时顺延到下一个不是当前单元的单元"""
    pos = 0
    if committed_target is not None:
        pos = int(np.flatnonzero(np.asarray(order) == committed_target)[0])
    for _ in range(2):
        if order[pos] != current:
            break
        pos = (pos + 1) % len(order)
    return int(order[pos])


def naive_next(
    prob_map: ProbabilityMap,
    current: int,
    committed_target: Optional[int],
    *,
    order: Optional[Sequence[int]] = None,
) -> int:
    """
    Naive 规划的一步，返回下一个单元。

    order 为概率顺序（缺省时由 prob_map 计算）。到达承诺目标即视为已访问，
    改为承诺顺序中的下一个单元；全部访问后从头开始新一轮。
    """
    if order is None:
        order = probability_order(prob_map.p)
    target = _commit(order, current, committed_target)
    return step_toward(prob_map.grid, current, target)


class NaivePlanner(Planner):
    """只使用先验概率图的顺序，不响应任何概率更新"""

    name = PlannerName.NAIVE

    def __init__(self, grid: GridSpec):
        super().__init__(grid)
        self._order: np.ndarray = np.arange(0)
        self._target: Optional[int] = None
        self._prior: Optional[ProbabilityMap] = None

    @property
    def committed_target(self) -> Optional[int]:
        return self._target

    def reset(self, start: int, prob_map: ProbabilityMap):
        self._order = probability_order(prob_map.p)
        self._target = None
        self._prior = prob_map

    def next_cell(self, current: int, prob_map: ProbabilityMap) -> int:
        self._target = _commit(self._order, current, self._target)
        return naive_next(self._prior, current, self._target, order=self._order)


# -------- Windowing --------


def region_aggregate(prob_map: ProbabilityMap, W: int, current_cell: int = 0) -> RegionGrid:
    """把 W×W 单元块聚合为区域，P(R_l) 为成员单元概率之和"""
    if W < 1:
        raise ValueError(f"窗口大小 W 必须 ≥ 1: {W}")
    grid = prob_map.grid
    region_rows = -(-grid.rows // W)
    region_cols = -(-grid.cols // W)

    block = np.add.reduceat(prob_map.as_grid(), np.arange(0, grid.rows, W), axis=0)
    region_prob = np.add.reduceat(block, np.arange(0, grid.cols, W), axis=1).ravel()

    cell_rows, cell_cols = np.divmod(np.arange(grid.M), grid.cols)
    cell_region = (cell_rows // W) * region_cols + cell_cols // W
    n = region_rows * region_cols
    counts = np.bincount(cell_region, minlength=n)
    centers = np.column_stack([
        np.bincount(cell_region, weights=grid.waypoints[:, 0], minlength=n) / counts,
        np.bincount(cell_region, weights=grid.waypoints[:, 1], minlength=n) / counts,
    ])

    return RegionGrid(
        W=W,
        region_rows=region_rows,
        region_cols=region_cols,
        region_prob=region_prob,
        region_centers=centers,
        cell_region=cell_region,
        current_region=int(cell_region[current_cell]),
    )


def _toward_region(regions: RegionGrid, target: int) -> int:
    """相邻区域中中心方向与 R_c→target 连线夹角最小者"""
    rc = regions.current_region
    adj = regions.adjacent(rc)
    origin = regions.region_centers[rc]
    goal = regions.region_centers[target] - origin
    vecs = regions.region_centers[adj] - origin
    cos = vecs @ goal / (np.linalg.norm(vecs, axis=1) * np.linalg.norm(goal))
    angles = np.round(np.arccos(np.clip(cos, -1.0, 1.0)), _ORDER_DECIMALS)
    return adj[int(np.argmin(angles))]


def choose_next_region(regions: RegionGrid) -> int:
    """
    选择下一个目标区域 R_n。

    P(R_max)/P(R_max_local) > d(R_c,R_max)/d(R_c,R_max_local) 时飞往 R_p，
    否则飞往 R_max_local；R_max 就是当前区域时留在原区域。
    """
    rc = regions.current_region
    probs = regions.region_prob
    r_max = int(np.argmax(probs))
    adj = regions.adjacent(rc)
    if r_max == rc or not adj:
        return rc

    r_local = adj[int(np.argmax(probs[adj]))]
    if probs[r_local] == 0:
        return _toward_region(regions, r_max)

    prob_ratio = probs[r_max] / probs[r_local]
    dist_ratio = regions.distance(rc, r_max) / regions.distance(rc, r_local)
    if prob_ratio > dist_ratio:
        return _toward_region(regions, r_max)
    return r_local


def straight_path(grid: GridSpec, current: int, neighbor: int, length: int) -> list[int]:
    """从 neighbor 起沿 current→neighbor 方向延伸的直线路径，到边界截断"""
    row, col = grid.row_col(current)
    n_row, n_col = grid.row_col(neighbor)
    d_row, d_col = n_row - row, n_col - col
    path = []
    row, col = n_row, n_col
    while len(path) < length and 0 <= row < grid.rows and 0 <= col < grid.cols:
        path.append(grid.index(row, col))
        row += d_row
        col += d_col
    return path


def window_expected_time(candidate_path: Sequence[int], prob_map: ProbabilityMap, M: int) -> float:
    """
    候选路径的期望时间评分:

        Σ_{i=1..L} i·p(path_i) + (M - L)·(1 - Σ p(path_k))

    L 为路径实际长度（边界截断时小于 W），t_i = i。
    """
    probs = prob_map.p[list(candidate_path)]
    length = len(probs)
    captured = probs.sum()
    return float(np.dot(np.arange(1, length + 1), probs) + (M - length) * (1 - captured))


def next_cell_window(
    state: PlannerState,
    prob_map: ProbabilityMap,
    cfg: WindowPlannerConfig,
    allowed: Optional[Sequence[int]] = None,
) -> int:
    """在（允许的）邻接单元中选择直线候选路径评分最小者的第一格"""
    grid = prob_map.grid
    candidates = grid.neighbors(state.current)
    if grid.M == 1:
        return state.current
    if allowed is not None:
        candidates = [c for c in candidates if c in allowed]
    if not candidates:
        raise PlannerStuckError(f"单元 {state.current} 没有可达的邻接单元")

    scores = [
        window_expected_time(straight_path(grid, state.current, n, cfg.W), prob_map, cfg.M)
        for n in candidates
    ]
    return candidates[int(np.argmin(scores))]


def _closer_neighbors(grid: GridSpec, current: int, point: np.ndarray) -> Optional[list[int]]:
    """到 point 欧氏距离严格减小的邻接单元；没有时退而取距离不增大的；仍没有返回 None"""
    d_now = np.hypot(*(grid.waypoints[current] - point))
    neighbors = grid.neighbors(current)
    dist = {n: np.hypot(*(grid.waypoints[n] - point)) for n in neighbors}
    closer = [n for n in neighbors if dist[n] < d_now - 1e-9]
    if closer:
        return closer
    level = [n for n in neighbors if dist[n] <= d_now + 1e-9]
    return level or None


def region_bias(grid: GridSpec, current: int, regions: RegionGrid, target_region: int) -> Optional[list[int]]:
    """
    飞往 R_n 途中只允许不增大到 R_n 中心欧氏距离的方向，优先严格靠近的方向。

    已在 R_n 内或没有这样的方向时返回 None（不限制）。
    """
    if regions.region_of(current) == target_region:
        return None
    return _closer_neighbors(grid, current, regions.region_centers[target_region])


def region_focus(prob_map: ProbabilityMap, regions: RegionGrid, region: int) -> int:
    """区域内概率最大的单元，平局取编号小者"""
    cells = np.flatnonzero(regions.cell_region == region)
    return int(cells[np.argmax(np.round(prob_map.p[cells], _ORDER_DECIMALS))])


def windowing_planner_step(state: PlannerState, prob_map: ProbabilityMap, cfg: WindowPlannerConfig) -> int:
    """
    窗口规划的一步（prob_map 为已按观测更新过的概率图）。

    每 W 次观测重新聚合区域；上一个 R_n 已搜索过（观测过其 focus_cell）时
    才重新选择 R_n。飞往 R_n 途中按区域中心限制方向，进入 R_n 后
    逐步靠近 focus_cell，之后到窗口结束不加限制。
    每步最终由 next_cell_window 选择下一格。state 原地更新。
    """
    if state.window != cfg.W:
        raise ValueError(f"状态窗口 {state.window} 与配置 W={cfg.W} 不一致")
    grid = prob_map.grid
    if state.regions is None or state.steps_in_window % state.window == 0:
        regions = region_aggregate(prob_map, state.window, state.current)
        state.regions = regions
        state.region_prob = regions.region_prob
        if state.target_region is None or state.searched:
            state.target_region = choose_next_region(regions)
            state.focus_cell = None
            state.searched = False
            logger.debug(
                "区域选择: 当前 R%d → 目标 R%d (P=%.4f)",
                regions.current_region, state.target_region, state.region_prob[state.target_region],
            )
    state.steps_in_window += 1
    state.current_region = state.regions.region_of(state.current)

    if not state.searched and state.current_region == state.target_region:
        if state.focus_cell is None:
            state.focus_cell = region_focus(prob_map, state.regions, state.target_region)
        state.searched = state.current == state.focus_cell

    if state.searched:
        allowed = None
    elif state.focus_cell is not None:
        allowed = _closer_neighbors(grid, state.current, grid.waypoints[state.focus_cell])
    else:
        allowed = region_bias(grid, state.current, state.regions, state.target_region)
    nxt = next_cell_window(state, prob_map, cfg, allowed)
    state.current = nxt
    return nxt


class WindowingPlanner(Planner):
    """窗口化滚动时域规划器"""

    name = PlannerName.WINDOWING

    def __init__(self, grid: GridSpec, window: int = 3):
        super().__init__(grid)
        self.cfg = WindowPlannerConfig(W=window, M=grid.M)
        self.state = PlannerState(current=0, window=window)

    def reset(self, start: int, prob_map: ProbabilityMap):
        self.state = PlannerState(current=start, window=self.cfg.W)

    def next_cell(self, current: int, prob_map: ProbabilityMap) -> int:
        self.state.current = current
        return windowing_planner_step(self.state, prob_map, self.cfg)


def make_planner(
    name: PlannerName | str,
    grid: GridSpec,
    *,
    window: int = 3,
    start: StartCorner = StartCorner.BOTTOM_LEFT,
) -> Planner:
    """按名称创建规划器"""
    name = PlannerName(name)
    if name == PlannerName.ZIGZAG:
        return ZigzagPlanner(grid, start)
    if name == PlannerName.NAIVE:
        return NaivePlanner(grid)
    return WindowingPlanner(grid, window)
