"""
搜索模型数据结构

所有模型基于标准库 dataclass，数值字段使用 numpy 数组。
构造后不可变，可在并发的试验进程之间只读共享；需要修改时生成新对象。
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import pandas as pd

from .errors import InvalidCameraError, InvalidDistributionError


# 概率和的容差（构造与每次更新之后）
PROB_SUM_TOL = 1e-9


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class DistributionKind(str, Enum):
    """目标位置先验分布类型"""

    UNIFORM = "uniform"
    GAUSSIAN_MIXTURE = "gaussian_mixture"
    GAUSSIAN_UNIFORM_MIXTURE = "gaussian_uniform_mixture"


class StartCorner(str, Enum):
    """无人机起飞角点"""

    BOTTOM_LEFT = "bottom_left"
    BOTTOM_RIGHT = "bottom_right"
    TOP_LEFT = "top_left"
    TOP_RIGHT = "top_right"


# -------- 区域划分 --------


@dataclass(frozen=True)
class CameraSpec:
    """
    相机视场参数

    Attributes:
        altitude:         飞行高度 H (m)
        vertical_angle:   视场角 α (rad)，决定地面投影宽度 w
        horizontal_angle: 视场角 β (rad)，决定地面投影长度 l
    """
    altitude: float
    vertical_angle: float
    horizontal_angle: float

    def __post_init__(self):
        if not self.altitude > 0:
            raise InvalidCameraError(f"飞行高度必须为正: {self.altitude}")
        for name in ("vertical_angle", "horizontal_angle"):
            angle = getattr(self, name)
            if not 0 < angle < math.pi:
                raise InvalidCameraError(f"{name} 必须在 (0, π) 内: {angle}")


@dataclass(frozen=True, eq=False)
class GridSpec:
    """
    搜索区域的网格划分

    单元按行优先编号，第 0 行在底部，原点为左下角航点。
    waypoints[k] 为单元 C_k 的中心坐标 (x, y)，单位 m。
    最后一行/列允许越出区域边界，保证所有单元大小相同。
    """
    area_width: float
    area_height: float
    cell_width: float
    cell_height: float
    overlap_x: float
    overlap_y: float
    rows: int
    cols: int
    waypoints: np.ndarray = field(repr=False)

    @property
    def M(self) -> int:
        return self.rows * self.cols

    @property
    def stride_x(self) -> float:
        return self.cell_width * (1 - self.overlap_x)

    @property
    def stride_y(self) -> float:
        return self.cell_height * (1 - self.overlap_y)

    @property
    def step_length(self) -> float:
        """单步飞行距离（两个方向步长的均值，用于时间步与秒的换算）"""
        return (self.stride_x + self.stride_y) / 2

    @property
    def cell_area(self) -> float:
        return self.stride_x * self.stride_y

    def index(self, row: int, col: int) -> int:
        return row * self.cols + col

    def row_col(self, cell: int) -> tuple[int, int]:
        return divmod(int(cell), self.cols)

    def neighbors(self, cell: int) -> list[int]:
        """4 邻接的界内单元，按编号升序（下、左、右、上）"""
        row, col = self.row_col(cell)
        out = []
        if row > 0:
            out.append(cell - self.cols)
        if col > 0:
            out.append(cell - 1)
        if col < self.cols - 1:
            out.append(cell + 1)
        if row < self.rows - 1:
            out.append(cell + self.cols)
        return out

    def grid_distance(self, a: int, b: int) -> int:
        """两单元之间的曼哈顿步数"""
        ra, ca = self.row_col(a)
        rb, cb = self.row_col(b)
        return abs(ra - rb) + abs(ca - cb)

    def corner_cell(self, corner: StartCorner = StartCorner.BOTTOM_LEFT) -> int:
        corner = StartCorner(corner)
        row = 0 if corner in (StartCorner.BOTTOM_LEFT, StartCorner.BOTTOM_RIGHT) else self.rows - 1
        col = 0 if corner in (StartCorner.BOTTOM_LEFT, StartCorner.TOP_LEFT) else self.cols - 1
        return self.index(row, col)

    def cell_of(self, x: float, y: float) -> int:
        """坐标所在（最近中心）的单元"""
        col = min(max(int(round((x - self.cell_width / 2) / self.stride_x)), 0), self.cols - 1)
        row = min(max(int(round((y - self.cell_height / 2) / self.stride_y)), 0), self.rows - 1)
        return self.index(row, col)

    def to_frame(self) -> pd.DataFrame:
        rows, cols = np.divmod(np.arange(self.M), self.cols)
        return pd.DataFrame({
            "cell": np.arange(self.M),
            "row": rows,
            "col": cols,
            "x": self.waypoints[:, 0],
            "y": self.waypoints[:, 1],
        })


# -------- 先验分布与概率图 --------


@dataclass(frozen=True)
class GaussianComponent:
    """混合分布中的一个高斯分量，均值与标准差单位为 m"""
    weight: float
    mean: tuple[float, float]
    std: tuple[float, float]


@dataclass(frozen=True)
class DistributionSpec:
    """
    目标位置先验

    Attributes:
        kind:           分布类型
        components:     高斯分量（uniform 类型忽略）
        uniform_weight: 均匀分量权重，仅 gaussian_uniform_mixture 使用
    """
    kind: DistributionKind
    components: tuple[GaussianComponent, ...] = ()
    uniform_weight: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", DistributionKind(self.kind))
        object.__setattr__(self, "components", tuple(self.components))
        if self.kind == DistributionKind.UNIFORM:
            return
        if not self.components:
            raise InvalidDistributionError(f"{self.kind.value} 至少需要一个高斯分量")
        if self.kind == DistributionKind.GAUSSIAN_MIXTURE and self.uniform_weight != 0:
            raise InvalidDistributionError("gaussian_mixture 不允许均匀分量")
        if not 0 <= self.uniform_weight <= 1:
            raise InvalidDistributionError(f"uniform_weight 必须在 [0, 1] 内: {self.uniform_weight}")
        for comp in self.components:
            if comp.weight < 0:
                raise InvalidDistributionError(f"分量权重不能为负: {comp.weight}")
            if min(comp.std) <= 0:
                raise InvalidDistributionError(f"标准差必须为正: {comp.std}")
        total = sum(c.weight for c in self.components) + self.uniform_weight
        if abs(total - 1) > PROB_SUM_TOL:
            raise InvalidDistributionError(f"权重之和必须为 1，实际为 {total}")


@dataclass(frozen=True, eq=False)
class ProbabilityMap:
    """
    概率图：每个单元存在目标的概率 p_i

    p 为只读数组，所有更新都返回新的 ProbabilityMap。
    """
    grid: GridSpec = field(repr=False)
    p: np.ndarray

    def __post_init__(self):
        p = _frozen_array(self.p)
        if p.shape != (self.grid.M,):
            raise ValueError(f"概率向量长度应为 {self.grid.M}，实际为 {p.shape}")
        if p.min() < 0 or p.max() > 1:
            raise ValueError("概率必须在 [0, 1] 内")
        total = p.sum()
        if abs(total - 1) > PROB_SUM_TOL:
            raise ValueError(f"概率之和必须为 1，实际为 {total!r}")
        object.__setattr__(self, "p", p)

    @property
    def M(self) -> int:
        return self.grid.M

    def with_values(self, p: np.ndarray) -> "ProbabilityMap":
        return ProbabilityMap(self.grid, p)

    def as_grid(self) -> np.ndarray:
        """rows × cols 视图，第 0 行在底部"""
        return self.p.reshape(self.grid.rows, self.grid.cols)

    def to_frame(self) -> pd.DataFrame:
        """导出 (row, col, p)，用于热力图"""
        rows, cols = np.divmod(np.arange(self.M), self.grid.cols)
        return pd.DataFrame({"row": rows, "col": cols, "p": self.p})


# -------- 传感器 --------


@dataclass(frozen=True)
class SensorModel:
    """
    观测模型

    Attributes:
        e_d:     漏检概率 P(D^c | I)
        e_f:     虚警概率 P(D | I^c)
        delta_f: 虚警地面核查耗时 Δ_f（时间步）
    """
    e_d: float
    e_f: float = 0.0
    delta_f: int = 0

    def __post_init__(self):
        if not 0 <= self.e_d <= 1:
            raise ValueError(f"e_d 必须在 [0, 1] 内: {self.e_d}")
        if not 0 <= self.e_f < 1:
            raise ValueError(f"e_f 必须在 [0, 1) 内: {self.e_f}")
        if self.delta_f < 0:
            raise ValueError(f"delta_f 不能为负: {self.delta_f}")


@dataclass(frozen=True)
class Observation:
    """
    一次观测

    Attributes:
        cell:                 被观测的单元
        detected:             传感器是否报告目标
        ground_truth_present: 目标是否真的在该单元（仅仿真器可见）
    """
    cell: int
    detected: bool
    ground_truth_present: bool

    @property
    def false_alarm(self) -> bool:
        return self.detected and not self.ground_truth_present


# -------- 解析式 --------


@dataclass(frozen=True, eq=False)
class SimplifiedScenario:
    """
    简化场景：按概率从高到低瞬移访问，不更新概率

    probs 必须非增且和为 1；下标按 1 起计（第 i 个被访问的单元）。
    """
    probs: np.ndarray
    e_d: float
    e_f: float = 0.0
    delta_f: float = 0.0

    def __post_init__(self):
        probs = _frozen_array(self.probs)
        if abs(probs.sum() - 1) > PROB_SUM_TOL:
            raise ValueError(f"probs 之和必须为 1，实际为 {probs.sum()!r}")
        if np.any(np.diff(probs) > 0):
            raise ValueError("probs 必须按非增顺序排列")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_map(cls, prob_map: ProbabilityMap, sensor: SensorModel) -> "SimplifiedScenario":
        return cls(np.sort(prob_map.p)[::-1], sensor.e_d, sensor.e_f, sensor.delta_f)

    @property
    def M(self) -> int:
        return len(self.probs)

    @property
    def expected_index(self) -> float:
        """E[I] = Σ i·p_i"""
        return float(np.dot(np.arange(1, self.M + 1), self.probs))


@dataclass(frozen=True, eq=False)
class FirstDetectionPMF:
    """
    首次检测时刻分布

    Attributes:
        q:       q_t = P(B_t^c | B_{1:t-1}^c)
        f:       f_t = (1 - q_t)·Π_{j<t} q_j
        horizon: 截断长度
    """
    q: np.ndarray
    f: np.ndarray
    horizon: int

    @property
    def tail_mass(self) -> float:
        return float(1 - self.f.sum())


# -------- 规划器 --------


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """
    W×W 非重叠区域划分

    边界处不足 W 的部分构成较小的矩形区域。
    region_centers 为成员单元中心的均值 (m)。
    """
    W: int
    region_rows: int
    region_cols: int
    region_prob: np.ndarray
    region_centers: np.ndarray = field(repr=False)
    cell_region: np.ndarray = field(repr=False)
    current_region: int = 0

    @property
    def n_regions(self) -> int:
        return self.region_rows * self.region_cols

    def region_of(self, cell: int) -> int:
        return int(self.cell_region[cell])

    def adjacent(self, region: int) -> list[int]:
        """4 邻接区域，按编号升序"""
        row, col = divmod(region, self.region_cols)
        out = []
        if row > 0:
            out.append(region - self.region_cols)
        if col > 0:
            out.append(region - 1)
        if col < self.region_cols - 1:
            out.append(region + 1)
        if row < self.region_rows - 1:
            out.append(region + self.region_cols)
        return out

    def distance(self, a: int, b: int) -> float:
        return float(np.hypot(*(self.region_centers[a] - self.region_centers[b])))


@dataclass(frozen=True)
class WindowPlannerConfig:
    """
    窗口规划器参数

    Attributes:
        W: 窗口边长（区域边长与候选路径长度）
        M: 单元总数，同时作为期望时间公式中的时间上限常数
    """
    W: int
    M: int

    def __post_init__(self):
        if self.W < 1:
            raise ValueError(f"窗口大小 W 必须 ≥ 1: {self.W}")
        if self.W * self.W > self.M:
            raise ValueError(f"窗口过大: W²={self.W * self.W} > M={self.M}")


@dataclass
class PlannerState:
    """
    窗口规划器的单次试验状态（单一所有者，可变）

    target_region 一经选定即保持，直到无人机进入该区域并观测过
    其中概率最大的单元 focus_cell（searched 置位）；此后的每 W 次观测
    重新选择区域。
    """
    current: int
    current_region: Optional[int] = None
    window: int = 1
    region_prob: Optional[np.ndarray] = None
    target_region: Optional[int] = None
    focus_cell: Optional[int] = None
    searched: bool = False
    steps_in_window: int = 0
    regions: Optional[RegionGrid] = None


# -------- 能耗 --------


@dataclass(frozen=True)
class PowerParams:
    """
    旋翼无人机推进功率参数

    Attributes:
        P0:    悬停时的桨叶型阻功率 (W)
        Pi:    悬停时的诱导功率 (W)
        U_tip: 桨尖速度 (m/s)
        v0:    悬停平均诱导速度 (m/s)
        d0:    机身阻力比
        psi:   空气密度 (kg/m³)
        d_A:   桨盘面积 (m²)
    """
    P0: float
    Pi: float
    U_tip: float
    v0: float
    d0: float
    psi: float
    d_A: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"功率参数 {name} 必须为正: {value}")

    @property
    def hover_power(self) -> float:
        return self.P0 + self.Pi


@dataclass(frozen=True, eq=False)
class Trajectory:
    """
    匀速轨迹

    Attributes:
        waypoints: 航点序列 (m)，形状 (n, 2)
        speed:     巡航速度 (m/s)
        duration:  任务时长 T_m (s)；路径长度非零时由长度/速度决定，
                   零长度路径表示悬停 duration 秒
    """
    waypoints: np.ndarray
    speed: float
    duration: Optional[float] = None

    def __post_init__(self):
        pts = _frozen_array(self.waypoints).reshape(-1, 2)
        object.__setattr__(self, "waypoints", pts)

    @property
    def path_length(self) -> float:
        if len(self.waypoints) < 2:
            return 0.0
        return float(np.hypot(*np.diff(self.waypoints, axis=0).T).sum())
