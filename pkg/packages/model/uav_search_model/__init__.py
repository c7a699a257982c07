"""
uav-search-model: 无人机概率搜索模型

定义搜索仿真用到的全部数值模型，仿真器与命令行工具共用。

模块:
    gridmap    区域划分、概率图构建、目标抽样
    sensor     观测模型与贝叶斯概率图更新
    analytics  期望检测时间解析式
    planners   Zigzag / Naive / 窗口化规划器
    energy     旋翼推进功率与能耗

使用:
    from uav_search_model import CameraSpec, decompose_area, build_map, DistributionSpec

    grid = decompose_area(320, 320, CameraSpec(10, math.pi / 2, math.pi / 2))
    prior = build_map(grid, DistributionSpec(kind="uniform"))
"""

from .errors import (
    DegeneratePosteriorError,
    DivergentExpectationError,
    InvalidAreaError,
    InvalidCameraError,
    InvalidDistributionError,
    InvalidSpeedError,
    InvalidTrajectoryError,
    PlannerStuckError,
    SearchModelError,
)
from .models import (
    CameraSpec,
    DistributionKind,
    DistributionSpec,
    FirstDetectionPMF,
    GaussianComponent,
    GridSpec,
    Observation,
    PlannerState,
    PowerParams,
    ProbabilityMap,
    RegionGrid,
    SensorModel,
    SimplifiedScenario,
    StartCorner,
    Trajectory,
    WindowPlannerConfig,
)
from .gridmap import build_map, decompose_area, footprint, sample_target
from .sensor import b_factor, observe, resolve_false_alarm, update_no_detection
from .analytics import (
    expected_time_from_pmf,
    expected_time_simplified,
    expected_time_with_false_alarm,
    first_detection_pmf,
    path_detection_pmf,
    sample_simplified_times,
    worst_case_upper_bound,
)
from .planners import (
    NaivePlanner,
    Planner,
    PlannerName,
    WindowingPlanner,
    ZigzagPlanner,
    choose_next_region,
    make_planner,
    naive_next,
    next_cell_window,
    region_aggregate,
    window_expected_time,
    windowing_planner_step,
    zigzag_plan,
)
from .energy import mission_time, profile_energy, propulsion_power, trajectory_energy

__all__ = [
    "SearchModelError", "InvalidCameraError", "InvalidAreaError", "InvalidDistributionError",
    "DegeneratePosteriorError", "DivergentExpectationError", "PlannerStuckError",
    "InvalidSpeedError", "InvalidTrajectoryError",
    "CameraSpec", "GridSpec", "DistributionKind", "DistributionSpec", "GaussianComponent",
    "ProbabilityMap", "SensorModel", "Observation", "SimplifiedScenario", "FirstDetectionPMF",
    "RegionGrid", "WindowPlannerConfig", "PlannerState", "PowerParams", "Trajectory", "StartCorner",
    "footprint", "decompose_area", "build_map", "sample_target",
    "observe", "b_factor", "update_no_detection", "resolve_false_alarm",
    "expected_time_simplified", "worst_case_upper_bound", "expected_time_with_false_alarm",
    "first_detection_pmf", "expected_time_from_pmf", "path_detection_pmf", "sample_simplified_times",
    "Planner", "PlannerName", "ZigzagPlanner", "NaivePlanner", "WindowingPlanner", "make_planner",
    "zigzag_plan", "naive_next", "region_aggregate", "choose_next_region", "window_expected_time",
    "next_cell_window", "windowing_planner_step",
    "propulsion_power", "trajectory_energy", "mission_time", "profile_energy",
]
