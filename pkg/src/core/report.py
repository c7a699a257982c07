"""
结果表格与 CSV 输出

所有表格都是 pandas DataFrame，命令行用 format_table 打印，
--csv / --out 时用 write_csv 落盘。
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from models import ScenarioConfig
from uav_search_model import (
    GridSpec,
    SimplifiedScenario,
    StartCorner,
    build_map,
    expected_time_from_pmf,
    expected_time_simplified,
    expected_time_with_false_alarm,
    footprint,
    path_detection_pmf,
    worst_case_upper_bound,
    zigzag_plan,
)

from .monte_carlo import RunStatistics

logger = logging.getLogger("uav-search")

# 打印时保留的小数位
_FLOAT_FORMAT = "{:.4f}".format


def format_table(table: pd.DataFrame) -> str:
    return table.to_string(index=False, float_format=_FLOAT_FORMAT)


def write_csv(table: pd.DataFrame, path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False)
    logger.info("已写入 %s (%d 行)", path, len(table))


def stats_table(stats: Sequence[RunStatistics], step_seconds: Optional[float] = None) -> pd.DataFrame:
    table = pd.DataFrame([s.as_row() for s in stats])
    if step_seconds is not None:
        table["step_seconds"] = step_seconds
    return table


# -------- 解析式 --------


def zigzag_sequence(grid: GridSpec, start: StartCorner, length: int) -> list[int]:
    """往返扫描的前 length 个访问单元：扫描到头后沿原路折返"""
    plan = zigzag_plan(grid, start)
    cycle = plan + plan[-2:0:-1]
    return [cycle[k % len(cycle)] for k in range(length)]


def analytic_table(cfg: ScenarioConfig) -> pd.DataFrame:
    """
    场景的解析结果：简化场景 E[T]（含/不含虚警）、上界，
    以及在 max_steps 截断下沿往返扫描路径的 E[T] 与尾部概率。
    """
    grid = cfg.grid_spec()
    prior = build_map(grid, cfg.distribution_spec(), cfg.trials.base_seed)
    sensor = cfg.sensor_model()
    s = SimplifiedScenario.from_map(prior, sensor)
    horizon = cfg.max_steps(grid.M)

    path = zigzag_sequence(grid, cfg.planner.start, horizon)
    zigzag_time, tail = expected_time_from_pmf(path_detection_pmf(prior, path, sensor))

    return pd.DataFrame([{
        "M": grid.M,
        "e_d": sensor.e_d,
        "e_f": sensor.e_f,
        "delta_f": sensor.delta_f,
        "expected_index": s.expected_index,
        "expected_time": expected_time_simplified(s),
        "upper_bound": worst_case_upper_bound(grid.M, sensor.e_d),
        "expected_time_false_alarm": expected_time_with_false_alarm(s),
        "zigzag_path_time": zigzag_time,
        "zigzag_path_tail": tail,
        "horizon": horizon,
    }])


# -------- 区域划分 --------


def decompose_table(cfg: ScenarioConfig) -> pd.DataFrame:
    grid = cfg.grid_spec()
    w, l = footprint(cfg.camera_spec())
    return pd.DataFrame([{
        "area_width": grid.area_width,
        "area_height": grid.area_height,
        "footprint_w": w,
        "footprint_l": l,
        "stride_x": grid.stride_x,
        "stride_y": grid.stride_y,
        "rows": grid.rows,
        "cols": grid.cols,
        "M": grid.M,
        "first_waypoint": tuple(grid.waypoints[0]),
        "last_waypoint": tuple(grid.waypoints[-1]),
    }])


def map_table(cfg: ScenarioConfig) -> pd.DataFrame:
    """单元中心坐标与先验概率 (cell, row, col, x, y, p)"""
    grid = cfg.grid_spec()
    prior = build_map(grid, cfg.distribution_spec(), cfg.trials.base_seed)
    table = grid.to_frame()
    table["p"] = prior.p
    return table


# -------- 轨迹 --------


def trace_table(grid: GridSpec, trace: Sequence[int]) -> pd.DataFrame:
    cells = np.asarray(trace, dtype=int)
    rows, cols = np.divmod(cells, grid.cols)
    return pd.DataFrame({"t": np.arange(1, len(cells) + 1), "cell": cells, "row": rows, "col": cols})


def corridor_share(trace: Sequence[int], corridor_cells: Sequence[int]) -> float:
    """轨迹访问中落在走廊单元内的比例"""
    if len(trace) == 0:
        return 0.0
    return float(np.isin(np.asarray(trace), np.asarray(corridor_cells)).mean())
