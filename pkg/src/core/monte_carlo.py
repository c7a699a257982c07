"""
蒙特卡洛试验与规划器对比

负责:
    - run_trials:       按 base_seed + k 运行 n_trials 次试验（可多进程），结果按试验序号排列
    - RunStatistics:    汇总检测率、时间/能耗均值、标准差、标准误与 99% 置信区间
    - run_monte_carlo:  一个规划器的完整统计
    - compare_planners: 多个规划器在相同种子集上的对比表（公共随机数）
    - sweep:            窗口大小 W 与飞行高度（即 M）的网格扫描，输出 windowing/zigzag 比值

多进程时每个工作进程只接收配置与种子批次，试验彼此独立，
合并时按种子排序，结果与顺序执行完全一致。
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from scipy import stats

from models import ScenarioConfig
from uav_search_model import PlannerName

from .simulator import Simulator, TrialResult

logger = logging.getLogger("uav-search")

CONFIDENCE = 0.99
_Z = float(stats.norm.ppf(0.5 + CONFIDENCE / 2))


# -------- 多进程工作函数（模块级，便于 pickle） --------


def _simulate_batch(args) -> list[TrialResult]:
    """在工作进程中运行一批种子"""
    cfg_data, planner, window, seeds = args
    sim = Simulator(ScenarioConfig.model_validate(cfg_data), planner=planner, window=window)
    return [sim.run_trial(seed) for seed in seeds]


def run_trials(
    cfg: ScenarioConfig,
    *,
    planner: Optional[PlannerName | str] = None,
    window: Optional[int] = None,
    workers: Optional[int] = None,
) -> list[TrialResult]:
    """运行 cfg.trials.n_trials 次试验，第 k 次的种子为 base_seed + k"""
    n = cfg.trials.n_trials
    seeds = [cfg.trials.base_seed + k for k in range(n)]
    workers = workers or cfg.trials.workers

    if workers <= 1 or n < 2:
        sim = Simulator(cfg, planner=planner, window=window)
        return [sim.run_trial(seed) for seed in seeds]

    chunks = [list(c) for c in np.array_split(seeds, min(workers * 4, n)) if len(c)]
    cfg_data = cfg.model_dump(mode="json")
    batch_args = [(cfg_data, planner, window, [int(s) for s in chunk]) for chunk in chunks]

    results: list[TrialResult] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        for batch in executor.map(_simulate_batch, batch_args):
            results.extend(batch)
    results.sort(key=lambda r: r.seed)
    return results


# -------- 统计 --------


@dataclass
class RunStatistics:
    """
    一个规划器的试验统计

    时间相关的均值/标准差只统计找到目标的试验，截断与失败的试验单独计数。
    n_detected = 1 时标准误无定义，记为 0 且 stderr_defined = False。
    """
    planner: str
    n_trials: int
    n_detected: int
    n_censored: int
    n_failed: int
    detection_rate: float
    mean_time: float
    std_time: float
    stderr_time: float
    stderr_defined: bool
    ci_low: float
    ci_high: float
    mean_seconds: float
    mean_energy: float
    std_energy: float
    mean_path_length: float
    mean_false_alarms: float

    @classmethod
    def from_results(cls, results: Sequence[TrialResult]) -> "RunStatistics":
        if not results:
            raise ValueError("没有试验结果")
        frame = pd.DataFrame([asdict(r) for r in results]).drop(columns=["trace"])
        found = frame[frame["detected"]]
        n_found = len(found)

        if n_found:
            mean_time = float(found["time_steps"].mean())
            std_time = float(found["time_steps"].std(ddof=1)) if n_found > 1 else 0.0
            std_energy = float(found["energy"].std(ddof=1)) if n_found > 1 else 0.0
            stderr = std_time / math.sqrt(n_found)
            means = found[["time_seconds", "energy", "path_length", "false_alarms"]].mean()
        else:
            mean_time = std_time = std_energy = stderr = math.nan
            means = pd.Series(math.nan, index=["time_seconds", "energy", "path_length", "false_alarms"])

        return cls(
            planner=str(frame["planner"].iloc[0]),
            n_trials=len(frame),
            n_detected=n_found,
            n_censored=int(frame["censored"].sum()),
            n_failed=int(frame["error"].notna().sum()),
            detection_rate=n_found / len(frame),
            mean_time=mean_time,
            std_time=std_time,
            stderr_time=stderr,
            stderr_defined=n_found > 1,
            ci_low=mean_time - _Z * stderr,
            ci_high=mean_time + _Z * stderr,
            mean_seconds=float(means["time_seconds"]),
            mean_energy=float(means["energy"]),
            std_energy=std_energy,
            mean_path_length=float(means["path_length"]),
            mean_false_alarms=float(means["false_alarms"]),
        )

    def as_row(self) -> dict:
        return asdict(self)


def run_monte_carlo(
    cfg: ScenarioConfig,
    *,
    planner: Optional[PlannerName | str] = None,
    window: Optional[int] = None,
    workers: Optional[int] = None,
) -> RunStatistics:
    results = run_trials(cfg, planner=planner, window=window, workers=workers)
    st = RunStatistics.from_results(results)
    logger.info(
        "%s: %d 次试验, 检测率 %.3f, 平均 %.2f 步 (±%.2f), 截断 %d, 失败 %d",
        st.planner, st.n_trials, st.detection_rate, st.mean_time, st.stderr_time,
        st.n_censored, st.n_failed,
    )
    return st


# -------- 对比与扫描 --------


def _planner_spec(item) -> tuple[PlannerName, Optional[int]]:
    """'zigzag' / 'windowing' / 'windowing:4' / (name, W) → (规划器, W)"""
    if isinstance(item, tuple):
        name, window = item
        return PlannerName(name), window
    name, _, window = str(item).partition(":")
    return PlannerName(name), int(window) if window else None


def compare_planners(
    cfg: ScenarioConfig,
    planners: Iterable,
    *,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """
    在相同的种子集上运行多个规划器，第一个规划器为基准。

    输出每个规划器一行：统计量、time_ratio / energy_ratio（相对基准）
    以及 ci_overlap（99% 置信区间是否与基准重叠）。
    """
    specs = [_planner_spec(p) for p in planners]
    if len(specs) < 2:
        raise ValueError("对比至少需要两个规划器")

    rows = [
        run_monte_carlo(cfg, planner=name, window=window, workers=workers).as_row()
        for name, window in specs
    ]
    table = pd.DataFrame(rows)
    base = table.iloc[0]
    table["time_ratio"] = table["mean_time"] / base["mean_time"]
    table["energy_ratio"] = table["mean_energy"] / base["mean_energy"]
    table["ci_overlap"] = (table["ci_low"] <= base["ci_high"]) & (base["ci_low"] <= table["ci_high"])
    return table


def sweep(
    cfg: ScenarioConfig,
    windows: Sequence[int],
    altitudes: Optional[Sequence[float]] = None,
    *,
    workers: Optional[int] = None,
) -> pd.DataFrame:
    """
    对每个 (高度, W) 组合比较 windowing 与 zigzag 的平均检测时间。

    高度决定单元大小进而决定 M；W² > M 的组合跳过。
    """
    altitudes = list(altitudes) if altitudes else [cfg.camera.altitude]
    rows = []
    for altitude in altitudes:
        data = cfg.model_dump(mode="json")
        data["camera"]["altitude"] = altitude
        data["planner"]["window"] = 1
        scenario = ScenarioConfig.model_validate(data)
        M = scenario.grid_spec().M

        zigzag = run_monte_carlo(scenario, planner=PlannerName.ZIGZAG, workers=workers)
        for W in windows:
            if W * W > M:
                logger.warning("跳过 W=%d：W² 超过 M=%d", W, M)
                continue
            st = run_monte_carlo(scenario, planner=PlannerName.WINDOWING, window=W, workers=workers)
            rows.append({
                "altitude": altitude,
                "M": M,
                "W": W,
                "windowing_mean_time": st.mean_time,
                "zigzag_mean_time": zigzag.mean_time,
                "ratio": st.mean_time / zigzag.mean_time,
            })
    return pd.DataFrame(rows, columns=[
        "altitude", "M", "W", "windowing_mean_time", "zigzag_mean_time", "ratio",
    ])
