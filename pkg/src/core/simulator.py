"""
单次搜索试验仿真器

负责:
    - 按先验概率图抽取目标真实位置
    - 驱动规划器逐步飞行：观测 → 贝叶斯更新 → 规划下一格
    - 检测到目标时做地面核查（计入 Δ_f）：真目标则结束，虚警则修正概率图
    - 统计时间步、航程与能耗
    - 简化场景：按先验概率顺序瞬移访问、照常观测但不更新概率（解析式对照）

随机数流:
    每次试验由 seed 派生两条独立的流，目标位置流与观测流分开，
    保证对比不同规划器时第 k 次试验的目标位置相同。
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from models import ScenarioConfig
from uav_search_model import (
    DegeneratePosteriorError,
    PlannerName,
    PlannerStuckError,
    Trajectory,
    build_map,
    make_planner,
    observe,
    propulsion_power,
    resolve_false_alarm,
    sample_target,
    trajectory_energy,
    update_no_detection,
)
from uav_search_model.planners import probability_order

logger = logging.getLogger("uav-search")

# 轨迹中“目标不存在”的占位编号（emit_path 使用）
NO_TARGET = -1


@dataclass
class TrialResult:
    """
    单次试验结果

    Attributes:
        seed:         试验种子
        planner:      规划器名称
        target:       目标真实所在单元
        detected:     是否找到目标
        time_steps:   观测次数 + 地面核查耗时
        observations: 观测次数
        moves:        移动步数
        stays:        原地停留步数
        hold_steps:   地面核查悬停的时间步（每次检测 Δ_f；简化场景只计虚警）
        false_alarms: 虚警次数
        path_length:  航程 (m)
        energy:       推进能耗 (J)
        time_seconds: time_steps 换算的秒数
        censored:     达到 max_steps 仍未找到
        error:        规划器卡死或后验退化时的错误信息
        trace:        访问过的单元序列（可选）
    """
    seed: int
    planner: str
    target: int
    detected: bool = False
    time_steps: int = 0
    observations: int = 0
    moves: int = 0
    stays: int = 0
    hold_steps: int = 0
    false_alarms: int = 0
    path_length: float = 0.0
    energy: float = 0.0
    time_seconds: float = 0.0
    censored: bool = False
    error: Optional[str] = None
    trace: Optional[list[int]] = field(default=None, repr=False)

    @property
    def failed(self) -> bool:
        return self.error is not None


class Simulator:
    """
    由场景配置构建的仿真器，网格与先验概率图只构建一次，各试验只读共享。

    Args:
        cfg:     场景配置
        planner: 覆盖配置中的规划器
        window:  覆盖配置中的窗口大小 W
    """

    def __init__(
        self,
        cfg: ScenarioConfig,
        *,
        planner: Optional[PlannerName | str] = None,
        window: Optional[int] = None,
    ):
        self.cfg = cfg
        self.grid = cfg.grid_spec()
        self.prior = build_map(self.grid, cfg.distribution_spec(), cfg.trials.base_seed)
        self.sensor = cfg.sensor_model()
        self.power = cfg.power_params()
        self.planner_name = PlannerName(planner or cfg.planner.name)
        self.window = window or cfg.planner.window
        self.start = self.grid.corner_cell(cfg.planner.start)
        self.max_steps = cfg.max_steps(self.grid.M)
        self.simplified = cfg.trials.simplified

        self.speed = cfg.trials.speed
        self.step_seconds = self.grid.step_length / self.speed
        self.cruise_power = propulsion_power(self.speed, self.power)
        self.hover_power = self.power.hover_power

        if self.simplified:
            self._order = probability_order(self.prior.p, positive_only=False)

    @property
    def label(self) -> str:
        if self.simplified:
            return "simplified"
        if self.planner_name == PlannerName.WINDOWING:
            return f"windowing(W={self.window})"
        return self.planner_name.value

    @staticmethod
    def streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
        """由种子派生 (目标位置流, 观测流)"""
        target_seq, sensor_seq = np.random.SeedSequence(seed).spawn(2)
        return np.random.default_rng(target_seq), np.random.default_rng(sensor_seq)

    # -------- 单次试验 --------

    def run_trial(self, seed: int, *, record_trace: bool = False) -> TrialResult:
        """运行一次试验，规划器卡死或后验退化记为失败结果而不是抛出"""
        target_rng, sensor_rng = self.streams(seed)
        target = sample_target(self.prior, target_rng)
        result = TrialResult(seed=seed, planner=self.label, target=target)

        if self.simplified:
            return self._run_simplified(result, target, sensor_rng)

        try:
            self._search(result, target, sensor_rng, record_trace)
        except (PlannerStuckError, DegeneratePosteriorError) as e:
            logger.exception("试验 seed=%d 失败", seed)
            result.detected = False
            result.error = f"{type(e).__name__}: {e}"
        return self._account(result)

    def _search(self, result: TrialResult, target: int, rng: np.random.Generator, record_trace: bool):
        """搜索主循环：起飞格先观测一次，之后每步移动一格再观测"""
        grid = self.grid
        planner = make_planner(self.planner_name, grid, window=self.window, start=self.cfg.planner.start)
        prob_map = self.prior
        current = self.start
        planner.reset(current, prob_map)
        trace = [current] if record_trace else None

        while True:
            result.observations += 1
            obs = observe(target, current, self.sensor, rng)
            if obs.detected:
                # 地面核查
                result.hold_steps += self.sensor.delta_f
                if obs.ground_truth_present:
                    result.detected = True
                    break
                result.false_alarms += 1
                prob_map = resolve_false_alarm(prob_map, current)
            else:
                prob_map = update_no_detection(prob_map, current, self.sensor)
            planner.notify(obs, prob_map)

            if result.observations >= self.max_steps:
                result.censored = True
                break

            nxt = planner.next_cell(current, prob_map)
            if nxt == current:
                result.stays += 1
            elif grid.grid_distance(current, nxt) == 1:
                result.moves += 1
                result.path_length += float(np.hypot(*(grid.waypoints[nxt] - grid.waypoints[current])))
            else:
                raise PlannerStuckError(f"非法移动 {current} → {nxt}")
            current = nxt
            if trace is not None:
                trace.append(current)

        result.trace = trace

    def _run_simplified(self, result: TrialResult, target: int, rng: np.random.Generator) -> TrialResult:
        """
        简化场景：按先验概率降序逐个瞬移访问，每次访问计 1 个时间步，一轮结束后重新开始。

        每次访问照常调用 observe，但不更新概率图；只有虚警核查计入 Δ_f，
        与解析式的计时方式一致。
        """
        order = self._order
        while True:
            cell = int(order[result.observations % len(order)])
            result.observations += 1
            obs = observe(target, cell, self.sensor, rng)
            if obs.detected and obs.ground_truth_present:
                result.detected = True
                break
            if obs.detected:
                result.false_alarms += 1
                result.hold_steps += self.sensor.delta_f
            if result.observations >= self.max_steps:
                result.censored = True
                break

        result.moves = result.observations - 1
        result.path_length = result.moves * self.grid.step_length
        return self._account(result)

    def _account(self, result: TrialResult) -> TrialResult:
        """
        时间与能耗：航程按巡航功率飞行，停留与地面核查按悬停功率，
        每个时间步计一个步长时间
        """
        result.time_steps = result.observations + result.hold_steps
        result.time_seconds = result.time_steps * self.step_seconds
        motion = Trajectory(waypoints=[[0.0, 0.0], [result.path_length, 0.0]], speed=self.speed)
        hover_seconds = (result.stays + result.hold_steps) * self.step_seconds
        result.energy = trajectory_energy(motion, self.power) + self.hover_power * hover_seconds
        return result

    # -------- 轨迹输出 --------

    def emit_path(self, steps: int, seed: Optional[int] = None) -> list[int]:
        """
        目标不存在时规划器前 steps 次访问的单元序列。

        概率图仍按每次观测更新（e_f > 0 时的虚警同样会被核查并修正）。
        """
        seed = self.cfg.trials.base_seed if seed is None else seed
        _, sensor_rng = self.streams(seed)
        planner = make_planner(self.planner_name, self.grid, window=self.window, start=self.cfg.planner.start)
        prob_map = self.prior
        current = self.start
        planner.reset(current, prob_map)
        trace = [current]
        while True:
            obs = observe(NO_TARGET, current, self.sensor, sensor_rng)
            if obs.detected:
                prob_map = resolve_false_alarm(prob_map, current)
            else:
                prob_map = update_no_detection(prob_map, current, self.sensor)
            planner.notify(obs, prob_map)
            if len(trace) >= steps:
                return trace
            current = planner.next_cell(current, prob_map)
            trace.append(current)


def run_trial(cfg: ScenarioConfig, seed: int, **kwargs) -> TrialResult:
    """便捷入口：按配置构建仿真器并运行一次试验"""
    return Simulator(cfg, **kwargs).run_trial(seed)
