"""
期望检测时间的解析式

简化场景（按概率顺序瞬移访问、不更新概率）下的闭式结果，
作为蒙特卡洛仿真的对照基准:

    E[T]       = M·(1/(1-e_d) - 1) + E[I]
    上界        = M·(1+e_d) / (2·(1-e_d)) + 1/2
    含虚警 E[T] = ((E[Y]-1)(M-1) + E[I] - 1)·Δ_f·e_f + (E[Y]-1)·M + E[I]

以及一般路径的首次检测时刻分布 f_t 与 E[T] = Σ t·f_t。
"""

from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DivergentExpectationError
from .models import FirstDetectionPMF, ProbabilityMap, SensorModel, SimplifiedScenario
from .sensor import update_no_detection


def _expected_sweeps(e_d: float) -> float:
    """E[Y] = 1/(1-e_d)：目标单元被检测到所需的访问轮数"""
    if e_d >= 1:
        raise DivergentExpectationError("e_d = 1 时目标永远不会被检测到，期望时间发散")
    return 1.0 / (1.0 - e_d)


def expected_time_simplified(s: SimplifiedScenario) -> float:
    """简化场景的期望检测时间（忽略 e_f）"""
    return s.M * (_expected_sweeps(s.e_d) - 1) + s.expected_index


def worst_case_upper_bound(M: int, e_d: float) -> float:
    """均匀概率图时取到的上界"""
    if e_d >= 1:
        raise DivergentExpectationError("e_d = 1 时上界发散")
    return M * (1 + e_d) / (2 * (1 - e_d)) + 0.5


def expected_time_with_false_alarm(s: SimplifiedScenario) -> float:
    """简化场景含虚警核查延迟 Δ_f 的期望检测时间"""
    ey = _expected_sweeps(s.e_d)
    ei = s.expected_index
    delay = ((ey - 1) * (s.M - 1) + ei - 1) * s.delta_f * s.e_f
    return delay + (ey - 1) * s.M + ei


# -------- 首次检测时刻分布 --------


def first_detection_pmf(q: Sequence[float], horizon: Optional[int] = None) -> FirstDetectionPMF:
    """f_t = (1 - q_t)·Π_{j<t} q_j，截断到 horizon"""
    q = np.array(q, dtype=float)
    if horizon is None:
        horizon = len(q)
    q = q[:horizon]
    if np.any((q < 0) | (q > 1)):
        raise ValueError("q_t 必须在 [0, 1] 内")
    survive = np.concatenate([[1.0], np.cumprod(q)])[:len(q)]
    f = (1 - q) * survive
    q.setflags(write=False)
    f.setflags(write=False)
    return FirstDetectionPMF(q=q, f=f, horizon=len(q))


def expected_time_from_pmf(pmf: FirstDetectionPMF) -> tuple[float, float]:
    """返回 (Σ t·f_t, 尾部未计入的概率 1 - Σ f_t)"""
    t = np.arange(1, len(pmf.f) + 1)
    return float(np.dot(t, pmf.f)), pmf.tail_mass


def path_detection_pmf(prob_map: ProbabilityMap, path: Sequence[int], sensor: SensorModel) -> FirstDetectionPMF:
    """
    沿给定访问序列计算 q_t。

    假设无虚警：q_t = 1 - (1-e_d)·p_t(o_t)，p_t 为前 t-1 次未检测后的后验。
    """
    no_false_alarm = SensorModel(e_d=sensor.e_d, e_f=0.0)
    current = prob_map
    q = np.empty(len(path))
    for t, cell in enumerate(path):
        q[t] = 1 - (1 - sensor.e_d) * current.p[cell]
        if q[t] == 0:
            q[t + 1:] = 1.0
            break
        current = update_no_detection(current, cell, no_false_alarm)
    return first_detection_pmf(q)


# -------- 简化场景抽样 --------


class SimplifiedDraws(NamedTuple):
    """简化场景的一批抽样结果（均为数组）"""
    index: np.ndarray         # 目标单元在访问顺序中的位置 i（从 1 起）
    sweeps: np.ndarray        # 检测到目标所在的轮次 Y
    false_alarms: np.ndarray  # 虚警次数 Z
    steps: np.ndarray         # 访问次数 (Y-1)·M + i
    time: np.ndarray          # steps + Δ_f·Z


def sample_simplified_times(
    s: SimplifiedScenario,
    n: int,
    rng: np.random.Generator,
    index: Optional[np.ndarray] = None,
) -> SimplifiedDraws:
    """
    按简化场景的生成过程抽样 n 次试验。

    目标位置按 probs 逆 CDF 抽取（或由 index 给定，从 1 起）；每轮访问目标单元时
    以 1-e_d 检测到，轮次 Y 服从几何分布；此前访问过的每个非目标单元各以 e_f
    触发一次虚警。
    """
    if s.e_d >= 1:
        raise DivergentExpectationError("e_d = 1 时简化场景无法终止")
    if index is None:
        cdf = np.cumsum(s.probs)
        u = rng.random(n) * cdf[-1]
        index = np.minimum(np.searchsorted(cdf, u, side="right"), s.M - 1) + 1
    else:
        index = np.broadcast_to(np.asarray(index, dtype=int), (n,))
    sweeps = rng.geometric(1 - s.e_d, size=n)
    non_target_visits = (sweeps - 1) * (s.M - 1) + index - 1
    false_alarms = rng.binomial(non_target_visits, s.e_f) if s.e_f > 0 else np.zeros(n, dtype=int)
    steps = (sweeps - 1) * s.M + index
    return SimplifiedDraws(
        index=index,
        sweeps=sweeps,
        false_alarms=false_alarms,
        steps=steps,
        time=steps + s.delta_f * false_alarms,
    )
