"""
观测模型与贝叶斯概率图更新

负责:
    - observe:              按漏检/虚警概率生成一次观测
    - b_factor:             未检测到目标的总概率 b_i
    - update_no_detection:  访问单元 i 且未检测到目标后的精确后验
    - resolve_false_alarm:  地面核查确认虚警后，把该单元概率置零并归一化

所有更新都是 ProbabilityMap → ProbabilityMap 的纯函数。
"""

import numpy as np

from .errors import DegeneratePosteriorError
from .models import Observation, ProbabilityMap, SensorModel

# 更新后概率和与 1 的最大偏差
NORMALIZATION_TOL = 1e-12


def observe(
    target_cell: int,
    visited_cell: int,
    sensor: SensorModel,
    rng: np.random.Generator,
) -> Observation:
    """访问 visited_cell 并拍摄一次，每次观测恰好消耗一个随机数"""
    present = target_cell == visited_cell
    u = rng.random()
    detected = u < (1 - sensor.e_d) if present else u < sensor.e_f
    return Observation(cell=int(visited_cell), detected=bool(detected), ground_truth_present=present)


def b_factor(p_i: float, sensor: SensorModel) -> float:
    """b_i = e_d·p_i + (1 - e_f)·(1 - p_i)"""
    b = sensor.e_d * p_i + (1 - sensor.e_f) * (1 - p_i)
    if b <= 0:
        raise DegeneratePosteriorError(f"b_i = 0 (p_i={p_i}, e_d={sensor.e_d}, e_f={sensor.e_f})")
    return b


def update_no_detection(prob_map: ProbabilityMap, visited: int, sensor: SensorModel) -> ProbabilityMap:
    """
    访问 visited 且未检测到目标后的后验:

        p_visited ← p_visited·e_d / b_i
        p_j       ← p_j·(1 - e_f) / b_i      (j ≠ visited)

    b_i 中的 (1 - p_i) 取其余单元的质量之和，使输出之和逐步精确为 1。
    """
    p = prob_map.p
    p_i = p[visited]
    rest = p.sum() - p_i
    b = sensor.e_d * p_i + (1 - sensor.e_f) * rest
    if b <= 0:
        raise DegeneratePosteriorError(
            f"单元 {visited} 的 b_i = 0：p={p_i}, e_d={sensor.e_d}，未检测结果与概率图矛盾"
        )

    new = p * ((1 - sensor.e_f) / b)
    new[visited] = p_i * sensor.e_d / b
    np.minimum(new, 1.0, out=new)

    total = new.sum()
    assert abs(total - 1) < NORMALIZATION_TOL, f"更新后概率和偏离 1: {total!r}"
    return prob_map.with_values(new)


def resolve_false_alarm(prob_map: ProbabilityMap, visited: int) -> ProbabilityMap:
    """地面核查确认 visited 无目标：该单元置零，其余质量重新归一化"""
    p = prob_map.p
    p_v = p[visited]
    if p_v == 0:
        return prob_map
    if p_v >= 1:
        raise DegeneratePosteriorError(f"单元 {visited} 概率为 1，无法确认其无目标")

    new = p.copy()
    new[visited] = 0.0
    new /= new.sum()
    return prob_map.with_values(new)
