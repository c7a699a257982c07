"""
旋翼无人机推进功率与能耗

    P(v) = P0·(1 + 3v²/U_tip²)
         + Pi·(√(1 + v⁴/(4v0⁴)) - v²/(2v0²))^{1/2}
         + ½·d0·ψ·d_A·v³

    E = ∫_0^{T_m} P(‖v(t)‖) dt

匀速轨迹时 E = P(v)·T_m；变速剖面用复合中点公式积分。
"""

import math
from typing import Callable

import numpy as np

from .errors import InvalidSpeedError, InvalidTrajectoryError
from .models import PowerParams, Trajectory

# 中点积分允许的最大步长 (s)
MAX_QUADRATURE_STEP = 0.1


def propulsion_power(v, params: PowerParams):
    """推进功率 (W)，v 可以是标量或 numpy 数组"""
    v_arr = np.asarray(v, dtype=float)
    if np.any(v_arr < 0):
        raise InvalidSpeedError(f"速度不能为负: {v}")

    x = v_arr ** 2 / (2 * params.v0 ** 2)
    # √(1+x²) - x 的等价形式，避免高速时的相消误差
    induced = np.sqrt(1.0 / (np.sqrt(1 + x ** 2) + x))
    power = (
        params.P0 * (1 + 3 * v_arr ** 2 / params.U_tip ** 2)
        + params.Pi * induced
        + 0.5 * params.d0 * params.psi * params.d_A * v_arr ** 3
    )
    if power.ndim == 0:
        return float(power)
    return power


def mission_time(traj: Trajectory) -> float:
    """任务时长 T_m (s)"""
    length = traj.path_length
    if length == 0:
        return float(traj.duration or 0.0)
    if not traj.speed > 0:
        raise InvalidTrajectoryError(f"路径长度 {length:.2f} m 但速度为 {traj.speed}")
    t_m = length / traj.speed
    if traj.duration is not None and not math.isclose(traj.duration, t_m, rel_tol=1e-9):
        raise InvalidTrajectoryError(f"匀速轨迹的 T_m 应为 {t_m:.3f} s，给定 {traj.duration}")
    return t_m


def trajectory_energy(traj: Trajectory, params: PowerParams) -> float:
    """匀速轨迹的推进能耗 (J)；零长度路径按悬停计"""
    t_m = mission_time(traj)
    speed = traj.speed if traj.path_length > 0 else 0.0
    return propulsion_power(speed, params) * t_m


def profile_energy(
    speed_fn: Callable[[np.ndarray], np.ndarray],
    duration: float,
    params: PowerParams,
    dt: float = MAX_QUADRATURE_STEP,
) -> float:
    """
    变速剖面的能耗，复合中点公式。

    截断误差不超过 duration·h²·max|d²P(v(t))/dt²| / 24，h ≤ dt。
    """
    if not 0 < dt <= MAX_QUADRATURE_STEP:
        raise ValueError(f"积分步长必须在 (0, {MAX_QUADRATURE_STEP}] 内: {dt}")
    if duration < 0:
        raise InvalidTrajectoryError(f"时长不能为负: {duration}")
    if duration == 0:
        return 0.0
    n = math.ceil(duration / dt)
    h = duration / n
    t_mid = (np.arange(n) + 0.5) * h
    speeds = np.broadcast_to(np.asarray(speed_fn(t_mid), dtype=float), t_mid.shape)
    return float(h * np.sum(propulsion_power(speeds, params)))
