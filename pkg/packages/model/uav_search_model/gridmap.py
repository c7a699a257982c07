"""
区域划分与概率图构建

负责:
    - 相机视场 → 地面投影尺寸 (w, l)
    - 按投影尺寸与重叠率把矩形区域划分为等大单元
    - 按先验分布生成归一化概率图
    - 按概率图抽取目标真实位置
"""

import logging
import math
from typing import Optional

import numpy as np
from scipy.stats import multivariate_normal

from .errors import InvalidAreaError, InvalidDistributionError
from .models import (
    CameraSpec,
    DistributionKind,
    DistributionSpec,
    GridSpec,
    ProbabilityMap,
)

logger = logging.getLogger("uav-search-model")

# 浮点误差导致 ceil 多出一行/列的容差
_CEIL_EPS = 1e-9


def footprint(camera: CameraSpec) -> tuple[float, float]:
    """相机地面投影尺寸: w = 2H·tan(α/2), l = 2H·tan(β/2)"""
    w = 2 * camera.altitude * math.tan(camera.vertical_angle / 2)
    l = 2 * camera.altitude * math.tan(camera.horizontal_angle / 2)
    return w, l


def decompose_area(
    area_width: float,
    area_height: float,
    camera: CameraSpec,
    r_x: float = 0.0,
    r_y: float = 0.0,
) -> GridSpec:
    """
    把 area_width × area_height 的区域划分为相机投影大小的单元。

    相邻单元按 (1 - r) 的步长错开；区域不是步长整数倍时最后一行/列越界，
    投影大于区域时该方向只有一行/列。
    """
    if not (area_width > 0 and area_height > 0):
        raise InvalidAreaError(f"区域尺寸必须为正: {area_width} × {area_height}")
    for name, r in (("r_x", r_x), ("r_y", r_y)):
        if not 0 <= r < 1:
            raise InvalidAreaError(f"重叠率 {name} 必须在 [0, 1) 内: {r}")

    w, l = footprint(camera)
    stride_x = w * (1 - r_x)
    stride_y = l * (1 - r_y)
    cols = max(1, math.ceil(area_width / stride_x - _CEIL_EPS))
    rows = max(1, math.ceil(area_height / stride_y - _CEIL_EPS))

    xs = np.arange(cols) * stride_x + w / 2
    ys = np.arange(rows) * stride_y + l / 2
    gx, gy = np.meshgrid(xs, ys)
    waypoints = np.column_stack([gx.ravel(), gy.ravel()])
    waypoints.setflags(write=False)

    grid = GridSpec(
        area_width=area_width,
        area_height=area_height,
        cell_width=w,
        cell_height=l,
        overlap_x=r_x,
        overlap_y=r_y,
        rows=rows,
        cols=cols,
        waypoints=waypoints,
    )
    logger.debug("区域划分: %d 行 × %d 列, 单元 %.2f × %.2f m", rows, cols, w, l)
    return grid


def mixture_density(grid: GridSpec, dist: DistributionSpec) -> np.ndarray:
    """在每个单元中心计算混合分布的概率密度"""
    density = np.zeros(grid.M)
    for comp in dist.components:
        if comp.weight == 0:
            continue
        rv = multivariate_normal(mean=comp.mean, cov=np.diag(np.square(comp.std)))
        density += comp.weight * rv.pdf(grid.waypoints)
    if dist.uniform_weight:
        density += dist.uniform_weight / (grid.area_width * grid.area_height)
    return density


def build_map(grid: GridSpec, dist: DistributionSpec, seed: Optional[int] = None) -> ProbabilityMap:
    """
    生成先验概率图。

    单元质量 = 中心点密度 × 单元面积，最后整体归一化。
    seed 为将来的随机地图类型预留，当前三种分布均为确定性。
    """
    if dist.kind == DistributionKind.UNIFORM:
        return ProbabilityMap(grid, np.full(grid.M, 1.0 / grid.M))

    if not dist.components:
        raise InvalidDistributionError(f"{dist.kind.value} 至少需要一个高斯分量")

    mass = mixture_density(grid, dist) * grid.cell_area
    total = mass.sum()
    if not total > 0:
        raise InvalidDistributionError("所有单元的概率质量均为 0，请检查分布均值与标准差")
    return ProbabilityMap(grid, mass / total)


def sample_target(prob_map: ProbabilityMap, rng: np.random.Generator, size: Optional[int] = None):
    """按概率图做逆 CDF 抽样，返回单元编号（size 不为 None 时返回数组）"""
    cdf = np.cumsum(prob_map.p)
    u = rng.random(size) * cdf[-1]
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), prob_map.M - 1)
    if size is None:
        return int(idx)
    return idx
