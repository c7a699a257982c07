import math
import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
for path in (ROOT / "src", ROOT / "packages" / "model"):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))

from uav_search_model import CameraSpec, GridSpec, ProbabilityMap, decompose_area  # noqa: E402

SCENARIOS = ROOT / "scenarios"


def make_grid(rows: int, cols: int, cell: float = 20.0) -> GridSpec:
    """rows × cols 网格，单元边长 cell（90° 视场，高度 cell/2）"""
    camera = CameraSpec(altitude=cell / 2, vertical_angle=math.pi / 2, horizontal_angle=math.pi / 2)
    return decompose_area(cols * cell, rows * cell, camera)


def make_map(p, rows: int = None, cols: int = None) -> ProbabilityMap:
    p = np.asarray(p, dtype=float)
    if rows is None:
        rows, cols = 1, len(p)
    return ProbabilityMap(make_grid(rows, cols), p)


def random_map(rng: np.random.Generator, rows: int, cols: int, zeros: bool = False) -> ProbabilityMap:
    p = rng.dirichlet(np.ones(rows * cols))
    if zeros:
        p[rng.random(len(p)) < 0.2] = 0.0
        if p.sum() == 0:
            p[0] = 1.0
    return ProbabilityMap(make_grid(rows, cols), p / p.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def scenarios_dir():
    return SCENARIOS
