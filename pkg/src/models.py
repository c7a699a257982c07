"""
Pydantic 场景配置模型

一个场景 YAML 文件描述一次仿真所需的全部参数：区域与相机、目标先验、
传感器、规划器、功率参数与试验控制。完整字段说明见 config.example.yaml。
试验次数与随机种子可由环境变量覆盖（见 config.apply_env_overrides）。
"""

import math
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field, model_validator

from uav_search_model import (
    CameraSpec,
    DistributionKind,
    DistributionSpec,
    GaussianComponent,
    GridSpec,
    PlannerName,
    PowerParams,
    SensorModel,
    StartCorner,
    decompose_area,
)


class AreaConfig(BaseModel):
    width: float = Field(320.0, gt=0, description="搜索区域宽度 (m)")
    height: float = Field(320.0, gt=0, description="搜索区域高度 (m)")


class CameraConfig(BaseModel):
    altitude: float = Field(10.0, gt=0, description="飞行高度 H (m)")
    vertical_angle_deg: float = Field(90.0, gt=0, lt=180, description="视场角 α (度)")
    horizontal_angle_deg: float = Field(90.0, gt=0, lt=180, description="视场角 β (度)")


class OverlapConfig(BaseModel):
    x: float = Field(0.0, ge=0, lt=1, description="横向重叠率 r_x")
    y: float = Field(0.0, ge=0, lt=1, description="纵向重叠率 r_y")


class ComponentConfig(BaseModel):
    weight: float = Field(..., ge=0, description="分量权重")
    mean: tuple[float, float] = Field(..., description="均值 (x, y)，单位 m")
    std: tuple[float, float] = Field(..., description="标准差 (σx, σy)，单位 m")


class DistributionConfig(BaseModel):
    kind: DistributionKind = Field(DistributionKind.UNIFORM, description="先验分布类型")
    components: list[ComponentConfig] = Field(default_factory=list, description="高斯分量")
    uniform_weight: float = Field(0.0, ge=0, le=1, description="均匀分量权重")


class SensorConfig(BaseModel):
    e_d: float = Field(0.1, ge=0, le=1, description="漏检概率")
    e_f: float = Field(0.0, ge=0, lt=1, description="虚警概率")
    delta_f: int = Field(0, ge=0, description="每次检测的地面核查耗时 Δ_f（时间步）")


class PlannerConfig(BaseModel):
    name: PlannerName = Field(PlannerName.WINDOWING, description="规划器")
    window: int = Field(3, ge=1, description="窗口大小 W")
    start: StartCorner = Field(StartCorner.BOTTOM_LEFT, description="起飞角点")


class PowerConfig(BaseModel):
    """代表性旋翼无人机的功率参数（配置值，非实测）"""
    P0: float = Field(79.86, gt=0, description="桨叶型阻功率 (W)")
    Pi: float = Field(88.63, gt=0, description="诱导功率 (W)")
    U_tip: float = Field(120.0, gt=0, description="桨尖速度 (m/s)")
    v0: float = Field(4.03, gt=0, description="悬停平均诱导速度 (m/s)")
    d0: float = Field(0.6, gt=0, description="机身阻力比")
    psi: float = Field(1.225, gt=0, description="空气密度 (kg/m³)")
    d_A: float = Field(0.503, gt=0, description="桨盘面积 (m²)")


class TrialConfig(BaseModel):
    n_trials: int = Field(1000, ge=1, description="蒙特卡洛试验次数")
    max_steps: Optional[int] = Field(None, ge=1, description="单次试验最大观测次数，默认 20·M")
    base_seed: int = Field(0, ge=0, description="第 k 次试验的种子为 base_seed + k")
    workers: int = Field(1, ge=1, description="并行进程数")
    speed: float = Field(10.0, gt=0, description="巡航速度 (m/s)")
    simplified: bool = Field(False, description="简化场景：按概率顺序瞬移访问、不更新概率")


class CorridorConfig(BaseModel):
    """两个峰之间的走廊（闭区间的行列范围），用于 Naive 失效演示"""
    rows: tuple[int, int] = Field(..., description="行范围 [起, 止]")
    cols: tuple[int, int] = Field(..., description="列范围 [起, 止]")

    def cells(self, grid: GridSpec) -> list[int]:
        r0, r1 = self.rows
        c0, c1 = self.cols
        return [
            grid.index(r, c)
            for r in range(max(r0, 0), min(r1, grid.rows - 1) + 1)
            for c in range(max(c0, 0), min(c1, grid.cols - 1) + 1)
        ]


class LogConfig(BaseModel):
    level: str = Field("INFO", description="日志级别")
    dir: Optional[str] = Field(None, description="日志输出目录，不指定则仅控制台")


class ScenarioConfig(BaseModel):
    name: str = Field("default", description="场景名称")
    description: str = Field("", description="场景说明")
    area: AreaConfig = Field(default_factory=AreaConfig)
    camera: CameraConfig = Field(default_factory=CameraConfig)
    overlap: OverlapConfig = Field(default_factory=OverlapConfig)
    distribution: DistributionConfig = Field(default_factory=DistributionConfig)
    sensor: SensorConfig = Field(default_factory=SensorConfig)
    planner: PlannerConfig = Field(default_factory=PlannerConfig)
    power: PowerConfig = Field(default_factory=PowerConfig)
    trials: TrialConfig = Field(default_factory=TrialConfig)
    corridor: Optional[CorridorConfig] = None
    log: LogConfig = Field(default_factory=LogConfig)

    @model_validator(mode="after")
    def _check_sub_specs(self) -> "ScenarioConfig":
        # 各模块自身的校验（权重和为 1、W² ≤ M 等）
        grid = self.grid_spec()
        self.distribution_spec()
        if self.planner.window ** 2 > grid.M:
            raise ValueError(f"窗口过大: W²={self.planner.window ** 2} > M={grid.M}")
        return self

    @classmethod
    def from_yaml(cls, path: str | Path = "scenario.yaml") -> "ScenarioConfig":
        p = Path(path)
        if not p.exists():
            return cls()
        with open(p, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
        return cls.model_validate(data)

    # -------- 转换为模型类型 --------

    def camera_spec(self) -> CameraSpec:
        return CameraSpec(
            altitude=self.camera.altitude,
            vertical_angle=math.radians(self.camera.vertical_angle_deg),
            horizontal_angle=math.radians(self.camera.horizontal_angle_deg),
        )

    def grid_spec(self) -> GridSpec:
        return decompose_area(
            self.area.width, self.area.height, self.camera_spec(), self.overlap.x, self.overlap.y
        )

    def distribution_spec(self) -> DistributionSpec:
        return DistributionSpec(
            kind=self.distribution.kind,
            components=tuple(
                GaussianComponent(weight=c.weight, mean=c.mean, std=c.std)
                for c in self.distribution.components
            ),
            uniform_weight=self.distribution.uniform_weight,
        )

    def sensor_model(self) -> SensorModel:
        return SensorModel(e_d=self.sensor.e_d, e_f=self.sensor.e_f, delta_f=self.sensor.delta_f)

    def power_params(self) -> PowerParams:
        return PowerParams(**self.power.model_dump())

    def max_steps(self, M: int) -> int:
        return self.trials.max_steps or 20 * M
