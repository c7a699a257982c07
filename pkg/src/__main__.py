"""
UAV Search 入口脚本

用法:
    python src/ simulate --config scenarios/table1_analog.yaml
    python src/ compare  --config scenarios/table1_analog.yaml --planners zigzag windowing
    python src/ analytic --config scenarios/simplified_uniform.yaml
    python src/ decompose --config scenarios/table1_analog.yaml --csv map.csv
    python src/ emit-path --config scenarios/bimodal_corridor.yaml --planner naive --steps 300 --out trace.csv
    python src/ sweep    --config scenarios/table1_analog.yaml --windows 2 3 4

启动流程:
    1. 解析命令行参数
    2. 加载场景配置（YAML）
    3. 加载 .env 环境变量并应用覆盖
    4. 初始化日志
    5. 执行子命令，打印表格，按需写 CSV

配置校验失败时退出码为 2。
"""

import argparse
import logging
import sys

from pydantic import ValidationError

from config import apply_env_overrides, load_env, setup_logging
from core import Simulator, compare_planners, run_monte_carlo, sweep
from core.report import (
    analytic_table,
    corridor_share,
    decompose_table,
    format_table,
    map_table,
    stats_table,
    trace_table,
    write_csv,
)
from models import ScenarioConfig
from uav_search_model import PlannerName, SearchModelError

logger = logging.getLogger("uav-search")

EXIT_INVALID_CONFIG = 2


def parse_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", default="config.yaml",
        help="场景配置文件路径 (默认: config.yaml)",
    )
    common.add_argument("--env", default=None, help=".env 文件路径 (默认: src/.env)")
    common.add_argument("--log-level", default=None, help="覆盖配置中的日志级别")

    p = argparse.ArgumentParser(
        description="UAV Search: 无人机概率目标搜索仿真工具",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_trial_flags(sp):
        sp.add_argument("--trials", type=int, help="试验次数")
        sp.add_argument("--seed", type=int, help="基准随机种子")
        sp.add_argument("--workers", type=int, help="并行进程数")
        sp.add_argument("--csv", help="结果表 CSV 输出路径")

    sp = sub.add_parser("simulate", parents=[common], help="单个规划器的蒙特卡洛统计")
    sp.add_argument("--planner", choices=[n.value for n in PlannerName], help="规划器")
    sp.add_argument("--window", type=int, help="窗口大小 W")
    add_trial_flags(sp)

    sp = sub.add_parser("compare", parents=[common], help="多个规划器在相同种子上的对比")
    sp.add_argument(
        "--planners", nargs="+", default=["zigzag", "windowing"],
        help="规划器列表，第一个为基准；windowing:4 指定 W",
    )
    add_trial_flags(sp)

    sp = sub.add_parser("analytic", parents=[common], help="简化场景解析式")
    sp.add_argument("--csv", help="CSV 输出路径")

    sp = sub.add_parser("decompose", parents=[common], help="区域划分报告")
    sp.add_argument("--csv", help="单元坐标与先验概率 CSV 输出路径")

    sp = sub.add_parser("emit-path", parents=[common], help="目标不存在时的访问轨迹")
    sp.add_argument("--planner", choices=[n.value for n in PlannerName], help="规划器")
    sp.add_argument("--window", type=int, help="窗口大小 W")
    sp.add_argument("--steps", type=int, default=300, help="访问次数 (默认: 300)")
    sp.add_argument("--seed", type=int, help="随机种子")
    sp.add_argument("--out", help="轨迹 CSV 输出路径 (t, cell, row, col)")

    sp = sub.add_parser("sweep", parents=[common], help="W 与高度 (M) 扫描")
    sp.add_argument("--windows", type=int, nargs="+", default=[2, 3, 4], help="窗口大小列表")
    sp.add_argument("--altitudes", type=float, nargs="+", help="飞行高度列表 (m)")
    add_trial_flags(sp)

    return p.parse_args(argv)


def apply_cli_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    """命令行参数覆盖配置（优先级高于环境变量）"""
    data = cfg.model_dump(mode="json")
    for flag, section, key in (
        ("trials", "trials", "n_trials"),
        ("seed", "trials", "base_seed"),
        ("workers", "trials", "workers"),
        ("planner", "planner", "name"),
        ("window", "planner", "window"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            data[section][key] = value
    if args.log_level:
        data["log"]["level"] = args.log_level
    return ScenarioConfig.model_validate(data)


def load_scenario(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_yaml(args.config)
    load_env(args.env)
    cfg = apply_env_overrides(cfg)
    return apply_cli_overrides(cfg, args)


# -------- 子命令 --------


def cmd_simulate(cfg: ScenarioConfig, args):
    sim = Simulator(cfg)
    st = run_monte_carlo(cfg)
    table = stats_table([st], step_seconds=sim.step_seconds)
    print(format_table(table))
    if args.csv:
        write_csv(table, args.csv)


def cmd_compare(cfg: ScenarioConfig, args):
    table = compare_planners(cfg, args.planners)
    print(format_table(table))
    if args.csv:
        write_csv(table, args.csv)


def cmd_analytic(cfg: ScenarioConfig, args):
    table = analytic_table(cfg)
    print(format_table(table))
    if args.csv:
        write_csv(table, args.csv)


def cmd_decompose(cfg: ScenarioConfig, args):
    print(format_table(decompose_table(cfg)))
    if args.csv:
        write_csv(map_table(cfg), args.csv)


def cmd_emit_path(cfg: ScenarioConfig, args):
    sim = Simulator(cfg)
    trace = sim.emit_path(args.steps, args.seed)
    table = trace_table(sim.grid, trace)
    if cfg.corridor is not None:
        share = corridor_share(trace, cfg.corridor.cells(sim.grid))
        logger.info("%s: %d 次访问中走廊占比 %.1f%%", sim.label, len(trace), share * 100)
    if args.out:
        write_csv(table, args.out)
    else:
        print(table.to_csv(index=False), end="")


def cmd_sweep(cfg: ScenarioConfig, args):
    table = sweep(cfg, args.windows, args.altitudes)
    print(format_table(table))
    if args.csv:
        write_csv(table, args.csv)


COMMANDS = {
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "analytic": cmd_analytic,
    "decompose": cmd_decompose,
    "emit-path": cmd_emit_path,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = parse_args(argv)

    try:
        cfg = load_scenario(args)
    except (ValidationError, ValueError) as e:
        setup_logging()
        logger.error("配置无效: %s", e)
        return EXIT_INVALID_CONFIG

    setup_logging(log_dir=cfg.log.dir, level=cfg.log.level)
    logger.info("场景 %s: 子命令 %s", cfg.name, args.command)

    try:
        COMMANDS[args.command](cfg, args)
    except SearchModelError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_INVALID_CONFIG
    return 0


if __name__ == "__main__":
    sys.exit(main())
