from .simulator import Simulator, TrialResult, run_trial
from .monte_carlo import RunStatistics, compare_planners, run_monte_carlo, run_trials, sweep

__all__ = [
    "Simulator", "TrialResult", "run_trial",
    "RunStatistics", "run_trials", "run_monte_carlo", "compare_planners", "sweep",
]
