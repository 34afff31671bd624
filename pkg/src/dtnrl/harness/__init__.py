from .compare import Comparison, compare
from .config import ConfigError, RunConfig, load_config, parse_config
from .runner import (
    EpisodeMetrics, EvaluationResult, HarnessError, TrainResult, evaluate, make_env,
    read_csv, run_episode, select_checkpoint, train,
)

__all__ = [
    "Comparison", "ConfigError", "EpisodeMetrics", "EvaluationResult", "HarnessError",
    "RunConfig", "TrainResult", "compare", "evaluate", "load_config", "make_env",
    "parse_config", "read_csv", "run_episode", "select_checkpoint", "train",
]
