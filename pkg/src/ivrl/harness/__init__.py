from .config import ExperimentConfig, load_config, parse_config, save_resolved
from .metrics import COLUMNS, MetricsRecord, read_metrics, write_metrics
from .runner import run_experiment, run_pair
from .summary import SolveSummary, episodes_to_solve, nearest_rank, summarize
from .sweep import expand_grid, load_grid, run_sweep

__all__ = ["ExperimentConfig", "load_config", "parse_config", "save_resolved",
           "COLUMNS", "MetricsRecord", "read_metrics", "write_metrics",
           "run_experiment", "run_pair", "SolveSummary", "episodes_to_solve",
           "nearest_rank", "summarize", "expand_grid", "load_grid",
           "run_sweep"]
