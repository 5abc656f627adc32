"""Episodes-to-solve extraction and nearest-rank percentile summaries."""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np

from ..errors import ConfigError
from .metrics import read_metrics

MAX_SENTINEL = "max"


def episodes_to_solve(returns: Sequence[float], threshold: float,
                      window: int = 100) -> Optional[int]:
    """First episode (1-based) whose trailing `window`-episode mean return
    reaches the threshold; None if it never does."""
    if window < 1:
        raise ConfigError("window must be >= 1")
    returns = np.asarray(returns, dtype=np.float64)
    if returns.size < window:
        return None
    csum = np.concatenate([[0.0], np.cumsum(returns)])
    means = (csum[window:] - csum[:-window]) / window
    hits = np.flatnonzero(means >= threshold)
    return int(hits[0]) + window if hits.size else None


def nearest_rank(values: Sequence[Optional[int]], pct: float) -> Optional[int]:
    """Nearest-rank percentile; unsolved runs (None) rank last."""
    if not values:
        raise ConfigError("no values to rank")
    ordered = sorted(values, key=lambda v: math.inf if v is None else v)
    rank = max(1, math.ceil(pct / 100.0 * len(ordered)))
    return ordered[rank - 1]


@dataclass
class SolveSummary:
    per_seed: Dict[str, Optional[int]]
    p25: Optional[int]
    p50: Optional[int]
    p75: Optional[int]

    @staticmethod
    def _fmt(v: Optional[int]) -> str:
        return MAX_SENTINEL if v is None else str(v)

    def format(self) -> str:
        lines = [f"{name}: {self._fmt(val)}"
                 for name, val in sorted(self.per_seed.items())]
        lines.append(f"percentiles (25th - 50th - 75th): "
                     f"{self._fmt(self.p25)} - {self._fmt(self.p50)} - "
                     f"{self._fmt(self.p75)}")
        return "\n".join(lines)


def summarize(metrics_dir, threshold: float, window: int = 100) -> SolveSummary:
    metrics_dir = Path(metrics_dir)
    files = sorted(metrics_dir.glob("metrics_*.csv"))
    if not files:
        raise ConfigError(f"no metrics files in {metrics_dir}")
    per_seed = {}
    for path in files:
        data = read_metrics(path)
        per_seed[path.stem] = episodes_to_solve(data["return"], threshold,
                                                window)
    values = list(per_seed.values())
    return SolveSummary(per_seed,
                        nearest_rank(values, 25),
                        nearest_rank(values, 50),
                        nearest_rank(values, 75))
