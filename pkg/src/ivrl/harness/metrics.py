"""Per-episode metrics records and their CSV serialization.

Column order is fixed and part of the external interface:
step,episode,return,return_w100,var_mean,var_median,xi_critic,xi_actor,
ebs,loss_biv,loss_la

var_mean / var_median are the episode averages of the per-minibatch mean
and median target variance; ebs is the episode minimum of the realized
effective batch size. Episodes without any update log zeros for the
diagnostic columns (ebs = 0 marks "no updates").
"""

import csv
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, List

import numpy as np

from ..errors import ConfigError

COLUMNS = ("step", "episode", "return", "return_w100", "var_mean",
           "var_median", "xi_critic", "xi_actor", "ebs", "loss_biv",
           "loss_la")


@dataclass
class MetricsRecord:
    step: int
    episode: int
    ret: float
    ret_w100: float
    var_mean: float = 0.0
    var_median: float = 0.0
    xi_critic: float = 0.0
    xi_actor: float = 0.0
    ebs: float = 0.0
    loss_biv: float = 0.0
    loss_la: float = 0.0

    def row(self) -> List[str]:
        vals = (self.step, self.episode, self.ret, self.ret_w100,
                self.var_mean, self.var_median, self.xi_critic,
                self.xi_actor, self.ebs, self.loss_biv, self.loss_la)
        return [str(v) if isinstance(v, int) else f"{v:.10g}" for v in vals]


def write_metrics(path, records: List[MetricsRecord]):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for rec in records:
            writer.writerow(rec.row())


def read_metrics(path) -> Dict[str, np.ndarray]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != COLUMNS:
            raise ConfigError(f"{path}: unexpected metrics header {header}")
        rows = [[float(x) for x in row] for row in reader]
    data = np.asarray(rows) if rows else np.empty((0, len(COLUMNS)))
    return {name: data[:, i] for i, name in enumerate(COLUMNS)}
