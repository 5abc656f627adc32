"""Return-curve and variance-diagnostic plots from metrics directories.

Informational output only; never part of acceptance checks.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..errors import ConfigError  # noqa: E402
from .metrics import read_metrics  # noqa: E402


def plot_metrics(metrics_dir, out_file):
    metrics_dir = Path(metrics_dir)
    files = sorted(metrics_dir.glob("metrics_*.csv"))
    if not files:
        raise ConfigError(f"no metrics files in {metrics_dir}")
    runs = [(f.stem, read_metrics(f)) for f in files]

    fig, (ax_ret, ax_var) = plt.subplots(1, 2, figsize=(11, 4))
    for name, data in runs:
        ax_ret.plot(data["episode"], data["return_w100"], alpha=0.6,
                    linewidth=1.0, label=name)
    ax_ret.set_xlabel("episode")
    ax_ret.set_ylabel("windowed return")
    ax_ret.set_title(metrics_dir.name)
    if len(runs) <= 8:
        ax_ret.legend(fontsize=6)

    for name, data in runs:
        updated = data["ebs"] > 0  # episodes that actually trained
        ax_var.plot(data["episode"][updated], data["var_mean"][updated],
                    alpha=0.6, linewidth=1.0)
        ax_var.plot(data["episode"][updated], data["var_median"][updated],
                    alpha=0.6, linewidth=0.8, linestyle="--")
    ax_var.set_xlabel("episode")
    ax_var.set_ylabel("target variance (mean solid, median dashed)")
    ax_var.set_yscale("log")

    fig.tight_layout()
    fig.savefig(out_file)
    plt.close(fig)
    return Path(out_file)
