"""Seeded experiment execution: one metrics file per seed pair.

Runs are fully determined by (config, env seed, net seed); seed pairs are
independent, so they can execute in parallel worker processes.
"""

import os
from multiprocessing import get_context
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from ..agents import make_agent
from ..envs import make_env
from .config import ExperimentConfig, save_resolved
from .metrics import MetricsRecord, write_metrics


def metrics_filename(env_seed: int, net_seed: int) -> str:
    return f"metrics_env{env_seed}_net{net_seed}.csv"


def run_pair(config: ExperimentConfig, env_seed: int, net_seed: int,
             out_dir) -> Path:
    """Train one (env seed, net seed) run and write its metrics file."""
    env = make_env(config.env_name, **config.env_params)
    agent = make_agent(config.variant, env.spec, config.train, seed=net_seed)
    threshold = config.solve_threshold
    if threshold is None:
        threshold = env.spec.solve_threshold

    records: List[MetricsRecord] = []
    returns: List[float] = []
    step = 0
    first = True
    for episode in range(1, config.max_episodes + 1):
        s = env.reset(seed=env_seed) if first else env.reset()
        first = False
        agent.begin_episode()
        ep_return = 0.0
        diags = []
        while True:
            a = agent.act(s)
            res = env.step(a)
            # bootstrap on truncation: only true termination is stored
            agent.observe(s, a, res.reward, res.state, res.done)
            diag = agent.step_update()
            if diag is not None:
                diags.append(diag)
            ep_return += res.reward
            s = res.state
            step += 1
            if res.done or res.truncated:
                break
        returns.append(ep_return)
        window_mean = float(np.mean(returns[-config.window:]))
        rec = MetricsRecord(step=step, episode=episode, ret=ep_return,
                            ret_w100=window_mean)
        if diags:
            rec.var_mean = float(np.mean([d.var_mean for d in diags]))
            rec.var_median = float(np.mean([d.var_median for d in diags]))
            rec.xi_critic = float(np.mean([d.xi_critic for d in diags]))
            rec.xi_actor = float(np.mean([d.xi_actor for d in diags]))
            rec.ebs = float(np.min([d.ebs for d in diags]))
            rec.loss_biv = float(np.mean([d.loss_biv for d in diags]))
            rec.loss_la = float(np.mean([d.loss_la for d in diags]))
        records.append(rec)

        if config.stop_on_solve and threshold is not None \
                and episode >= config.window and window_mean >= threshold:
            break
        if config.max_env_steps is not None and step >= config.max_env_steps:
            break

    out_path = Path(out_dir) / metrics_filename(env_seed, net_seed)
    write_metrics(out_path, records)
    return out_path


def _pair_task(args) -> str:
    config, env_seed, net_seed, out_dir = args
    return str(run_pair(config, env_seed, net_seed, out_dir))


def run_experiment(config: ExperimentConfig, out_dir, workers: int = 1,
                   env_seed: Optional[int] = None,
                   net_seed: Optional[int] = None) -> List[Path]:
    """Run the full seed grid (optionally filtered to one seed value per
    axis), embedding the resolved config alongside the metrics files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_resolved(config, out_dir / "config.yaml")

    env_seeds = [env_seed] if env_seed is not None else config.env_seeds
    net_seeds = [net_seed] if net_seed is not None else config.net_seeds
    pairs: List[Tuple[int, int]] = [(e, n) for e in env_seeds for n in net_seeds]

    if workers <= 1 or len(pairs) == 1:
        return [run_pair(config, e, n, out_dir) for e, n in pairs]

    # keep BLAS single-threaded in workers; runs are embarrassingly parallel
    os.environ.setdefault("OMP_NUM_THREADS", "1")
    os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
    ctx = get_context("fork")
    with ctx.Pool(min(workers, len(pairs))) as pool:
        paths = pool.map(_pair_task, [(config, e, n, out_dir) for e, n in pairs])
    return [Path(p) for p in paths]
