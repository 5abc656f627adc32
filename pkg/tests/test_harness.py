"""Config validation, runner determinism, summaries, sweeps, and the CLI."""

import copy

import numpy as np
import pytest
import yaml

from ivrl.errors import ConfigError
from ivrl.harness import (episodes_to_solve, expand_grid, load_config,
                          nearest_rank, parse_config, read_metrics,
                          run_experiment, summarize)
from ivrl.harness.cli import main as cli_main
from ivrl.harness.metrics import COLUMNS

BASE = {
    "agent": {"variant": "iv-dqn", "mask_prob": 1.0, "delta_rpf": 0.0,
              "exploration": "epsilon-greedy"},
    "train": {"warmup": 40, "batch_size": 16, "hidden": [16, 16],
              "epsilon_end": 0.1},
    "env": {"name": "chain", "params": {"length": 4, "max_steps": 12}},
    "run": {"env_seeds": [0], "net_seeds": [0], "max_episodes": 8,
            "window": 4},
}


def _base():
    return copy.deepcopy(BASE)


class TestConfig:
    def test_parses_and_resolves(self):
        cfg = parse_config(_base())
        assert cfg.variant.n_members == 5
        assert cfg.variant.lam == 5.0
        assert cfg.train.batch_size == 16
        resolved = cfg.resolved_dict()
        again = parse_config(resolved)
        assert again.resolved_dict() == resolved

    def test_unknown_keys_rejected_everywhere(self):
        for path in (("typo",), ("agent", "typo"), ("train", "typo"),
                     ("env", "typo"), ("run", "typo"),
                     ("agent", "weighting", "typo")):
            raw = _base()
            node = raw
            for part in path[:-1]:
                node = node.setdefault(part, {})
            if path[0] == "agent" and len(path) == 3:
                raw["agent"]["weighting"] = {"typo": 1}
            else:
                node[path[-1]] = 1
            with pytest.raises(ConfigError) as exc:
                parse_config(raw)
            assert "typo" in str(exc.value)

    def test_field_level_messages(self):
        raw = _base()
        raw["env"]["name"] = "walker"
        with pytest.raises(ConfigError, match="env.name"):
            parse_config(raw)
        raw = _base()
        raw["train"]["gamma"] = 1.5
        with pytest.raises(ConfigError, match="train.gamma"):
            parse_config(raw)
        raw = _base()
        raw["run"]["env_seeds"] = []
        with pytest.raises(ConfigError, match="env_seeds"):
            parse_config(raw)

    def test_variant_required_and_known(self):
        raw = _base()
        del raw["agent"]["variant"]
        with pytest.raises(ConfigError, match="variant"):
            parse_config(raw)
        raw = _base()
        raw["agent"]["variant"] = "ppo"
        with pytest.raises(ConfigError, match="ppo"):
            parse_config(raw)

    def test_sac_family_defaults(self):
        raw = {"agent": {"variant": "iv-sac"},
               "env": {"name": "pendulum"},
               "run": {"env_seeds": [0], "net_seeds": [0]}}
        cfg = parse_config(raw)
        assert cfg.train.lr == pytest.approx(3e-4)
        assert cfg.train.tau == pytest.approx(5e-3)
        assert cfg.train.hidden == (256, 256)
        assert cfg.train.batch_size == 256

    def test_weighting_overrides_merge(self):
        raw = _base()
        raw["agent"]["weighting"] = {"mebs_ratio": 0.75}
        cfg = parse_config(raw)
        assert cfg.variant.weighting.kind == "biv"
        assert cfg.variant.weighting.mebs_ratio == 0.75


class TestEpisodesToSolve:
    def test_constant_at_threshold(self):
        assert episodes_to_solve([5.0] * 150, 5.0, window=100) == 100

    def test_never_solves(self):
        assert episodes_to_solve([1.0] * 300, 5.0, window=100) is None

    def test_windowed_crossing_hand_case(self):
        returns = [0.0] * 100 + [800.0] * 100
        assert episodes_to_solve(returns, 750.0, window=100) == 194

    def test_short_history(self):
        assert episodes_to_solve([10.0] * 5, 1.0, window=100) is None


class TestNearestRank:
    def test_even_count_median(self):
        # nearest-rank: ceil(0.5 * 4) = 2nd smallest
        assert nearest_rank([100, 200, 300, 400], 50) == 200

    def test_single_value_all_percentiles(self):
        for p in (25, 50, 75):
            assert nearest_rank([42], p) == 42

    def test_sentinels_rank_last(self):
        # sorted with sentinels last: [90, 120, 300, max, max]
        vals = [120, None, 90, None, 300]
        assert nearest_rank(vals, 50) == 300  # ceil(0.5*5) = 3rd
        assert nearest_rank(vals, 75) is None  # ceil(0.75*5) = 4th

    def test_quartiles_five_values(self):
        vals = [10, 20, 30, 40, 50]
        assert nearest_rank(vals, 25) == 20
        assert nearest_rank(vals, 50) == 30
        assert nearest_rank(vals, 75) == 40


class TestRunner:
    def test_grid_produces_one_file_per_pair(self, tmp_path):
        raw = _base()
        raw["run"]["env_seeds"] = [0, 1]
        raw["run"]["net_seeds"] = [0, 1]
        cfg = parse_config(raw)
        paths = run_experiment(cfg, tmp_path)
        assert len(paths) == 4
        assert (tmp_path / "config.yaml").exists()
        names = sorted(p.name for p in paths)
        assert names == ["metrics_env0_net0.csv", "metrics_env0_net1.csv",
                         "metrics_env1_net0.csv", "metrics_env1_net1.csv"]

    def test_rerun_byte_identical(self, tmp_path):
        cfg = parse_config(_base())
        p1 = run_experiment(cfg, tmp_path / "a")[0]
        p2 = run_experiment(cfg, tmp_path / "b")[0]
        assert p1.read_bytes() == p2.read_bytes()

    def test_parallel_matches_serial(self, tmp_path):
        raw = _base()
        raw["run"]["env_seeds"] = [0, 1]
        cfg = parse_config(raw)
        serial = run_experiment(cfg, tmp_path / "s", workers=1)
        parallel = run_experiment(cfg, tmp_path / "p", workers=2)
        for a, b in zip(sorted(serial), sorted(parallel)):
            assert a.read_bytes() == b.read_bytes()

    def test_metrics_columns_and_content(self, tmp_path):
        cfg = parse_config(_base())
        path = run_experiment(cfg, tmp_path)[0]
        header = path.read_text().splitlines()[0]
        assert header == ",".join(COLUMNS)
        data = read_metrics(path)
        assert data["episode"].tolist() == list(range(1, 9))
        assert np.all(np.isfinite(data["return"]))
        assert np.all(data["step"] > 0)
        # windowed return over available history from episode 1
        assert data["return_w100"][0] == pytest.approx(data["return"][0])

    def test_seed_filter_runs_single_pair(self, tmp_path):
        raw = _base()
        raw["run"]["env_seeds"] = [0, 1, 2]
        raw["run"]["net_seeds"] = [5, 6]
        cfg = parse_config(raw)
        paths = run_experiment(cfg, tmp_path, env_seed=1, net_seed=6)
        assert [p.name for p in paths] == ["metrics_env1_net6.csv"]

    def test_max_env_steps_caps_run(self, tmp_path):
        raw = _base()
        raw["run"]["max_episodes"] = 50
        raw["run"]["max_env_steps"] = 30
        cfg = parse_config(raw)
        data = read_metrics(run_experiment(cfg, tmp_path)[0])
        assert data["step"][-1] >= 30
        assert data["step"][-2] < 30 if len(data["step"]) > 1 else True

    def test_stop_on_solve(self, tmp_path):
        raw = _base()
        raw["run"].update({"stop_on_solve": True, "solve_threshold": -1e9,
                           "window": 2, "max_episodes": 30})
        cfg = parse_config(raw)
        data = read_metrics(run_experiment(cfg, tmp_path)[0])
        assert len(data["episode"]) == 2  # solved as soon as window filled


class TestSummarize:
    def test_percentiles_over_seeds(self, tmp_path):
        raw = _base()
        raw["run"]["env_seeds"] = [0, 1]
        cfg = parse_config(raw)
        run_experiment(cfg, tmp_path)
        # chain returns 1.0 every episode once it reaches the goal; with a
        # permissive threshold every run "solves" at the window boundary
        summary = summarize(tmp_path, threshold=-100.0, window=4)
        assert summary.p25 == summary.p50 == summary.p75 == 4
        assert len(summary.per_seed) == 2
        assert "4 - 4 - 4" in summary.format()

    def test_sentinel_formatting(self, tmp_path):
        cfg = parse_config(_base())
        run_experiment(cfg, tmp_path)
        summary = summarize(tmp_path, threshold=1e9, window=4)
        assert summary.p50 is None
        assert "max" in summary.format()

    def test_empty_dir_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            summarize(tmp_path, threshold=0.0)


class TestSweep:
    def test_cross_product(self):
        grid = {"agent.lam": [1.0, 5.0, 10.0], "train.lr": [1e-3, 5e-3]}
        points = list(expand_grid(_base(), grid))
        assert len(points) == 6
        lams = {cfg.variant.lam for _, cfg in points}
        assert lams == {1.0, 5.0, 10.0}
        names = [n for n, _ in points]
        assert len(set(names)) == 6
        assert all("lam=" in n and "lr=" in n for n in names)

    def test_empty_grid_single_base(self):
        points = list(expand_grid(_base(), {}))
        assert len(points) == 1
        assert points[0][0] == "base"

    def test_unknown_grid_key_rejected(self):
        with pytest.raises(ConfigError):
            list(expand_grid(_base(), {"agent.typo": [1]}))
        with pytest.raises(ConfigError):
            list(expand_grid(_base(), {"nonsense.lr": [1]}))


class TestCli:
    def _write(self, tmp_path, raw, name="config.yaml"):
        path = tmp_path / name
        path.write_text(yaml.safe_dump(raw))
        return path

    def test_train_summarize_plot_roundtrip(self, tmp_path, capsys):
        cfg_path = self._write(tmp_path, _base())
        out = tmp_path / "run"
        assert cli_main(["train", "--config", str(cfg_path),
                         "--out", str(out)]) == 0
        assert cli_main(["summarize", "--dir", str(out),
                         "--threshold", "-100", "--window", "4"]) == 0
        assert "percentiles" in capsys.readouterr().out
        fig = tmp_path / "curves.svg"
        assert cli_main(["plot", "--dir", str(out), "--out", str(fig)]) == 0
        assert fig.exists() and fig.stat().st_size > 0

    def test_single_pair_flags(self, tmp_path):
        raw = _base()
        raw["run"]["env_seeds"] = [0, 1]
        raw["run"]["net_seeds"] = [0, 1]
        cfg_path = self._write(tmp_path, raw)
        out = tmp_path / "run"
        assert cli_main(["train", "--config", str(cfg_path), "--out", str(out),
                         "--env-seed", "1", "--net-seed", "0"]) == 0
        assert [p.name for p in out.glob("metrics_*.csv")] == \
            ["metrics_env1_net0.csv"]

    def test_sweep_command(self, tmp_path):
        cfg_path = self._write(tmp_path, _base())
        grid_path = self._write(tmp_path, {"agent.lam": [1.0, 2.0]},
                                "grid.yaml")
        out = tmp_path / "sweep"
        assert cli_main(["sweep", "--config", str(cfg_path),
                         "--grid", str(grid_path), "--out", str(out)]) == 0
        subdirs = sorted(p.name for p in out.iterdir() if p.is_dir())
        assert len(subdirs) == 2
        for sub in subdirs:
            assert (out / sub / "config.yaml").exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        raw = _base()
        raw["agent"]["variant"] = "nonsense"
        cfg_path = self._write(tmp_path, raw)
        code = cli_main(["train", "--config", str(cfg_path),
                         "--out", str(tmp_path / "x")])
        assert code == 1
        assert "config error" in capsys.readouterr().err

    def test_missing_file_exit_code(self, tmp_path):
        assert cli_main(["train", "--config", str(tmp_path / "nope.yaml"),
                         "--out", str(tmp_path / "x")]) == 1

    def test_bad_usage_exit_code(self):
        assert cli_main(["train"]) == 1
