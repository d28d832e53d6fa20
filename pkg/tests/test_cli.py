import json

import pytest

from evodyn.cli import main
from evodyn.config import ScenarioConfig, load_config, parse_config
from evodyn.errors import ConfigError
from evodyn.presets import REGISTRY, figure


def minimal_config(**overrides):
    cfg = {
        "populations": [{
            "n": 3,
            "matrix": {"kind": "rsp", "a": -1.0, "b": -2.0},
            "incentive": {"kind": "replicator"},
            "geometry": {"kind": "shahshahani"},
            "timescale": {"kind": "uniform", "h": 0.1},
            "x0": [0.2, 0.2, 0.6],
        }],
        "steps": 50,
        "divergences": ["kl"],
        "target": "barycenter",
        "output": "mini",
    }
    cfg.update(overrides)
    return cfg


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


class TestSchema:
    def test_minimal_accepted(self):
        parse_config(minimal_config())

    def test_zero_steps_rejected_with_path(self):
        with pytest.raises(ConfigError) as err:
            parse_config(minimal_config(steps=0))
        assert "$.steps" in str(err.value)

    def test_bad_x0_reported(self):
        cfg = minimal_config()
        cfg["populations"][0]["x0"] = [0.5, 0.6, 0.1]
        with pytest.raises(ConfigError) as err:
            parse_config(cfg)
        assert "$.populations[0].x0" in str(err.value)

    def test_q_required_for_q_replicator(self):
        cfg = minimal_config()
        cfg["populations"][0]["incentive"] = {"kind": "q_replicator"}
        with pytest.raises(ConfigError) as err:
            parse_config(cfg)
        assert "incentive.q" in str(err.value)

    def test_q_forbidden_elsewhere(self):
        cfg = minimal_config()
        cfg["populations"][0]["incentive"] = {"kind": "replicator", "q": 2.0}
        with pytest.raises(ConfigError):
            parse_config(cfg)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config(minimal_config(surprise=1))
        assert "unknown keys" in str(err.value)

    def test_unknown_divergence_rejected(self):
        with pytest.raises(ConfigError):
            parse_config(minimal_config(divergences=["manhattan"]))

    def test_rsp_needs_three_strategies(self):
        cfg = minimal_config()
        cfg["populations"][0]["n"] = 4
        cfg["populations"][0]["x0"] = [0.25, 0.25, 0.25, 0.25]
        with pytest.raises(ConfigError) as err:
            parse_config(cfg)
        assert "rsp" in str(err.value)

    def test_multiple_problems_accumulate(self):
        cfg = minimal_config(steps=0)
        cfg["populations"][0]["incentive"] = {"kind": "nope"}
        with pytest.raises(ConfigError) as err:
            parse_config(cfg)
        msg = str(err.value)
        assert "$.steps" in msg and "incentive.kind" in msg


class TestPresets:
    def test_registry_ids(self):
        assert set(REGISTRY) == {"fig1a", "fig1b", "fig2", "fig3", "fig4", "fig5",
                                 "fig6", "brfp", "fig8", "fig9", "fig10", "fig11"}

    @pytest.mark.parametrize("fid", sorted(REGISTRY))
    def test_round_trip(self, fid):
        cfg = figure(fid)
        again = parse_config(json.loads(cfg.to_json()))
        assert again == cfg

    def test_unknown_id_lists_options(self):
        with pytest.raises(ConfigError) as err:
            figure("fig7")
        assert "fig1a" in str(err.value)

    def test_fig3_parameters(self):
        cfg = figure("fig3")
        pop = cfg.populations[0]
        assert (pop.matrix.a, pop.matrix.b) == (1.0, 2.0)
        assert pop.x0 == [1 / 8, 1 / 8, 6 / 8]
        assert [p.incentive.q for p in cfg.populations] == [0.5, 1.0, 1.5, 2.0, 2.5, 4.0]

    def test_fig8_parameters(self):
        cfg = figure("fig8")
        assert cfg.populations[0].incentive.kind == "replicator"
        assert cfg.populations[0].x0 == [0.2, 0.2, 0.6]
        assert cfg.populations[1].incentive.kind == "logit"
        assert cfg.populations[1].incentive.eta == 0.4
        assert cfg.populations[1].geometry.kind == "euclidean"
        assert all(p.timescale.h == 0.1 for p in cfg.populations)

    def test_brfp_parameters(self):
        cfg = figure("brfp")
        assert cfg.populations[0].timescale.h == pytest.approx(1 / 3)
        assert cfg.populations[1].timescale.kind == "harmonic"


class TestCommands:
    def test_run_writes_csvs(self, tmp_path):
        path = write_config(tmp_path, minimal_config())
        code = main(["run", path, "--output-dir", str(tmp_path)])
        assert code == 0
        traj = (tmp_path / "mini_pop0.csv").read_text().splitlines()
        assert traj[0] == "pop,step,t,x_0,x_1,x_2"
        assert len(traj) == 52  # header + initial state + 50 steps
        div = (tmp_path / "mini_divergences.csv").read_text().splitlines()
        assert div[0] == "pop,step,t,divergence_name,value"

    def test_run_is_deterministic(self, tmp_path):
        path = write_config(tmp_path, minimal_config())
        main(["run", path, "--output-dir", str(tmp_path / "a")])
        main(["run", path, "--output-dir", str(tmp_path / "b")])
        a = (tmp_path / "a" / "mini_pop0.csv").read_bytes()
        b = (tmp_path / "b" / "mini_pop0.csv").read_bytes()
        assert a == b

    def test_validation_exit_code(self, tmp_path):
        path = write_config(tmp_path, minimal_config(steps=0))
        assert main(["run", path, "--output-dir", str(tmp_path)]) == 2

    @pytest.mark.filterwarnings("ignore:overflow encountered")
    def test_runtime_error_exit_code(self, tmp_path):
        cfg = minimal_config()
        # overflowing payoffs make the fitness evaluation blow up mid-run
        cfg["populations"][0]["matrix"] = {
            "kind": "rows",
            "rows": [[0.0, 1e308, -1e308],
                     [1e308, 0.0, -1e308],
                     [-1e308, 1e308, 0.0]],
        }
        path = write_config(tmp_path, cfg)
        assert main(["run", path, "--output-dir", str(tmp_path)]) == 3

    def test_fig8_preset_end_to_end(self, tmp_path, capsys):
        assert main(["figure", "fig8", "--run", "--output-dir", str(tmp_path)]) == 0
        capsys.readouterr()
        pops = sorted(tmp_path.glob("fig8_pop*.csv"))
        assert len(pops) == 2
        assert main(["check", str(tmp_path / "fig8_config.json")]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert out["converged"] == "true"
        assert int(out["pop0_converged_step"]) <= 500
        assert int(out["pop1_converged_step"]) <= 500

    def test_figure_emits_parseable_config(self, capsys):
        assert main(["figure", "fig8", "--emit-config"]) == 0
        out = capsys.readouterr().out
        parse_config(json.loads(out))

    def test_figure_unknown_exit_code(self, capsys):
        assert main(["figure", "fig99"]) == 2

    def test_scan_writes_grid(self, tmp_path):
        path = write_config(tmp_path, minimal_config())
        code = main(["scan", path, "--predicate", "iss", "--resolution", "5",
                     "--output-dir", str(tmp_path)])
        assert code == 0
        rows = (tmp_path / "mini_scan_pop0.csv").read_text().splitlines()
        assert rows[0] == "x1,x2,x3,value"
        assert len(rows) == 1 + 5 * 6 // 2

    def test_scan_minimal_resolution(self, tmp_path):
        path = write_config(tmp_path, minimal_config())
        main(["scan", path, "--resolution", "2", "--output-dir", str(tmp_path)])
        rows = (tmp_path / "mini_scan_pop0.csv").read_text().splitlines()
        assert len(rows) == 4  # header + three interior points

    def test_check_single_population_keys(self, tmp_path, capsys):
        cfg = minimal_config(steps=300, epsilon=0.05)
        path = write_config(tmp_path, cfg)
        assert main(["check", path]) == 0
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert out["converged"] == "true"
        assert int(out["converged_step"]) <= 300
        assert out["kl"] == "monotone_decreasing"
        assert float(out["iss_fraction"]) == 1.0

    def test_check_stationary_start(self, tmp_path, capsys):
        cfg = minimal_config()
        cfg["populations"][0]["x0"] = [1 / 3, 1 / 3, 1 / 3]
        path = write_config(tmp_path, cfg)
        main(["check", path])
        out = dict(line.split("=", 1) for line in capsys.readouterr().out.splitlines())
        assert out["converged"] == "true"
        assert out["converged_step"] == "0"

    def test_check_seed_changes_sampling_only(self, tmp_path, capsys):
        path = write_config(tmp_path, minimal_config(steps=100))
        main(["check", path, "--seed", "1"])
        first = capsys.readouterr().out
        main(["check", path, "--seed", "2"])
        second = capsys.readouterr().out
        keys = lambda s: [l.split("=")[0] for l in s.splitlines()]
        assert keys(first) == keys(second)
        verdicts = lambda s: [l for l in s.splitlines() if l.startswith(("converged", "kl"))]
        assert verdicts(first) == verdicts(second)

    def test_parallel_run_multiple_configs(self, tmp_path):
        p1 = write_config(tmp_path, minimal_config(output="one"), "c1.json")
        p2 = write_config(tmp_path, minimal_config(output="two"), "c2.json")
        assert main(["run", p1, p2, "--output-dir", str(tmp_path)]) == 0
        assert (tmp_path / "one_pop0.csv").exists()
        assert (tmp_path / "two_pop0.csv").exists()

    def test_figure_run_produces_files(self, tmp_path):
        assert main(["figure", "fig2", "--run", "--output-dir", str(tmp_path)]) == 0
        assert (tmp_path / "fig2_pop0.csv").exists()
        cfg = load_config(str(tmp_path / "fig2_config.json"))
        assert isinstance(cfg, ScenarioConfig)

    def test_csv_float_format_has_17_significant_digits(self, tmp_path):
        path = write_config(tmp_path, minimal_config(steps=1))
        main(["run", path, "--output-dir", str(tmp_path)])
        first_state = (tmp_path / "mini_pop0.csv").read_text().splitlines()[1]
        assert "0.20000000000000001" in first_state
