import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supnorm_lab.advect import ScalarSeries
from supnorm_lab.exceptions import ConfigurationError, StabilityError
from supnorm_lab.fitting import fit_decay
from supnorm_lab.harness import cli, runner
from supnorm_lab.harness.config import ConfigError, ExperimentConfig, load_config, parse_config
from supnorm_lab.harness.presets import PRESETS, fig1_scenario, get_preset
from supnorm_lab.series import TimeSeries
from supnorm_lab.bounds import asymptotic_bound
from supnorm_lab.field import initial_profile, mass
from supnorm_lab.advect import oscillation

SMALL = """{
  "grid": {"x_min": -30.0, "x_max": 30.0, "n_cells": 512},
  "field": {"kind": "cosine", "amplitude": 2.0},
  "initial": {"kind": "gaussian", "normalization": "unit_l1"},
  "scheme": {"diffusion_scheme": "backward_euler", "max_dt": 0.02},
  "run": {"t_end": 2.0, "sample_dt": 0.05, "p_list": [1, 2, 4, "inf"]},
  "checks": {"max_t0": 16},
  "output": {"emit_svg": false}
}
"""


def write(tmp_path, text, name="small.json"):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestConfig:
    def test_parse(self):
        cfg = parse_config(SMALL, "small.json")
        assert cfg.name == "small"
        assert cfg.grid.n_cells == 512
        assert cfg.run.p_list == (1.0, 2.0, 4.0, math.inf)
        assert cfg.checks.max_t0 == 16

    def test_json_round_trip(self):
        cfg = parse_config(SMALL, "small.json")
        again = parse_config(cfg.to_json(), "again.json")
        assert again == cfg
        assert again.config_hash == cfg.config_hash

    def test_hash_ignores_output_block(self):
        cfg = parse_config(SMALL)
        assert cfg.replace(output={"directory": "elsewhere"}).config_hash == cfg.config_hash
        assert cfg.replace(grid={"n_cells": 1024}).config_hash != cfg.config_hash

    def test_unknown_key_reports_line(self):
        text = SMALL.replace('"amplitude": 2.0', '"amplitude": 2.0, "amplitud": 1')
        with pytest.raises(ConfigError) as info:
            parse_config(text, "bad.json")
        assert info.value.line == 3
        assert str(info.value).startswith("bad.json:3:")
        assert "amplitud" in str(info.value)

    def test_unknown_block(self):
        text = SMALL.replace('"output"', '"outputs"')
        with pytest.raises(ConfigError, match="unknown block") as info:
            parse_config(text)
        assert info.value.line == 8

    def test_too_few_cells(self):
        with pytest.raises(ConfigError, match="n_cells") as info:
            parse_config(SMALL.replace('"n_cells": 512', '"n_cells": 4'))
        assert info.value.line == 2

    @pytest.mark.parametrize(
        "old, new",
        [
            ('"p_list": [1, 2, 4, "inf"]', '"p_list": [2, 4]'),
            ('"kind": "cosine"', '"kind": "sawtooth"'),
            ('"t_end": 2.0', '"t_end": -2.0'),
            ('"max_t0": 16', '"enabled": ["nope"]'),
        ],
    )
    def test_invalid_values(self, old, new):
        with pytest.raises(ConfigurationError):
            parse_config(SMALL.replace(old, new))

    def test_missing_block(self):
        raw = json.loads(SMALL)
        del raw["field"]
        with pytest.raises(ConfigError, match="missing required block"):
            parse_config(json.dumps(raw))

    def test_malformed_json_line(self):
        with pytest.raises(ConfigError) as info:
            parse_config(SMALL.replace('"field": {', '"field" {'))
        assert info.value.line == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")


class TestPresets:
    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_are_valid(self, name):
        cfg = get_preset(name)
        assert isinstance(cfg, ExperimentConfig)
        assert parse_config(cfg.to_json()) == cfg

    def test_unknown(self):
        with pytest.raises(KeyError):
            get_preset("fig2")

    def test_fig1(self):
        cfg = fig1_scenario()
        assert cfg.grid.n_cells == 16384
        assert (cfg.grid.x_min, cfg.grid.x_max) == (-40 * math.pi, 40 * math.pi)
        assert cfg.run.t_end == 50.0
        assert {1.0, 2.0, math.inf} <= set(cfg.run.p_list)
        assert oscillation(cfg.field, cfg.grid, 0.0) == pytest.approx(5.0, rel=1e-4)
        assert oscillation(cfg.field, cfg.grid, 17.3) == pytest.approx(5.0, rel=1e-4)
        assert mass(initial_profile(cfg.initial, cfg.grid)) == pytest.approx(1.0, abs=1e-10)
        assert asymptotic_bound(1, 5.0, 1.0) == pytest.approx(4.134967, abs=1e-6)


class TestSeriesCsv:
    def series(self, n=7):
        t = np.linspace(0.0, 1.0, n)
        return TimeSeries(
            times=t, norms={1.0: np.exp(-t), 2.0: 1 / 3 + t, 3.5: np.pi * t},
            linf=np.sqrt(2) * t, mass=np.ones(n), B=np.full(n, 5.0),
            beta=np.zeros(n), boundary_frac=1e-300 * t, metadata={"name": "x"},
        )

    def test_header(self):
        header = self.series().to_csv_text().splitlines()[0]
        assert header == "t,l1,l2,l3.5,linf,mass,B,beta,boundary_frac"

    def test_seventeen_digits(self):
        row = self.series().to_csv_text().splitlines()[2].split(",")
        assert row[2] == "0.50000000000000000" or len(row[2].replace(".", "").lstrip("0")) <= 17

    def test_exact_round_trip(self, tmp_path):
        s = self.series()
        back = TimeSeries.from_csv(s.to_csv(tmp_path / "series.csv"))
        assert back.column_names == s.column_names
        for name in s.column_names:
            assert np.array_equal(back.column(name), s.column(name)), name
        assert back.metadata == s.metadata
        assert (tmp_path / "series.meta.json").exists()

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=2, max_size=20))
    def test_round_trip_arbitrary_values(self, vals):
        n = len(vals)
        v = np.array(vals)
        s = TimeSeries(times=np.arange(n, dtype=float), norms={1.0: v}, linf=v[::-1], mass=v,
                       B=v, beta=v, boundary_frac=v)
        back = TimeSeries.from_csv_text(s.to_csv_text())
        for name in s.column_names:
            assert np.array_equal(back.column(name), s.column(name))

    def test_rejects_foreign_header(self):
        with pytest.raises(ValueError, match="header"):
            TimeSeries.from_csv_text("a,b\n1,2\n")

    def test_column_lengths_checked(self):
        with pytest.raises(ValueError):
            TimeSeries(times=[0, 1], norms={1.0: [1]}, linf=[1, 1], mass=[1, 1], B=[0, 0],
                       beta=[0, 0], boundary_frac=[0, 0])


class TestFitDecay:
    def test_power_law(self):
        t = np.linspace(1, 10, 50)
        exponent, r2 = fit_decay(ScalarSeries(t, 3 * t**-0.7), (1, 10))
        assert exponent == pytest.approx(0.7, abs=1e-12) and r2 == pytest.approx(1.0)

    def test_constant(self):
        t = np.linspace(0, 10, 50)
        exponent, r2 = fit_decay(ScalarSeries(t, np.full(50, 2.5)), (2, 10))
        assert abs(exponent) <= 1e-6 and r2 == 1.0

    def test_heat_preset_late_window(self):
        cfg = get_preset("heat").replace(grid={"n_cells": 1024})
        series = runner.simulate(cfg)
        exponent, r2 = fit_decay(series.scalar("linf"), (10.0, 20.0))
        assert exponent == pytest.approx(0.5, abs=0.02)
        assert r2 >= 0.99

    def test_non_positive_rejected(self):
        t = np.linspace(0, 1, 20)
        with pytest.raises(ValueError, match="positive"):
            fit_decay(ScalarSeries(t, np.cos(4 * t)), (0, 1))

    def test_too_few_samples(self):
        t = np.linspace(0, 1, 20)
        with pytest.raises(ValueError, match="samples"):
            fit_decay(ScalarSeries(t, 1 + t), (0.9, 1.0))


class TestRun:
    def test_artifacts(self, tmp_path):
        cfg = parse_config(SMALL, "small.json")
        outcome = runner.run(cfg, tmp_path)
        assert outcome.exit_code == runner.EXIT_OK, outcome.report.summary_lines()
        for name in ("config.json", "series.csv", "series.meta.json", "report.json"):
            assert (tmp_path / name).exists()
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["passed"] and report["metadata"]["config_hash"] == cfg.config_hash
        meta = json.loads((tmp_path / "series.meta.json").read_text())
        assert meta["config_hash"] == cfg.config_hash and meta["contaminated"] is False

    def test_bit_identical_rerun(self, tmp_path):
        cfg = parse_config(SMALL)
        runner.run(cfg, tmp_path / "a")
        runner.run(cfg, tmp_path / "b")
        assert (tmp_path / "a/series.csv").read_bytes() == (tmp_path / "b/series.csv").read_bytes()

    def test_contamination_exit_code(self, tmp_path):
        cfg = parse_config(SMALL).replace(grid={"x_min": -7.0, "x_max": 7.0}, field={"kind": "zero"})
        outcome = runner.run(cfg.replace(run={"t_end": 6.0}), tmp_path)
        assert outcome.exit_code == runner.EXIT_CONTAMINATED
        assert "enlarge" in outcome.message

    def test_failed_check_exit_code(self, tmp_path):
        cfg = parse_config(SMALL).replace(checks={"tol_disc": -1.0})
        assert runner.run(cfg, tmp_path).exit_code == runner.EXIT_CHECKS_FAILED

    def test_stability_exit_code(self, tmp_path, monkeypatch):
        def explode(*args, **kwargs):
            raise StabilityError(0.25, 25)

        monkeypatch.setattr(runner, "integrate", explode)
        outcome = runner.run(parse_config(SMALL), tmp_path)
        assert outcome.exit_code == runner.EXIT_STABILITY
        assert "t=0.25" in outcome.message and "step 25" in outcome.message

    def test_svg_plots(self, tmp_path):
        pytest.importorskip("matplotlib")
        cfg = parse_config(SMALL).replace(output={"emit_svg": True}, run={"t_end": 0.5})
        outcome = runner.run(cfg, tmp_path)
        assert [p.name for p in outcome.paths["plots"]] == ["linf.svg", "l1.svg"]
        assert (tmp_path / "linf.svg").read_text().lstrip().startswith("<?xml")


class TestCli:
    def test_run(self, tmp_path, capsys):
        path = write(tmp_path, SMALL)
        assert cli.main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 0
        assert "small: PASS" in capsys.readouterr().out

    def test_run_bad_config(self, tmp_path, capsys):
        path = write(tmp_path, SMALL.replace('"n_cells": 512', '"n_cells": 4'))
        assert cli.main(["run", "--config", str(path)]) == 2
        assert f"{path}:2:" in capsys.readouterr().err

    def test_preset_with_overrides(self, tmp_path, capsys):
        code = cli.main(["preset", "heat", "--out", str(tmp_path), "--t-end", "1", "--cells", "512"])
        assert code == 0
        assert TimeSeries.from_csv(tmp_path / "series.csv").times[-1] == 1.0

    def test_sweep(self, tmp_path, capsys):
        cfgs = tmp_path / "cfgs"
        cfgs.mkdir()
        write(cfgs, SMALL, "a.json")
        write(cfgs, SMALL.replace('"amplitude": 2.0', '"amplitude": 1.0'), "b.json")
        assert cli.main(["sweep", "--config-dir", str(cfgs), "--jobs", "2"]) == 0
        assert (cfgs / "out/a/series.csv").exists() and (cfgs / "out/b/report.json").exists()
        write(cfgs, "{", "c.json")
        assert cli.main(["sweep", "--config-dir", str(cfgs)]) == 2

    def test_sweep_empty_dir(self, tmp_path):
        assert cli.main(["sweep", "--config-dir", str(tmp_path)]) == 2

    def test_ineqlab(self, capsys):
        assert cli.main(["ineqlab", "--seed", "0", "--count", "20", "--cells", "2048"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_ineqlab_json(self, capsys):
        assert cli.main(["ineqlab", "--count", "8", "--cells", "2048", "--json"]) == 0
        assert json.loads(capsys.readouterr().out)["count"] == 8

    def test_fit(self, tmp_path, capsys):
        cli.main(["preset", "heat", "--out", str(tmp_path), "--cells", "512"])
        capsys.readouterr()
        code = cli.main(["fit", "--csv", str(tmp_path / "series.csv"), "--column", "linf",
                         "--from", "10", "--to", "20"])
        out = capsys.readouterr().out.split()
        assert code == 0
        assert float(out[out.index("exponent") + 1]) == pytest.approx(0.5, abs=0.02)

    def test_fit_unknown_column(self, tmp_path, capsys):
        cli.main(["preset", "heat", "--out", str(tmp_path), "--cells", "512", "--t-end", "2"])
        code = cli.main(["fit", "--csv", str(tmp_path / "series.csv"), "--column", "l7",
                         "--from", "0", "--to", "2"])
        assert code == 2
