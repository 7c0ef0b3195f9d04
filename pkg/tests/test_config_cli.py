import math

import pytest

from laseruav import (ConfigError, FixedDraw, LogNormalTurbulence, NoTurbulence, RotaryWing,
                      Scenario, SimulationConfig, TabulatedTurbulence, WindowPpp)
from laseruav.cli import main
from laseruav.config import load_config, load_scenario, parse_lines
from laseruav.experiments import parse_grid, run_density_design, run_figure, run_sweep


def write(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def csv_body(text):
    return [line for line in text.splitlines() if not line.startswith("#")]


class TestConfig:
    def test_defaults(self):
        loaded = load_config()
        s = loaded.scenario
        assert s.density == 0.52e-6
        assert isinstance(s.turbulence, LogNormalTurbulence)
        assert s.turbulence.optical_wavenumber_k == pytest.approx(2 * math.pi / 0.785e-6)
        assert s.snr_threshold_beta == 1e5
        assert len(loaded.notes) == 3

    def test_full_file(self, tmp_path):
        path = write(tmp_path, """
            # comment
            lbd_density = 1e-6
            altitude = 150     # trailing comment
            turbulence = none
            uav_type = fixed_draw
            p_prop = 90
            snr_threshold_db = 55
            sampling = window
            window_half_width = 20000
            seed = 0x10
        """)
        loaded = load_config(path)
        s = loaded.scenario
        assert s.density == 1e-6 and s.altitude == 150.0
        assert isinstance(s.turbulence, NoTurbulence)
        assert s.power.propulsion == FixedDraw(90.0)
        assert s.snr_threshold_beta == pytest.approx(10 ** 5.5)
        assert loaded.simulation.sampling == WindowPpp(20000.0)
        assert loaded.simulation.seed == 16
        assert loaded.notes == []

    def test_rotary(self, tmp_path):
        s = load_scenario(write(tmp_path, "uav_type = rotary_wing\nspeed = 12\n"))
        assert isinstance(s.power.propulsion, RotaryWing)
        assert s.power.propulsion.speed == 12.0

    def test_tabulated(self, tmp_path):
        cdf = write(tmp_path, "h,F\n0,0\n1,0.5\n2,1\n", "cdf.csv")
        s = load_scenario(write(tmp_path, f"turbulence = tabulated\nturbulence_cdf_file = {cdf}\n"))
        assert isinstance(s.turbulence, TabulatedTurbulence)

    @pytest.mark.parametrize("text,key,line", [
        ("split_delta_s = 1.5\n", "split_delta_s", 1),
        ("\n\naltitude = -3\n", "altitude", 3),
        ("bogus = 1\n", "bogus", 1),
        ("p_comm = 1\np_comm = 2\n", "p_comm", 2),
        ("iterations = many\n", "iterations", 1),
        ("snr_threshold = 1\nsnr_threshold_db = 3\n", "snr_threshold_db", 2),
        ("sampling = window\nwindow_half_width = -5\n", "window_half_width", 2),
        ("mass = 0\n", "mass", 1),
        ("turbulence = tabulated\n", "turbulence_cdf_file", 1),
        ("velocity = 0 0 0\n", "velocity", 1),
        ("velocity = 1 2\n", "velocity", 1),
    ])
    def test_errors_name_key_and_line(self, tmp_path, text, key, line):
        with pytest.raises(ConfigError) as info:
            load_config(write(tmp_path, text))
        assert info.value.key == key
        assert info.value.line == line
        assert f"key '{key}'" in str(info.value) and f"line {line}" in str(info.value)

    def test_missing_equals(self):
        with pytest.raises(ConfigError) as info:
            parse_lines(["altitude 100"])
        assert info.value.line == 1

    def test_fingerprint_tracks_values(self, tmp_path):
        a = load_config(write(tmp_path, "altitude = 100\n", "a.cfg")).fingerprint
        b = load_config(write(tmp_path, "altitude = 100.0\n", "b.cfg")).fingerprint
        c = load_config(write(tmp_path, "altitude = 101\n", "c.cfg")).fingerprint
        assert a == b == load_config().fingerprint
        assert a != c

    def test_grid_parsing(self):
        assert parse_grid("1,2,3") == [1.0, 2.0, 3.0]
        assert parse_grid("lin:0:1:3") == [0.0, 0.5, 1.0]
        assert parse_grid("log:1e-8:1e-6:3") == pytest.approx([1e-8, 1e-7, 1e-6])
        with pytest.raises(ConfigError):
            parse_grid("log:1:x:3")


class TestCli:
    def test_analytic(self, capsys):
        assert main(["analytic"]) == 0
        out = capsys.readouterr().out
        assert "# command: analytic" in out
        body = csv_body(out)
        assert body[0] == "axis,axis_value,metric,engine,value,std_error,n_iterations"
        rows = {line.split(",")[2]: line.split(",") for line in body[1:]}
        assert float(rows["energy"][4]) == pytest.approx(0.789, abs=1e-3)
        assert float(rows["critical_radius_m"][4]) == pytest.approx(1396.55, abs=0.01)

    def test_montecarlo_both_engines(self, capsys):
        assert main(["montecarlo", "--engine", "both", "--iterations", "20000",
                     "--seed", "3"]) == 0
        body = csv_body(capsys.readouterr().out)
        engines = {line.split(",")[3] for line in body[1:]}
        assert engines == {"analytic", "montecarlo"}

    def test_sweep(self, tmp_path):
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--axis", "p_comm", "--grid", "0,10,50", "--metrics",
                     "energy,energy-no-turbulence", "--out", str(out)]) == 0
        body = csv_body(out.read_text())
        assert len(body) == 1 + 3 * 2

    def test_sweep_with_montecarlo_no_turbulence(self, capsys):
        assert main(["sweep", "--axis", "lbd_density", "--grid", "1e-6",
                     "--metrics", "energy-no-turbulence", "--engine", "both",
                     "--iterations", "50000"]) == 0
        rows = [line.split(",") for line in csv_body(capsys.readouterr().out)[1:]]
        analytic, mc = float(rows[0][4]), float(rows[1][4])
        assert abs(analytic - mc) <= 3 * float(rows[1][5])

    def test_density_design(self, capsys):
        assert main(["density-design", "--target", "0.9",
                     "--metric", "energy-no-turbulence"]) == 0
        body = dict(line.split(",") for line in csv_body(capsys.readouterr().out))
        assert float(body["density_per_m2"]) == pytest.approx(3.76e-7, rel=0.01)

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = write(tmp_path, "split_delta_s = 1.5\n")
        assert main(["analytic", "--config", path]) == 2
        err = capsys.readouterr().err
        assert "split_delta_s" in err and "line 1" in err

    def test_bad_grid_exit_code(self, capsys):
        assert main(["sweep", "--axis", "delta_s", "--grid", "0.5,0.1"]) == 2

    def test_uncoverable_exit_code(self, tmp_path, capsys):
        path = write(tmp_path, "altitude = 5000\n")
        assert main(["density-design", "--config", path, "--target", "0.5"]) == 4

    def test_numerical_exit_code(self, tmp_path, capsys):
        # SNR coverage saturates below the target inside the density bracket
        path = write(tmp_path, "snr_threshold = 1e12\n")
        assert main(["density-design", "--config", path, "--target", "0.5",
                     "--metric", "snr"]) == 3

    def test_figure_commands(self, capsys):
        for name in ("fig-energy", "fig-snr", "fig-joint-beta", "fig-joint-delta"):
            assert main([name]) == 0
            body = csv_body(capsys.readouterr().out)
            assert len(body) > 30

    def test_verbose_logs_notes(self, capsys):
        assert main(["-v", "analytic"]) == 0
        assert "c1 defaults" in capsys.readouterr().err

    def test_reproducible_with_fixed_timestamp(self, monkeypatch, capsys):
        monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
        main(["montecarlo", "--iterations", "1000", "--seed", "1"])
        first = capsys.readouterr().out
        main(["montecarlo", "--iterations", "1000", "--seed", "1", "--workers", "3"])
        assert capsys.readouterr().out == first
        assert "1970-01-01T00:00:00Z" in first


class TestExperiments:
    def test_empty_file_gives_defaults(self, tmp_path):
        assert load_scenario(write(tmp_path, "")) == load_config().scenario

    def test_single_point_row_count(self):
        rows = run_sweep(Scenario(), "lbd_density", [1e-6], ["energy", "snr", "joint"],
                         ("analytic", "montecarlo"), SimulationConfig(2000))
        assert len(rows) == 3 * 2

    def test_density_design_monotone_in_target(self):
        lo = dict(run_density_design(Scenario(), 0.5))["density_per_m2"]
        hi = dict(run_density_design(Scenario(), 0.9))["density_per_m2"]
        assert lo < hi

    def test_joint_delta_shape(self):
        rows = run_figure("fig-joint-delta", Scenario())
        curve = [(r[1], r[4]) for r in rows if r[2] == "joint[lbd_density=5.2e-07]"]
        values = [v for _, v in curve]
        peak = max(values)
        first_peak = values.index(peak)
        assert all(b >= a - 1e-12 for a, b in zip(values[:first_peak], values[1:first_peak + 1]))
        assert values[0] < 0.01 < peak
        # plateau: energy-bound for a range of delta_s, then a fall near 1
        assert sum(abs(v - peak) < 1e-3 for v in values) >= 3
        assert values[-1] < 0.5 * peak

    def test_sweep_failure_names_the_point(self):
        with pytest.raises(ConfigError) as info:
            run_sweep(Scenario(), "delta_s", [0.5, 2.0], ["energy"])
        assert "delta_s = 2.0" in str(info.value)
        assert info.value.key == "split_delta_s"
