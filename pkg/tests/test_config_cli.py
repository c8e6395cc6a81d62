import csv
import io
import json
import math
import re
import subprocess
import sys

import pytest

from ampris import cli
from ampris.montecarlo import mean_rate
from ampris.config import ConfigError, SystemConfig, parse_config, parse_config_text
from ampris.sweep import (
    ResultTable,
    SweepError,
    SweepSpec,
    emit,
    evaluate_point,
    load_json,
    row_seed,
    run_preset,
    run_sweep,
    to_csv,
)


class TestConfig:
    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.ini"
        path.write_text("")
        cfg = parse_config(path)
        assert cfg == SystemConfig()
        assert (cfg.d_v_m, cfg.d_h_m, cfg.d_m) == (5, 5, 50)
        assert cfg.P_t == pytest.approx(1.0) and cfg.amp.P_max == pytest.approx(1.0)
        assert cfg.amp.G_max == pytest.approx(1000) and cfg.amp.F == pytest.approx(10 ** 0.5)
        assert (cfg.f_c_GHz, cfg.BW_Hz, cfg.K1, cfg.K2, cfg.N) == (28, 180e3, 5, 5, 128)
        assert cfg.noise.sigma2_rx == pytest.approx(1e-13) and cfg.noise.sigma2_tot == pytest.approx(1e-13)

    def test_transmit_power_only(self):
        cfg = parse_config_text("P_t_dBm = 20")
        assert cfg.P_t == pytest.approx(0.1)
        assert cfg.replace(P_t_dBm=30) == SystemConfig()

    def test_zero_elements_rejected_with_line(self):
        with pytest.raises(ConfigError, match=r"cfg:3: N"):
            parse_config_text("# scenario\n[system]\nN = 0\n", source="cfg")

    def test_sections_comments_and_aliases(self):
        text = """
        [geometry]
        d_h_m = 25   ; midpoint
        [fading]
        los_mode = forced-NLOS
        [noise]
        noise_dBm = -90
        [amplifier]
        output_limited = no
        """
        cfg = parse_config_text(text)
        assert cfg.d_h_m == 25
        assert cfg.los_mode_h == cfg.los_mode_g == "forced-NLOS"
        assert cfg.noise.sigma2_tot == pytest.approx(1e-12) == cfg.noise.sigma2_rx
        assert math.isinf(cfg.amp.P_max)

    @pytest.mark.parametrize("text, fragment", [
        ("bogus = 1", "unknown key 'bogus'"),
        ("[geometry]\nN = 4", "unknown key 'N' in section [geometry]"),
        ("[nowhere]", "unknown section"),
        ("[system\n", "malformed section"),
        ("N 4", "expected 'key = value'"),
        ("N = 4.5", "integer"),
        ("P_t_dBm = abc", "P_t_dBm"),
        ("P_t_dBm = inf", "finite"),
        ("mode = hybrid", "mode"),
        ("los_mode = sometimes", "los_mode_h: expected one of"),
        ("output_limited = maybe", "boolean"),
        ("M = 6", "M"),
        ("d_h_m = 60", "d_h"),
    ])
    def test_errors(self, text, fragment):
        with pytest.raises(ConfigError, match=re.escape(fragment)):
            parse_config_text(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            parse_config(tmp_path / "nope.ini")


def tiny_table():
    t = ResultTable(columns=["N", "rate", "label"])
    t.add(N=64, rate=1 / 3, label="x")
    return t


class TestEmit:
    def test_single_row_csv(self):
        text = emit(tiny_table(), "csv")
        lines = text.splitlines()
        assert lines == ["N,rate,label", "64,0.33333333333333331,x"]

    def test_csv_parses_without_locale_ambiguity(self, tmp_path):
        path = tmp_path / "out.csv"
        t = ResultTable(columns=["a", "b"])
        t.add(a=1234567.5, b=-2.5e-9)
        t.add(a=2.0, b=1e300)
        emit(t, "csv", path)
        rows = list(csv.DictReader(io.StringIO(path.read_text())))
        assert [float(r["a"]) for r in rows] == [1234567.5, 2.0]
        assert [float(r["b"]) for r in rows] == [-2.5e-9, 1e300]
        assert "," not in rows[0]["a"] and " " not in path.read_text()

    def test_json_round_trip(self, tmp_path):
        t = tiny_table()
        t.manifest = {"seed": 1}
        path = tmp_path / "out.json"
        emit(t, "json", path)
        back = load_json(path)
        assert back.columns == t.columns and back.rows == t.rows
        assert back.manifest["seed"] == 1 and "created_utc" in back.manifest

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            emit(ResultTable(columns=["a"]), "csv")

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit(tiny_table(), "xml")

    def test_write_failure_names_path(self, tmp_path):
        with pytest.raises(OSError, match="missing"):
            emit(tiny_table(), "csv", tmp_path / "missing" / "out.csv")


class TestSweep:
    def test_rows_per_value_and_metric(self):
        base = SystemConfig(N=16, n_iterations=1000)
        spec = SweepSpec("P_t_dBm", (0.0, 10.0), ("rate", "ptot"), base)
        t = run_sweep(spec, seed=4)
        assert len(t.rows) == 4
        assert [r["metric"] for r in t.rows] == ["rate", "ptot", "rate", "ptot"]
        assert t.manifest["seed"] == 4 and t.manifest["iterations"]["rate"] == 1000
        # row i uses the stream derived from (seed, i)
        assert t.rows[2]["estimate"] == mean_rate(base.replace(P_t_dBm=10.0), row_seed(4, 1))

    def test_gamma_fit_metric(self):
        t = evaluate_point(SystemConfig(N=16, n_iterations=2000), ("gamma_fit",))
        assert t.rows[0]["k"] > 0 and t.rows[0]["nu"] > 0

    def test_failed_row_identified(self):
        spec = SweepSpec("d_h_m", (10.0, 80.0), ("rate",), SystemConfig(N=8, n_iterations=100))
        with pytest.raises(SweepError, match="d_h_m=80"):
            run_sweep(spec)

    @pytest.mark.parametrize("args", [("speed", (1,), ("rate",)), ("N", (), ("rate",)),
                                      ("N", (4,), ()), ("N", (4,), ("latency",))])
    def test_spec_validation(self, args):
        with pytest.raises(ValueError):
            SweepSpec(*args, SystemConfig())

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            run_preset("fig99", SystemConfig())

    def test_preset_columns(self):
        t = run_preset("fig3a", SystemConfig(n_iterations=1024, max_ber_draws=1024))
        for col in ("N", "P_t_dBm", "ber_sim", "ber_theory", "ci95"):
            assert col in t.columns
        assert len(t.rows) == 27


class TestCli:
    def run(self, *args, capsys):
        code = cli.main(list(args))
        out = capsys.readouterr()
        return code, out.out, out.err

    def test_parse_values(self):
        assert cli.parse_values("-10:30:5") == [-10, -5, 0, 5, 10, 15, 20, 25, 30]
        assert cli.parse_values("1,2.5") == [1.0, 2.5]
        with pytest.raises(ValueError):
            cli.parse_values("1:2:0")

    def test_single_point_csv(self, capsys):
        code, out, _ = self.run("--iters", "500", "--metrics", "rate", capsys=capsys)
        assert code == 0
        assert out.splitlines()[0] == "metric,estimate,ci95,k,nu,iterations"
        assert len(out.splitlines()) == 2

    def test_sweep_json(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        code, _, _ = self.run("--iters", "300", "--sweep", "N=8,16", "--metrics", "rate,ee",
                              "--format", "json", "--out", str(path), capsys=capsys)
        assert code == 0
        doc = json.loads(path.read_text())
        assert len(doc["rows"]) == 4 and doc["manifest"]["sweep"]["variable"] == "N"

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = tmp_path / "bad.ini"
        path.write_text("[system]\nN = 0\n")
        code, _, err = self.run("--config", str(path), capsys=capsys)
        assert code == 2 and "bad.ini:2" in err

    def test_runtime_error_exit_code(self, capsys):
        code, _, err = self.run("--iters", "100", "--metrics", "nonsense", capsys=capsys)
        assert code == 1 and "nonsense" in err

    def test_byte_identical_output(self, tmp_path, capsys):
        cfg = tmp_path / "c.ini"
        cfg.write_text("N = 16\n")
        outs = []
        for threads in ("1", "4", "1"):
            path = tmp_path / f"o{len(outs)}.csv"
            assert self.run("--config", str(cfg), "--iters", "2000", "--sweep", "P_t_dBm=0:20:10",
                            "--metrics", "rate,ptot,ber", "--threads", threads, "--out", str(path),
                            capsys=capsys)[0] == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_console_script_module(self):
        r = subprocess.run([sys.executable, "-m", "ampris.cli", "--version"], capture_output=True, text=True)
        assert r.returncode == 0 and "ampris" in r.stdout
