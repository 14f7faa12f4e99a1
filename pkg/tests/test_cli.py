import csv
import io
import json
import math

import numpy as np
import pytest

from lthpmh.cli import EXIT_DOMAIN, EXIT_USAGE, main, read_config_file


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        else:
            body.append(line)
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    return meta, rows[0], rows[1:]


def numeric_columns(header, rows):
    return {name: np.array([float(r[i]) for r in rows]) for i, name in enumerate(header)
            if name not in ("kind", "status")}


class TestSolve:
    def test_low_amplitude_frequency(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--a", "0.1", "--op", "1", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert set(doc) >= {"config", "results", "diagnostics"}
        assert doc["results"]["omega0"] == pytest.approx(1.00126, abs=5e-6)

    def test_harmonic(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--a", "1", "--op", "0", "--format", "json")
        res = json.loads(out)["results"]
        assert res["omega"] == 1.0 and res["c13"] == 0.0 and res["c15"] == 0.0

    def test_tuned_h(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--a", "1", "--op", "1")
        meta, header, rows = parse_csv(out)
        assert header == ["lambda0", "lambda1", "h", "omega0", "omega", "c13", "c15"]
        assert float(rows[0][2]) == pytest.approx(0.413602, abs=5e-3)
        assert meta["amplitude"] == "1"

    def test_h_override(self, capsys):
        _, out, _ = run_cli(capsys, "solve", "--a", "1", "--op", "1", "--h", "0.25", "--format", "json")
        doc = json.loads(out)
        assert doc["results"]["h"] == 0.25
        assert doc["diagnostics"]["h_source"] == "override"

    def test_individual_flags_override_op(self, capsys):
        _, out, _ = run_cli(capsys, "solve", "--a", "1", "--op", "0.7", "--alpha", "1.2",
                            "--format", "json")
        cfg = json.loads(out)["config"]
        assert cfg["alpha"] == 1.2 and cfg["beta"] == 0.7

    def test_unsupported_lambda(self, capsys):
        code, out, err = run_cli(capsys, "solve", "--a", "1", "--op", "1", "--lambda", "-1")
        assert code == EXIT_DOMAIN and out == ""
        assert len(err.strip().splitlines()) == 1

    @pytest.mark.parametrize("argv", [
        ["solve", "--a", "-1"],
        ["solve", "--a", "1", "--lambda", "2"],
        ["solve", "--a", "1", "--dt", "0"],
        ["solve", "--a", "1", "--q", "1"],
        ["solve", "--a", "1", "--h-low", "1", "--h-high", "0.5"],
        ["solve", "--op", "1"],
        ["solve", "--a", "abc"],
        ["bogus"],
    ])
    def test_invalid_arguments(self, capsys, argv):
        code, out, _ = run_cli(capsys, *argv)
        assert code == EXIT_USAGE and out == ""

    def test_invalid_config_writes_nothing(self, capsys, tmp_path):
        target = tmp_path / "out.csv"
        code, _, _ = run_cli(capsys, "trace", "--a", "1", "--span", "1", "--dt", "0.1",
                             "--stride", "0", "--output", str(target))
        assert code == EXIT_USAGE and not target.exists()


class TestTrace:
    def test_harmonic(self, capsys):
        code, out, _ = run_cli(capsys, "trace", "--a", "1", "--op", "0")
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header == ["t", "x_rk4", "x_lthpm", "deviation"]
        cols = numeric_columns(header, rows)
        assert np.max(np.abs(cols["deviation"])) < 1e-9

    def test_strong_nonlinearity_band(self, capsys):
        _, out, _ = run_cli(capsys, "trace", "--a", "1", "--op", "1")
        _, header, rows = parse_csv(out)
        dev = numeric_columns(header, rows)["deviation"]
        # locked from a direct run: max |deviation| = 0.366 over [0, 50]
        assert 0.3 < np.max(np.abs(dev)) < 0.4

    @pytest.mark.parametrize("span,dt,stride", [(50, 0.001, 10), (10, 0.01, 3), (7.5, 0.005, 7)])
    def test_row_count(self, capsys, span, dt, stride):
        _, out, _ = run_cli(capsys, "trace", "--a", "0.5", "--op", "0.5", "--span", str(span),
                            "--dt", str(dt), "--stride", str(stride))
        _, _, rows = parse_csv(out)
        assert len(rows) == math.floor(span / (dt * stride) + 1e-9) + 1

    def test_deterministic_file(self, capsys, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            assert main(["trace", "--a", "0.8", "--op", "0.8", "--span", "10", "-o", str(path)]) == 0
        first, second = (p.read_bytes() for p in paths)
        assert first == second and b"\r\n" not in first

    def test_csv_number_format(self, capsys):
        _, out, _ = run_cli(capsys, "trace", "--a", "0.8", "--op", "0.8", "--span", "1")
        _, _, rows = parse_csv(out)
        for value in rows[5]:
            mantissa = value.lower().split("e")[0].lstrip("-").replace(".", "").lstrip("0")
            assert len(mantissa) <= 10


class TestPhase:
    def _curves(self, capsys, *argv):
        code, out, _ = run_cli(capsys, "phase", *argv, "--format", "json")
        assert code == 0
        doc = json.loads(out)
        header = doc["results"]["columns"]
        data = np.array(doc["results"]["rows"])
        return {name: data[:, i] for i, name in enumerate(header)}, doc["diagnostics"]

    def test_harmonic_circle(self, capsys):
        c, _ = self._curves(capsys, "--a", "1", "--op", "0")
        np.testing.assert_allclose(c["x_rk4"] ** 2 + c["v_rk4"] ** 2, 1.0, atol=1e-6)
        np.testing.assert_allclose(c["x_lthpm"] ** 2 + c["v_lthpm"] ** 2, 1.0, atol=1e-6)

    def test_closure(self, capsys):
        c, diag = self._curves(capsys, "--a", "1", "--op", "1")
        assert abs(c["x_lthpm"][-1] - c["x_lthpm"][0]) < 1e-6
        assert abs(c["v_lthpm"][-1] - c["v_lthpm"][0]) < 1e-6
        assert diag["closure_gap_lthpm"] < 1e-6
        assert diag["closure_gap_rk4"] < 1e-6
        assert c["t"][-1] == pytest.approx(2 * math.pi / diag["omega"], rel=1e-12)

    def test_deviation_grows_with_nonlinearity(self, capsys):
        _, strong = self._curves(capsys, "--a", "1", "--op", "1")
        _, medium = self._curves(capsys, "--a", "1", "--op", "0.5")
        assert strong["max_pointwise_gap"] > medium["max_pointwise_gap"]
        for key in ("center_x_lthpm", "center_v_lthpm", "center_x_rk4", "center_v_rk4"):
            assert abs(strong[key]) < 1e-4


class TestResidualScan:
    def test_harmonic_zero(self, capsys):
        _, out, _ = run_cli(capsys, "residual-scan", "--a", "1", "--op", "0")
        _, header, rows = parse_csv(out)
        assert all(float(r[2]) == 0.0 for r in rows)

    def test_minimum(self, capsys):
        _, out, _ = run_cli(capsys, "residual-scan", "--a", "0.8", "--op", "0.8")
        _, header, rows = parse_csv(out)
        assert header == ["kind", "h", "E"]
        assert len(rows) == 62 and rows[-1][0] == "h_star"
        assert float(rows[-1][1]) == pytest.approx(0.667982, abs=5e-3)
        assert all(float(r[2]) >= 0 for r in rows)


class TestTable:
    def test_default(self, capsys):
        code, out, _ = run_cli(capsys, "table")
        assert code == 0
        _, header, rows = parse_csv(out)
        assert header[:4] == ["a", "op", "h_star", "rms_lthpm"]
        assert len(rows) == 9
        assert all(r[4] == "ok" for r in rows)

    def test_failed_rows_recorded(self, capsys):
        # Lambda0 + Lambda1 turns negative for h pinned far outside the tuned range
        code, out, _ = run_cli(capsys, "table", "--rows", "0.2:0.2", "1:1", "--h", "20", "--span", "5")
        _, _, rows = parse_csv(out)
        assert code == 0
        assert rows[0][4] == "ok" and rows[1][4].startswith("DomainError")

    def test_all_rows_failing(self, capsys):
        code, _, _ = run_cli(capsys, "table", "--rows", "1:1", "--h", "20", "--span", "5")
        assert code == EXIT_DOMAIN

    def test_bad_rows(self, capsys):
        code, _, _ = run_cli(capsys, "table", "--rows", "0.2-0.2")
        assert code == EXIT_USAGE


class TestSweepCommand:
    def test_vary_beta(self, capsys):
        code, out, _ = run_cli(capsys, "sweep", "--a", "0.6", "--op", "0.7", "--vary", "beta",
                               "--values", "0.4", "1.0", "--span", "10")
        assert code == 0
        _, header, rows = parse_csv(out)
        cols = numeric_columns(header, rows)
        np.testing.assert_array_equal(cols["beta"], [0.4, 1.0])
        np.testing.assert_array_equal(cols["alpha"], [0.7, 0.7])

    def test_requires_values(self, capsys):
        code, _, _ = run_cli(capsys, "sweep", "--a", "0.6", "--vary", "beta")
        assert code == EXIT_USAGE


class TestConfigFile:
    def test_flags_win(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\na = 0.8\nop = 0.8\nh = 0.3\nformat = json\n")
        _, out, _ = run_cli(capsys, "solve", "--config", str(cfg), "--h", "0.5")
        doc = json.loads(out)
        assert doc["config"]["amplitude"] == 0.8
        assert doc["results"]["h"] == 0.5

    def test_unknown_key(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("amplitud = 1\n")
        code, _, err = run_cli(capsys, "solve", "--config", str(cfg))
        assert code == EXIT_USAGE and "unknown key" in err

    def test_lambda_alias(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("lambda = 1\nh-low = 0.1\n")
        assert read_config_file(cfg) == {"lam": "1", "h_low": "0.1"}

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run_cli(capsys, "solve", "--a", "1", "--config", str(tmp_path / "none"))
        assert code == EXIT_USAGE
