import json
import math

import pytest

from bellscope import cli
from bellscope.numerics import IntegrationError


def run(tmp_path, *args):
    return cli.main([*args, "--out", str(tmp_path)])


def read_json(tmp_path, command):
    with open(tmp_path / f"{command}.json", encoding="utf-8") as fh:
        return json.load(fh)


def read_csv(tmp_path, command):
    return (tmp_path / f"{command}.csv").read_text(encoding="utf-8")


class TestRangeParsing:
    def test_single_value(self):
        assert cli.parse_range("2.5") == [2.5]

    def test_inclusive_start_range(self):
        values = cli.parse_range("0.5:0.7:0.1")
        assert values == pytest.approx([0.5, 0.6, 0.7])

    def test_integer_range(self):
        assert cli.parse_int_range("2:5:1") == [2, 3, 4, 5]

    @pytest.mark.parametrize(
        "bad", ("a", "1:2", "1:2:3:4", "1:0:1", "1:2:0", "1:2:-1")
    )
    def test_malformed(self, bad):
        with pytest.raises(cli.ConfigError):
            cli.parse_range(bad)

    def test_non_integer_rejected(self):
        with pytest.raises(cli.ConfigError):
            cli.parse_int_range("2:3:0.5")


class TestCommands:
    def test_sign_ghz(self, tmp_path):
        assert run(tmp_path, "sign-ghz", "--m", "3") == 0
        payload = read_json(tmp_path, "sign-ghz")
        assert payload["headline"]["bell_factor"] == pytest.approx(2.0318, abs=1e-3)
        assert read_csv(tmp_path, "sign-ghz").splitlines()[0] == (
            "m,bell_factor,analytic,violates"
        )

    def test_sign_optimize(self, tmp_path):
        assert run(tmp_path, "sign-optimize", "--m", "3", "--d", "20") == 0
        payload = read_json(tmp_path, "sign-optimize")
        assert payload["headline"]["bell_factor"] == pytest.approx(2.204, abs=2e-3)
        assert payload["headline"]["converged"] is True
        lines = read_csv(tmp_path, "sign-optimize").splitlines()
        assert lines[0] == "r,c_r"
        assert len(lines) == 21

    def test_root_max(self, tmp_path):
        assert run(tmp_path, "root-max", "--m-max", "5") == 0
        payload = read_json(tmp_path, "root-max")
        assert payload["headline"]["all_at_quantum_bound"] is True
        assert payload["headline"]["bell_at_m_max"] == pytest.approx(8.0, abs=1e-10)

    def test_cat_vw(self, tmp_path):
        assert run(tmp_path, "cat-vw", "--alpha", "6") == 0
        payload = read_json(tmp_path, "cat-vw")
        assert payload["headline"]["V"] >= 0.999
        assert payload["headline"]["W"] == pytest.approx(2 / math.pi, abs=5e-3)

    def test_psi3_curve_and_headline(self, tmp_path):
        assert run(tmp_path, "psi3-curve", "--alpha", "1.0:1.3:0.1") == 0
        payload = read_json(tmp_path, "psi3-curve")
        assert payload["headline"]["first_alpha_above_2"] == pytest.approx(1.1)
        assert payload["headline"]["max_probability_sum_error"] < 1e-8
        lines = read_csv(tmp_path, "psi3-curve").splitlines()
        assert len(lines) == 5

    def test_noise_sweep(self, tmp_path):
        assert run(tmp_path, "noise-sweep", "--m", "3:4:1", "--p", "0:0.1:0.05") == 0
        lines = read_csv(tmp_path, "noise-sweep").splitlines()
        assert lines[0] == "m,p,bell_factor,violates"
        assert len(lines) == 7
        assert lines[1].endswith("true")  # p = 0 for m = 3 violates
        payload = read_json(tmp_path, "noise-sweep")
        assert payload["headline"]["p_max_ghz"]["3"]["clamped"] is False

    def test_prep_fidelity(self, tmp_path):
        x0 = -math.sqrt(2.0) * 3.0
        assert run(
            tmp_path, "prep-fidelity", "--alpha", "3", "--x0", f"{x0}"
        ) == 0
        payload = read_json(tmp_path, "prep-fidelity")
        best = payload["headline"]["best_by_alpha"]["3.0"]
        assert best["fidelity"] >= 0.99
        assert "fidelity_swapped_wiring" in best


class TestDeterminismAndErrors:
    def test_csv_bytes_reproducible(self, tmp_path):
        first = tmp_path / "a"
        second = tmp_path / "b"
        for out in (first, second):
            assert cli.main(
                ["psi3-curve", "--alpha", "0.8:1.2:0.2", "--out", str(out)]
            ) == 0
        assert (first / "psi3-curve.csv").read_bytes() == (
            second / "psi3-curve.csv"
        ).read_bytes()

    def test_jobs_do_not_change_bytes(self, tmp_path):
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        base = ["psi3-curve", "--alpha", "0.8:1.2:0.2"]
        assert cli.main([*base, "--out", str(serial), "--jobs", "1"]) == 0
        assert cli.main([*base, "--out", str(parallel), "--jobs", "2"]) == 0
        assert (serial / "psi3-curve.csv").read_bytes() == (
            parallel / "psi3-curve.csv"
        ).read_bytes()

    def test_malformed_range_exits_2(self, tmp_path, capsys):
        assert run(tmp_path, "psi3-curve", "--alpha", "nope") == 2
        assert "configuration error" in capsys.readouterr().err

    def test_invalid_values_exit_2(self, tmp_path):
        assert run(tmp_path, "sign-ghz", "--m", "1") == 2
        assert run(tmp_path, "noise-sweep", "--m", "3", "--p", "0:2:0.5") == 2
        assert run(tmp_path, "cat-vw", "--alpha", "-1") == 2
        assert run(tmp_path, "sign-optimize", "--m", "3", "--d", "1") == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_numerical_failure_exits_3(self, tmp_path, monkeypatch, capsys):
        def explode(*args, **kwargs):
            raise IntegrationError("synthetic", achieved_error=1.0)

        monkeypatch.setattr(cli.rootbin, "overlaps_VW", explode)
        assert run(tmp_path, "cat-vw", "--alpha", "1.0") == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_json_reports_tolerances(self, tmp_path):
        assert run(tmp_path, "cat-vw", "--alpha", "2", "--tol", "1e-8") == 0
        payload = read_json(tmp_path, "cat-vw")
        assert payload["tolerances"]["quadrature_tol"] == 1e-8

    def test_jobs_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BELLSCOPE_JOBS", "3")
        assert run(tmp_path, "cat-vw", "--alpha", "1") == 0
        assert read_json(tmp_path, "cat-vw")["parameters"]["jobs"] == 3
        monkeypatch.setenv("BELLSCOPE_JOBS", "0")
        assert run(tmp_path, "cat-vw", "--alpha", "1") == 2
