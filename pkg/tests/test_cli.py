import json
import math
import subprocess
import sys

import numpy as np
import pytest

from spinphase import DomainError
from spinphase import cli
from spinphase.cli import RunConfig, main, parse_angle, parse_component, run
from spinphase.io import FORMAT_TAG, read_csv
from spinphase.specfun import SpinJ


class TestParseAngle:
    @pytest.mark.parametrize("text, value", [
        ("pi/4", 0.7853981633974483),
        ("0.5", 0.5),
        ("3pi/8", 1.1780972450961724),
        ("pi", math.pi),
        ("-pi/2", -math.pi / 2),
        ("2pi", 2 * math.pi),
        ("1e-3", 1e-3),
    ])
    def test_examples(self, text, value):
        assert parse_angle(text) == value

    @pytest.mark.parametrize("text", ["", "pie", "pi/0", "pi/4.5", "nan", "inf", "3*pi"])
    def test_rejects(self, text):
        with pytest.raises(DomainError, match="angle"):
            parse_angle(text)

    def test_component(self):
        c = parse_component("pi/4, 3pi/8, 0.5-1j")
        assert (c.theta, c.phi, c.weight) == (math.pi / 4, 3 * math.pi / 8, 0.5 - 1j)
        assert parse_component("0.1,0.2").weight == 1.0
        with pytest.raises(DomainError):
            parse_component("0.1")


class TestRunConfig:
    def test_missing_parameters(self):
        with pytest.raises(DomainError, match="--theta"):
            RunConfig("coherent", j=SpinJ.of(2), phi=0.0).validate()

    def test_grid_below_nyquist(self):
        with pytest.raises(DomainError):
            RunConfig("squeezed", j=SpinJ.of(10), zeta=1.0, n_grid=41).validate()


def _rows(path):
    meta, header, rows, footer = read_csv(path)
    return meta, header, rows, footer


class TestStateCommands:
    def test_coherent_north_pole(self, tmp_path):
        assert main(["coherent", "--j", "4", "--theta", "0", "--phi", "0", "--out", str(tmp_path)]) == 0
        meta, header, rows, footer = _rows(tmp_path / "coherent_j4_pm.csv")
        assert header == ["m", "p_m"]
        nonzero = rows[rows[:, 1] != 0]
        assert nonzero.tolist() == [[-4.0, 1.0]]
        assert footer["sum_p_m"] == 1.0

    def test_phase_file(self, tmp_path):
        main(["coherent", "--j", "3", "--theta", "pi/4", "--phi", "pi/4", "--out", str(tmp_path), "--grid", "64"])
        path = tmp_path / "coherent_j3_pphi.csv"
        text = path.read_text()
        assert text.startswith(f"# {FORMAT_TAG}\n")
        meta, header, rows, footer = _rows(path)
        assert header == ["phi", "phi_over_pi", "p_phi"]
        assert len(rows) == 64 and meta["n_grid"] == "64"
        np.testing.assert_allclose(rows[:, 1], rows[:, 0] / math.pi)
        assert abs(footer["integral_p_phi"] - 1) <= 1e-12
        assert float(meta["residual_integral_p_phi"]) <= 1e-12

    def test_cat_zero(self, tmp_path):
        args = ["cat", "--j", "10", "--component", "pi/4,pi/4", "--component", "pi/4,3pi/8", "--out", str(tmp_path)]
        assert main(args) == 0
        _, _, rows, _ = _rows(tmp_path / "cat_j10_pm.csv")
        assert rows[rows[:, 0] == -2, 1][0] <= 1e-14

    def test_half_integer_j(self, tmp_path):
        assert main(["squeezed", "--j", "21/2", "--zeta", "1", "--out", str(tmp_path)]) == 2
        assert main(["coherent", "--j", "21/2", "--theta", "1", "--phi", "0", "--out", str(tmp_path)]) == 0
        meta, _, rows, _ = _rows(tmp_path / "coherent_j21_2_pm.csv")
        assert meta["j"] == "21/2" and len(rows) == 22

    def test_json(self, tmp_path):
        main(["squeezed", "--j", "2", "--zeta", "2.6892", "--format", "json", "--out", str(tmp_path)])
        doc = json.loads((tmp_path / "squeezed_j2_pm.json").read_text())
        assert doc["format"] == FORMAT_TAG
        assert doc["meta"]["j"] == "2"
        assert [r["m"] for r in doc["rows"]] == [-2, -1, 0, 1, 2]
        assert doc["rows"][1]["p_m"] == 0.0
        assert doc["footer"]["sum_p_m"] == pytest.approx(1, abs=1e-12)


class TestFigures:
    def test_figure2_parity(self, tmp_path):
        assert main(["figure", "2", "--out", str(tmp_path)]) == 0
        names = sorted(p.name for p in tmp_path.iterdir())
        assert names == [
            "fig2_j10_pm.csv", "fig2_j10_pphi.csv", "fig2_j20_pm.csv", "fig2_j20_pphi.csv", "fig2_j2_pphi.csv",
        ]
        _, _, rows, _ = _rows(tmp_path / "fig2_j10_pm.csv")
        odd = (rows[:, 0].astype(int) + 10) % 2 == 1
        assert np.all(rows[odd, 1] == 0)
        assert np.all(rows[~odd, 1] > 0)

    def test_figure_files(self, tmp_path):
        main(["figure", "1", "--out", str(tmp_path)])
        main(["figure", "3", "--out", str(tmp_path)])
        assert len(list(tmp_path.glob("fig1_*.csv"))) == 6
        assert len(list(tmp_path.glob("fig3_*.csv"))) == 6
        _, _, rows, _ = _rows(tmp_path / "fig3_j10_pm.csv")
        assert rows[8, 0] == -2 and rows[8, 1] <= 1e-14

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            for n in ("1", "2", "3"):
                main(["figure", n, "--out", str(out)])
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_no_temp_files_left(self, tmp_path):
        main(["figure", "2", "--out", str(tmp_path)])
        assert not [p for p in tmp_path.iterdir() if p.name.startswith(".")]


class TestExitCodes:
    def test_bad_argument(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["coherent", "--j", "1/3", "--theta", "0", "--phi", "0"])
        assert exc.value.code == 2

    def test_domain_error(self, tmp_path, capsys):
        assert main(["coherent", "--j", "3", "--theta", "4", "--phi", "0", "--out", str(tmp_path)]) == 2
        assert "theta" in capsys.readouterr().err

    def test_missing_parameter(self, tmp_path):
        assert main(["squeezed", "--j", "3", "--out", str(tmp_path)]) == 2

    def test_consistency_failure(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setattr(cli, "_residual_tol", lambda j: -1.0)
        assert main(["coherent", "--j", "3", "--theta", "1", "--phi", "0", "--out", str(tmp_path)]) == 3
        assert "consistency" in capsys.readouterr().err
        assert list(tmp_path.iterdir()) == []

    def test_check_reports_failure(self, monkeypatch, capsys):
        from spinphase import acceptance

        fake = [acceptance.CheckResult(1, "ok", True, ""), acceptance.CheckResult(2, "bad", False, "x")]
        monkeypatch.setattr(acceptance, "run_all", lambda: fake)
        assert run(RunConfig("check")) == (1, [])
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" in out


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "spinphase", "coherent", "--j", "1", "--theta", "pi/2", "--phi", "0",
         "--out", str(tmp_path)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(proc.stdout.split()) == 2
