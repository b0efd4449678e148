import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from collapse_sim.cli import main
from collapse_sim.diagram import read_events_csv
from collapse_sim.spacetime import C

from make_golden import CASES

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"


def run_cli(argv, capsys=None):
    code = main([str(a) for a in argv])
    out = capsys.readouterr() if capsys is not None else None
    return code, out


def write(tmp_path, text, name="cfg.json"):
    p = tmp_path / name
    p.write_text(text)
    return p


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture(autouse=True)
def _repo_root(monkeypatch):
    monkeypatch.chdir(ROOT)


@pytest.mark.parametrize("name,argv", CASES, ids=[c[0] for c in CASES])
def test_golden(tmp_path, name, argv):
    out = tmp_path / name
    assert main([*argv, "--out", str(out)]) == 0
    expected = sorted(p.name for p in (GOLDEN / name).iterdir())
    assert sorted(p.name for p in out.iterdir()) == expected
    for fname in expected:
        assert (out / fname).read_bytes() == (GOLDEN / name / fname).read_bytes(), fname


class TestTransform:
    @pytest.mark.parametrize("name,expect", [
        ("transform_identity", (5.0, 3.0)),
        ("transform_three_fifths", (4.0, 0.0)),
        ("transform_inverse", (5.0, 3.0)),
        ("transform_translation", (1.0, -2.0)),
    ])
    def test_golden_values(self, name, expect):
        (r,) = rows((GOLDEN / name / "transform.csv").read_text())
        assert float(r["ct_out_m"]) == pytest.approx(expect[0], abs=1e-14)
        assert float(r["x_out_m"]) == pytest.approx(expect[1], abs=1e-14)

    def test_walking_pace_values(self):
        (r,) = rows((GOLDEN / "transform_walking_pace" / "transform.csv").read_text())
        assert float(r["x_out_m"]) == pytest.approx(-10.0069, abs=1e-4)
        assert 0 < float(r["ct_out_m"]) - 3e7 < 2e-6

    def test_stdout(self, capsys):
        code, out = run_cli(["transform", "--config", "configs/transform_three_fifths.json"],
                            capsys)
        assert code == 0
        assert out.out == (GOLDEN / "transform_three_fifths" / "transform.csv").read_text()

    def test_empty_events_header_only(self, tmp_path, capsys):
        p = write(tmp_path, '{"schema_version": 1, "boost": {"beta": 0.5}, "events": []}')
        code, out = run_cli(["transform", "--config", p], capsys)
        assert code == 0
        assert out.out == "index,ct_m,x_m,ct_out_m,x_out_m\n"

    def test_time_unit_events(self, tmp_path, capsys):
        p = write(tmp_path, '{"schema_version": 1, "boost": {"beta": 0.0},'
                            ' "events": [{"t_s": 1.0, "x_m": 0.0}]}')
        code, out = run_cli(["transform", "--config", p], capsys)
        assert code == 0 and float(rows(out.out)[0]["ct_out_m"]) == C


class TestConfigErrors:
    def check(self, tmp_path, capsys, text, line, fragment, command="transform"):
        p = write(tmp_path, text)
        code, out = run_cli([command, "--config", p], capsys)
        assert code == 2
        assert f"{p}:{line}:" in out.err
        assert fragment in out.err
        assert out.out == ""

    def test_missing_unit(self, tmp_path, capsys):
        text = '{\n  "schema_version": 1,\n  "boost": {"beta": 0.6},\n  "events": [\n' \
               '    {"ct": 5.0, "x_m": 3.0}\n  ]\n}\n'
        self.check(tmp_path, capsys, text, 5, "unit suffix")

    def test_unknown_top_level_key(self, tmp_path, capsys):
        text = '{\n  "schema_version": 1,\n  "boost": {"beta": 0.6},\n  "events": [],\n' \
               '  "colour": 1\n}\n'
        self.check(tmp_path, capsys, text, 5, "unknown key 'colour'")

    def test_experiment_unit(self, tmp_path, capsys):
        text = '{"schema_version": 1,\n "experiment": {"v_m_per_s": 100.0, "x0_m": -9e4, "T1": 0.1}}'
        self.check(tmp_path, capsys, text, 2, "'T1'", "plan")

    def test_degenerate_bounds(self, tmp_path, capsys):
        text = ('{\n "schema_version": 1,\n "diagram": {\n'
                '  "bounds": {"ct_min_m": 1.0, "ct_max_m": 1.0,\n'
                '   "x_min_m": 0.0, "x_max_m": 2.0}\n }\n}\n')
        self.check(tmp_path, capsys, text, 4, "degenerate", "diagram")

    def test_beta_out_of_range(self, tmp_path, capsys):
        self.check(tmp_path, capsys, '{"schema_version": 1,\n "boost": {"beta": 1.0}}', 2, "beta")

    def test_invalid_json(self, tmp_path, capsys):
        self.check(tmp_path, capsys, '{"schema_version": 1,\n "boost": }', 2, "invalid JSON")

    def test_missing_block(self, capsys):
        code, out = run_cli(["simulate", "--config", "configs/plan_toy.json"], capsys)
        assert code == 2 and "simulation" in out.err

    def test_missing_file(self, capsys):
        code, out = run_cli(["plan", "--config", "/nonexistent/cfg.json"], capsys)
        assert code == 2 and "cannot read" in out.err


class TestPlan:
    def test_realistic_requirement(self):
        text = (GOLDEN / "plan_realistic" / "plan.txt").read_text()
        assert "required dX12 at this v       89875.51787 m" in text
        assert "FEASIBLE" in text
        js = json.loads((GOLDEN / "plan_realistic" / "plan.json").read_text())
        assert js["required_separation_m"] == pytest.approx(8.98755e4, rel=5e-6)
        assert js["window_rest_s"] == pytest.approx(1.001385050448e-10, rel=1e-11)
        assert js["feasible"] is True

    def test_toy_values(self):
        js = json.loads((GOLDEN / "plan_toy" / "plan.json").read_text())
        assert js["A"]["ct_m"] == pytest.approx(-3.125, rel=1e-12)
        assert js["detection2"]["x_m"] == pytest.approx(-21.8, rel=1e-12)
        assert js["source"]["ct_m"] == pytest.approx(-7.4, rel=1e-12)
        assert js["X1_prime_m"] == pytest.approx(17.5, rel=1e-12)

    def test_at_rest_infeasible_exit_zero(self, capsys):
        code, out = run_cli(["plan", "--config", "configs/plan_at_rest.json"], capsys)
        assert code == 0
        assert "INFEASIBLE" in out.out and "window-too-short" in out.out
        assert out.out.split("--- json ---\n")[1] == \
            (GOLDEN / "plan_at_rest" / "plan.json").read_text()

    def test_sweep_grid(self):
        r = rows((GOLDEN / "plan_sweep" / "sweep.csv").read_text())
        assert len(r) == 16
        assert {float(x["v_m_per_s"]) for x in r} == {50.0, 100.0, 150.0, 200.0}
        for x in r:
            ok = float(x["window_rest_s"]) >= 1e-10 and float(x["dX12_m"]) > 0
            assert (x["feasible"] == "true") == ok

    def test_sweep_needs_block(self, capsys):
        code, out = run_cli(["plan", "--sweep", "--config", "configs/plan_toy.json"], capsys)
        assert code == 2 and "sweep" in out.err


class TestSimulate:
    def test_seed_override(self, tmp_path, capsys):
        code, a = run_cli(["simulate", "--config", "configs/simulate_small.json", "--seed", "8"],
                          capsys)
        assert code == 0
        js = json.loads(a.out.split("--- json ---\n")[1])
        assert js["seed"] == 8 and js["n_events"] == 5

    def test_single_event_echo(self, tmp_path):
        p = write(tmp_path, '{"schema_version": 1, "simulation": {"n_events": 1, "seed": 1,'
                            ' "export_events": true}}')
        assert main(["simulate", "--config", str(p), "--out", str(tmp_path / "o")]) == 0
        (ev,) = rows((tmp_path / "o" / "events.csv").read_text())
        js = json.loads((tmp_path / "o" / "report.json").read_text())
        assert js["mean_omega_s_rad_per_s"]["value"] == float(ev["omega_s_rad_per_s"])
        cell = ev["pol1"] + ev["pol2"]
        assert js["outcome_counts"][cell] == 1

    def test_events_csv_residual(self):
        for r in rows((GOLDEN / "simulate_small" / "events.csv").read_text()):
            assert r["pol1"] != r["pol2"]
            resid = float(r["omega_s_rad_per_s"]) + float(r["omega_i_rad_per_s"]) - 2.4e15
            assert float(r["residual_rad_per_s"]) == resid

    def test_density_csv(self):
        r = rows((GOLDEN / "simulate_small" / "density.csv").read_text())
        assert len(r) == 41 * 41
        peak = max(r, key=lambda x: float(x["p_correlated"]))
        assert float(peak["omega_s_rad_per_s"]) == pytest.approx(1.2e15, rel=1e-12)

    def test_compare_ratio(self):
        js = json.loads((GOLDEN / "simulate_compare" / "report.json").read_text())
        assert js["variance_ratio_expected"] == pytest.approx(200.5, rel=1e-12)
        assert "variance ratio" in (GOLDEN / "simulate_compare" / "report.txt").read_text()

    def test_bad_simulation_block(self, tmp_path, capsys):
        p = write(tmp_path, '{"schema_version": 1,\n "simulation": {"n_events": 0, "seed": 1}}')
        code, out = run_cli(["simulate", "--config", p], capsys)
        assert code == 2


class TestDiagram:
    def test_svg_to_stdout(self, capsys):
        code, out = run_cli(["diagram", "--config", "configs/fig1a.json"], capsys)
        assert code == 0
        assert out.out == (GOLDEN / "fig1a" / "diagram.svg").read_text()

    def test_events_round_trip(self, tmp_path):
        text = (GOLDEN / "fig3" / "events.csv").read_text()
        evs = read_events_csv(text)
        assert [e[0] for e in evs] == ["(T1,0)", "A", "(T2,X2)", "(TP,XP)"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("label", "ct_m", "x_m"))
        for label, e in evs:
            w.writerow((label, repr(e.ct), repr(e.x)))
        assert buf.getvalue() == text

    def test_empty_layers(self, tmp_path, capsys):
        p = write(tmp_path, '{"schema_version": 1, "diagram": {"layers": [], "bounds":'
                            ' {"ct_min_m": 0, "ct_max_m": 1, "x_min_m": 0, "x_max_m": 1}}}')
        code, out = run_cli(["diagram", "--config", p], capsys)
        assert code == 0
        lines = out.out.splitlines()
        assert lines[0].startswith("<?xml") and lines[1].startswith("<svg")
        assert lines[2:] == ["</svg>"]

    def test_regions_command_adds_layer(self, tmp_path):
        assert main(["regions", "--config", "configs/fig3.json", "--out", str(tmp_path)]) == 0
        r = rows((tmp_path / "regions.csv").read_text())
        assert len(r) == 50 * 70


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "collapse_sim", "transform", "--config",
                          "configs/transform_identity.json"], capture_output=True, text=True,
                         cwd=ROOT)
    assert res.returncode == 0
    assert res.stdout == (GOLDEN / "transform_identity" / "transform.csv").read_text()


def test_bad_command():
    with pytest.raises(SystemExit) as exc:
        main(["explode", "--config", "x.json"])
    assert exc.value.code == 2
