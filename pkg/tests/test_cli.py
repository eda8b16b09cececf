"""End-to-end checks of the command-line contract: exit codes, file
outputs, determinism, and preset handling, all run in-process."""

import csv
import filecmp
import json

import pytest

from biharm import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def quick_config(tmp_path, **over):
    d = {
        "q": 5.0,
        "poly": {"a": [1.0, 1.0, 1.0], "b": [0.0, 0.0, 0.0], "c": 1.0,
                 "eps_quartic": 0.0},
        "kernel_variant": "shifted",
        "grid": {"kind": "radial", "n_r": 400, "r_max": 40.0, "grading": 2.0},
        "damping": 1.0,
        "tol_fixed_point": 1e-10,
        "max_iters": 200,
        "seed": 3,
    }
    d.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return path


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    """One quick solve shared by the read-only CLI tests."""
    tmp = tmp_path_factory.mktemp("solved")
    cfg = quick_config(tmp)
    out = tmp / "run"
    code = cli.main(["solve", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    return cfg, out


class TestSolve:
    def test_outputs_and_exit_zero(self, solved):
        _, out = solved
        for name in ("report.json", "profile.csv", "trace.csv", "config.json"):
            assert (out / name).exists(), name
        rep = json.loads((out / "report.json").read_text())
        assert rep["result"]["converged"] is True
        assert rep["result"]["v_origin"] == 0.0

    def test_reports_are_byte_identical(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        assert run(capsys, "solve", "--config", str(cfg), "--out", str(a))[0] == 0
        assert run(capsys, "solve", "--config", str(cfg), "--out", str(b))[0] == 0
        assert filecmp.cmp(a / "report.json", b / "report.json", shallow=False)
        assert filecmp.cmp(a / "profile.csv", b / "profile.csv", shallow=False)

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        cfg = quick_config(tmp_path)
        out = tmp_path / "s"
        code, _, _ = run(capsys, "solve", "--config", str(cfg),
                         "--out", str(out), "--seed", "42")
        assert code == 0
        rep = json.loads((out / "report.json").read_text())
        assert rep["config"]["seed"] == 42

    def test_env_output_dir(self, tmp_path, capsys, monkeypatch):
        cfg = quick_config(tmp_path)
        target = tmp_path / "from_env"
        monkeypatch.setenv("BIHARM_OUT", str(target))
        code, _, _ = run(capsys, "solve", "--config", str(cfg))
        assert code == 0
        assert (target / "report.json").exists()

    def test_nonexistence_regime_exits_two(self, tmp_path, capsys):
        cfg = quick_config(tmp_path, q=0.5)
        code, _, err = run(capsys, "solve", "--config", str(cfg),
                           "--out", str(tmp_path / "d"))
        assert code == 2
        assert "diverged" in err

    def test_bad_json_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "solve", "--config", str(bad),
                           "--out", str(tmp_path / "e"))
        assert code == 1
        assert "error" in err

    def test_config_and_preset_required(self, tmp_path, capsys):
        code, _, err = run(capsys, "solve", "--out", str(tmp_path / "f"))
        assert code == 1

    def test_preset_for_wrong_subcommand(self, tmp_path, capsys):
        code, _, err = run(capsys, "solve", "--preset", "exact-q7",
                           "--out", str(tmp_path / "g"))
        assert code == 1
        assert "verify" in err


class TestVerify:
    def test_exact_battery_passes(self, tmp_path, capsys):
        code, out, _ = run(capsys, "verify", "--exact-q7",
                           "--out", str(tmp_path / "v"))
        assert code == 0
        doc = json.loads((tmp_path / "v" / "verification.json").read_text())
        assert all(c["status"] == "pass" for c in doc["checks"].values())

    def test_solved_profile_passes(self, solved, tmp_path, capsys):
        cfg, out = solved
        code, _, _ = run(capsys, "verify", "--config", str(cfg),
                         "--profile", str(out / "profile.csv"),
                         "--out", str(tmp_path / "v2"))
        assert code == 0
        doc = json.loads((tmp_path / "v2" / "verification.json").read_text())
        assert doc["checks"]["pde"]["status"] == "pass"
        assert doc["checks"]["integral"]["status"] == "pass"
        assert doc["checks"]["pohozaev"]["status"] == "pass"

    def test_corrupted_profile_fails_checks(self, solved, tmp_path, capsys):
        cfg, out = solved
        lines = (out / "profile.csv").read_text().splitlines()
        head, rows = lines[0], lines[1:]
        bad = [head]
        for i, line in enumerate(rows):
            r, val = line.split(",")
            if i % 2 == 0:
                val = str(2.0 * float(val))
            bad.append(f"{r},{val}")
        p = tmp_path / "corrupt.csv"
        p.write_text("\n".join(bad) + "\n")
        code, _, _ = run(capsys, "verify", "--config", str(cfg),
                         "--profile", str(p), "--out", str(tmp_path / "v3"))
        assert code == 3

    def test_continuation_round_trip_passes(self, tmp_path, capsys):
        # solve with a vanishing-quartic continuation, then verify the stored
        # stage profile; the equation check must window out the noise that
        # the angular modes amplify near the origin
        d = {
            "q": 2.0,
            "poly": {"a": [1.0, 2.0, 2.0], "b": [0.0, 0.0, 0.0], "c": 1.0,
                     "eps_quartic": 0.0},
            "kernel_variant": "shifted",
            "grid": {"kind": "axisymmetric", "n_r": 96, "n_angle": 96,
                     "r_max": 40.0, "grading": 2.0},
            "damping": 1.0, "tol_fixed_point": 1e-10, "max_iters": 200,
            "seed": 0,
            "continuation": {"eps_sequence": [0.1, 0.03],
                             "eps_param": "quartic"},
        }
        cfg = tmp_path / "cont.json"
        cfg.write_text(json.dumps(d))
        out = tmp_path / "run"
        assert run(capsys, "solve", "--config", str(cfg),
                   "--out", str(out))[0] == 0
        code, _, _ = run(capsys, "verify", "--config", str(cfg),
                         "--profile", str(out / "profile.csv"),
                         "--out", str(tmp_path / "chk"))
        assert code == 0
        doc = json.loads((tmp_path / "chk" / "verification.json").read_text())
        assert doc["checks"]["pde"]["status"] == "pass"
        assert doc["checks"]["integral"]["status"] == "pass"

    def test_truncated_profile_is_structural_error(self, solved, tmp_path,
                                                   capsys):
        cfg, out = solved
        lines = (out / "profile.csv").read_text().splitlines()
        p = tmp_path / "short.csv"
        p.write_text("\n".join(lines[: len(lines) // 2]) + "\n")
        code, _, err = run(capsys, "verify", "--config", str(cfg),
                           "--profile", str(p), "--out", str(tmp_path / "v4"))
        assert code == 1


class TestShoot:
    def test_exact_start_summary(self, tmp_path, capsys):
        code, _, _ = run(capsys, "shoot", "--q", "7", "--exact-start",
                         "--r-end", "10", "--out", str(tmp_path / "sh"))
        assert code == 0
        doc = json.loads((tmp_path / "sh" / "summary.json").read_text())
        assert doc["outcome"] == "survived"
        assert doc["max_rel_deviation_from_closed_form"] < 1e-8
        assert (tmp_path / "sh" / "trajectory.csv").exists()

    def test_bisect_writes_threshold(self, tmp_path, capsys):
        code, _, _ = run(capsys, "shoot", "--q", "2", "--bisect",
                         "--r-end", "3e3", "--out", str(tmp_path / "bi"))
        assert code == 0
        doc = json.loads((tmp_path / "bi" / "summary.json").read_text())
        assert doc["w0_critical"] > 0.0
        assert doc["growth"]["exponent"] == pytest.approx(4.0 / 3.0, rel=0.05)

    def test_no_bracket_exits_four(self, tmp_path, capsys):
        code, _, err = run(capsys, "shoot", "--q", "5", "--u0", "100",
                           "--bisect", "--r-end", "50",
                           "--out", str(tmp_path / "nb"))
        assert code == 4
        assert "bracket" in err


class TestSweep:
    def test_empty_grid_gives_header_only(self, tmp_path, capsys):
        base = json.loads(quick_config(tmp_path).read_text())
        sw = tmp_path / "sweep.json"
        sw.write_text(json.dumps({"base": base, "grid": {"q": []}}))
        out = tmp_path / "sw0"
        code, _, _ = run(capsys, "sweep", "--config", str(sw),
                         "--out", str(out), "--threads", "1")
        assert code == 0
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines == [",".join(cli.SWEEP_COLUMNS)]

    def test_failing_point_is_isolated(self, tmp_path, capsys):
        base = json.loads(quick_config(tmp_path).read_text())
        base["grid"] = {"kind": "radial", "n_r": 200, "r_max": 30.0,
                        "grading": 2.0}
        sw = tmp_path / "sweep.json"
        sw.write_text(json.dumps(
            {"base": base, "grid": {"q": [1.0, 5.0, 6.0]}}))
        out = tmp_path / "sw1"
        code, _, _ = run(capsys, "sweep", "--config", str(sw),
                         "--out", str(out), "--threads", "1")
        assert code == 0
        with open(out / "sweep.csv") as f:
            rows = list(csv.DictReader(f))
        assert [float(r["q"]) for r in rows] == [1.0, 5.0, 6.0]
        assert rows[0]["converged"] == "False" and rows[0]["error"]
        assert rows[1]["converged"] == "True"
        assert rows[2]["converged"] == "True"
        assert float(rows[1]["exponent_e1"]) == pytest.approx(2.0, rel=0.05)
