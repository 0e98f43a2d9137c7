"""CLI contract: exit codes, file formats, figures, and determinism."""

from __future__ import annotations

import json

import numpy as np
import pytest

import torus_filippov as tf
from torus_filippov.cli import main


def write_system(path, a, b21=None, b=None, torus=None):
    doc = {"A": a}
    if b21 is not None:
        doc["b21"] = b21
    if b is not None:
        doc["B"] = b
    if torus is not None:
        doc["torus"] = torus
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def xz_path(tmp_path):
    return write_system(tmp_path / "xz.json", [[0, 0, 1], [0, 0, 0], [0, 0, 0]], b21=0.5)


@pytest.fixture
def spiral_path(tmp_path):
    return write_system(tmp_path / "spiral.json", [[-1, -4, 0], [4, -1, 0], [0, 0, -1]], b21=0.0)


class TestDeriveB:
    def test_dense_example(self, tmp_path, capsys):
        inp = write_system(tmp_path / "in.json", [[1, 2, 3], [4, 5, 6], [7, 8, 9]], b21=-1.0)
        out = tmp_path / "out.json"
        assert main(["derive-b", inp, str(out)]) == 0
        assert "omega = 1.5" in capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert doc["B"] == [[-1.0, -5.0, -3.0], [-1.0, -5.0, -6.0], [-7.0, -8.0, -9.0]]
        report = json.loads((tmp_path / "out.json.report.json").read_text())
        assert report["command"] == "derive-b"
        assert report["diagnostics"]["omega"] == 1.5

    def test_zero_field_warns(self, tmp_path, capsys):
        inp = write_system(tmp_path / "in.json", [[0, 0, 0], [0, 0, 0], [0, 0, 0]], b21=0.0)
        out = tmp_path / "out.json"
        assert main(["derive-b", inp, str(out)]) == 0
        captured = capsys.readouterr()
        assert "omega = 0" in captured.out
        assert "degenerate" in captured.err
        assert json.loads(out.read_text())["B"] == [[0.0] * 3] * 3

    def test_missing_key_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"b21": 0}')
        assert main(["derive-b", str(bad), str(tmp_path / "o.json")]) == 2
        assert "'A'" in capsys.readouterr().err

    def test_rederiving_explicit_b_reproduces_matrix(self, tmp_path):
        inp = write_system(tmp_path / "in.json", [[1, 2, 3], [4, 5, 6], [7, 8, 9]], b21=-1.0)
        full = tmp_path / "full.json"
        main(["derive-b", inp, str(full)])
        doc = json.loads(full.read_text())
        rederived = tf.derive_inelastic_b(np.array(doc["A"]), doc["B"][1][0])
        np.testing.assert_array_equal(rederived, np.array(doc["B"]))


class TestClassify:
    def test_xz_case_json(self, tmp_path, xz_path):
        out = tmp_path / "cls.json"
        assert main(["classify", xz_path, "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["case"] == "XZCase"
        assert doc["component_count"] == 6
        assert doc["gamma"] == 5.0
        kinds = sorted(c["kind"] for c in doc["components"])
        assert kinds.count("sphere_circle") == 2
        assert all(len(c["samples"]) >= 64 for c in doc["components"] if c["kind"] != "polyline")

    def test_z_squared_two_components(self, tmp_path):
        path = write_system(tmp_path / "z.json", [[0, 0, 0], [0, 0, 0], [0, 0, 1]], b21=0.5)
        out = tmp_path / "cls.json"
        assert main(["classify", path, "--out", str(out)]) == 0
        assert json.loads(out.read_text())["component_count"] == 2

    def test_fallback_polylines(self, tmp_path, spiral_path):
        out = tmp_path / "cls.json"
        assert main(["classify", spiral_path, "--grid", "128", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["case"] == "NumericalFallback"
        assert doc["component_count"] == 2
        for comp in doc["components"]:
            assert comp["kind"] == "polyline"
            pts = np.array(comp["samples"])
            rho = np.hypot(pts[:, 0], pts[:, 1])
            assert np.max(np.abs(rho - 1.5)) < 0.02
            assert np.max(np.abs(np.abs(pts[:, 2]) - np.sqrt(3.0) / 2.0)) < 0.02

    def test_malformed_input_exit_2(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("not json")
        assert main(["classify", str(bad), "--out", str(tmp_path / "o.json")]) == 2

    def test_svg_and_fig_outputs(self, tmp_path, xz_path):
        out = tmp_path / "cls.json"
        svg = tmp_path / "cls.svg"
        fig = tmp_path / "cls.png"
        assert main(["classify", xz_path, "--out", str(out), "--svg", str(svg), "--fig", str(fig)]) == 0
        assert svg.read_text().startswith("<svg")
        assert fig.stat().st_size > 1000

    def test_fig_outputs_for_regions_and_simulate(self, tmp_path, xz_path, spiral_path):
        assert main(
            ["regions", xz_path, "--grid", "24", "--out", str(tmp_path / "r.csv"),
             "--fig", str(tmp_path / "r.png"), "--svg", str(tmp_path / "r.svg")]
        ) == 0
        assert main(
            ["simulate", spiral_path, "--x0", "4,0,0", "--tmax", "1",
             "--out", str(tmp_path / "t.csv"), "--fig", str(tmp_path / "t.png"),
             "--svg", str(tmp_path / "t.svg")]
        ) == 0
        for name in ("r.png", "t.png"):
            assert (tmp_path / name).stat().st_size > 1000
        for name in ("r.svg", "t.svg"):
            assert (tmp_path / name).read_text().startswith("<svg")


class TestSimulate:
    def test_spiral_csv(self, tmp_path, spiral_path):
        out = tmp_path / "traj.csv"
        assert main(["simulate", spiral_path, "--x0", "4,0,0", "--tmax", "3", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,x,y,z,mode,segment"
        slide_rows = [ln for ln in lines[1:] if ln.split(",")[4] == "slide"]
        first = slide_rows[0].split(",")
        t, x, y = float(first[0]), float(first[1]), float(first[2])
        assert abs(t - np.log(4.0 / 3.0)) < 1e-9
        assert abs(np.hypot(x, y) - 3.0) < 1e-9
        report = json.loads((tmp_path / "traj.csv.report.json").read_text())
        assert report["diagnostics"]["modes"] == ["free+", "slide"]

    def test_zero_horizon_single_row(self, tmp_path, spiral_path):
        out = tmp_path / "traj.csv"
        assert main(["simulate", spiral_path, "--x0", "4,0,0", "--tmax", "0", "--out", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 2  # header + one sample

    def test_degenerate_omega_single_slide_row(self, tmp_path):
        path = write_system(tmp_path / "s.json", [[0, 0, 1], [0, 0, 0], [0, 0, 0]], b21=0.0)
        out = tmp_path / "traj.csv"
        x0 = f"2.5,0,{float(-np.sqrt(3.0) / 2.0)!r}"
        assert main(["simulate", path, "--x0", x0, "--tmax", "1", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2 and lines[1].split(",")[4] == "slide"
        report = json.loads((tmp_path / "traj.csv.report.json").read_text())
        assert report["diagnostics"]["terminal_events"] == ["degenerate_stop"]

    def test_bad_point_exit_2(self, tmp_path, spiral_path):
        with pytest.raises(SystemExit) as err:
            main(["simulate", spiral_path, "--x0", "4,0", "--tmax", "1", "--out", "o.csv"])
        assert err.value.code == 2


class TestRegions:
    def test_xz_region_map(self, tmp_path, xz_path):
        out = tmp_path / "reg.csv"
        assert main(["regions", xz_path, "--grid", "64", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "u,v,region"
        regions = {ln.split(",")[2] for ln in lines[1:]}
        assert "crossing" not in regions
        assert {"sliding", "escaping", "tangency"} <= regions
        # tangency rows only within one cell of the analytic curves
        # (cos u = 0, sin v = 0, or cos v = 0)
        cell = 2.0 * np.pi / 64
        for ln in lines[1:]:
            u_s, v_s, region = ln.split(",")
            if region != "tangency":
                continue
            u, v = float(u_s), float(v_s)
            d_u = min(abs(u - np.pi / 2), abs(u - 3 * np.pi / 2))
            d_v = min(abs(v - k * np.pi / 2) for k in range(5))
            assert min(d_u, d_v) <= cell + 1e-12

    def test_zero_field_all_tangency(self, tmp_path):
        path = write_system(tmp_path / "z.json", [[0, 0, 0], [0, 0, 0], [0, 0, 0]], b21=1.0)
        out = tmp_path / "reg.csv"
        assert main(["regions", path, "--grid", "16", "--out", str(out)]) == 0
        rows = out.read_text().splitlines()[1:]
        assert all(ln.endswith(",tangency") for ln in rows)

    def test_coarse_grid_exit_2(self, tmp_path, xz_path, capsys):
        assert main(["regions", xz_path, "--grid", "8", "--out", str(tmp_path / "r.csv")]) == 2
        assert "grid too coarse" in capsys.readouterr().err

    def test_non_inelastic_allowed_flag(self, tmp_path):
        path = write_system(
            tmp_path / "ni.json",
            [[0, 0, 1], [0, 0, 0], [0, 0, 0]],
            b=[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        )
        out = tmp_path / "r.csv"
        assert main(["regions", path, "--out", str(out)]) == 2
        assert main(["regions", path, "--allow-non-inelastic", "--grid", "16", "--out", str(out)]) == 0
        regions = {ln.split(",")[2] for ln in out.read_text().splitlines()[1:]}
        assert "crossing" in regions


class TestOrbitCheckAndEquiv:
    def test_orbit_check_stdout(self, tmp_path, capsys):
        path = write_system(tmp_path / "s.json", [[0, -4, 1], [4, 0, 0], [0, 0, 0]], b21=-1.0)
        x0 = f"2.5,0,{float(-np.sqrt(3.0) / 2.0)!r}"
        assert main(["orbit-check", path, "--p0", x0]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["diagnostics"]["closed"] is True
        assert abs(doc["diagnostics"]["period"] - 4.0 * np.pi / 3.0) < 1e-5
        assert doc["diagnostics"]["gap"] < 1e-6

    def test_orbit_check_degenerate_exit_2(self, tmp_path):
        path = write_system(tmp_path / "s.json", [[0, 0, 1], [0, 0, 0], [0, 0, 0]], b21=0.0)
        assert main(["orbit-check", path, "--p0", "3,0,0"]) == 2

    def test_equiv_reflection(self, tmp_path):
        p1 = write_system(tmp_path / "s1.json", [[0, -2, 1], [2, 0, 0], [0, 0, 0]], b21=1.0)
        p2 = write_system(tmp_path / "s2.json", [[0, 0.4, 1], [-0.4, 0, 0], [0, 0, 0]], b21=-0.2)
        out = tmp_path / "eq.json"
        assert main(["equiv", p1, p2, "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["equivalent"] is True
        assert doc["orientation_relation"] == "Reversed"
        assert doc["homeomorphism_descriptor"] == "ReflectionY"
        assert doc["orbit_match_error"] < 1e-12

    def test_equiv_strict_flag(self, tmp_path):
        p1 = write_system(tmp_path / "s1.json", [[0, -2, 1], [2, 0, 0], [0, 0, 0]], b21=1.0)
        out = tmp_path / "eq.json"
        assert main(["equiv", p1, p1, "--strict", "--out", str(out)]) == 0
        assert json.loads(out.read_text())["equivalent"] is False


class TestSweep:
    def test_six_cells_with_degeneracy_flags(self, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(
            json.dumps(
                {
                    "base": {"A": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]},
                    "grid": {"a21": [-1, 0, 1], "b21": [0, 1]},
                }
            )
        )
        out_dir = tmp_path / "out"
        assert main(["sweep", str(config), "--out-dir", str(out_dir)]) == 0
        index = json.loads((out_dir / "index.json").read_text())
        assert index["count"] == 6
        flagged = {
            (c["params"]["a21"], c["params"]["b21"]) for c in index["cells"] if "omega_zero" in c["flags"]
        }
        assert flagged == {(-1, 1), (0, 0)}
        cell = json.loads((out_dir / "cell_0000.json").read_text())
        assert cell["params"] == {"a21": -1, "b21": 0}
        assert cell["omega"] == -0.5

    def test_unknown_grid_key_exit_2(self, tmp_path):
        config = tmp_path / "sweep.json"
        config.write_text(json.dumps({"base": {"A": [[0] * 3] * 3}, "grid": {"q99": [1]}}))
        assert main(["sweep", str(config), "--out-dir", str(tmp_path / "o")]) == 2


class TestDeterminism:
    def test_repeated_runs_byte_identical(self, tmp_path, xz_path, spiral_path):
        files = {}
        for run in ("one", "two"):
            d = tmp_path / run
            d.mkdir()
            main(["classify", xz_path, "--out", str(d / "cls.json"), "--svg", str(d / "cls.svg")])
            main(["simulate", spiral_path, "--x0", "4,0,0", "--tmax", "2", "--out", str(d / "t.csv")])
            main(["regions", xz_path, "--grid", "32", "--out", str(d / "r.csv")])
            files[run] = {
                name: (d / name).read_bytes()
                for name in ("cls.json", "cls.svg", "t.csv", "r.csv",
                             "cls.json.report.json", "t.csv.report.json", "r.csv.report.json")
            }
        assert files["one"] == files["two"]
