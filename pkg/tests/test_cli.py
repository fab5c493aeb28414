"""Command-line interface: formats, pipelines, and exit codes."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from iipkit.cli import main
from iipkit.csvio import write_trajectory_csv
from iipkit.frames import EARTH
from iipkit.kepler import compute_iip

from conftest import make_state

S1_R = "6578137,0,0"
S1_V = "4949.747468305833,4949.747468305833,0"  # 7000 m/s at 45 deg


def _run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# iip


def test_iip_text_output(capsys, s1_state):
    code, out, err = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V])
    assert code == 0
    sol = compute_iip(s1_state)
    assert f"phi={math.degrees(sol.phi):.6f}deg" in out
    assert f"tf={sol.tf:.6f}s" in out
    assert err == ""


def test_iip_csv_format(capsys, s1_state):
    code, out, _ = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V, "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "t,phi_deg,tf_s,ip_x,ip_y,ip_z,lat_deg,lon_i_deg,lon_e_deg,status"
    cells = lines[1].split(",")
    assert cells[-1] == "ok"
    sol = compute_iip(s1_state)
    assert float(cells[1]) == math.degrees(sol.phi)  # 17 sig digits round-trip
    assert float(cells[2]) == sol.tf


def test_iip_json_lines_sorted_keys(capsys):
    code, out, _ = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V,
                                 "--format", "json-lines"])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 1
    rec = json.loads(lines[0])
    assert rec["ok"] is True
    assert json.dumps(rec, sort_keys=True) == lines[0]


def test_iip_out_file(tmp_path, capsys):
    target = tmp_path / "iip.csv"
    code, out, _ = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V,
                                 "--format", "csv", "--out", str(target)])
    assert code == 0
    assert out == ""
    assert target.read_text().startswith("t,phi_deg")


def test_iip_earth_override_changes_lon_e(capsys):
    _, out_rot, _ = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V,
                                  "--format", "json-lines"])
    _, out_fix, _ = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V,
                                  "--format", "json-lines", "--earth", "omega=0"])
    rot = json.loads(out_rot)
    fix = json.loads(out_fix)
    assert rot["lon_i_deg"] == fix["lon_i_deg"]
    assert rot["lon_e_deg"] != fix["lon_e_deg"]
    assert fix["lon_e_deg"] == pytest.approx(fix["lon_i_deg"], rel=1e-12)


def test_iip_exit_codes_for_single_state_failures(capsys):
    below = str(0.5 * EARTH.radius) + ",0,0"
    code, _, err = _run(capsys, ["iip", "--r", below, "--v", "0,7000,0"])
    assert code == 2
    assert "error[BelowSurface]" in err

    orbiting = make_state(EARTH.radius + 400e3, 1.05, 0.0)
    r_arg = ",".join("%.17g" % x for x in orbiting.r)
    v_arg = ",".join("%.17g" % x for x in orbiting.v)
    code, _, err = _run(capsys, ["iip", "--r", r_arg, "--v", v_arg])
    assert code == 3
    assert "error[NonImpacting]" in err

    escaping = make_state(EARTH.radius + 100e3, 2.2, math.radians(20.0))
    r_arg = ",".join("%.17g" % x for x in escaping.r)
    v_arg = ",".join("%.17g" % x for x in escaping.v)
    code, _, err = _run(capsys, ["iip", "--r", r_arg, "--v", v_arg])
    assert code == 4
    assert "error[EscapeVelocity]" in err

    code, _, err = _run(capsys, ["iip", "--r", "6578137,0,0", "--v", "3000,0,0"])
    assert code == 6
    assert "error[DegenerateGeometry]" in err


def test_usage_errors_exit_one(capsys):
    code, _, err = _run(capsys, ["iip"])  # neither --input nor --r/--v
    assert code == 1
    assert "provide --input FILE" in err

    code, _, err = _run(capsys, ["iip", "--r", "1,2", "--v", "0,0,1"])
    assert code == 1
    assert "three comma-separated numbers" in err

    code, _, err = _run(capsys, ["iip", "--r", S1_R, "--v", S1_V,
                                 "--earth", "nonsense=1"])
    assert code == 1
    assert "unknown key" in err

    with pytest.raises(SystemExit) as ei:
        main(["no-such-command"])
    assert ei.value.code == 1


def test_iip_missing_input_file_exits_one(capsys, tmp_path):
    code, _, err = _run(capsys, ["iip", "--input", str(tmp_path / "absent.csv")])
    assert code == 1
    assert "error" in err


# ---------------------------------------------------------------------------
# rate


def test_rate_zero_accel_exact_channels(capsys):
    code, out, _ = _run(capsys, ["rate", "--r", S1_R, "--v", S1_V,
                                 "--accel", "0,0,0", "--format", "csv"])
    assert code == 0
    lines = out.splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert row["status"] == "ok"
    assert float(row["leg_tf_dot"]) == -1.0
    assert float(row["geo_tf_dot"]) == -1.0
    assert float(row["leg_dip_dt_x"]) == 0.0
    assert float(row["geo_pdot_d"]) == 0.0
    assert float(row["geo_pdot_c"]) == 0.0
    assert float(row["dev_tf_dot"]) == 0.0


def test_rate_method_selection_in_csv_header(capsys):
    base = ["rate", "--r", S1_R, "--v", S1_V, "--accel", "1,1,1", "--format", "csv"]
    _, out_leg, _ = _run(capsys, base + ["--method", "legacy"])
    header = out_leg.splitlines()[0]
    assert "leg_phi_dot_deg_s" in header and "geo_pdot_d" not in header
    _, out_geo, _ = _run(capsys, base + ["--method", "geometric"])
    header = out_geo.splitlines()[0]
    assert "geo_pdot_d" in header and "leg_phi_dot_deg_s" not in header
    assert "dev_" not in header


def test_rate_text_output_shows_both(capsys):
    code, out, _ = _run(capsys, ["rate", "--r", S1_R, "--v", S1_V,
                                 "--accel", "1,0,0"])
    assert code == 0
    assert "legacy:" in out
    assert "geometric:" in out
    assert "deviation:" in out


def test_rate_pad_state_exits_ten(capsys):
    # Exactly on the surface, exactly horizontal: sensitivities blow up.
    graze = make_state(EARTH.radius, 0.5, 0.0)
    r_arg = ",".join("%.17g" % x for x in graze.r)
    v_arg = ",".join("%.17g" % x for x in graze.v)
    code, _, err = _run(capsys, ["rate", "--r", r_arg, "--v", v_arg,
                                 "--accel", "1,1,1"])
    assert code == 10
    assert "error[SensitivitySingularity]" in err


def test_rate_file_input_accel_override(capsys, tmp_path, flight):
    traj = tmp_path / "slice.csv"
    traj.write_text(write_trajectory_csv(flight.samples[100:103]))
    code, out, _ = _run(capsys, ["rate", "--input", str(traj),
                                 "--accel", "0,0,0", "--format", "json-lines"])
    assert code == 0
    recs = [json.loads(line) for line in out.splitlines()]
    assert len(recs) == 3
    # Override forces coasting: exact zero-accel channels on every row.
    assert all(r["legacy"]["tf_dot"] == -1.0 for r in recs)


# ---------------------------------------------------------------------------
# simulate / compare pipeline


def test_simulate_compare_pipeline(tmp_path, capsys):
    traj = tmp_path / "traj.csv"
    code, out, err = _run(capsys, ["simulate", "--out", str(traj)])
    assert code == 0
    assert out == ""
    assert "simulated 424 samples" in err
    assert "stage 1 burnout" in err and "stage 2 burnout" in err
    assert "max altitude" in err
    assert "final IIP" in err

    report = tmp_path / "report.csv"
    code, out, _ = _run(capsys, ["compare", "--input", str(traj),
                                 "--out", str(report)])
    assert code == 0
    summary = json.loads(out)
    assert set(summary) == {"max_rel_dev", "mean_rel_dev", "n_samples",
                            "n_skipped", "skip_reasons"}
    assert summary["n_samples"] == 423
    assert summary["n_skipped"] == 1
    assert summary["max_rel_dev"] <= 1e-8
    assert report.exists()
    assert report.with_suffix(".json").read_text() == out
    header = report.read_text().splitlines()[0]
    assert header.startswith("t,status,leg_dlat,geo_dlat")
    assert header.endswith(",rel_dev")


def test_simulate_reruns_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    _run(capsys, ["simulate", "--out", str(a), "--dt", "5"])
    _run(capsys, ["simulate", "--out", str(b), "--dt", "5"])
    assert a.read_bytes() == b.read_bytes()


def test_compare_tol_gate_exits_fifteen(tmp_path, capsys, flight):
    traj = tmp_path / "slice.csv"
    traj.write_text(write_trajectory_csv(flight.samples[50:60]))
    code, out, _ = _run(capsys, ["compare", "--input", str(traj), "--tol", "0"])
    assert code == 15
    assert json.loads(out)["max_rel_dev"] > 0.0

    code, _, _ = _run(capsys, ["compare", "--input", str(traj), "--tol", "1e-6"])
    assert code == 0


def test_simulate_config_file(tmp_path, capsys):
    config = tmp_path / "vehicle.cfg"
    config.write_text(
        "payload_mass = 100\n"
        "launch_lat_deg = 10\n"
        "launch_lon_deg = 40\n"
        "launch_azimuth_deg = 90\n"
        "final_coast = 10\n"
        "pitch_program_deg = 0:90, 60:60\n"
        "[stage]\n"
        "structural_mass = 500\n"
        "propellant_mass = 1000\n"
        "burn_time = 30\n"
        "thrust_n = 40000\n"
    )
    out_csv = tmp_path / "out.csv"
    code, _, err = _run(capsys, ["simulate", "--config", str(config),
                                 "--out", str(out_csv)])
    assert code == 0
    assert "stage 1 burnout" in err
    rows = out_csv.read_text().splitlines()
    assert rows[0] == "t,rx,ry,rz,vx,vy,vz,ar,atheta,ah"
    assert len(rows) == 42  # header + samples 0..40


def test_simulate_bad_config_exits_thirteen(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("payload_mass = -5\n[stage]\nstructural_mass = 1\n"
                      "propellant_mass = 1\nburn_time = 1\nthrust_n = 1\n")
    code, _, err = _run(capsys, ["simulate", "--config", str(config)])
    assert code == 13
    assert "error[ConfigError]" in err


def test_compare_malformed_csv_exits_sixteen(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,rx,ry\n1,2,3\n")
    code, _, err = _run(capsys, ["compare", "--input", str(bad)])
    assert code == 16
    assert "error[InputFormatError]" in err


# ---------------------------------------------------------------------------
# validate


def test_validate_impact_text(capsys):
    code, out, _ = _run(capsys, ["validate", "--mode", "impact",
                                 "--r", S1_R, "--v", S1_V])
    assert code == 0
    assert "analytic:" in out and "propagated:" in out and "delta:" in out


def test_validate_fd_table(capsys):
    code, out, _ = _run(capsys, ["validate", "--mode", "fd",
                                 "--r", S1_R, "--v", S1_V,
                                 "--accel", "1,1,0.5",
                                 "--dt-sweep", "0.2,0.1,0.05,0.025"])
    assert code == 0
    assert "dt sweep: 0.2, 0.1, 0.05, 0.025" in out
    for name in ("phi_dot", "tf_dot", "dlat", "dlon_i", "dlon_e",
                 "dip_dt", "pdot_ecef"):
        assert name in out


def test_validate_fd_json_lines(capsys):
    code, out, _ = _run(capsys, ["validate", "--mode", "fd",
                                 "--r", S1_R, "--v", S1_V,
                                 "--accel", "1,0.5,2", "--format", "json-lines"])
    assert code == 0
    rec = json.loads(out)
    assert rec["mode"] == "fd"
    orders = [q["order"] for q in rec["fd"]["quantities"].values()
              if q["order"] is not None]
    assert orders and all(o >= 1.9 for o in orders)


def test_validate_error_maps_to_exit_code(capsys):
    orbiting = make_state(EARTH.radius + 300e3, 1.0, 0.0)
    r_arg = ",".join("%.17g" % x for x in orbiting.r)
    v_arg = ",".join("%.17g" % x for x in orbiting.v)
    code, _, err = _run(capsys, ["validate", "--mode", "impact",
                                 "--r", r_arg, "--v", v_arg])
    assert code == 3
    assert "error[NonImpacting]" in err
