"""Cross-validation harness: agreement metrics, skip accounting, reports."""

from __future__ import annotations

import json
import math

import numpy as np

from iipkit.compare import (
    COMPARED_QUANTITIES,
    compare_samples,
    report_csv,
    summary_json,
)
from iipkit.frames import ACCEL_ZERO, EARTH
from iipkit.sim import TrajectorySample

from conftest import make_state

SUMMARY_KEYS = {"max_rel_dev", "mean_rel_dev", "n_samples", "n_skipped", "skip_reasons"}


def test_formulations_agree_through_powered_flight(flight):
    report = compare_samples(flight.samples[50:120])
    assert report.summary["n_skipped"] == 0
    assert report.summary["n_samples"] == 70
    assert report.summary["max_rel_dev"] <= 1e-8
    assert not report.exceeded
    assert set(report.summary) == SUMMARY_KEYS


def test_pad_sample_is_skipped_with_reason(flight):
    # at the pad the state is exactly horizontal at the surface radius, and
    # both formulations' shared sensitivity denominator vanishes there
    report = compare_samples(flight.samples[:5])
    assert report.summary["n_samples"] == 4
    assert report.summary["n_skipped"] == 1
    assert report.summary["skip_reasons"] == {"SensitivitySingularity": 1}
    first = report.rows[0]
    assert first.status == "SensitivitySingularity"
    assert first.legacy is None and first.geometric is None and first.rel_dev is None
    assert all(r.status == "ok" and r.rel_dev is not None for r in report.rows[1:])


def test_tolerance_gate(flight):
    window = flight.samples[100:110]
    assert compare_samples(window, tol=1e-6).exceeded is False
    assert compare_samples(window, tol=0.0).exceeded is True
    assert compare_samples(window).exceeded is False


def test_coasting_deviation_is_exactly_zero(flight):
    coast = [s for s in flight.samples if s.t >= 404.0]
    assert len(coast) == 20
    report = compare_samples(coast)
    assert report.summary["n_samples"] == 20
    assert report.summary["max_rel_dev"] == 0.0
    assert report.summary["mean_rel_dev"] == 0.0


def test_empty_input_yields_null_metrics():
    report = compare_samples([], tol=1e-8)
    assert report.summary["max_rel_dev"] is None
    assert report.summary["mean_rel_dev"] is None
    assert report.summary["n_samples"] == 0
    assert report.summary["n_skipped"] == 0
    assert report.exceeded is False


def test_all_rejected_input_counts_reasons():
    bad = make_state(EARTH.radius + 400e3, 1.05, 0.0)
    samples = [TrajectorySample(t=float(k), r=np.asarray(bad.r, float),
                                v=np.asarray(bad.v, float), accel=ACCEL_ZERO,
                                mass=math.nan) for k in range(3)]
    report = compare_samples(samples)
    assert report.summary["n_samples"] == 0
    assert report.summary["n_skipped"] == 3
    assert report.summary["skip_reasons"] == {"NonImpacting": 3}
    assert report.summary["max_rel_dev"] is None


def test_report_csv_layout(flight):
    report = compare_samples(flight.samples[:5])
    lines = report_csv(report).splitlines()
    expected_header = ["t", "status"]
    for q in COMPARED_QUANTITIES:
        expected_header += [f"leg_{q}", f"geo_{q}"]
    expected_header.append("rel_dev")
    assert lines[0] == ",".join(expected_header)
    assert len(lines) == 1 + 5
    # the rejected pad row carries its status and empty value cells
    first = lines[1].split(",")
    assert first[1] == "SensitivitySingularity"
    assert all(cell == "" for cell in first[2:])
    ok = lines[2].split(",")
    assert ok[1] == "ok"
    assert len(ok) == len(expected_header)
    assert float(ok[-1]) >= 0.0


def test_summary_json_shape(flight):
    report = compare_samples(flight.samples[:5], tol=1e-8)
    text = summary_json(report)
    assert text.endswith("\n")
    data = json.loads(text)
    assert set(data) == SUMMARY_KEYS
    assert data["n_samples"] == 4
    assert data["skip_reasons"] == {"SensitivitySingularity": 1}
    # keys are emitted sorted so repeated runs compare byte for byte
    assert text == json.dumps(data, indent=2, sort_keys=True) + "\n"


def test_accelerated_and_coasting_rows_share_column_scales(flight):
    # normalization is per column over the whole run: a coasting row whose
    # values are zero contributes zero deviation, not a 0/0
    mixed = flight.samples[200:210] + [s for s in flight.samples if s.t >= 410.0]
    report = compare_samples(mixed)
    assert report.summary["n_skipped"] == 0
    devs = [r.rel_dev for r in report.rows]
    assert all(d is not None and d <= 1e-8 for d in devs)
