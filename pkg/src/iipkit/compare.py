"""Sample-by-sample cross-validation of the two rate formulations.

For every trajectory sample both formulations predict the impact-point
latitude rate, rotating-frame longitude rate, surface velocity, and
Earth-fixed velocity.  Deviations are normalized per column by the
largest magnitude seen across the run, so quantities passing through
zero do not manufacture spurious relative error.  Samples either
formulation rejects are recorded with the rejection class and counted,
never silently dropped.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import IipError
from .frames import EARTH, EarthModel
from .geometric import geometric_rates
from .legacy import ecef_rate_from_latlon, legacy_rates
from .sim import TrajectorySample

# dlat and dlon_e in deg/s, vector components in m/s (surface velocity and
# its Earth-fixed resolution)
COMPARED_QUANTITIES = (
    "dlat", "dlon_e",
    "pdot_x", "pdot_y", "pdot_z",
    "ecef_x", "ecef_y", "ecef_z",
)


@dataclass(frozen=True)
class CompareRow:
    """One sample's outputs from both formulations.  status is "ok" or the
    name of the error class that rejected the sample; rejected rows carry
    no numbers."""

    t: float
    status: str
    legacy: tuple[float, ...] | None = None
    geometric: tuple[float, ...] | None = None
    rel_dev: float | None = None


@dataclass(frozen=True)
class CompareReport:
    rows: list[CompareRow]
    summary: dict[str, object]
    exceeded: bool


def _quantities_legacy(iip, rates, earth: EarthModel) -> tuple[float, ...]:
    ecef = ecef_rate_from_latlon(iip.lat_e, iip.lon_e, rates.dlat, rates.dlon_e, earth)
    pdot = earth.radius * rates.dip_dt
    return (
        math.degrees(rates.dlat), math.degrees(rates.dlon_e),
        float(pdot[0]), float(pdot[1]), float(pdot[2]),
        float(ecef[0]), float(ecef[1]), float(ecef[2]),
    )


def _quantities_geometric(rates) -> tuple[float, ...]:
    return (
        math.degrees(rates.dlat), math.degrees(rates.dlon_e),
        float(rates.pdot[0]), float(rates.pdot[1]), float(rates.pdot[2]),
        float(rates.pdot_ecef[0]), float(rates.pdot_ecef[1]), float(rates.pdot_ecef[2]),
    )


def compare_samples(samples: list[TrajectorySample], earth: EarthModel = EARTH,
                    tol: float | None = None) -> CompareReport:
    """Run both formulations on every sample and summarize their agreement.

    The summary carries max_rel_dev and mean_rel_dev over the compared
    samples (null when none passed), the count compared, the count
    skipped, and a histogram of skip reasons.  exceeded is set when a
    tolerance was given and the max deviation tops it.
    """
    rows: list[CompareRow] = []
    ok_idx: list[int] = []
    skip_reasons: dict[str, int] = {}
    for s in samples:
        try:
            iip_l, rl = legacy_rates(s.state, s.accel, earth)
            _, rg = geometric_rates(s.state, s.accel, earth)
        except IipError as exc:
            name = type(exc).__name__
            skip_reasons[name] = skip_reasons.get(name, 0) + 1
            rows.append(CompareRow(t=s.t, status=name))
            continue
        ok_idx.append(len(rows))
        rows.append(CompareRow(
            t=s.t, status="ok",
            legacy=_quantities_legacy(iip_l, rl, earth),
            geometric=_quantities_geometric(rg),
        ))

    if ok_idx:
        leg = np.array([rows[i].legacy for i in ok_idx])
        geo = np.array([rows[i].geometric for i in ok_idx])
        col_scale = np.maximum(np.abs(leg), np.abs(geo)).max(axis=0)
        col_scale = np.where(col_scale > 0.0, col_scale, 1.0)
        per_row = (np.abs(leg - geo) / col_scale).max(axis=1)
        for k, i in enumerate(ok_idx):
            row = rows[i]
            rows[i] = CompareRow(t=row.t, status="ok", legacy=row.legacy,
                                 geometric=row.geometric, rel_dev=float(per_row[k]))
        max_dev: float | None = float(per_row.max())
        mean_dev: float | None = float(per_row.mean())
    else:
        max_dev = mean_dev = None

    summary = {
        "max_rel_dev": max_dev,
        "mean_rel_dev": mean_dev,
        "n_samples": len(ok_idx),
        "n_skipped": len(samples) - len(ok_idx),
        "skip_reasons": dict(sorted(skip_reasons.items())),
    }
    exceeded = tol is not None and max_dev is not None and max_dev > tol
    return CompareReport(rows=rows, summary=summary, exceeded=exceeded)


def report_csv(report: CompareReport) -> str:
    """Per-sample report table: both formulations' values side by side plus
    the row's normalized deviation."""
    header = ["t", "status"]
    for q in COMPARED_QUANTITIES:
        header += [f"leg_{q}", f"geo_{q}"]
    header.append("rel_dev")

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in report.rows:
        if row.status != "ok":
            writer.writerow([repr(row.t), row.status] + [""] * (2 * len(COMPARED_QUANTITIES) + 1))
            continue
        rec = [repr(row.t), "ok"]
        for lv, gv in zip(row.legacy, row.geometric):
            rec += [repr(lv), repr(gv)]
        rec.append(repr(row.rel_dev))
        writer.writerow(rec)
    return out.getvalue()


def summary_json(report: CompareReport) -> str:
    return json.dumps(report.summary, indent=2, sort_keys=True) + "\n"
