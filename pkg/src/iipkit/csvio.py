"""Trajectory CSV format.

One header row, ten columns: sample epoch, inertial position, inertial
velocity, and disturbing acceleration on radial/along-track/normal axes.
Floats are written with 17 significant digits so files round-trip
bit-exactly and repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import io
import math

import numpy as np

from .errors import InputFormatError
from .frames import AccelRtn
from .sim import TrajectorySample

TRAJECTORY_COLUMNS = ("t", "rx", "ry", "rz", "vx", "vy", "vz", "ar", "atheta", "ah")


def format_float(x: float) -> str:
    return "%.17g" % float(x)


def write_trajectory_csv(samples: list[TrajectorySample]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(TRAJECTORY_COLUMNS)
    for s in samples:
        writer.writerow([format_float(v) for v in (
            s.t, s.r[0], s.r[1], s.r[2], s.v[0], s.v[1], s.v[2],
            s.accel.ar, s.accel.atheta, s.accel.ah,
        )])
    return out.getvalue()


def read_trajectory_csv(text: str) -> list[TrajectorySample]:
    """Parse and validate trajectory CSV text.

    Raises InputFormatError on a wrong header, wrong column count,
    non-numeric or non-finite values, or non-increasing sample times.
    Mass is not part of the format; parsed samples carry NaN there.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise InputFormatError("empty trajectory file") from None
    if tuple(h.strip() for h in header) != TRAJECTORY_COLUMNS:
        raise InputFormatError(
            f"bad header: expected {','.join(TRAJECTORY_COLUMNS)!r}, got {','.join(header)!r}"
        )

    samples: list[TrajectorySample] = []
    prev_t = -math.inf
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(TRAJECTORY_COLUMNS):
            raise InputFormatError(
                f"line {lineno}: expected {len(TRAJECTORY_COLUMNS)} columns, got {len(row)}"
            )
        try:
            vals = [float(x) for x in row]
        except ValueError:
            raise InputFormatError(f"line {lineno}: non-numeric value") from None
        if not all(math.isfinite(x) for x in vals):
            raise InputFormatError(f"line {lineno}: non-finite value")
        if vals[0] <= prev_t:
            raise InputFormatError(f"line {lineno}: sample times must be strictly increasing")
        prev_t = vals[0]
        samples.append(TrajectorySample(
            t=vals[0],
            r=np.array(vals[1:4]),
            v=np.array(vals[4:7]),
            accel=AccelRtn(ar=vals[7], atheta=vals[8], ah=vals[9]),
            mass=math.nan,
        ))
    if not samples:
        raise InputFormatError("trajectory file has no data rows")
    return samples
