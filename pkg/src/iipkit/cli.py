"""Command-line interface.

Every subcommand is a thin client of the HTTP service (mounted
in-process unless --server points at a running instance), so the CLI
and the service can never disagree about results.  Angles are degrees
here; machine outputs (csv, json-lines) format floats with 17
significant digits so repeated runs are byte-identical.

Exit codes: 0 success; 1 usage or transport problems; 2-14 and 16 map
library error classes (see README); 15 means a compare run exceeded the
given tolerance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .client import ServiceClient, ServiceError
from .csvio import read_trajectory_csv
from .errors import EXIT_CODES, IipError, exit_code_for

_NAME_TO_EXIT = {cls.__name__: code for cls, code in EXIT_CODES.items()}
EXIT_COMPARE_TOL = 15


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return "%.17g" % float(x)


def _parse_triple(raw: str, flag: str) -> list[float]:
    parts = raw.split(",")
    if len(parts) != 3:
        raise _Usage(f"{flag} expects three comma-separated numbers, got {raw!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise _Usage(f"{flag}: non-numeric component in {raw!r}") from None


class _Usage(Exception):
    pass


def _parse_earth(raw: str | None) -> dict[str, float] | None:
    """--earth mu=...,radius=...,omega=...,t_ref=... (any subset)."""
    if raw is None:
        return None
    out: dict[str, float] = {}
    for item in raw.split(","):
        if "=" not in item:
            raise _Usage(f"--earth expects key=value pairs, got {item!r}")
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in ("mu", "radius", "omega", "t_ref"):
            raise _Usage(f"--earth: unknown key {key!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise _Usage(f"--earth: bad value for {key}: {val!r}") from None
    return out


def _states_payload(args) -> tuple[list[dict[str, Any]], list[dict[str, Any]], bool]:
    """States (and per-state accels) from --input or from --r/--v/--accel.

    Returns (states, accels, single) where single marks the one-state
    command-line form, whose failures become process exit codes.
    """
    if args.input is not None:
        samples = read_trajectory_csv(Path(args.input).read_text())
        states = [{"t": s.t, "r": tuple(s.r), "v": tuple(s.v)} for s in samples]
        accels = [{"ar": s.accel.ar, "atheta": s.accel.atheta, "ah": s.accel.ah}
                  for s in samples]
        if getattr(args, "accel", None) is not None:
            ar, at, ah = _parse_triple(args.accel, "--accel")
            accels = [{"ar": ar, "atheta": at, "ah": ah}]
        return states, accels, False
    if args.r is None or args.v is None:
        raise _Usage("provide --input FILE, or both --r and --v")
    r = _parse_triple(args.r, "--r")
    v = _parse_triple(args.v, "--v")
    if getattr(args, "accel", None) is not None:
        ar, at, ah = _parse_triple(args.accel, "--accel")
    else:
        ar = at = ah = 0.0
    return ([{"t": args.t, "r": r, "v": v}],
            [{"ar": ar, "atheta": at, "ah": ah}], True)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_table(header: list[str], rows: list[list[str]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_lines(records: list[dict[str, Any]]) -> str:
    return "".join(json.dumps(rec, sort_keys=True) + "\n" for rec in records)


# ---------------------------------------------------------------------------
# subcommands


def cmd_iip(args, client: ServiceClient) -> int:
    states, _, single = _states_payload(args)
    payload: dict[str, Any] = {"states": states}
    if args.earth_params:
        payload["earth"] = args.earth_params
    results = client.post("/iip", payload)["results"]

    if single and not results[0]["ok"]:
        r = results[0]
        print(f"error[{r['error']}]: {r['message']}", file=sys.stderr)
        return _NAME_TO_EXIT.get(r["error"], 1)

    if args.format == "json-lines":
        _emit(args, _json_lines(results))
    elif args.format == "csv":
        header = ["t", "phi_deg", "tf_s", "ip_x", "ip_y", "ip_z",
                  "lat_deg", "lon_i_deg", "lon_e_deg", "status"]
        rows = []
        for r in results:
            if r["ok"]:
                rows.append([_fmt(r["t"]), _fmt(r["phi_deg"]), _fmt(r["tf_s"]),
                             *(_fmt(x) for x in r["i_p"]),
                             _fmt(r["lat_deg"]), _fmt(r["lon_i_deg"]),
                             _fmt(r["lon_e_deg"]), "ok"])
            else:
                rows.append([""] * 9 + [r["error"]])
        _emit(args, _csv_table(header, rows))
    else:
        lines = []
        for r in results:
            if r["ok"]:
                lines.append(
                    f"t={r['t']:.3f}s  phi={r['phi_deg']:.6f}deg  tf={r['tf_s']:.6f}s  "
                    f"lat={r['lat_deg']:.6f}  lon_i={r['lon_i_deg']:.6f}  "
                    f"lon_e={r['lon_e_deg']:.6f}  "
                    f"ip=({r['i_p'][0]:.9f}, {r['i_p'][1]:.9f}, {r['i_p'][2]:.9f})"
                )
            else:
                lines.append(f"index={r['index']}  error[{r['error']}]: {r['message']}")
        _emit(args, "\n".join(lines) + "\n")
    return 0


_LEGACY_COLS = ["phi_dot_deg_s", "tf_dot", "dip_dt", "dlat_deg_s",
                "dlon_i_deg_s", "dlon_e_deg_s", "pdot_ecef"]
_GEO_COLS = ["pdot_d", "pdot_c", "pdot", "pdot_w", "pdot_ecef", "tf_dot",
             "dlat_deg_s", "dlon_i_deg_s", "dlon_e_deg_s"]


def _flatten(prefix: str, name: str, value) -> list[tuple[str, float]]:
    if isinstance(value, (list, tuple)):
        return [(f"{prefix}{name}_{ax}", float(v)) for ax, v in zip("xyz", value)]
    return [(f"{prefix}{name}", float(value))]


def cmd_rate(args, client: ServiceClient) -> int:
    states, accels, single = _states_payload(args)
    payload: dict[str, Any] = {"states": states, "accels": accels, "method": args.method}
    if args.earth_params:
        payload["earth"] = args.earth_params
    results = client.post("/rate", payload)["results"]

    if single and not results[0]["ok"]:
        r = results[0]
        print(f"error[{r['error']}]: {r['message']}", file=sys.stderr)
        return _NAME_TO_EXIT.get(r["error"], 1)

    if args.format == "json-lines":
        _emit(args, _json_lines(results))
        return 0

    flat_rows: list[list[tuple[str, float]]] = []
    statuses: list[str] = []
    for r in results:
        cols: list[tuple[str, float]] = []
        statuses.append("ok" if r["ok"] else r["error"])
        if not r["ok"]:
            flat_rows.append(cols)
            continue
        cols += [("t", r["t"]), ("phi_deg", r["phi_deg"]), ("tf_s", r["tf_s"]),
                 ("lat_deg", r["lat_deg"]), ("lon_e_deg", r["lon_e_deg"])]
        if r.get("legacy"):
            for name in _LEGACY_COLS:
                cols += _flatten("leg_", name, r["legacy"][name])
        if r.get("geometric"):
            for name in _GEO_COLS:
                cols += _flatten("geo_", name, r["geometric"][name])
        if r.get("deviation"):
            cols += [(f"dev_{k}", v) for k, v in sorted(r["deviation"].items())]
        flat_rows.append(cols)

    if args.format == "csv":
        header = next((([name for name, _ in row]) for row in flat_rows if row), [])
        table = []
        for row, status in zip(flat_rows, statuses):
            if row:
                table.append([_fmt(v) for _, v in row] + ["ok"])
            else:
                table.append([""] * len(header) + [status])
        _emit(args, _csv_table(header + ["status"], table))
    else:
        lines = []
        for row, status, r in zip(flat_rows, statuses, results):
            if not row:
                lines.append(f"index={r['index']}  error[{status}]: {r['message']}")
                continue
            vals = dict(row)
            lines.append(f"t={vals['t']:.3f}s  phi={vals['phi_deg']:.6f}deg  "
                         f"tf={vals['tf_s']:.6f}s")
            for prefix, label in (("leg_", "  legacy:   "), ("geo_", "  geometric:")):
                picked = {k[len(prefix):]: v for k, v in vals.items() if k.startswith(prefix)}
                if picked:
                    body = "  ".join(f"{k}={v:.9g}" for k, v in picked.items())
                    lines.append(f"{label} {body}")
            devs = {k[4:]: v for k, v in vals.items() if k.startswith("dev_")}
            if devs:
                lines.append("  deviation: "
                             + "  ".join(f"{k}={v:.3e}" for k, v in devs.items()))
        _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_simulate(args, client: ServiceClient) -> int:
    payload: dict[str, Any] = {"dt": args.dt, "substep": args.substep}
    if args.config is not None:
        payload["config_text"] = Path(args.config).read_text()
    if args.earth_params:
        payload["earth"] = args.earth_params
    resp = client.post("/simulate", payload)

    samples = resp["samples"]
    if args.format == "json-lines":
        _emit(args, _json_lines(samples))
    else:
        header = ["t", "rx", "ry", "rz", "vx", "vy", "vz", "ar", "atheta", "ah"]
        rows = [[_fmt(s["t"]), *(_fmt(x) for x in s["r"]), *(_fmt(x) for x in s["v"]),
                 _fmt(s["ar"]), _fmt(s["atheta"]), _fmt(s["ah"])] for s in samples]
        _emit(args, _csv_table(header, rows))

    note = (f"simulated {len(samples)} samples to t={samples[-1]['t']:.1f}s; "
            f"liftoff {resp['liftoff_mass']:.1f} kg, final {resp['final_mass']:.1f} kg")
    if resp["truncated"]:
        note += f"; TRUNCATED below surface at t={resp['truncate_time']:.1f}s"
    print(note, file=sys.stderr)
    for b in resp["burnouts"]:
        print(f"stage {b['stage']} burnout: t={b['t']:.1f}s  "
              f"alt={b['altitude_m'] / 1e3:.1f}km  speed={b['speed_ms']:.1f}m/s  "
              f"mass={b['mass_kg']:.1f}kg", file=sys.stderr)
    print(f"max altitude: {resp['max_altitude_m'] / 1e3:.1f}km", file=sys.stderr)
    if resp.get("final_iip"):
        fi = resp["final_iip"]
        print(f"final IIP: lat={fi['lat_deg']:.6f}deg  lon_e={fi['lon_e_deg']:.6f}deg  "
              f"tf={fi['tf_s']:.3f}s", file=sys.stderr)
    elif resp.get("final_iip_error"):
        print(f"final IIP: undefined ({resp['final_iip_error']})", file=sys.stderr)
    return 0


def cmd_compare(args, client: ServiceClient) -> int:
    samples = read_trajectory_csv(Path(args.input).read_text())
    payload: dict[str, Any] = {
        "samples": [{
            "t": s.t, "r": tuple(s.r), "v": tuple(s.v),
            "ar": s.accel.ar, "atheta": s.accel.atheta, "ah": s.accel.ah,
        } for s in samples],
    }
    payload["tol"] = args.tol
    if args.earth_params:
        payload["earth"] = args.earth_params
    resp = client.post("/compare", payload)

    summary_text = json.dumps(resp["summary"], indent=2, sort_keys=True) + "\n"
    if args.out:
        columns = resp["columns"]
        header = ["t", "status"]
        for q in columns:
            header += [f"leg_{q}", f"geo_{q}"]
        header.append("rel_dev")
        rows = []
        for row in resp["rows"]:
            if row["status"] != "ok":
                rows.append([_fmt(row["t"]), row["status"]] + [""] * (2 * len(columns) + 1))
                continue
            rec = [_fmt(row["t"]), "ok"]
            for lv, gv in zip(row["legacy"], row["geometric"]):
                rec += [_fmt(lv), _fmt(gv)]
            rec.append(_fmt(row["rel_dev"]))
            rows.append(rec)
        out_path = Path(args.out)
        out_path.write_text(_csv_table(header, rows))
        out_path.with_suffix(".json").write_text(summary_text)
    sys.stdout.write(summary_text)
    return EXIT_COMPARE_TOL if resp["exceeded"] else 0


def cmd_validate(args, client: ServiceClient) -> int:
    if args.r is None or args.v is None:
        raise _Usage("validate needs --r and --v")
    payload: dict[str, Any] = {
        "mode": args.mode,
        "state": {"t": args.t, "r": _parse_triple(args.r, "--r"),
                  "v": _parse_triple(args.v, "--v")},
    }
    if args.accel is not None:
        ar, at, ah = _parse_triple(args.accel, "--accel")
        payload["accel"] = {"ar": ar, "atheta": at, "ah": ah}
    if args.dt_sweep is not None:
        try:
            payload["dt_sweep"] = [float(x) for x in args.dt_sweep.split(",")]
        except ValueError:
            raise _Usage(f"--dt-sweep: bad value in {args.dt_sweep!r}") from None
    if args.step is not None:
        payload["step"] = args.step
    if args.earth_params:
        payload["earth"] = args.earth_params
    resp = client.post("/validate", payload)

    if args.format == "json-lines":
        _emit(args, json.dumps(resp, sort_keys=True) + "\n")
        return 0

    lines = []
    if resp["mode"] == "impact":
        imp = resp["impact"]
        lines.append(f"analytic:   tf={imp['analytic_tf_s']:.9f}s  "
                     f"lat={imp['analytic_lat_deg']:.9f}  lon_e={imp['analytic_lon_e_deg']:.9f}")
        lines.append(f"propagated: tf={imp['propagated_tf_s']:.9f}s  "
                     f"lat={imp['propagated_lat_deg']:.9f}  "
                     f"lon_e={imp['propagated_lon_e_deg']:.9f}  ({imp['steps']} steps)")
        lines.append(f"delta: tf={imp['tf_delta_s']:.3e}s  "
                     f"ground={imp['ground_distance_m']:.3e}m")
    else:
        fd = resp["fd"]
        lines.append("dt sweep: " + ", ".join(f"{d:g}" for d in fd["dt_sweep"]))
        lines.append(f"{'quantity':<12} {'analytic':>24} {'fd':>24} {'rel_err':>10} {'order':>7}")
        for name, q in fd["quantities"].items():
            def show(v):
                if isinstance(v, list):
                    return "(" + ", ".join(f"{x:.6g}" for x in v) + ")"
                return f"{v:.12g}"
            order = "noise" if q["order"] is None else f"{q['order']:.2f}"
            lines.append(f"{name:<12} {show(q['analytic']):>24} {show(q['fd']):>24} "
                         f"{q['rel_err']:>10.2e} {order:>7}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_serve(args, _client: ServiceClient | None) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="iipkit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser, fmt: bool = True) -> None:
        p.add_argument("--server", help="service URL (default: in-process)")
        p.add_argument("--earth", dest="earth",
                       help="override mu=,radius=,omega=,t_ref= (any subset)")
        p.add_argument("--out", help="write output to this path instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("text", "csv", "json-lines"),
                           default="text")

    def state_args(p: _Parser) -> None:
        p.add_argument("--input", help="trajectory CSV input")
        p.add_argument("--r", help="inertial position m: x,y,z")
        p.add_argument("--v", help="inertial velocity m/s: x,y,z")
        p.add_argument("--t", type=float, default=0.0, help="state epoch s")

    p = sub.add_parser("iip", help="impact point for states")
    state_args(p)
    common(p)
    p.set_defaults(func=cmd_iip)

    p = sub.add_parser("rate", help="impact point rates under acceleration")
    state_args(p)
    p.add_argument("--accel", help="disturbing accel m/s^2: ar,atheta,ah "
                                   "(overrides file columns)")
    p.add_argument("--method", choices=("legacy", "geometric", "both"), default="both")
    common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("simulate", help="integrate a launch trajectory")
    p.add_argument("--config", help="vehicle config file (default: built-in vehicle)")
    p.add_argument("--dt", type=float, default=1.0, help="sample spacing s")
    p.add_argument("--substep", type=float, default=0.05, help="integration substep s")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="cross-validate both formulations on a trajectory")
    p.add_argument("--input", required=True, help="trajectory CSV")
    p.add_argument("--tol", type=float, default=1e-8,
                   help="exit 15 when max_rel_dev exceeds this (default 1e-8)")
    common(p, fmt=False)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("validate", help="check analytic outputs against oracles")
    p.add_argument("--mode", choices=("impact", "fd"), required=True)
    p.add_argument("--r", help="inertial position m: x,y,z")
    p.add_argument("--v", help="inertial velocity m/s: x,y,z")
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--accel", help="disturbing accel m/s^2: ar,atheta,ah")
    p.add_argument("--dt-sweep", dest="dt_sweep",
                   help="comma list of FD half-windows s (default 0.2,0.1,0.05,0.025)")
    p.add_argument("--step", type=float, help="propagation step override s (impact mode)")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.earth_params = _parse_earth(getattr(args, "earth", None))
    except _Usage as exc:
        print(f"iipkit: error: {exc}", file=sys.stderr)
        return 1

    if args.command == "serve":
        return cmd_serve(args, None)

    try:
        with ServiceClient(server=getattr(args, "server", None)) as client:
            return args.func(args, client)
    except _Usage as exc:
        print(f"iipkit: error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"iipkit: error: {exc}", file=sys.stderr)
        return 1
    except IipError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    except ServiceError as exc:
        print(f"error[{exc.error}]: {exc.message}", file=sys.stderr)
        return _NAME_TO_EXIT.get(exc.error, 1)


if __name__ == "__main__":
    sys.exit(main())
