"""FastAPI application wiring the toolkit to HTTP endpoints.

Single-state failures inside batch requests come back inline as
ok=false items; request-level problems (bad vehicle config, unusable
validation state) come back as HTTP 422 with the library error class
name in the detail, which the CLI maps to its documented exit codes.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..compare import COMPARED_QUANTITIES, compare_samples
from ..errors import IipError
from ..frames import EARTH, AccelRtn, InertialState
from ..geometric import geometric_rates
from ..kepler import compute_iip
from ..legacy import ecef_rate_from_latlon, legacy_rates
from ..oracles import (
    convergence_order,
    fd_rates,
    ground_distance,
    impact_latlon_ecef,
    propagate_to_impact,
    rel_error,
)
from ..sim import (
    TrajectorySample,
    burnout_times,
    default_vehicle_config,
    parse_vehicle_config,
    simulate,
)
from .models import (
    AccelIn,
    BurnoutOut,
    CompareRequest,
    CompareResponse,
    CompareRowOut,
    CompareSummary,
    FdValidation,
    FinalIipOut,
    GeometricRatesOut,
    IipRequest,
    IipResponse,
    IipResult,
    ImpactValidation,
    LegacyRatesOut,
    QuantityValidation,
    RateRequest,
    RateResponse,
    RateResult,
    SampleOut,
    SimulateRequest,
    SimulateResponse,
    StateIn,
    ValidateRequest,
    ValidateResponse,
)


def _earth(params):
    return params.to_model() if params is not None else EARTH


def _state(s: StateIn) -> InertialState:
    return InertialState(t=s.t, r=np.array(s.r, dtype=float), v=np.array(s.v, dtype=float))


def _accel(a: AccelIn) -> AccelRtn:
    return AccelRtn(ar=a.ar, atheta=a.atheta, ah=a.ah)


def _http_422(exc: IipError) -> HTTPException:
    return HTTPException(status_code=422,
                         detail={"error": type(exc).__name__, "message": str(exc)})


def create_app() -> FastAPI:
    app = FastAPI(title="iipkit", version=__version__)

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    @app.post("/iip", response_model=IipResponse)
    def iip(req: IipRequest) -> IipResponse:
        earth = _earth(req.earth)
        results = []
        for idx, s in enumerate(req.states):
            try:
                sol = compute_iip(_state(s), earth)
            except IipError as exc:
                results.append(IipResult(index=idx, ok=False,
                                         error=type(exc).__name__, message=str(exc)))
                continue
            results.append(IipResult(
                index=idx, ok=True, t=sol.t,
                phi_deg=math.degrees(sol.phi), tf_s=sol.tf,
                i_p=tuple(float(x) for x in sol.i_p),
                lat_deg=math.degrees(sol.lat_i),
                lon_i_deg=math.degrees(sol.lon_i),
                lon_e_deg=math.degrees(sol.lon_e),
            ))
        return IipResponse(results=results)

    @app.post("/rate", response_model=RateResponse)
    def rate(req: RateRequest) -> RateResponse:
        earth = _earth(req.earth)
        if len(req.accels) not in (1, len(req.states)):
            raise HTTPException(status_code=422, detail={
                "error": "ConfigError",
                "message": "accels must have one entry or one per state",
            })
        results = []
        for idx, s in enumerate(req.states):
            acc = _accel(req.accels[idx % len(req.accels)] if len(req.accels) > 1
                         else req.accels[0])
            state = _state(s)
            try:
                legacy_out = geometric_out = None
                deviation = None
                iip_sol = None
                if req.method in ("legacy", "both"):
                    iip_sol, rl = legacy_rates(state, acc, earth)
                    pdot_e = ecef_rate_from_latlon(iip_sol.lat_e, iip_sol.lon_e,
                                                   rl.dlat, rl.dlon_e, earth)
                    legacy_out = LegacyRatesOut(
                        phi_dot_deg_s=math.degrees(rl.phi_dot),
                        tf_dot=rl.tf_dot,
                        dip_dt=tuple(float(x) for x in rl.dip_dt),
                        dlat_deg_s=math.degrees(rl.dlat),
                        dlon_i_deg_s=math.degrees(rl.dlon_i),
                        dlon_e_deg_s=math.degrees(rl.dlon_e),
                        pdot_ecef=tuple(float(x) for x in pdot_e),
                    )
                if req.method in ("geometric", "both"):
                    iip_sol, rg = geometric_rates(state, acc, earth)
                    geometric_out = GeometricRatesOut(
                        pdot_d=rg.pdot_d, pdot_c=rg.pdot_c,
                        i_d=tuple(float(x) for x in rg.i_d),
                        i_c=tuple(float(x) for x in rg.i_c),
                        pdot=tuple(float(x) for x in rg.pdot),
                        pdot_w=tuple(float(x) for x in rg.pdot_w),
                        pdot_ecef=tuple(float(x) for x in rg.pdot_ecef),
                        tf_dot=rg.tf_dot,
                        dlat_deg_s=math.degrees(rg.dlat),
                        dlon_i_deg_s=math.degrees(rg.dlon_i),
                        dlon_e_deg_s=math.degrees(rg.dlon_e),
                    )
                if req.method == "both":
                    deviation = {
                        "dlat": rel_error(rl.dlat, rg.dlat),
                        "dlon_e": rel_error(rl.dlon_e, rg.dlon_e),
                        "pdot": rel_error(earth.radius * rl.dip_dt, rg.pdot),
                        "pdot_ecef": rel_error(legacy_out.pdot_ecef, rg.pdot_ecef),
                        "tf_dot": rel_error(rl.tf_dot, rg.tf_dot),
                    }
            except IipError as exc:
                results.append(RateResult(index=idx, ok=False,
                                          error=type(exc).__name__, message=str(exc)))
                continue
            results.append(RateResult(
                index=idx, ok=True, t=state.t,
                phi_deg=math.degrees(iip_sol.phi), tf_s=iip_sol.tf,
                lat_deg=math.degrees(iip_sol.lat_i),
                lon_i_deg=math.degrees(iip_sol.lon_i),
                lon_e_deg=math.degrees(iip_sol.lon_e),
                legacy=legacy_out, geometric=geometric_out, deviation=deviation,
            ))
        return RateResponse(results=results)

    @app.post("/simulate", response_model=SimulateResponse)
    def run_simulation(req: SimulateRequest) -> SimulateResponse:
        earth = _earth(req.earth)
        try:
            cfg = (parse_vehicle_config(req.config_text) if req.config_text is not None
                   else default_vehicle_config())
            result = simulate(cfg, earth, dt=req.dt, substep=req.substep)
        except IipError as exc:
            raise _http_422(exc) from exc
        samples = [SampleOut(
            t=s.t, r=tuple(float(x) for x in s.r), v=tuple(float(x) for x in s.v),
            ar=s.accel.ar, atheta=s.accel.atheta, ah=s.accel.ah, mass=s.mass,
        ) for s in result.samples]

        burnouts = []
        for stage_idx, t_burnout in enumerate(burnout_times(cfg), start=1):
            at_or_before = [s for s in result.samples if s.t <= t_burnout + 1e-9]
            if not at_or_before:
                continue
            s = at_or_before[-1]
            burnouts.append(BurnoutOut(
                stage=stage_idx, t=s.t,
                altitude_m=float(np.linalg.norm(s.r)) - earth.radius,
                speed_ms=float(np.linalg.norm(s.v)), mass_kg=s.mass,
            ))
        max_alt = max(
            (float(np.linalg.norm(s.r)) - earth.radius for s in result.samples),
            default=0.0,
        )
        final_iip = None
        final_iip_error = None
        if result.samples:
            last = result.samples[-1]
            try:
                sol = compute_iip(last.state, earth)
                final_iip = FinalIipOut(
                    lat_deg=math.degrees(sol.lat_e),
                    lon_e_deg=math.degrees(sol.lon_e), tf_s=sol.tf,
                )
            except IipError as exc:
                final_iip_error = type(exc).__name__

        return SimulateResponse(
            samples=samples, truncated=result.truncated,
            truncate_time=result.truncate_time,
            liftoff_mass=cfg.liftoff_mass,
            final_mass=result.samples[-1].mass if result.samples else cfg.liftoff_mass,
            burnouts=burnouts, max_altitude_m=max_alt,
            final_iip=final_iip, final_iip_error=final_iip_error,
        )

    @app.post("/compare", response_model=CompareResponse)
    def compare(req: CompareRequest) -> CompareResponse:
        earth = _earth(req.earth)
        samples = [TrajectorySample(
            t=s.t, r=np.array(s.r, dtype=float), v=np.array(s.v, dtype=float),
            accel=AccelRtn(ar=s.ar, atheta=s.atheta, ah=s.ah), mass=math.nan,
        ) for s in req.samples]
        report = compare_samples(samples, earth, tol=req.tol)
        rows = [CompareRowOut(
            t=r.t, status=r.status,
            legacy=list(r.legacy) if r.legacy is not None else None,
            geometric=list(r.geometric) if r.geometric is not None else None,
            rel_dev=r.rel_dev,
        ) for r in report.rows]
        return CompareResponse(
            columns=list(COMPARED_QUANTITIES), rows=rows,
            summary=CompareSummary(**report.summary), exceeded=report.exceeded,
        )

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest) -> ValidateResponse:
        earth = _earth(req.earth)
        state = _state(req.state)
        if req.mode == "impact":
            try:
                sol = compute_iip(state, earth)
                prop = propagate_to_impact(state, earth, step=req.step)
            except IipError as exc:
                raise _http_422(exc) from exc
            lat_p, lon_p = impact_latlon_ecef(state.t, prop.tf, prop.r, earth)
            dist = ground_distance(sol.lat_e, sol.lon_e, lat_p, lon_p, earth.radius)
            return ValidateResponse(mode="impact", impact=ImpactValidation(
                analytic_tf_s=sol.tf, propagated_tf_s=prop.tf,
                tf_delta_s=prop.tf - sol.tf,
                analytic_lat_deg=math.degrees(sol.lat_e),
                analytic_lon_e_deg=math.degrees(sol.lon_e),
                propagated_lat_deg=math.degrees(lat_p),
                propagated_lon_e_deg=math.degrees(lon_p),
                ground_distance_m=dist, steps=prop.steps,
            ))

        acc = _accel(req.accel)
        try:
            _, rl = legacy_rates(state, acc, earth)
            _, rg = geometric_rates(state, acc, earth)
            sweep = sorted(req.dt_sweep, reverse=True)
            fd_by_dt = [fd_rates(state, acc, dt, earth) for dt in sweep]
        except IipError as exc:
            raise _http_422(exc) from exc

        analytic = {
            "phi_dot": math.degrees(rl.phi_dot),
            "tf_dot": rl.tf_dot,
            "dlat": math.degrees(rl.dlat),
            "dlon_i": math.degrees(rl.dlon_i),
            "dlon_e": math.degrees(rl.dlon_e),
            "dip_dt": tuple(float(x) for x in rl.dip_dt),
            "pdot_ecef": tuple(float(x) for x in rg.pdot_ecef),
        }
        converters = {"phi_dot": math.degrees, "dlat": math.degrees,
                      "dlon_i": math.degrees, "dlon_e": math.degrees}
        quantities = {}
        for name, exact in analytic.items():
            conv = converters.get(name)
            fd_vals = [fd[name] for fd in fd_by_dt]
            if conv is not None:
                fd_vals = [conv(v) for v in fd_vals]
            errors = [rel_error(v, exact) for v in fd_vals]
            order = convergence_order(errors)
            last = fd_vals[-1]
            quantities[name] = QuantityValidation(
                analytic=exact,
                fd=tuple(float(x) for x in last) if isinstance(last, np.ndarray) else float(last),
                rel_err=errors[-1],
                order=None if math.isinf(order) else order,
            )
        return ValidateResponse(mode="fd", fd=FdValidation(
            dt_sweep=sweep, quantities=quantities,
        ))

    return app
