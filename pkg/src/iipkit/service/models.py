"""Request/response schemas for the impact-point service.

Boundary conventions: lengths in meters, speeds in m/s, epochs in
seconds, angles and angle rates in degrees at this boundary (the library
itself works in radians).  Batch endpoints report per-item failures
inline via ok/error rather than failing the whole request.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..frames import EARTH, EarthModel

Triple = tuple[float, float, float]


class EarthParams(BaseModel):
    mu: float = EARTH.mu
    radius: float = EARTH.radius
    omega: float = EARTH.omega
    t_ref: float = EARTH.t_ref

    def to_model(self) -> EarthModel:
        return EarthModel(mu=self.mu, radius=self.radius, omega=self.omega, t_ref=self.t_ref)


class StateIn(BaseModel):
    t: float = 0.0
    r: Triple
    v: Triple


class AccelIn(BaseModel):
    ar: float = 0.0
    atheta: float = 0.0
    ah: float = 0.0


class IipRequest(BaseModel):
    states: list[StateIn] = Field(min_length=1)
    earth: EarthParams | None = None


class IipResult(BaseModel):
    index: int
    ok: bool
    error: str | None = None
    message: str | None = None
    t: float | None = None
    phi_deg: float | None = None
    tf_s: float | None = None
    i_p: Triple | None = None
    lat_deg: float | None = None
    lon_i_deg: float | None = None
    lon_e_deg: float | None = None


class IipResponse(BaseModel):
    results: list[IipResult]


class RateRequest(BaseModel):
    states: list[StateIn] = Field(min_length=1)
    accels: list[AccelIn] = Field(min_length=1)
    method: Literal["legacy", "geometric", "both"] = "both"
    earth: EarthParams | None = None


class LegacyRatesOut(BaseModel):
    phi_dot_deg_s: float
    tf_dot: float
    dip_dt: Triple
    dlat_deg_s: float
    dlon_i_deg_s: float
    dlon_e_deg_s: float
    pdot_ecef: Triple


class GeometricRatesOut(BaseModel):
    pdot_d: float
    pdot_c: float
    i_d: Triple
    i_c: Triple
    pdot: Triple
    pdot_w: Triple
    pdot_ecef: Triple
    tf_dot: float
    dlat_deg_s: float
    dlon_i_deg_s: float
    dlon_e_deg_s: float


class RateResult(BaseModel):
    index: int
    ok: bool
    error: str | None = None
    message: str | None = None
    t: float | None = None
    phi_deg: float | None = None
    tf_s: float | None = None
    lat_deg: float | None = None
    lon_i_deg: float | None = None
    lon_e_deg: float | None = None
    legacy: LegacyRatesOut | None = None
    geometric: GeometricRatesOut | None = None
    deviation: dict[str, float] | None = None


class RateResponse(BaseModel):
    results: list[RateResult]


class SimulateRequest(BaseModel):
    config_text: str | None = None  # built-in default vehicle when omitted
    dt: float = 1.0
    substep: float = 0.05
    earth: EarthParams | None = None


class SampleOut(BaseModel):
    t: float
    r: Triple
    v: Triple
    ar: float
    atheta: float
    ah: float
    mass: float


class BurnoutOut(BaseModel):
    """State at the end of one stage's burn."""

    stage: int
    t: float
    altitude_m: float
    speed_ms: float
    mass_kg: float


class FinalIipOut(BaseModel):
    lat_deg: float
    lon_e_deg: float
    tf_s: float


class SimulateResponse(BaseModel):
    samples: list[SampleOut]
    truncated: bool
    truncate_time: float | None
    liftoff_mass: float
    final_mass: float
    burnouts: list[BurnoutOut]
    max_altitude_m: float
    final_iip: FinalIipOut | None = None
    final_iip_error: str | None = None


class SampleIn(BaseModel):
    t: float
    r: Triple
    v: Triple
    ar: float = 0.0
    atheta: float = 0.0
    ah: float = 0.0


class CompareRequest(BaseModel):
    samples: list[SampleIn] = Field(min_length=1)
    tol: float | None = None
    earth: EarthParams | None = None


class CompareRowOut(BaseModel):
    t: float
    status: str
    legacy: list[float] | None = None
    geometric: list[float] | None = None
    rel_dev: float | None = None


class CompareSummary(BaseModel):
    max_rel_dev: float | None
    mean_rel_dev: float | None
    n_samples: int
    n_skipped: int
    skip_reasons: dict[str, int]


class CompareResponse(BaseModel):
    columns: list[str]
    rows: list[CompareRowOut]
    summary: CompareSummary
    exceeded: bool


class ValidateRequest(BaseModel):
    mode: Literal["impact", "fd"]
    state: StateIn
    accel: AccelIn = AccelIn()
    dt_sweep: list[float] = Field(default=[0.2, 0.1, 0.05, 0.025], min_length=1)
    step: float | None = None  # propagation step override (impact mode)
    earth: EarthParams | None = None


class ImpactValidation(BaseModel):
    analytic_tf_s: float
    propagated_tf_s: float
    tf_delta_s: float
    analytic_lat_deg: float
    analytic_lon_e_deg: float
    propagated_lat_deg: float
    propagated_lon_e_deg: float
    ground_distance_m: float
    steps: int


class QuantityValidation(BaseModel):
    analytic: float | Triple
    fd: float | Triple
    rel_err: float
    order: float | None  # observed convergence order; null when every error
                         # in the sweep already sits at the noise floor


class FdValidation(BaseModel):
    dt_sweep: list[float]
    quantities: dict[str, QuantityValidation]


class ValidateResponse(BaseModel):
    mode: str
    impact: ImpactValidation | None = None
    fd: FdValidation | None = None
