"""Independent checks for the closed-form impact machinery.

Nothing here shares formulas with the prediction modules: impact location
comes from brute-force integration of the two-body equations, time of
flight from the transcendental mean-anomaly relation, and rates from
central differences of the closed-form outputs along a perturbed
trajectory.  Tests freeze values produced by these routines and the
comparison harness uses them to referee both formulations.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWindow, EscapeVelocity, IipError, NoImpactWithinHorizon, NonImpacting
from .frames import (
    EARTH,
    AccelRtn,
    EarthModel,
    InertialState,
    Vector3,
    derive_kinematics,
    latlon_of,
    wrap_pi,
)
from .kepler import compute_iip

BISECT_TOL = 1e-9  # s; impact-time refinement width
RADIUS_TOL = 1e-7  # m; impact-radius residual after refinement


@dataclass(frozen=True)
class PropagatedImpact:
    """Brute-force impact: coasting time, inertial position/velocity at the
    surface crossing, and the step count spent getting there."""

    tf: float
    r: Vector3
    v: Vector3
    steps: int


def _rk4_freefall_step(rx, ry, rz, vx, vy, vz, h, mu):
    """One fixed-step RK4 advance of two-body motion on plain floats."""
    r3 = (rx * rx + ry * ry + rz * rz) ** 1.5
    c = -mu / r3
    a1x, a1y, a1z = c * rx, c * ry, c * rz

    hx = 0.5 * h
    r2x, r2y, r2z = rx + hx * vx, ry + hx * vy, rz + hx * vz
    v2x, v2y, v2z = vx + hx * a1x, vy + hx * a1y, vz + hx * a1z
    r3_ = (r2x * r2x + r2y * r2y + r2z * r2z) ** 1.5
    c = -mu / r3_
    a2x, a2y, a2z = c * r2x, c * r2y, c * r2z

    r3x, r3y, r3z = rx + hx * v2x, ry + hx * v2y, rz + hx * v2z
    v3x, v3y, v3z = vx + hx * a2x, vy + hx * a2y, vz + hx * a2z
    r3_ = (r3x * r3x + r3y * r3y + r3z * r3z) ** 1.5
    c = -mu / r3_
    a3x, a3y, a3z = c * r3x, c * r3y, c * r3z

    r4x, r4y, r4z = rx + h * v3x, ry + h * v3y, rz + h * v3z
    v4x, v4y, v4z = vx + h * a3x, vy + h * a3y, vz + h * a3z
    r3_ = (r4x * r4x + r4y * r4y + r4z * r4z) ** 1.5
    c = -mu / r3_
    a4x, a4y, a4z = c * r4x, c * r4y, c * r4z

    s = h / 6.0
    return (
        rx + s * (vx + 2.0 * (v2x + v3x) + v4x),
        ry + s * (vy + 2.0 * (v2y + v3y) + v4y),
        rz + s * (vz + 2.0 * (v2z + v3z) + v4z),
        vx + s * (a1x + 2.0 * (a2x + a3x) + a4x),
        vy + s * (a1y + 2.0 * (a2y + a3y) + a4y),
        vz + s * (a1z + 2.0 * (a2z + a3z) + a4z),
    )


def propagate_to_impact(state: InertialState, earth: EarthModel = EARTH,
                        step: float | None = None,
                        horizon: float | None = None) -> PropagatedImpact:
    """Integrate free-fall motion until the radius first drops below the
    surface, then bisect the final step down to nanosecond width.

    The default step resolves the analytically predicted flight time into
    ten thousand increments (floored at 1 ms); the analytic value only
    sets resolution, never the answer.  Raises NoImpactWithinHorizon when
    the radius never descends inside the (generous) time horizon.
    """
    mu, rp = earth.mu, earth.radius
    tf_hint = None
    if step is None or horizon is None:
        try:
            tf_hint = compute_iip(state, earth).tf
        except IipError:
            tf_hint = None
    if step is None:
        step = max(tf_hint / 1.0e4, 1e-3) if tf_hint is not None else 1.0
    if horizon is None:
        horizon = 3.0 * tf_hint + 60.0 if tf_hint is not None else 2.0 * 86400.0

    rx, ry, rz = (float(x) for x in state.r)
    vx, vy, vz = (float(x) for x in state.v)
    t = 0.0
    steps = 0
    while t < horizon:
        prev = (rx, ry, rz, vx, vy, vz)
        h = min(step, horizon - t)
        rx, ry, rz, vx, vy, vz = _rk4_freefall_step(rx, ry, rz, vx, vy, vz, h, mu)
        t += h
        steps += 1
        if rx * rx + ry * ry + rz * rz < rp * rp:
            # Bisect the crossing step until both the time window and the
            # radius residual at its midpoint are resolved.
            lo, hi = 0.0, h
            h_star = 0.5 * (lo + hi)
            fx, fy, fz, gx, gy, gz = _rk4_freefall_step(*prev, h_star, mu)
            for _ in range(200):
                rad = math.sqrt(fx * fx + fy * fy + fz * fz)
                if hi - lo <= BISECT_TOL and abs(rad - rp) <= RADIUS_TOL:
                    break
                if rad < rp:
                    hi = h_star
                else:
                    lo = h_star
                mid = 0.5 * (lo + hi)
                if not lo < mid < hi:
                    break
                h_star = mid
                fx, fy, fz, gx, gy, gz = _rk4_freefall_step(*prev, h_star, mu)
            return PropagatedImpact(
                tf=t - h + h_star,
                r=np.array([fx, fy, fz]),
                v=np.array([gx, gy, gz]),
                steps=steps,
            )
    raise NoImpactWithinHorizon(f"no surface crossing within {horizon:.1f} s")


def kepler_tof_oracle(state: InertialState, earth: EarthModel = EARTH) -> float:
    """Time of flight to the descending surface crossing via eccentric and
    mean anomalies; shares no algebra with the closed-form expression."""
    kin = derive_kinematics(state, earth)
    mu, rp = earth.mu, earth.radius
    if kin.lam >= 2.0:
        raise EscapeVelocity("open orbit; mean-anomaly flight time undefined")
    a = kin.r0 / (2.0 - kin.lam)
    e = math.sqrt(max(1.0 - kin.h * kin.h / (mu * a), 0.0))
    cos_ep = (1.0 - rp / a) / e if e > 0.0 else 2.0
    if abs(cos_ep) > 1.0:
        raise NonImpacting("osculating orbit does not reach the surface radius")
    n = math.sqrt(mu / a ** 3)
    e0 = math.atan2(kin.rdotv / (e * math.sqrt(mu * a)), (1.0 - kin.r0 / a) / e)
    ep = math.atan2(-math.sqrt(1.0 - cos_ep * cos_ep), cos_ep)
    m0 = e0 - e * math.sin(e0)
    mp = ep - e * math.sin(ep)
    return ((mp - m0) % (2.0 * math.pi)) / n


def propagate_with_rtn_accel(state: InertialState, a: AccelRtn, t_span: float,
                             nsteps: int = 64, earth: EarthModel = EARTH) -> InertialState:
    """RK4 propagation under gravity plus a disturbing acceleration whose
    radial/along-track/normal components are held fixed while the frame
    itself follows the instantaneous state.  Negative spans run backwards."""
    mu = earth.mu

    def deriv(r: Vector3, v: Vector3) -> tuple[Vector3, Vector3]:
        rn = float(np.linalg.norm(r))
        h_vec = np.cross(r, v)
        i_h = h_vec / float(np.linalg.norm(h_vec))
        i_r = r / rn
        i_theta = np.cross(i_h, i_r)
        acc = -mu / rn ** 3 * r + a.ar * i_r + a.atheta * i_theta + a.ah * i_h
        return v, acc

    r = np.asarray(state.r, dtype=float).copy()
    v = np.asarray(state.v, dtype=float).copy()
    h = t_span / nsteps
    for _ in range(nsteps):
        k1r, k1v = deriv(r, v)
        k2r, k2v = deriv(r + 0.5 * h * k1r, v + 0.5 * h * k1v)
        k3r, k3v = deriv(r + 0.5 * h * k2r, v + 0.5 * h * k2v)
        k4r, k4v = deriv(r + h * k3r, v + h * k3v)
        r = r + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return InertialState(t=state.t + t_span, r=r, v=v)


def fd_rates(state: InertialState, a: AccelRtn, dt: float,
             earth: EarthModel = EARTH, nsteps: int = 64) -> dict[str, object]:
    """Central-difference rates of every closed-form output over a +/- dt
    window along the accelerated trajectory.

    Returns phi_dot, tf_dot, dlat, dlon_i, dlon_e, the impact-direction
    rate vector, and the Earth-fixed impact velocity vector.  Raises
    DegenerateWindow when the window is non-positive or either endpoint
    state is rejected by the closed-form pipeline.
    """
    if dt <= 0.0:
        raise DegenerateWindow("finite-difference window must be positive")
    try:
        plus = propagate_with_rtn_accel(state, a, dt, nsteps, earth)
        minus = propagate_with_rtn_accel(state, a, -dt, nsteps, earth)
        sol_p = compute_iip(plus, earth)
        sol_m = compute_iip(minus, earth)
    except IipError as exc:
        raise DegenerateWindow(f"window endpoint unusable: {exc}") from exc

    inv = 1.0 / (2.0 * dt)

    def dwrap(x_p: float, x_m: float) -> float:
        return wrap_pi(x_p - x_m) * inv

    theta_p = earth.omega * (plus.t - earth.t_ref + sol_p.tf)
    theta_m = earth.omega * (minus.t - earth.t_ref + sol_m.tf)
    p_e_p = earth.radius * np.array([
        math.cos(theta_p) * sol_p.i_p[0] + math.sin(theta_p) * sol_p.i_p[1],
        -math.sin(theta_p) * sol_p.i_p[0] + math.cos(theta_p) * sol_p.i_p[1],
        sol_p.i_p[2],
    ])
    p_e_m = earth.radius * np.array([
        math.cos(theta_m) * sol_m.i_p[0] + math.sin(theta_m) * sol_m.i_p[1],
        -math.sin(theta_m) * sol_m.i_p[0] + math.cos(theta_m) * sol_m.i_p[1],
        sol_m.i_p[2],
    ])

    return {
        "phi_dot": dwrap(sol_p.phi, sol_m.phi),
        "tf_dot": (sol_p.tf - sol_m.tf) * inv,
        "dlat": (sol_p.lat_i - sol_m.lat_i) * inv,
        "dlon_i": dwrap(sol_p.lon_i, sol_m.lon_i),
        "dlon_e": dwrap(sol_p.lon_e, sol_m.lon_e),
        "dip_dt": (sol_p.i_p - sol_m.i_p) * inv,
        "pdot_ecef": (p_e_p - p_e_m) * inv,
    }


def convergence_order(errors: list[float]) -> float:
    """Median observed order from errors at successive dt halvings; infinite
    when every error sits at the noise floor."""
    pairs = [
        math.log2(e0 / e1)
        for e0, e1 in zip(errors, errors[1:])
        if e0 > 0.0 and e1 > 0.0
    ]
    if not pairs:
        return math.inf
    return statistics.median(pairs)


def rel_error(approx: object, exact: object, floor: float = 1e-300) -> float:
    """Relative difference of scalars or vectors, guarded against zero."""
    a = np.asarray(approx, dtype=float)
    b = np.asarray(exact, dtype=float)
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), floor)
    return float(np.linalg.norm(a - b)) / scale


def ground_distance(lat1: float, lon1: float, lat2: float, lon2: float,
                    radius: float = EARTH.radius) -> float:
    """Great-circle distance between two surface points."""
    s_dlat = math.sin(0.5 * (lat2 - lat1))
    s_dlon = math.sin(0.5 * wrap_pi(lon2 - lon1))
    x = s_dlat * s_dlat + math.cos(lat1) * math.cos(lat2) * s_dlon * s_dlon
    return 2.0 * radius * math.asin(min(1.0, math.sqrt(x)))


def impact_latlon_ecef(t_epoch: float, tf: float, r_impact: Vector3,
                       earth: EarthModel = EARTH) -> tuple[float, float]:
    """Rotating-frame latitude/longitude of an inertial impact position."""
    lat, lon_i = latlon_of(r_impact)
    return lat, wrap_pi(lon_i - earth.omega * (t_epoch - earth.t_ref + tf))
