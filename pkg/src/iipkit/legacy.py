"""Impact-point rates by differentiating the closed-form prediction.

This formulation ("legacy" in the CLI) pushes a disturbing acceleration
through every intermediate of the closed-form impact solution: flight
angle, osculating elements, eccentric anomalies, and time of flight.  It
yields the time derivative of the impact direction and of the impact
latitude/longitude, with the longitude additionally corrected for Earth
rotation accrued over the changing time of flight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnomalySingularity, PolarSingularity, SensitivitySingularity
from .frames import (
    EARTH,
    AccelRtn,
    EarthModel,
    InertialState,
    StateKinematics,
    Vector3,
    derive_kinematics,
)
from .kepler import (
    EPS_ANOMALY,
    FlightAngleSolution,
    IipSolution,
    OrbitalElements,
    compute_iip,
    elements_from_state,
    solve_flight_angle,
    time_of_flight,
)

EPS_POLE = 1e-12  # minimum cos(latitude) for a defined longitude rate


@dataclass(frozen=True)
class RateSensitivities:
    """Partial derivatives assembled once per state.

    dphi_*/dtf_* chain the flight angle and time of flight through the
    element rates; dip_* are the vector sensitivities of the impact
    direction to each acceleration component.
    """

    dphi_dar: float
    dphi_datheta: float
    dtf_da: float
    dtf_de: float
    da_dar: float
    da_datheta: float
    de_dar: float
    de_datheta: float
    dip_dar: Vector3
    dip_datheta: Vector3
    dip_dah: Vector3


@dataclass(frozen=True)
class LegacyRates:
    """Rates of the impact solution under a disturbing acceleration."""

    phi_dot: float
    tf_dot: float
    dip_dt: Vector3
    dlat: float
    dlon_i: float
    dlon_e: float


def sensitivities(kin: StateKinematics, sol: FlightAngleSolution, el: OrbitalElements,
                  tf: float, earth: EarthModel = EARTH) -> RateSensitivities:
    """Assemble every partial derivative the rate formulas need.

    Raises SensitivitySingularity when the flight-angle sensitivity
    denominator vanishes (the impact condition becomes insensitive to the
    conic coefficients there, so no finite rate exists).
    """
    mu, rp = earth.mu, earth.radius
    h, r0, v0, rdotv = kin.h, kin.r0, kin.v0, kin.rdotv
    s, c = sol.sin_phi, sol.cos_phi
    sg, cg = math.sin(kin.gamma0), math.cos(kin.gamma0)
    a, e, n, p = el.a, el.e, el.n, el.p

    den = mu * (-sol.a2 * s + sol.a1 * c)
    if abs(den) <= 1e-12 * mu * (abs(sol.a1) + abs(sol.a2)):
        raise SensitivitySingularity("flight-angle sensitivity denominator vanished")
    if abs(el.sin_E0) <= EPS_ANOMALY:
        raise AnomalySingularity("current state is at an apsis; flight-time sensitivity undefined")
    if abs(el.sin_Ep) <= EPS_ANOMALY:
        raise AnomalySingularity("surface crossing is at an apsis; flight-time sensitivity undefined")

    dphi_dar = h * s / den
    dphi_datheta = (2.0 * h * (r0 / rp - c) + rdotv * s) / den

    dtf_da = 3.0 * tf / (2.0 * a) - (1.0 / (a * a * e * n)) * (
        rp * (1.0 - e * el.cos_Ep) / el.sin_Ep - r0 * (1.0 - e * el.cos_E0) / el.sin_E0
    )
    dtf_de = (1.0 / n) * (
        (el.cos_Ep * (1.0 - e * el.cos_Ep) / (e * el.sin_Ep)
         - el.cos_E0 * (1.0 - e * el.cos_E0) / (e * el.sin_E0))
        - (el.sin_Ep - el.sin_E0)
    )

    da_dar = 2.0 * a * a * v0 * sg / mu
    da_datheta = 2.0 * a * a * v0 * cg / mu
    de_dar = p * v0 * sg / (mu * e)
    de_datheta = (p * a - r0 * r0) * v0 * cg / (mu * a * e)

    # d(i_p)/dphi resolved on the initial radial/velocity directions; the
    # along-track sensitivity also carries the frame terms that survive
    # when the whole trajectory plane precesses.
    dip_dphi = (1.0 / h) * (-(h * s + rdotv * c) * kin.i_r0 + (r0 * v0 * c) * kin.i_v0)
    i_p = c * kin.i_r0 + s * kin.i_theta
    dip_dar = dip_dphi * dphi_dar
    dip_datheta = (
        dip_dphi * dphi_datheta
        + (r0 * c / h) * kin.i_r0
        + (r0 * s / h) * kin.i_theta
        - (r0 / h) * i_p
    )
    dip_dah = (r0 * s / h) * kin.i_h

    return RateSensitivities(
        dphi_dar=dphi_dar, dphi_datheta=dphi_datheta,
        dtf_da=dtf_da, dtf_de=dtf_de,
        da_dar=da_dar, da_datheta=da_datheta,
        de_dar=de_dar, de_datheta=de_datheta,
        dip_dar=dip_dar, dip_datheta=dip_datheta, dip_dah=dip_dah,
    )


def phi_rate(kin: StateKinematics, sens: RateSensitivities, a: AccelRtn) -> float:
    """Time derivative of the flight angle: the coasting sweep plus the
    acceleration-driven change of the impact geometry."""
    return -kin.h / (kin.r0 * kin.r0) + sens.dphi_dar * a.ar + sens.dphi_datheta * a.atheta


def tf_rate(sens: RateSensitivities, a: AccelRtn) -> float:
    """Time derivative of the remaining time of flight (exactly -1 while
    coasting)."""
    return -1.0 + (
        (sens.dtf_da * sens.da_dar + sens.dtf_de * sens.de_dar) * a.ar
        + (sens.dtf_da * sens.da_datheta + sens.dtf_de * sens.de_datheta) * a.atheta
    )


def direction_rate(sens: RateSensitivities, a: AccelRtn) -> Vector3:
    """Time derivative of the inertial impact direction."""
    return a.ar * sens.dip_dar + a.atheta * sens.dip_datheta + a.ah * sens.dip_dah


def latlon_rates(i_p: Vector3, dip_dt: Vector3, tf_dot: float,
                 earth: EarthModel = EARTH) -> tuple[float, float, float]:
    """Latitude and longitude rates of the impact point from the direction
    rate; the rotating-frame longitude rate subtracts the Earth rotation
    accumulated over the impact epoch's drift."""
    ipx, ipy, ipz = float(i_p[0]), float(i_p[1]), float(i_p[2])
    cos_lat = math.hypot(ipx, ipy)
    if cos_lat <= EPS_POLE:
        raise PolarSingularity("impact point at a pole; longitude rate undefined")
    lon = math.atan2(ipy, ipx)
    cl, sl = math.cos(lon), math.sin(lon)
    dlat = float(dip_dt[2]) / cos_lat
    dlon_i = (cl * float(dip_dt[1]) - sl * float(dip_dt[0])) / (cl * ipx + sl * ipy)
    dlon_e = dlon_i - earth.omega * (1.0 + tf_dot)
    return dlat, dlon_i, dlon_e


def legacy_rates(state: InertialState, a: AccelRtn,
                 earth: EarthModel = EARTH) -> tuple[IipSolution, LegacyRates]:
    """Impact solution and its rates for one state and acceleration."""
    kin = derive_kinematics(state, earth)
    sol = solve_flight_angle(kin, earth)
    tf = time_of_flight(kin, sol, earth)
    el = elements_from_state(kin, earth)
    sens = sensitivities(kin, sol, el, tf, earth)

    phi_dot = phi_rate(kin, sens, a)
    tf_dot = tf_rate(sens, a)
    dip_dt = direction_rate(sens, a)
    iip = compute_iip(state, earth)
    dlat, dlon_i, dlon_e = latlon_rates(iip.i_p, dip_dt, tf_dot, earth)
    return iip, LegacyRates(phi_dot=phi_dot, tf_dot=tf_dot, dip_dt=dip_dt,
                            dlat=dlat, dlon_i=dlon_i, dlon_e=dlon_e)


def ecef_rate_from_latlon(lat: float, lon_e: float, dlat: float, dlon_e: float,
                          earth: EarthModel = EARTH) -> Vector3:
    """Velocity of the impact point over the rotating surface, reconstructed
    from the latitude/longitude rates on local east/north axes at the
    rotating-frame impact coordinates."""
    sla, cla = math.sin(lat), math.cos(lat)
    slo, clo = math.sin(lon_e), math.cos(lon_e)
    east = np.array([-slo, clo, 0.0])
    north = np.array([-sla * clo, -sla * slo, cla])
    return earth.radius * (dlat * north + cla * dlon_e * east)
