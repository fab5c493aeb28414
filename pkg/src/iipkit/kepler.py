"""Closed-form impact-point prediction on a spherical rotating Earth.

Given one inertial state of a coasting vehicle, these routines find where
the osculating conic descends to the surface sphere: the in-plane angle
from the current position to impact, the coasting time of flight, the
inertial impact direction, and surface coordinates in both the inertial
and the rotating frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CircularGrazing,
    DegenerateGeometry,
    EscapeVelocity,
    NonImpacting,
    ZeroEccentricity,
)
from .frames import (
    EARTH,
    EarthModel,
    InertialState,
    StateKinematics,
    Vector3,
    derive_kinematics,
    earth_rotation_angle,
    latlon_of,
    wrap_pi,
)

EPS_ECC = 1e-8  # below this eccentricity, element-based formulas degenerate
EPS_ANOMALY = 1e-10  # |sin E| below this counts as "at an apsis"


@dataclass(frozen=True)
class FlightAngleSolution:
    """In-plane angle phi from the current position to the impact point,
    with its sine/cosine and the three conic coefficients that define the
    impact condition (a1, a2 evaluated at the current radius, a3 at the
    surface radius)."""

    phi: float
    sin_phi: float
    cos_phi: float
    a1: float
    a2: float
    a3: float
    residual: float


@dataclass(frozen=True)
class OrbitalElements:
    """Semimajor axis, eccentricity, mean motion, semilatus rectum, and the
    eccentric/mean anomalies at the current state (E0, M0) and at the
    descending surface crossing (Ep, Mp)."""

    a: float
    e: float
    n: float
    p: float
    E0: float
    Ep: float
    M0: float
    Mp: float
    sin_E0: float
    cos_E0: float
    sin_Ep: float
    cos_Ep: float


@dataclass(frozen=True)
class IipSolution:
    """Impact prediction for one state: flight angle, coasting time of
    flight, inertial impact direction, and impact latitude/longitude in the
    inertial and rotating frames.  Latitude is frame-independent."""

    t: float
    phi: float
    tf: float
    i_p: Vector3
    lat_i: float
    lon_i: float
    lat_e: float
    lon_e: float


def solve_flight_angle(kin: StateKinematics, earth: EarthModel = EARTH) -> FlightAngleSolution:
    """Solve for the in-plane angle at which the conic crosses the surface
    sphere on its descending branch.

    Of the two geometric intersections the quadratic admits, the one with
    negative radial velocity is returned; the other would be reached going
    backwards along the orbit.  Raises NonImpacting when the conic never
    descends to the surface radius, and CircularGrazing when the orbit is
    circular at exactly the surface radius.
    """
    mu, rp = earth.mu, earth.radius
    h, r0 = kin.h, kin.r0
    a1 = -(h * kin.rdotv) / (mu * r0)
    a2 = h * h / (mu * r0) - 1.0
    a3 = h * h / (mu * rp) - 1.0
    e2 = a1 * a1 + a2 * a2

    if e2 <= EPS_ECC * EPS_ECC:
        if abs(a3) <= EPS_ECC:
            raise CircularGrazing("circular orbit at the surface radius; impact point undefined")
        raise NonImpacting("near-circular orbit above the surface never descends")

    q2 = e2 - a3 * a3
    if q2 < 0.0:
        raise NonImpacting("conic perigee lies above the surface sphere")
    q = math.sqrt(q2)

    # Descending-crossing root: difference of the true anomalies that satisfy
    # e*cos(nu) = a3 (impact) and e*sin(nu0) = -a1, e*cos(nu0) = a2 (now),
    # taking the impact anomaly on the inbound half of the orbit.
    sin_phi = (a1 * a3 - a2 * q) / e2
    cos_phi = (a2 * a3 + a1 * q) / e2
    phi = math.atan2(sin_phi, cos_phi) % (2.0 * math.pi)

    cg = math.cos(kin.gamma0)
    sg = math.sin(kin.gamma0)
    cos_gp = cg * cos_phi - sg * sin_phi
    residual = abs(r0 / rp - ((1.0 - cos_phi) / (kin.lam * cg * cg) + cos_gp / cg))
    if residual > 1e-10 * max(1.0, r0 / rp):
        raise DegenerateGeometry(f"flight-angle solution failed residual check ({residual:.3e})")

    return FlightAngleSolution(
        phi=phi, sin_phi=sin_phi, cos_phi=cos_phi,
        a1=a1, a2=a2, a3=a3, residual=residual,
    )


def time_of_flight(kin: StateKinematics, sol: FlightAngleSolution,
                   earth: EarthModel = EARTH) -> float:
    """Coasting time from the current state to the surface crossing.

    Closed form in the flight angle; the arctangent is evaluated with a
    two-argument form so the expression stays continuous as the flight
    angle sweeps through the point where the naive quotient blows up.
    Raises EscapeVelocity when the speed meets or exceeds local escape.
    """
    lam, gamma = kin.lam, kin.gamma0
    if lam >= 2.0:
        raise EscapeVelocity("speed at or above local escape; coasting time undefined")

    phi, s, c = sol.phi, sol.sin_phi, sol.cos_phi
    cg, sg = math.cos(gamma), math.sin(gamma)
    cos_gp = cg * c - sg * s

    k = math.sqrt(2.0 / lam - 1.0)
    atan_term = math.atan2(k * math.sin(0.5 * phi), math.cos(gamma + 0.5 * phi))
    num = (sg / cg) * (1.0 - c) + (1.0 - lam) * s
    den = (2.0 - lam) * ((1.0 - c) / (lam * cg * cg) + cos_gp / cg)
    tf = (kin.r0 / (kin.v0 * cg)) * (num / den + (2.0 * cg / (lam * k ** 3)) * atan_term)
    return tf


def iip_unit_vector(kin: StateKinematics, sol: FlightAngleSolution) -> Vector3:
    """Inertial unit vector toward the impact point: the current radial
    direction rotated by the flight angle within the trajectory plane."""
    return sol.cos_phi * kin.i_r0 + sol.sin_phi * kin.i_theta


def compute_iip(state: InertialState, earth: EarthModel = EARTH) -> IipSolution:
    """Full impact prediction for one inertial state."""
    kin = derive_kinematics(state, earth)
    sol = solve_flight_angle(kin, earth)
    tf = time_of_flight(kin, sol, earth)
    i_p = iip_unit_vector(kin, sol)
    lat, lon_i = latlon_of(i_p)
    lon_e = wrap_pi(lon_i - earth_rotation_angle(state.t, tf, earth))
    return IipSolution(t=state.t, phi=sol.phi, tf=tf, i_p=i_p,
                       lat_i=lat, lon_i=lon_i, lat_e=lat, lon_e=lon_e)


def impact_position(sol: IipSolution, earth: EarthModel = EARTH) -> Vector3:
    """Inertial impact position on the surface sphere."""
    return earth.radius * sol.i_p


def elements_from_state(kin: StateKinematics, earth: EarthModel = EARTH) -> OrbitalElements:
    """Keplerian elements and apsis-referenced anomalies for the osculating
    orbit, at the current state and at the descending surface crossing.

    States at an apsis are fine here (the anomalies themselves are well
    defined); only the rate sensitivities that divide by sin E reject them.
    """
    mu, rp = earth.mu, earth.radius
    if kin.lam >= 2.0:
        raise EscapeVelocity("speed at or above local escape; closed-orbit elements undefined")
    a = kin.r0 / (2.0 - kin.lam)
    e2 = 1.0 - kin.h * kin.h / (mu * a)
    e = math.sqrt(max(e2, 0.0))
    if e <= EPS_ECC:
        raise ZeroEccentricity("orbit is numerically circular; anomalies undefined")

    n = math.sqrt(mu / a ** 3)
    p = kin.h * kin.h / mu

    cos_e0 = (1.0 - kin.r0 / a) / e
    sin_e0 = kin.rdotv / (e * math.sqrt(mu * a))

    cos_ep = (1.0 - rp / a) / e
    if abs(cos_ep) > 1.0:
        if abs(cos_ep) > 1.0 + 1e-12:
            raise NonImpacting("osculating orbit does not reach the surface radius")
        cos_ep = math.copysign(1.0, cos_ep)
    sin_ep = -math.sqrt(max(1.0 - cos_ep * cos_ep, 0.0))  # descending crossing

    e0 = math.atan2(sin_e0, cos_e0)
    ep = math.atan2(sin_ep, cos_ep)
    m0 = e0 - e * sin_e0
    mp = ep - e * sin_ep
    return OrbitalElements(a=a, e=e, n=n, p=p, E0=e0, Ep=ep, M0=m0, Mp=mp,
                           sin_E0=sin_e0, cos_E0=cos_e0, sin_Ep=sin_ep, cos_Ep=cos_ep)


def kepler_time_of_flight(el: OrbitalElements) -> float:
    """Time between the two anomalies via the transcendental mean-anomaly
    relation, unwrapped so the descending crossing is always downstream."""
    dm = (el.Mp - el.M0) % (2.0 * math.pi)
    return dm / el.n
