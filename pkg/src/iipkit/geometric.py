"""Impact-point rates decomposed along downrange and crossrange directions.

The alternative to the element-chain formulation: the impact point moves
along a surface-tangent downrange direction when speed or flight path
angle change, and along the crossrange direction when the trajectory
plane tilts.  Resolving the disturbing acceleration on velocity-aligned
axes makes each channel a single scalar sensitivity, and the Earth-fixed
impact velocity follows by adding the rotation feed-through and rotating
the sum into surface-fixed axes at the impact epoch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, PolarSingularity, SensitivitySingularity
from .frames import (
    EARTH,
    AccelRtn,
    AccelVnb,
    EarthModel,
    InertialState,
    StateKinematics,
    Vector3,
    derive_kinematics,
    earth_rotation_angle,
    enu_basis,
    inertial_to_ecef_matrix,
    rtn_to_vnb,
)
from .kepler import (
    FlightAngleSolution,
    IipSolution,
    compute_iip,
    elements_from_state,
    solve_flight_angle,
    time_of_flight,
)
from .legacy import EPS_POLE, sensitivities, tf_rate


@dataclass(frozen=True)
class GeometricRates:
    """Downrange/crossrange impact-point rates and their Earth-fixed sum.

    pdot_d and pdot_c are the signed surface speeds along i_d (downrange)
    and i_c (crossrange); pdot is their vector sum in the inertial frame,
    pdot_w the westward rotation feed-through, pdot_ei the rotating-frame
    rate still on inertial axes (pdot + pdot_w), and pdot_ecef that same
    vector resolved on Earth-fixed axes at the impact epoch.
    """

    pdot_d: float
    pdot_c: float
    i_d: Vector3
    i_c: Vector3
    pdot: Vector3
    pdot_w: Vector3
    pdot_ei: Vector3
    pdot_ecef: Vector3
    tf_dot: float
    dlat: float
    dlon_i: float
    dlon_e: float

    @property
    def tf_dot_a(self) -> float:
        """Acceleration-driven part of the flight-time rate (1 + tf_dot);
        zero while coasting."""
        return 1.0 + self.tf_dot


def velocity_element_rates(a: AccelVnb, kin: StateKinematics) -> tuple[float, float, float]:
    """Rates of the velocity elements (speed, flight path angle, azimuth)
    produced by a disturbing acceleration on velocity-aligned axes."""
    cg = math.cos(kin.gamma0)
    if cg <= 1e-9:
        raise DegenerateGeometry("vertical flight; azimuth rate undefined")
    v_dot = a.a1
    gamma_dot = -a.a3 / kin.v0
    chi_dot = -a.a2 / (kin.v0 * cg)
    return v_dot, gamma_dot, chi_dot


def downrange_crossrange_frame(kin: StateKinematics,
                               sol: FlightAngleSolution) -> tuple[Vector3, Vector3]:
    """Surface-tangent directions at the impact point: downrange (within the
    trajectory plane, pointing the way the impact point slides when the
    flight angle grows) and crossrange (completing the triad with the
    impact direction; coincides with the orbit normal)."""
    cg = math.cos(kin.gamma0)
    sg = math.sin(kin.gamma0)
    sin_pg = sol.sin_phi * cg + sol.cos_phi * sg
    beta1 = -sin_pg / cg
    beta2 = sol.cos_phi / cg
    i_d = beta1 * kin.i_r0 + beta2 * kin.i_v0
    i_p = sol.cos_phi * kin.i_r0 + sol.sin_phi * kin.i_theta
    i_c = np.cross(i_p, i_d)
    return i_d, i_c


def flight_angle_partials(kin: StateKinematics, sol: FlightAngleSolution,
                          earth: EarthModel = EARTH) -> tuple[float, float]:
    """Partials of the flight angle with respect to speed and flight path
    angle, holding the current position fixed.

    Both share one denominator; when it vanishes the impact geometry is
    stationary to first order and SensitivitySingularity is raised.
    """
    mu, rp = earth.mu, earth.radius
    r0, v0, gamma = kin.r0, kin.v0, kin.gamma0
    phi, s, c = sol.phi, sol.sin_phi, sol.cos_phi
    sin_2gp = math.sin(2.0 * gamma + phi)

    t1 = mu * s / (r0 * v0 * v0)
    t2 = 0.5 * (sin_2gp + s)
    d1 = t1 - t2
    if abs(d1) <= 1e-12 * (abs(t1) + abs(t2)):
        raise SensitivitySingularity("flight-angle partials denominator vanished")

    dphi_dv = 2.0 * mu * (1.0 - c) / (r0 * v0 ** 3 * d1)
    dphi_dgamma = (sin_2gp - (r0 / rp) * math.sin(2.0 * gamma)) / d1
    return dphi_dv, dphi_dgamma


def surface_rate(kin: StateKinematics, sol: FlightAngleSolution, a: AccelRtn,
                 earth: EarthModel = EARTH) -> tuple[float, float, Vector3, Vector3, Vector3]:
    """Downrange/crossrange speeds of the impact point and their vector sum
    in the inertial frame."""
    vnb = rtn_to_vnb(a, kin.gamma0)
    dphi_dv, dphi_dgamma = flight_angle_partials(kin, sol, earth)
    i_d, i_c = downrange_crossrange_frame(kin, sol)

    # gamma responds to the in-plane normal, the plane tilt to the off-plane
    # component; both scale by 1/v0 as turn rates.
    pdot_d = earth.radius * (dphi_dv * vnb.a1 - dphi_dgamma * vnb.a3 / kin.v0)
    pdot_c = -earth.radius * (sol.sin_phi / (kin.v0 * math.cos(kin.gamma0))) * vnb.a2
    pdot = pdot_d * i_d + pdot_c * i_c
    return pdot_d, pdot_c, i_d, i_c, pdot


def rotation_feed(i_p: Vector3, tf_dot: float, earth: EarthModel = EARTH) -> Vector3:
    """Westward surface velocity the rotating frame contributes while the
    impact epoch drifts; exactly zero while coasting (tf_dot = -1)."""
    cos_lat = math.hypot(float(i_p[0]), float(i_p[1]))
    if cos_lat <= EPS_POLE:
        return np.zeros(3)
    _, _, i_w = enu_basis(i_p)
    return earth.radius * earth.omega * cos_lat * (1.0 + tf_dot) * i_w


def ecef_rate(state: InertialState, iip: IipSolution, pdot: Vector3, pdot_w: Vector3,
              earth: EarthModel = EARTH) -> Vector3:
    """Total impact-point velocity resolved on Earth-fixed axes at the
    impact epoch."""
    theta = earth_rotation_angle(state.t, iip.tf, earth)
    return inertial_to_ecef_matrix(theta) @ (pdot + pdot_w)


def latlon_rates_from_surface(iip: IipSolution, pdot: Vector3, tf_dot: float,
                              earth: EarthModel = EARTH) -> tuple[float, float, float]:
    """Latitude/longitude rates from the surface velocity, projected on the
    local east/north directions at the impact point."""
    i_p = iip.i_p
    cos_lat = math.hypot(float(i_p[0]), float(i_p[1]))
    if cos_lat <= EPS_POLE:
        raise PolarSingularity("impact point at a pole; longitude rate undefined")
    i_e, i_n, _ = enu_basis(i_p)
    dlat = float(np.dot(pdot, i_n)) / earth.radius
    dlon_i = float(np.dot(pdot, i_e)) / (earth.radius * cos_lat)
    dlon_e = dlon_i - earth.omega * (1.0 + tf_dot)
    return dlat, dlon_i, dlon_e


def geometric_rates(state: InertialState, a: AccelRtn,
                    earth: EarthModel = EARTH) -> tuple[IipSolution, GeometricRates]:
    """Impact solution and its rates for one state and acceleration.

    The time-of-flight rate has no downrange/crossrange expression of its
    own, so it is taken from the element-chain formulation; the surface
    directions and speeds are native to this one.
    """
    kin = derive_kinematics(state, earth)
    sol = solve_flight_angle(kin, earth)
    tf = time_of_flight(kin, sol, earth)
    el = elements_from_state(kin, earth)
    tf_dot = tf_rate(sensitivities(kin, sol, el, tf, earth), a)

    pdot_d, pdot_c, i_d, i_c, pdot = surface_rate(kin, sol, a, earth)
    iip = compute_iip(state, earth)
    pdot_w = rotation_feed(iip.i_p, tf_dot, earth)
    pdot_ei = pdot + pdot_w
    pdot_e = ecef_rate(state, iip, pdot, pdot_w, earth)
    dlat, dlon_i, dlon_e = latlon_rates_from_surface(iip, pdot, tf_dot, earth)

    return iip, GeometricRates(
        pdot_d=pdot_d, pdot_c=pdot_c, i_d=i_d, i_c=i_c,
        pdot=pdot, pdot_w=pdot_w, pdot_ei=pdot_ei, pdot_ecef=pdot_e, tf_dot=tf_dot,
        dlat=dlat, dlon_i=dlon_i, dlon_e=dlon_e,
    )
