"""State kinematics, acceleration frames, and Earth model.

Positions and velocities live in a non-rotating geocentric frame whose
axes coincide with the rotating (Earth-fixed) frame at the reference
epoch.  All internal angles are radians; degrees appear only at the CLI
and service boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BelowSurface, DegenerateGeometry, PolarSingularity

MU_EARTH = 3.986004418e14  # m^3/s^2
R_EARTH = 6378137.0  # m, spherical surface radius
OMEGA_EARTH = 7.2921150e-5  # rad/s

Vector3 = np.ndarray


@dataclass(frozen=True)
class EarthModel:
    """Spherical rotating Earth: gravitational parameter, surface radius,
    spin rate, and the epoch at which inertial and rotating axes align."""

    mu: float = MU_EARTH
    radius: float = R_EARTH
    omega: float = OMEGA_EARTH
    t_ref: float = 0.0


EARTH = EarthModel()


@dataclass(frozen=True)
class InertialState:
    """Epoch, position (m), and velocity (m/s) in the non-rotating frame."""

    t: float
    r: Vector3
    v: Vector3


@dataclass(frozen=True)
class AccelRtn:
    """Disturbing acceleration resolved along the instantaneous radial,
    along-track (horizontal, in-plane), and orbit-normal directions."""

    ar: float
    atheta: float
    ah: float

    def as_array(self) -> Vector3:
        return np.array([self.ar, self.atheta, self.ah])


ACCEL_ZERO = AccelRtn(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AccelVnb:
    """Disturbing acceleration resolved along the velocity direction (a1),
    the negative orbit normal (a2), and the in-plane normal completing the
    right-handed triad (a3)."""

    a1: float
    a2: float
    a3: float


@dataclass(frozen=True)
class StateKinematics:
    """Scalar and directional quantities derived from one inertial state.

    Carries the radius/speed magnitudes, the unit vectors spanning the
    osculating plane, the flight path angle above local horizontal, the
    specific angular momentum, and the squared ratio of speed to local
    circular speed.
    """

    r0: float
    v0: float
    i_r0: Vector3
    i_v0: Vector3
    i_h: Vector3
    i_theta: Vector3
    gamma0: float
    h: float
    rdotv: float
    lam: float
    v_circ: float


def derive_kinematics(state: InertialState, earth: EarthModel = EARTH) -> StateKinematics:
    """Decompose an inertial state into the scalar/directional quantities the
    impact-point formulas consume.

    Raises DegenerateGeometry when position and velocity are (nearly)
    parallel, and BelowSurface when the position is inside the surface
    sphere.
    """
    r = np.asarray(state.r, dtype=float)
    v = np.asarray(state.v, dtype=float)
    r0 = float(np.linalg.norm(r))
    v0 = float(np.linalg.norm(v))
    if r0 <= 0.0 or v0 <= 0.0:
        raise DegenerateGeometry("zero position or velocity magnitude")
    if r0 < earth.radius - 1e-3:
        raise BelowSurface(f"radius {r0:.3f} m is below the surface sphere {earth.radius:.3f} m")

    h_vec = np.cross(r, v)
    h = float(np.linalg.norm(h_vec))
    if h <= 1e-6 * r0 * v0:
        raise DegenerateGeometry("position and velocity are parallel; trajectory plane undefined")

    i_r0 = r / r0
    i_v0 = v / v0
    i_h = h_vec / h
    i_theta = np.cross(i_h, i_r0)
    rdotv = float(np.dot(r, v))
    gamma0 = math.atan2(rdotv, h)
    v_circ = math.sqrt(earth.mu / r0)
    lam = (v0 / v_circ) ** 2
    return StateKinematics(
        r0=r0, v0=v0, i_r0=i_r0, i_v0=i_v0, i_h=i_h, i_theta=i_theta,
        gamma0=gamma0, h=h, rdotv=rdotv, lam=lam, v_circ=v_circ,
    )


def rtn_to_vnb(a: AccelRtn, gamma0: float) -> AccelVnb:
    """Re-express a radial/along-track/normal acceleration in the
    velocity-aligned triad."""
    sg, cg = math.sin(gamma0), math.cos(gamma0)
    return AccelVnb(
        a1=cg * a.atheta + sg * a.ar,
        a2=-a.ah,
        a3=sg * a.atheta - cg * a.ar,
    )


def vnb_to_rtn(a: AccelVnb, gamma0: float) -> AccelRtn:
    """Inverse of :func:`rtn_to_vnb`."""
    sg, cg = math.sin(gamma0), math.cos(gamma0)
    return AccelRtn(
        ar=sg * a.a1 - cg * a.a3,
        atheta=cg * a.a1 + sg * a.a3,
        ah=-a.a2,
    )


def vnb_frame(kin: StateKinematics) -> tuple[Vector3, Vector3, Vector3]:
    """Unit vectors of the velocity-aligned triad: velocity direction,
    negative orbit normal, and their cross product."""
    i_1 = kin.i_v0
    i_2 = -kin.i_h
    i_3 = np.cross(i_1, i_2)
    return i_1, i_2, i_3


def site_enu(lat: float, lon: float) -> tuple[Vector3, Vector3, Vector3]:
    """East, north, up unit vectors at a spherical latitude/longitude,
    expressed in the frame the lat/lon are measured in."""
    sla, cla = math.sin(lat), math.cos(lat)
    slo, clo = math.sin(lon), math.cos(lon)
    east = np.array([-slo, clo, 0.0])
    north = np.array([-sla * clo, -sla * slo, cla])
    up = np.array([cla * clo, cla * slo, sla])
    return east, north, up


def enu_basis(i_p: Vector3) -> tuple[Vector3, Vector3, Vector3]:
    """East, north, west unit vectors of the local tangent plane at the
    surface direction ``i_p``, expressed in the same frame as ``i_p``.

    Raises PolarSingularity when the direction is too close to a pole for
    east to be defined.
    """
    z = np.array([0.0, 0.0, 1.0])
    east = np.cross(z, i_p)
    norm = float(np.linalg.norm(east))
    cos_lat = math.sqrt(max(0.0, 1.0 - float(i_p[2]) ** 2))
    if norm <= 1e-12 or cos_lat <= 1e-12:
        raise PolarSingularity("surface direction is at a pole; east is undefined")
    east = east / norm
    north = np.cross(i_p, east)
    west = -east
    return east, north, west


def surface_point(lat: float, lon: float, radius: float) -> Vector3:
    """Cartesian point on the sphere at the given latitude/longitude."""
    return radius * np.array([
        math.cos(lat) * math.cos(lon),
        math.cos(lat) * math.sin(lon),
        math.sin(lat),
    ])


def earth_rotation_angle(t: float, tf: float, earth: EarthModel = EARTH) -> float:
    """Rotation of the Earth-fixed frame relative to the inertial frame at
    the impact epoch t + tf."""
    return earth.omega * (t - earth.t_ref + tf)


def inertial_to_ecef_matrix(theta: float) -> np.ndarray:
    """Rotation taking inertial components to Earth-fixed components when the
    Earth-fixed frame leads by the angle theta about +z."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        [c, s, 0.0],
        [-s, c, 0.0],
        [0.0, 0.0, 1.0],
    ])


def latlon_of(u: Vector3) -> tuple[float, float]:
    """Spherical latitude/longitude of a direction vector."""
    n = float(np.linalg.norm(u))
    return math.asin(float(u[2]) / n), math.atan2(float(u[1]), float(u[0]))


def wrap_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi
