"""Launch trajectory simulator for exercising the impact-point machinery.

A deliberately simple vacuum model: inverse-square gravity plus staged
thrust steered by a pitch program inside a fixed launch plane.  It is not
a mission-design tool; its job is to manufacture realistic powered
trajectories (speeds, flight path angles, and accelerations in the right
ranges, including out-of-plane components from Earth rotation) on which
the two rate formulations can be compared sample by sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .frames import EARTH, AccelRtn, EarthModel, InertialState, Vector3, site_enu, surface_point

G0 = 9.80665  # m/s^2, standard gravity (kgf -> N)


@dataclass(frozen=True)
class StageConfig:
    """One powered stage: dry/propellant masses (kg), burn time (s), thrust
    profile as (stage-local time s, thrust N) knots interpolated linearly,
    an optional unpowered coast after burnout, and an optional mass (e.g. a
    fairing) jettisoned at an absolute mission time."""

    structural_mass: float
    propellant_mass: float
    burn_time: float
    thrust_profile: tuple[tuple[float, float], ...]
    coast_after: float = 0.0
    jettison_mass: float = 0.0
    jettison_time: float | None = None


@dataclass(frozen=True)
class VehicleConfig:
    """Stages in flight order, payload, pitch program as (mission time s,
    pitch above horizontal rad) knots, launch site coordinates (rad), launch
    azimuth east of north (rad), and a terminal coast (s)."""

    stages: tuple[StageConfig, ...]
    payload_mass: float
    pitch_program: tuple[tuple[float, float], ...]
    launch_lat: float
    launch_lon: float
    launch_azimuth: float
    final_coast: float = 0.0

    @property
    def liftoff_mass(self) -> float:
        return self.payload_mass + sum(
            s.structural_mass + s.propellant_mass + s.jettison_mass for s in self.stages
        )


@dataclass(frozen=True)
class TrajectorySample:
    """State plus the non-gravitational acceleration resolved on the
    instantaneous radial/along-track/normal axes, and current mass."""

    t: float
    r: Vector3
    v: Vector3
    accel: AccelRtn
    mass: float

    @property
    def state(self) -> InertialState:
        return InertialState(t=self.t, r=self.r, v=self.v)


@dataclass(frozen=True)
class SimulationResult:
    samples: list[TrajectorySample]
    truncated: bool = False
    truncate_time: float | None = None


def default_vehicle_config() -> VehicleConfig:
    """Two-stage vehicle with a payload fairing, lifting off southward from
    a mid-latitude coastal site.  Stage one rides a decreasing thrust ramp;
    stage two ignites after a short coast and the fairing drops shortly
    after that.  Tuned so every sample past the vertical-rise phase yields
    a well-conditioned impact-rate problem."""
    stage1 = StageConfig(
        structural_mass=7000.0,
        propellant_mass=100000.0,
        burn_time=343.0,
        thrust_profile=((0.0, 150e3 * G0), (343.0, 32e3 * G0)),
        coast_after=5.0,
    )
    stage2 = StageConfig(
        structural_mass=450.0,
        propellant_mass=550.0,
        burn_time=55.0,
        thrust_profile=((0.0, 2.8e3 * G0),),
        jettison_mass=300.0,
        jettison_time=350.0,
    )
    return VehicleConfig(
        stages=(stage1, stage2),
        payload_mass=250.0,
        pitch_program=tuple(
            (t, math.radians(d))
            for t, d in ((0.0, 90.0), (10.0, 90.0), (60.0, 62.0), (150.0, 42.0),
                         (250.0, 30.0), (343.0, 24.0), (403.0, 20.0))
        ),
        launch_lat=math.radians(34.4),
        launch_lon=math.radians(127.5),
        launch_azimuth=math.radians(170.0),
        final_coast=20.0,
    )


def validate_config(cfg: VehicleConfig) -> None:
    """Reject configurations the simulator cannot integrate sensibly."""
    if not cfg.stages:
        raise ConfigError("at least one stage is required")
    if cfg.payload_mass < 0.0:
        raise ConfigError("payload_mass must be non-negative")
    if not -0.5 * math.pi <= cfg.launch_lat <= 0.5 * math.pi:
        raise ConfigError("launch latitude outside [-90, 90] deg")
    if cfg.final_coast < 0.0:
        raise ConfigError("final_coast must be non-negative")
    if not cfg.pitch_program:
        raise ConfigError("pitch program needs at least one knot")
    times = [t for t, _ in cfg.pitch_program]
    if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
        raise ConfigError("pitch program times must be strictly increasing")

    mission_end = _burn_schedule(cfg)[-1][1]
    for idx, st in enumerate(cfg.stages, start=1):
        where = f"stage {idx}"
        if st.structural_mass < 0.0 or st.propellant_mass <= 0.0:
            raise ConfigError(f"{where}: masses must be positive")
        if st.burn_time <= 0.0:
            raise ConfigError(f"{where}: burn_time must be positive")
        if st.coast_after < 0.0:
            raise ConfigError(f"{where}: coast_after must be non-negative")
        if not st.thrust_profile:
            raise ConfigError(f"{where}: empty thrust profile")
        tk = [t for t, _ in st.thrust_profile]
        if any(t1 <= t0 for t0, t1 in zip(tk, tk[1:])):
            raise ConfigError(f"{where}: thrust profile times must be strictly increasing")
        if any(f < 0.0 for _, f in st.thrust_profile):
            raise ConfigError(f"{where}: negative thrust")
        if st.jettison_mass < 0.0:
            raise ConfigError(f"{where}: negative jettison mass")
        if st.jettison_mass > 0.0:
            if st.jettison_time is None:
                raise ConfigError(f"{where}: jettison_mass given without jettison_time")
            if not 0.0 <= st.jettison_time <= mission_end:
                raise ConfigError(f"{where}: jettison_time outside the mission window")


def _burn_schedule(cfg: VehicleConfig) -> list[tuple[float, float]]:
    """Absolute (ignition, burnout) for each stage; the last entry is the
    (mission start, mission end) envelope."""
    spans = []
    t = 0.0
    for st in cfg.stages:
        spans.append((t, t + st.burn_time))
        t += st.burn_time + st.coast_after
    spans.append((0.0, t + cfg.final_coast))
    return spans


def burnout_times(cfg: VehicleConfig) -> list[float]:
    """Absolute burnout time of each stage, in stage order."""
    return [t_out for _, t_out in _burn_schedule(cfg)[:-1]]


def _interp(knots: tuple[tuple[float, float], ...], t: float) -> float:
    if t <= knots[0][0]:
        return knots[0][1]
    if t >= knots[-1][0]:
        return knots[-1][1]
    for (t0, y0), (t1, y1) in zip(knots, knots[1:]):
        if t0 <= t <= t1:
            return y0 + (y1 - y0) * (t - t0) / (t1 - t0)
    return knots[-1][1]


class _Vehicle:
    """Precomputed mission timeline: thrust, mass, and pitch as functions of
    mission time, plus the mass-drop instants."""

    def __init__(self, cfg: VehicleConfig):
        self.cfg = cfg
        spans = _burn_schedule(cfg)
        self.burns = spans[:-1]
        self.mission_end = spans[-1][1]

        # (time, mass lost): spage structures at next ignition, jettisons as given
        drops: list[tuple[float, float]] = []
        for idx, (st, (t_ign, t_out)) in enumerate(zip(cfg.stages, self.burns)):
            if idx + 1 < len(cfg.stages):
                drops.append((t_out + st.coast_after, st.structural_mass))
            if st.jettison_mass > 0.0 and st.jettison_time is not None:
                drops.append((st.jettison_time, st.jettison_mass))
        self.drops = sorted(drops)
        self.m0 = cfg.liftoff_mass

    def thrust(self, t: float) -> float:
        """Thrust (N) on the right-open interval convention: burnout instants
        already coast."""
        for st, (t_ign, t_out) in zip(self.cfg.stages, self.burns):
            if t_ign <= t < t_out:
                return _interp(st.thrust_profile, t - t_ign)
        return 0.0

    def mass(self, t: float) -> float:
        m = self.m0
        for st, (t_ign, t_out) in zip(self.cfg.stages, self.burns):
            if t >= t_ign:
                burned = min(max(t - t_ign, 0.0), st.burn_time)
                m -= st.propellant_mass * burned / st.burn_time
        for t_drop, dm in self.drops:
            if t >= t_drop:
                m -= dm
        return m

    def pitch(self, t: float) -> float:
        return _interp(self.cfg.pitch_program, t)

    def breakpoints(self, dt: float) -> list[float]:
        """Every instant where dynamics change character or a sample is due."""
        pts = {0.0, self.mission_end}
        k = 0
        while k * dt < self.mission_end - 1e-9:
            pts.add(k * dt)
            k += 1
        for st, (t_ign, t_out) in zip(self.cfg.stages, self.burns):
            pts.update((t_ign, t_out))
            pts.update(t_ign + tk for tk, _ in st.thrust_profile if tk <= st.burn_time)
        pts.update(t for t, _ in self.drops)
        pts.update(t for t, _ in self.cfg.pitch_program if t <= self.mission_end)
        return sorted(p for p in pts if 0.0 <= p <= self.mission_end)


def _rtn_accel(r: Vector3, v: Vector3, acc: Vector3) -> AccelRtn:
    rn = float(np.linalg.norm(r))
    h_vec = np.cross(r, v)
    hn = float(np.linalg.norm(h_vec))
    if rn == 0.0 or hn <= 1e-9 * rn * max(float(np.linalg.norm(v)), 1e-12):
        i_r = r / rn if rn > 0.0 else np.array([0.0, 0.0, 1.0])
        return AccelRtn(ar=float(np.dot(acc, i_r)), atheta=0.0, ah=0.0)
    i_r = r / rn
    i_h = h_vec / hn
    i_theta = np.cross(i_h, i_r)
    return AccelRtn(
        ar=float(np.dot(acc, i_r)),
        atheta=float(np.dot(acc, i_theta)),
        ah=float(np.dot(acc, i_h)),
    )


def simulate(cfg: VehicleConfig, earth: EarthModel = EARTH,
             dt: float = 1.0, substep: float = 0.05) -> SimulationResult:
    """Integrate the powered trajectory and sample it every dt seconds.

    The vehicle lifts off with the rotating surface's velocity and thrusts
    inside the plane spanned by the pad vertical and the azimuth direction;
    gravity is inverse-square.  If the radius drops below the surface
    before the mission window ends, sampling truncates there and the result
    is marked truncated rather than raising.
    """
    validate_config(cfg)
    if dt <= 0.0 or substep <= 0.0:
        raise ConfigError("dt and substep must be positive")
    veh = _Vehicle(cfg)

    east0, north0, up0 = site_enu(cfg.launch_lat, cfg.launch_lon)
    d0 = math.sin(cfg.launch_azimuth) * east0 + math.cos(cfg.launch_azimuth) * north0
    plane_normal = np.cross(up0, d0)

    def thrust_dir(t: float, r: Vector3) -> Vector3:
        i_up = r / float(np.linalg.norm(r))
        downrange = np.cross(plane_normal, i_up)
        dn = float(np.linalg.norm(downrange))
        if dn < 1e-12:
            return i_up
        pitch = veh.pitch(t)
        return math.sin(pitch) * i_up + math.cos(pitch) * (downrange / dn)

    def deriv(t: float, r: Vector3, v: Vector3) -> tuple[Vector3, Vector3]:
        rn = float(np.linalg.norm(r))
        acc = -earth.mu / rn ** 3 * r
        thr = veh.thrust(t)
        if thr > 0.0:
            acc = acc + (thr / veh.mass(t)) * thrust_dir(t, r)
        return v, acc

    r = surface_point(cfg.launch_lat, cfg.launch_lon, earth.radius)
    v = np.cross(np.array([0.0, 0.0, earth.omega]), r)

    samples: list[TrajectorySample] = []
    truncated = False
    truncate_time: float | None = None

    def emit(t: float, r: Vector3, v: Vector3) -> None:
        thr = veh.thrust(t)
        acc = (thr / veh.mass(t)) * thrust_dir(t, r) if thr > 0.0 else np.zeros(3)
        samples.append(TrajectorySample(t=t, r=r.copy(), v=v.copy(),
                                        accel=_rtn_accel(r, v, acc), mass=veh.mass(t)))

    points = veh.breakpoints(dt)
    emit(points[0], r, v)

    for t0, t1 in zip(points, points[1:]):
        span = t1 - t0
        nsub = max(1, math.ceil(span / substep - 1e-12))
        h = span / nsub
        t = t0
        for _ in range(nsub):
            k1r, k1v = deriv(t, r, v)
            k2r, k2v = deriv(t + 0.5 * h, r + 0.5 * h * k1r, v + 0.5 * h * k1v)
            k3r, k3v = deriv(t + 0.5 * h, r + 0.5 * h * k2r, v + 0.5 * h * k2v)
            k4r, k4v = deriv(t + h, r + h * k3r, v + h * k3v)
            r = r + (h / 6.0) * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
            v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
            t += h
        if float(np.linalg.norm(r)) < earth.radius - 1e-6:
            truncated = True
            truncate_time = t1
            break
        if t1 == veh.mission_end or abs(t1 / dt - round(t1 / dt)) < 1e-9:
            emit(t1, r, v)

    return SimulationResult(samples=samples, truncated=truncated, truncate_time=truncate_time)


def accel_profile(samples: list[TrajectorySample]) -> list[tuple[float, float, float, float]]:
    """(t, radial, along-track, normal) acceleration rows for plotting."""
    return [(s.t, s.accel.ar, s.accel.atheta, s.accel.ah) for s in samples]


# ---------------------------------------------------------------------------
# Text configuration format


def parse_vehicle_config(text: str) -> VehicleConfig:
    """Parse the flat key=value vehicle format (see README for the grammar).

    Angles are degrees in the file and radians in the returned config.
    Raises ConfigError with a line number on the first problem found.
    """
    vehicle: dict[str, object] = {}
    stages: list[dict[str, object]] = []
    current: dict[str, object] | None = None
    lines_of: dict[int, int] = {}

    def parse_float(raw: str, lineno: int) -> float:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"expected a number, got {raw!r}", line=lineno) from None

    def parse_pairs(raw: str, lineno: int) -> tuple[tuple[float, float], ...]:
        pairs = []
        for item in raw.split(","):
            if ":" not in item:
                raise ConfigError(f"expected t:value pairs, got {item.strip()!r}", line=lineno)
            a, b = item.split(":", 1)
            pairs.append((parse_float(a.strip(), lineno), parse_float(b.strip(), lineno)))
        return tuple(pairs)

    vehicle_keys = {"payload_mass", "launch_lat_deg", "launch_lon_deg",
                    "launch_azimuth_deg", "final_coast", "pitch_program_deg"}
    stage_keys = {"structural_mass", "propellant_mass", "burn_time", "thrust_n",
                  "thrust_kgf", "coast_after", "jettison_mass", "jettison_time"}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[stage]":
            current = {}
            stages.append(current)
            lines_of[len(stages) - 1] = lineno
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {line!r}", line=lineno)
        key, _, raw_val = (p.strip() for p in line.partition("="))
        target = current if current is not None else vehicle
        allowed = stage_keys if current is not None else vehicle_keys
        if key not in allowed:
            scope = "stage" if current is not None else "vehicle"
            raise ConfigError(f"unknown {scope} key {key!r}", line=lineno)
        if key in ("pitch_program_deg", "thrust_n", "thrust_kgf"):
            if ":" in raw_val:
                target[key] = parse_pairs(raw_val, lineno)
            else:
                target[key] = ((0.0, parse_float(raw_val, lineno)),)
        else:
            target[key] = parse_float(raw_val, lineno)

    if not stages:
        raise ConfigError("no [stage] sections found")
    for req in ("payload_mass", "launch_lat_deg", "launch_lon_deg",
                "launch_azimuth_deg", "pitch_program_deg"):
        if req not in vehicle:
            raise ConfigError(f"missing vehicle key {req!r}")

    built = []
    for idx, st in enumerate(stages):
        lineno = lines_of[idx]
        for req in ("structural_mass", "propellant_mass", "burn_time"):
            if req not in st:
                raise ConfigError(f"stage missing key {req!r}", line=lineno)
        if "thrust_n" in st and "thrust_kgf" in st:
            raise ConfigError("give thrust_n or thrust_kgf, not both", line=lineno)
        if "thrust_n" in st:
            profile = st["thrust_n"]
        elif "thrust_kgf" in st:
            profile = tuple((t, f * G0) for t, f in st["thrust_kgf"])
        else:
            raise ConfigError("stage missing thrust_n or thrust_kgf", line=lineno)
        built.append(StageConfig(
            structural_mass=float(st["structural_mass"]),
            propellant_mass=float(st["propellant_mass"]),
            burn_time=float(st["burn_time"]),
            thrust_profile=profile,
            coast_after=float(st.get("coast_after", 0.0)),
            jettison_mass=float(st.get("jettison_mass", 0.0)),
            jettison_time=(float(st["jettison_time"]) if "jettison_time" in st else None),
        ))

    cfg = VehicleConfig(
        stages=tuple(built),
        payload_mass=float(vehicle["payload_mass"]),
        pitch_program=tuple((t, math.radians(d)) for t, d in vehicle["pitch_program_deg"]),
        launch_lat=math.radians(float(vehicle["launch_lat_deg"])),
        launch_lon=math.radians(float(vehicle["launch_lon_deg"])),
        launch_azimuth=math.radians(float(vehicle["launch_azimuth_deg"])),
        final_coast=float(vehicle.get("final_coast", 0.0)),
    )
    validate_config(cfg)
    return cfg


def dump_vehicle_config(cfg: VehicleConfig) -> str:
    """Serialize a config back to the text format (angles in degrees)."""
    def pairs(knots: tuple[tuple[float, float], ...], conv=lambda x: x) -> str:
        return ", ".join(f"{t:g}:{conv(v):g}" for t, v in knots)

    out = [
        f"payload_mass = {cfg.payload_mass:g}",
        f"launch_lat_deg = {math.degrees(cfg.launch_lat):g}",
        f"launch_lon_deg = {math.degrees(cfg.launch_lon):g}",
        f"launch_azimuth_deg = {math.degrees(cfg.launch_azimuth):g}",
        f"final_coast = {cfg.final_coast:g}",
        f"pitch_program_deg = {pairs(cfg.pitch_program, math.degrees)}",
    ]
    for st in cfg.stages:
        out.append("")
        out.append("[stage]")
        out.append(f"structural_mass = {st.structural_mass:g}")
        out.append(f"propellant_mass = {st.propellant_mass:g}")
        out.append(f"burn_time = {st.burn_time:g}")
        out.append(f"thrust_n = {pairs(st.thrust_profile)}")
        if st.coast_after:
            out.append(f"coast_after = {st.coast_after:g}")
        if st.jettison_mass:
            out.append(f"jettison_mass = {st.jettison_mass:g}")
            out.append(f"jettison_time = {st.jettison_time:g}")
    return "\n".join(out) + "\n"
