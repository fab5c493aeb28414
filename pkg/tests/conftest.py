"""Shared fixtures: reference states, a seeded random population of
impacting suborbital states, and the simulated verification trajectory.

Reference values frozen in the tests come from the brute-force oracles
(free-fall propagation, mean-anomaly flight time, central differences),
never from the closed-form code under test.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from iipkit.errors import IipError
from iipkit.frames import EARTH, InertialState
from iipkit.kepler import compute_iip
from iipkit.sim import default_vehicle_config, simulate

# One line per acceptance criterion, printed in the terminal summary.
CRITERION_LINES: list[tuple[int, str]] = []


def record_criterion(num: int, label: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    line = f"[criterion {num}] {label}: {status}"
    if detail:
        line += f" ({detail})"
    CRITERION_LINES.append((num, line))
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)


def make_state(r0: float, lam: float, gamma: float,
               u: np.ndarray | None = None, w: np.ndarray | None = None,
               t: float = 0.0) -> InertialState:
    """State at radius r0 with squared speed ratio lam and flight path angle
    gamma, in the plane spanned by the radial direction u and the horizontal
    direction w."""
    if u is None:
        u = np.array([1.0, 0.0, 0.0])
    if w is None:
        w = np.array([0.0, 1.0, 0.0])
    v0 = math.sqrt(lam * EARTH.mu / r0)
    return InertialState(t=t, r=r0 * u,
                         v=v0 * (math.sin(gamma) * u + math.cos(gamma) * w))


def random_plane(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random orthonormal (radial, horizontal) pair."""
    u = rng.normal(size=3)
    u /= np.linalg.norm(u)
    while True:
        w = rng.normal(size=3)
        w -= (w @ u) * u
        n = float(np.linalg.norm(w))
        if n > 1e-6:
            return u, w / n


def draw_impacting_states(n: int, seed: int,
                          r0_range: tuple[float, float] = (EARTH.radius, EARTH.radius + 500e3),
                          lam_range: tuple[float, float] = (0.2, 1.5),
                          gamma_deg_range: tuple[float, float] = (5.0, 60.0),
                          ) -> list[InertialState]:
    """Seeded random impacting suborbital states; non-impacting draws are
    discarded (they are rare in this envelope)."""
    rng = np.random.default_rng(seed)
    out: list[InertialState] = []
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 100 * n:
            raise RuntimeError("population draw did not converge")
        r0 = rng.uniform(*r0_range)
        lam = rng.uniform(*lam_range)
        gamma = math.radians(rng.uniform(*gamma_deg_range))
        u, w = random_plane(rng)
        state = make_state(r0, lam, gamma, u, w)
        try:
            compute_iip(state)
        except IipError:
            continue
        out.append(state)
    return out


@pytest.fixture(scope="session")
def s1_state() -> InertialState:
    """Suborbital reference state: 200 km altitude, 7 km/s at 45 degrees."""
    r = np.array([6578137.0, 0.0, 0.0])
    v = 7000.0 * np.array([math.sin(math.radians(45.0)),
                           math.cos(math.radians(45.0)), 0.0])
    return InertialState(t=0.0, r=r, v=v)


@pytest.fixture(scope="session")
def high_angle_state() -> InertialState:
    """Fast, flat state whose impact arc passes apogee (flight angle near
    291 degrees)."""
    return make_state(EARTH.radius + 80e3, 1.25, math.radians(8.0))


@pytest.fixture(scope="session")
def population() -> list[InertialState]:
    """120 seeded random impacting suborbital states."""
    return draw_impacting_states(120, seed=20260817)


@pytest.fixture(scope="session")
def flight():
    """Simulated default launch trajectory sampled at 1 Hz."""
    return simulate(default_vehicle_config(), EARTH, dt=1.0)
