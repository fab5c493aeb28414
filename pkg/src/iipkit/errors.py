"""Error taxonomy for impact-point computations.

Every rejection the library can produce is a distinct exception class so
callers (and the CLI exit-code mapping) can tell geometry problems apart
from genuine singularities of the rate formulations.
"""

from __future__ import annotations


class IipError(Exception):
    """Base class for all impact-point computation failures."""


class DegenerateGeometry(IipError):
    """Position and velocity are parallel, or the state is otherwise unusable."""


class PolarSingularity(IipError):
    """Impact point at a geographic pole; longitude rate is undefined."""


class NonImpacting(IipError):
    """The coasting conic never descends to the surface sphere."""


class EscapeVelocity(IipError):
    """Speed at or above local escape; no closed orbit, flight time undefined."""


class CircularGrazing(IipError):
    """Orbit circular at surface radius; impact geometry is indeterminate."""


class BelowSurface(IipError):
    """Current position is inside the surface sphere."""


class ZeroEccentricity(IipError):
    """Orbit too close to circular for element-based sensitivities."""


class AnomalySingularity(IipError):
    """Current or impact point too close to an apsis; eccentric-anomaly
    derivatives blow up there."""


class SensitivitySingularity(IipError):
    """A sensitivity denominator vanished; rates are unbounded at this state."""


class NoImpactWithinHorizon(IipError):
    """Propagation reached its time horizon without crossing the surface."""


class DegenerateWindow(IipError):
    """Finite-difference window collapsed or produced unusable samples."""


class ConfigError(IipError):
    """Vehicle or run configuration is invalid."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SubsurfaceState(IipError):
    """Simulated trajectory descended below the surface while still thrusting."""


class InputFormatError(IipError):
    """A trajectory or state input file does not match the documented format."""


# Stable mapping used by the CLI; documented in the README.
EXIT_CODES: dict[type[IipError], int] = {
    BelowSurface: 2,
    NonImpacting: 3,
    EscapeVelocity: 4,
    CircularGrazing: 5,
    DegenerateGeometry: 6,
    PolarSingularity: 7,
    ZeroEccentricity: 8,
    AnomalySingularity: 9,
    SensitivitySingularity: 10,
    NoImpactWithinHorizon: 11,
    DegenerateWindow: 12,
    ConfigError: 13,
    SubsurfaceState: 14,
    InputFormatError: 16,
}


def exit_code_for(exc: IipError) -> int:
    """Map an exception instance to its documented CLI exit code."""
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    return 1
