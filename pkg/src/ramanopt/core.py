"""Domain types, spatial grids and unit conversions.

All numerics downstream of this module are dimensionless: positions are
``x = z/L`` in (0, 1), times are ``gamma_eg * t`` and Rabi frequencies are
``Omega / gamma_eg``.  Physical (SI) quantities only enter through
:class:`AtomicEnsemble`, :class:`PulseSpec` and the helpers at the bottom.

Orientation convention (``StoredFrame``): ``SpinWave.amplitude[i]`` is the
spin amplitude at ``z = x_i * L``.  The write field enters at ``z = 0`` and a
backward read emits its photon through the same ``z = 0`` face.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


class InvalidArgument(ValueError):
    pass


class UnsupportedGrid(ValueError):
    pass


class IncompatibleGrids(ValueError):
    pass


class NumericalFailure(RuntimeError):
    pass


class QuadratureRule(enum.Enum):
    GAUSS_LEGENDRE = "gauss-legendre"
    MIDPOINT = "midpoint"


class Orientation(enum.Enum):
    STORED_FRAME = "stored-frame"


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class PulseKind(enum.Enum):
    WRITE_RISING_EXPONENTIAL = "write-rising-exponential"
    READ_SQUARE = "read-square"
    CUSTOM = "custom"


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class AtomicEnsemble:
    """Medium parameters. Rates in rad/s, length in metres."""

    d: float
    d_bar: float
    gamma_eg: float
    gamma_es: float
    gamma_0: float = 0.0
    length: float = 1e-3

    def __post_init__(self):
        for name in ("d", "d_bar", "gamma_eg", "gamma_es", "length"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidArgument(f"{name} must be finite and > 0, got {v!r}")
        if not (math.isfinite(self.gamma_0) and self.gamma_0 >= 0):
            raise InvalidArgument(f"gamma_0 must be >= 0, got {self.gamma_0!r}")


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    n_points: int
    nodes: np.ndarray
    weights: np.ndarray
    rule: QuadratureRule

    def is_symmetric(self, tol: float = 1e-14) -> bool:
        return bool(np.all(np.abs(self.nodes[::-1] - (1.0 - self.nodes)) <= tol))

    def same_as(self, other: "SpatialGrid") -> bool:
        return self is other or (
            self.rule is other.rule
            and self.n_points == other.n_points
            and np.array_equal(self.nodes, other.nodes)
            and np.array_equal(self.weights, other.weights)
        )

    def integrate(self, values) -> complex | float:
        """Quadrature of sampled values over the unit interval."""
        return np.dot(self.weights, values)


@lru_cache(maxsize=32)
def make_grid(n_points: int, rule: QuadratureRule = QuadratureRule.GAUSS_LEGENDRE) -> SpatialGrid:
    """Quadrature grid on (0, 1) whose weights sum to one.

    Gauss-Legendre nodes are mapped from [-1, 1]; the midpoint rule uses
    cell centres of ``n_points`` equal cells.
    """
    if int(n_points) != n_points or n_points < 2:
        raise InvalidArgument(f"n_points must be an integer >= 2, got {n_points!r}")
    n_points = int(n_points)
    rule = QuadratureRule(rule)
    if rule is QuadratureRule.GAUSS_LEGENDRE:
        t, w = np.polynomial.legendre.leggauss(n_points)
        nodes = 0.5 * (t + 1.0)
    else:
        nodes = (np.arange(n_points) + 0.5) / n_points
        w = np.ones(n_points)
    w = w / math.fsum(w)
    return SpatialGrid(n_points, _frozen(nodes), _frozen(w), rule)


@dataclass(frozen=True, eq=False)
class SpinWave:
    grid: SpatialGrid
    amplitude: np.ndarray
    orientation: Orientation = Orientation.STORED_FRAME

    def __post_init__(self):
        amp = np.asarray(self.amplitude)
        if amp.shape != (self.grid.n_points,):
            raise InvalidArgument(
                f"amplitude has shape {amp.shape}, grid has {self.grid.n_points} nodes"
            )
        if not np.all(np.isfinite(amp)):
            raise InvalidArgument("amplitude contains non-finite values")
        dtype = complex if np.iscomplexobj(amp) else float
        object.__setattr__(self, "amplitude", _frozen(amp, dtype))

    @property
    def norm(self) -> float:
        """Discrete form of (1/L) * integral of |S|^2 dz."""
        return float(np.dot(self.grid.weights, np.abs(self.amplitude) ** 2))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm - 1.0) <= tol

    def normalized(self) -> "SpinWave":
        nrm = self.norm
        if nrm == 0.0:
            raise InvalidArgument("cannot normalize a zero spin wave")
        return SpinWave(self.grid, self.amplitude / math.sqrt(nrm), self.orientation)

    def scaled(self, factor: complex) -> "SpinWave":
        return SpinWave(self.grid, self.amplitude * factor, self.orientation)


def flat_spin_wave(grid: SpatialGrid) -> SpinWave:
    return SpinWave(grid, np.ones(grid.n_points))


def exponential_spin_wave(grid: SpatialGrid, alpha_L: float) -> SpinWave:
    """Normalized spin wave proportional to exp(-alpha_L * x / 2)."""
    if not (math.isfinite(alpha_L) and alpha_L >= 0):
        raise InvalidArgument(f"alpha_L must be finite and >= 0, got {alpha_L!r}")
    if alpha_L == 0:
        return flat_spin_wave(grid)
    return SpinWave(grid, np.exp(-0.5 * alpha_L * grid.nodes)).normalized()


def reverse(spin: SpinWave) -> SpinWave:
    """Mirror a spin wave about the sample centre, x -> 1 - x."""
    if not spin.grid.is_symmetric():
        raise UnsupportedGrid("reverse() needs a grid symmetric about x = 0.5")
    return SpinWave(spin.grid, spin.amplitude[::-1], spin.orientation)


def spin_wave_from_samples(grid: SpatialGrid, x, values, normalize: bool = True) -> SpinWave:
    """Resample (x, S(x)) data onto ``grid`` by linear interpolation."""
    x = np.asarray(x, dtype=float)
    values = np.asarray(values)
    if x.ndim != 1 or x.shape != values.shape or x.size < 2:
        raise InvalidArgument("need matching 1-D position and amplitude arrays, length >= 2")
    if np.any(np.diff(x) <= 0):
        raise InvalidArgument("sample positions must be strictly increasing")
    if np.iscomplexobj(values):
        amp = np.interp(grid.nodes, x, values.real) + 1j * np.interp(grid.nodes, x, values.imag)
    else:
        amp = np.interp(grid.nodes, x, values)
    spin = SpinWave(grid, amp)
    return spin.normalized() if normalize else spin


@dataclass(frozen=True, eq=False)
class PulseSpec:
    """Control-field description in physical units (rad/s, seconds).

    ``WRITE_RISING_EXPONENTIAL`` is ``omega_max * exp(t / duration)`` for
    ``t <= 0`` and switched off afterwards.  ``READ_SQUARE`` is ``omega_max``
    on ``[0, duration)``.  ``CUSTOM`` linearly interpolates ``samples``, a
    pair of (times, Rabi frequencies) arrays, and is zero outside them.
    """

    kind: PulseKind
    omega_max: float
    duration: float
    detuning: float = 0.0
    direction: Direction = Direction.BACKWARD
    samples: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    def __post_init__(self):
        if not (math.isfinite(self.omega_max) and self.omega_max >= 0):
            raise InvalidArgument(f"omega_max must be >= 0, got {self.omega_max!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InvalidArgument(f"duration must be > 0, got {self.duration!r}")
        if self.kind is PulseKind.CUSTOM:
            if self.samples is None:
                raise InvalidArgument("custom pulse needs (times, values) samples")
            t, v = (np.asarray(a, dtype=float) for a in self.samples)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2 or np.any(np.diff(t) <= 0):
                raise InvalidArgument("custom pulse samples must be matching increasing 1-D arrays")
            object.__setattr__(self, "samples", (_frozen(t), _frozen(v)))

    def rabi(self, t):
        """Rabi frequency (rad/s) at time(s) ``t`` in seconds."""
        t = np.asarray(t, dtype=float)
        if self.kind is PulseKind.WRITE_RISING_EXPONENTIAL:
            return np.where(t <= 0, self.omega_max * np.exp(np.minimum(t, 0) / self.duration), 0.0)
        if self.kind is PulseKind.READ_SQUARE:
            return np.where((t >= 0) & (t < self.duration), self.omega_max, 0.0)
        times, values = self.samples
        return np.interp(t, times, values, left=0.0, right=0.0)


def write_pulse(omega_max: float, duration: float) -> PulseSpec:
    return PulseSpec(PulseKind.WRITE_RISING_EXPONENTIAL, omega_max, duration)


def pi_read_pulse(omega_r: float, direction: Direction = Direction.BACKWARD,
                  detuning: float = 0.0) -> PulseSpec:
    """Square read pulse with 2 * Omega_R * tau_R = pi."""
    if not omega_r > 0:
        raise InvalidArgument("a pi pulse needs omega_r > 0")
    return PulseSpec(PulseKind.READ_SQUARE, omega_r, math.pi / (2 * omega_r),
                     detuning=detuning, direction=direction)


def sampled_pulse(pulse: PulseSpec, times) -> PulseSpec:
    """Tabulate any pulse on ``times`` as a CUSTOM pulse with the same duration."""
    times = np.asarray(times, dtype=float)
    return PulseSpec(PulseKind.CUSTOM, pulse.omega_max, pulse.duration, pulse.detuning,
                     pulse.direction, samples=(times, pulse.rabi(times)))


# unit conversions

TWO_PI = 2.0 * math.pi


def mhz_to_rad_s(f_mhz: float) -> float:
    """Linear frequency in MHz to angular frequency in rad/s."""
    return TWO_PI * f_mhz * 1e6


def rad_s_to_mhz(omega: float) -> float:
    return omega / (TWO_PI * 1e6)


def to_dimensionless_time(t: float, gamma_eg: float) -> float:
    return t * gamma_eg


def to_seconds(t_dimless: float, gamma_eg: float) -> float:
    return t_dimless / gamma_eg


def to_dimensionless_rate(omega: float, gamma_eg: float) -> float:
    return omega / gamma_eg
