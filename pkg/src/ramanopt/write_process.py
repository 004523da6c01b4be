"""Resonant exponential write pulse, write-photon emission and heralded spin wave.

Fast optical phases are dropped throughout; only slowly varying envelopes
are kept.  Inputs here are physical (rad/s, seconds) since the write and
heralding windows are naturally specified that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, special

from .core import (
    AtomicEnsemble,
    InvalidArgument,
    PulseKind,
    PulseSpec,
    SpatialGrid,
    SpinWave,
    exponential_spin_wave,
    make_grid,
)
from .kernel import alpha_from_write

SPEED_OF_LIGHT = 299_792_458.0


class ResolutionError(ValueError):
    pass


def one_minus_exp_over(u):
    """(1 - exp(-u)) / u, equal to 1 at u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-8
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 - 0.5 * u, -np.expm1(-safe) / safe)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class WritePreparation:
    theta0_mag: float
    alpha_L: float
    excited_fraction: float


@dataclass(frozen=True)
class RegimeCondition:
    name: str
    expression: str
    left: float
    right: float
    satisfied: bool
    margin: float


@dataclass(frozen=True)
class RegimeReport:
    conditions: list[RegimeCondition] = field(default_factory=list)
    strictness: float = 10.0

    @property
    def passed(self) -> bool:
        return all(c.satisfied for c in self.conditions)

    def __getitem__(self, name: str) -> RegimeCondition:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)


def prepare_coherence_exponential(ensemble: AtomicEnsemble, pulse: PulseSpec) -> WritePreparation:
    """Coherence left on |g>-|e> by omega_max * exp(t/tau_W), switched off at t = 0.

    The profile modulus is ``theta0_mag * exp(-alpha_L * x / 2)``.
    """
    if pulse.kind is not PulseKind.WRITE_RISING_EXPONENTIAL:
        raise InvalidArgument("prepare_coherence_exponential needs a rising-exponential write pulse")
    gamma_tau = ensemble.gamma_eg * pulse.duration
    theta0 = pulse.omega_max * pulse.duration / (1.0 + gamma_tau)
    alpha_L = alpha_from_write(ensemble.d, gamma_tau)
    excited = theta0**2 * one_minus_exp_over(alpha_L)
    return WritePreparation(theta0, alpha_L, excited)


def coherence_profile_general(ensemble: AtomicEnsemble, pulse: PulseSpec, x: float, t: float) -> complex:
    """Envelope of sigma_ge at position ``x`` (units of L) and time ``t`` (s).

    Evaluates the causal convolution of the sampled input Rabi frequency with
    ``exp(-gamma_eg s) J0(2 sqrt(gamma_eg d s x))`` by Gauss quadrature on the
    pulse's sample intervals.  ``abs()`` of the result is the modulus.
    """
    if pulse.kind is not PulseKind.CUSTOM:
        raise InvalidArgument("coherence_profile_general needs a sampled (CUSTOM) pulse")
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"x must lie in [0, 1], got {x!r}")
    times, values = pulse.samples
    if np.max(np.diff(times)) > pulse.duration / 20.0:
        raise ResolutionError("time step exceeds duration / 20")
    edges = times[times < t]
    if edges.size == 0:
        return 0j
    edges = np.append(edges, min(t, times[-1]))
    if edges.size < 2 or edges[-1] <= edges[0]:
        return 0j
    # cubic interpolation of the drive, 6-point Gauss rule on every sample interval
    omega = interpolate.CubicSpline(times, values)
    tn, tw = np.polynomial.legendre.leggauss(6)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    tq = (mid[:, None] + half[:, None] * tn).ravel()
    wq = (half[:, None] * tw).ravel()
    s = ensemble.gamma_eg * (t - tq)
    kern = np.exp(-s) * special.j0(2.0 * np.sqrt(ensemble.d * s * x))
    return 1j * complex(np.dot(wq, kern * omega(tq)))


def write_photon_number(ensemble: AtomicEnsemble, prep: WritePreparation, tau_d: float) -> float:
    """Mean number of write photons emitted in the heralding window ``tau_d``."""
    if not tau_d > 0:
        raise InvalidArgument(f"tau_d must be > 0, got {tau_d!r}")
    return ensemble.d_bar * ensemble.gamma_es * tau_d * prep.excited_fraction


def spin_number(ensemble: AtomicEnsemble, prep: WritePreparation, tau_d: float) -> float:
    """Leading-order number of spin excitations after the heralding window.

    Equal to the write-photon number: each emitted Raman photon leaves one
    atom in |s>.
    """
    if not tau_d > 0:
        raise InvalidArgument(f"tau_d must be > 0, got {tau_d!r}")
    return ensemble.d_bar * ensemble.gamma_es * prep.theta0_mag**2 * one_minus_exp_over(prep.alpha_L) * tau_d


def _gain_rate(ensemble: AtomicEnsemble, prep: WritePreparation, x: np.ndarray) -> np.ndarray:
    # M(L, z) exp(-alpha z) in rad/s, written so alpha_L -> 0 stays finite
    a = prep.alpha_L
    base = ensemble.d_bar * ensemble.gamma_es * prep.theta0_mag**2
    return base * np.exp(-a * x) * (1.0 - x) * one_minus_exp_over(a * (1.0 - x))


def _h1_squared_decayed(gain: np.ndarray, gamma: float, u) -> np.ndarray:
    # exp(-2 gamma u) * I0(2 sqrt(gain u))^2, in scaled form
    u = np.asarray(u, dtype=float)
    z = 2.0 * np.sqrt(gain * u)
    return special.i0e(z) ** 2 * np.exp(2.0 * (z - gamma * u))


def write_flux(ensemble: AtomicEnsemble, prep: WritePreparation, t: float,
               include_noise_term: bool = False, grid: SpatialGrid | None = None,
               n_time: int = 64) -> float:
    """Write-photon flux (photons/s) leaving the sample at time ``t`` (s) after preparation.

    The noise contribution from the Langevin force on the |s>-|e> coherence
    is added when ``include_noise_term`` is set.
    """
    if not t >= 0:
        raise InvalidArgument(f"t must be >= 0, got {t!r}")
    grid = grid if grid is not None else make_grid(256)
    x, w = grid.nodes, grid.weights
    gamma = ensemble.gamma_es
    base = ensemble.d_bar * gamma * prep.theta0_mag**2
    if base == 0.0:
        return 0.0
    gain = _gain_rate(ensemble, prep, x)
    profile = w * np.exp(-prep.alpha_L * x)
    flux = base * float(profile @ _h1_squared_decayed(gain, gamma, t))
    if include_noise_term and t > 0:
        tn, tw = np.polynomial.legendre.leggauss(n_time)
        u = 0.5 * t * (tn + 1.0)
        vals = _h1_squared_decayed(gain[None, :], gamma, u[:, None]) @ profile
        flux += base * 2.0 * gamma * 0.5 * t * float(tw @ vals)
    return flux


def integrated_write_photons(ensemble: AtomicEnsemble, prep: WritePreparation, tau_d: float,
                             include_noise_term: bool = False, n_time: int = 64,
                             grid: SpatialGrid | None = None) -> float:
    """Time integral of :func:`write_flux` over [0, tau_d]."""
    if not tau_d > 0:
        raise InvalidArgument(f"tau_d must be > 0, got {tau_d!r}")
    tn, tw = np.polynomial.legendre.leggauss(n_time)
    ts = 0.5 * tau_d * (tn + 1.0)
    vals = [write_flux(ensemble, prep, t, include_noise_term, grid) for t in ts]
    return 0.5 * tau_d * float(np.dot(tw, vals))


def flux_variation(ensemble: AtomicEnsemble, prep: WritePreparation, tau_d: float,
                   n_samples: int = 101, grid: SpatialGrid | None = None) -> float:
    """max |F(t)/F(0) - 1| for the coherent flux over [0, tau_d]."""
    f0 = write_flux(ensemble, prep, 0.0, grid=grid)
    if f0 == 0.0:
        return 0.0
    ts = np.linspace(0.0, tau_d, n_samples)
    return max(abs(write_flux(ensemble, prep, t, grid=grid) / f0 - 1.0) for t in ts)


def heralded_spin_wave(prep: WritePreparation, grid: SpatialGrid) -> SpinWave:
    """Normalized spin wave projected by detecting one write photon."""
    return exponential_spin_wave(grid, prep.alpha_L)


def _condition(name, expression, left, right, strictness):
    margin = math.inf if right == 0 else left / right
    # relative slack absorbs round-off when a parameter is set to exactly strictness x threshold
    return RegimeCondition(name, expression, float(left), float(right),
                           bool(margin >= strictness * (1 - 1e-12)), float(margin))


def validate_regimes(ensemble: AtomicEnsemble, pulse: PulseSpec, tau_d: float,
                     read_pulse: PulseSpec | None = None, strictness: float = 10.0,
                     ground_splitting: float | None = None) -> RegimeReport:
    """Check every ``a >> b`` assumption of the write/read recipe as a ratio a/b.

    A condition is satisfied when its margin is at least ``strictness``.
    ``ground_splitting`` (rad/s) enables the phase-matching check.
    """
    if not strictness > 0:
        raise InvalidArgument("strictness must be > 0")
    prep = prepare_coherence_exponential(ensemble, pulse)
    geg, ges = ensemble.gamma_eg, ensemble.gamma_es
    conds = [
        _condition("weak_write", "1 >> Omega_W^max * tau_W",
                   1.0, pulse.omega_max * pulse.duration, strictness),
        _condition("short_write", "1/gamma_eg >> tau_W",
                   1.0 / geg, pulse.duration, strictness),
        _condition("detection_vs_gamma_es", "1/(2 gamma_es) >> tau_d",
                   1.0 / (2 * ges), tau_d, strictness),
        _condition("detection_vs_gamma_eg", "1/(2 gamma_eg) >> tau_d",
                   1.0 / (2 * geg), tau_d, strictness),
        _condition("single_excitation",
                   "[d_bar gamma_es |theta0|^2 (1 - exp(-alpha L))/(alpha L)]^-1 >> tau_d",
                   math.inf if prep.excited_fraction == 0 else
                   1.0 / (ensemble.d_bar * ges * prep.excited_fraction), tau_d, strictness),
    ]
    if ensemble.gamma_0 > 0:
        conds.append(_condition("detection_vs_gamma_0", "1/(2 gamma_0) >> tau_d",
                                1.0 / (2 * ensemble.gamma_0), tau_d, strictness))
    if read_pulse is not None:
        conds.append(_condition("read_strength", "2 Omega_R >> gamma_eg (1 + d)",
                                2 * read_pulse.omega_max, geg * (1 + ensemble.d), strictness))
        conds.append(_condition("pi_pulse_duration", "2 >> gamma_eg (1 + d) tau_R",
                                2.0, geg * (1 + ensemble.d) * read_pulse.duration, strictness))
    if ground_splitting is not None:
        conds.append(_condition("phase_matching", "1 >> |omega_e - omega_s| L / c",
                                1.0, abs(ground_splitting) * ensemble.length / SPEED_OF_LIGHT,
                                strictness))
    return RegimeReport(conds, strictness)
