"""Time-domain read-out of a stored spin wave.

Dimensionless variables: ``t = gamma_eg * time``, Rabi frequencies in units
of ``gamma_eg`` and the output field normalised so that ``|e_out|^2`` is the
photon flux per unit dimensionless time.

In the moving frame the read photon field has no time derivative, so it is
eliminated along the propagation coordinate ``xi`` (0 where the photon
field enters, 1 where it leaves):

    e(xi)  = i sqrt(d) * integral_0^xi P
    dP/dt  = -(1 + i Delta) P - d * integral_0^xi P + i Omega S
    dS/dt  = i conj(Omega) P

The emitted flux is ``d |integral_0^1 P|^2`` and the spontaneous loss rate
``2 integral |P|^2``; their sum exactly balances the decay of
``integral (|P|^2 + |S|^2)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate, special

from .core import (
    AtomicEnsemble,
    Direction,
    InvalidArgument,
    PulseKind,
    PulseSpec,
    QuadratureRule,
    SpatialGrid,
    SpinWave,
    reverse,
)
from .kernel import NORM_TOL


class IntegratorFailure(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class EmissionRecord:
    times: np.ndarray
    flux: np.ndarray
    emitted: np.ndarray
    loss: np.ndarray
    residual: np.ndarray
    efficiency: float
    residual_excitation: float
    initial: float = 1.0

    @property
    def budget_error(self) -> np.ndarray:
        return self.initial - self.emitted - self.loss - self.residual

    @property
    def max_budget_error(self) -> float:
        return float(np.max(np.abs(self.budget_error)))


@lru_cache(maxsize=16)
def _integration_matrix_cached(rule: QuadratureRule, n: int) -> np.ndarray:
    if rule is QuadratureRule.MIDPOINT:
        h = 1.0 / n
        c = np.tril(np.full((n, n), h), -1) + np.eye(n) * (0.5 * h)
    else:
        # interpolate on the Legendre basis, integrate the series exactly
        t, w = legendre.leggauss(n)
        vander = legendre.legvander(t, n - 1)
        to_coef = (vander * w[:, None]).T * ((2 * np.arange(n) + 1) / 2.0)[:, None]
        # int_{-1}^t P_k = (P_{k+1} - P_{k-1}) / (2k + 1), int P_0 = t + 1
        vplus = legendre.legvander(t, n)
        integ = np.empty((n, n))
        integ[:, 0] = t + 1.0
        k = np.arange(1, n)
        integ[:, 1:] = (vplus[:, 2:] - vplus[:, :-2]) / (2 * k + 1)
        c = 0.5 * integ @ to_coef
    c.setflags(write=False)
    return c


def integration_matrix(grid: SpatialGrid) -> np.ndarray:
    """Matrix C with (C f)_i ~ integral_0^{x_i} f, exact on the grid's quadrature.

    Satisfies ``W C + C^T W = w w^T`` so the discrete photon budget closes.
    """
    return _integration_matrix_cached(grid.rule, grid.n_points)


def _propagation_frame(spin: SpinWave, direction: Direction) -> np.ndarray:
    # xi runs with the emitted photon; a backward photon leaves through x = 0
    if Direction(direction) is Direction.BACKWARD:
        return reverse(spin).amplitude.astype(complex)
    return spin.amplitude.astype(complex)


def simulate_read(ensemble: AtomicEnsemble, spin0: SpinWave, read: PulseSpec,
                  t_end: float = 50.0, tol: float = 1e-9, excitation_floor: float = 1e-6,
                  method: str = "DOP853") -> EmissionRecord:
    """Integrate the read process and record photon-budget terms per accepted step.

    Integration stops at ``t_end`` or, once the control pulse is over, when
    the remaining excitation falls below ``excitation_floor``.
    """
    if not spin0.is_normalized(NORM_TOL):
        raise InvalidArgument(f"spin0 must be normalized (norm = {spin0.norm:.12g})")
    if not t_end > 0:
        raise InvalidArgument("t_end must be > 0")
    grid = spin0.grid
    n = grid.n_points
    w = grid.weights
    d = ensemble.d
    geg = ensemble.gamma_eg
    g0 = ensemble.gamma_0 / geg
    decay = 1.0 + 1j * read.detuning / geg
    cmat = integration_matrix(grid)

    if read.kind is PulseKind.READ_SQUARE:
        t_pulse = read.duration * geg
        phases = [(0.0, min(t_pulse, t_end), read.omega_max / geg, np.inf)]
    elif read.kind is PulseKind.CUSTOM:
        times, _ = read.samples
        t_pulse = max(times[-1] * geg, 0.0)
        # resolve the samples only while the drive is on; it is zero afterwards
        phases = [(0.0, min(t_pulse, t_end), None, float(np.min(np.diff(times))) * geg)]
    else:
        raise InvalidArgument("read pulse must be READ_SQUARE or CUSTOM")
    phases.append((min(t_pulse, t_end), t_end, 0.0, np.inf))

    def make_rhs(omega):
        def rhs(t, y):
            p = y[:n]
            s = y[n:2 * n]
            om = omega if omega is not None else float(read.rabi(t / geg)) / geg
            wp = w * p
            dp = -decay * p - d * (cmat @ p) + 1j * om * s
            ds = 1j * np.conj(om) * p - g0 * s
            out = np.empty_like(y)
            out[:n] = dp
            out[n:2 * n] = ds
            out[2 * n] = d * abs(wp.sum()) ** 2
            out[2 * n + 1] = 2.0 * np.real(np.vdot(p, wp)) + 2.0 * g0 * np.real(np.vdot(s, w * s))
            return out
        return rhs

    y = np.zeros(2 * n + 2, dtype=complex)
    y[n:2 * n] = _propagation_frame(spin0, read.direction)
    initial = float(np.real(np.vdot(y[n:2 * n], w * y[n:2 * n])))

    rec_t, rec_flux, rec_em, rec_loss, rec_res = [], [], [], [], []

    def record(t, y):
        p = y[:n]
        s = y[n:2 * n]
        rec_t.append(t)
        rec_flux.append(d * abs(np.dot(w, p)) ** 2)
        rec_em.append(y[2 * n].real)
        rec_loss.append(y[2 * n + 1].real)
        rec_res.append(float(np.real(np.vdot(p, w * p) + np.vdot(s, w * s))))

    record(0.0, y)
    t = 0.0
    done = False
    for t0, t1, omega, max_step in phases:
        if t1 <= t0 or done:
            continue
        solver_cls = getattr(integrate, method)
        solver = solver_cls(make_rhs(omega), t0, y, t1, rtol=tol, atol=tol * 1e-3,
                            max_step=max_step)
        while solver.status == "running":
            msg = solver.step()
            if solver.status == "failed":
                raise IntegratorFailure(f"read integration failed at t = {solver.t:.6g}: {msg}")
            t, y = solver.t, solver.y
            record(t, y)
            if t >= t_pulse and rec_res[-1] < excitation_floor:
                done = True
                break

    arrays = [np.asarray(a, dtype=float) for a in (rec_t, rec_flux, rec_em, rec_loss, rec_res)]
    return EmissionRecord(*arrays, efficiency=float(arrays[2][-1]),
                          residual_excitation=float(arrays[4][-1]), initial=initial)


def _exit_distance_frame(spin: SpinWave, direction: Direction) -> np.ndarray:
    # amplitude indexed by distance from the face the photon leaves through
    if Direction(direction) is Direction.BACKWARD:
        return spin.amplitude
    return reverse(spin).amplitude


def fast_retrieval_field(ensemble: AtomicEnsemble, spin0: SpinWave, t,
                         direction: Direction = Direction.BACKWARD):
    """Output field after an ideal instantaneous pi pulse, at dimensionless time(s) ``t``.

    ``|field|^2`` integrated over ``t`` is the retrieval efficiency.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidArgument("t must be >= 0")
    d = ensemble.d
    x, w = spin0.grid.nodes, spin0.grid.weights
    s = _exit_distance_frame(spin0, direction)
    arg = 2.0 * np.sqrt(d * np.multiply.outer(t_arr, x))
    field = -math.sqrt(d) * np.exp(-t_arr) * (special.j0(arg) @ (w * s))
    return complex(field) if field.ndim == 0 else field


def slow_retrieval_field(ensemble: AtomicEnsemble, spin0: SpinWave, omega_r: float, t,
                         direction: Direction = Direction.BACKWARD, strictness: float = 10.0):
    """Output field for a weak constant read drive ``omega_r`` (rad/s), adiabatic regime."""
    om = omega_r / ensemble.gamma_eg
    if 2.0 * om * strictness > 1.0:
        warnings.warn(f"2 Omega_R / gamma_eg = {2 * om:.3g} is not << 1; slow-readout "
                      "formula may be inaccurate", RuntimeWarning, stacklevel=2)
    return _slow_field(ensemble.d, om, spin0, t, direction)


def _slow_field(d, om, spin0, t, direction):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise InvalidArgument("t must be >= 0")
    x, w = spin0.grid.nodes, spin0.grid.weights
    s = _exit_distance_frame(spin0, direction)
    kt = om * om * t_arr
    dx = d * x
    z = 2.0 * np.sqrt(np.multiply.outer(kt, dx))
    # exp(-K t - d x) I0(2 sqrt(K t d x)) = i0e(z) exp(-(sqrt(Kt) - sqrt(dx))^2)
    gauss = np.exp(-(np.sqrt(kt)[..., None] - np.sqrt(dx)) ** 2)
    field = -math.sqrt(d) * om * ((special.i0e(z) * gauss) @ (w * s))
    return complex(field) if field.ndim == 0 else field


def _composite_gauss(t_max: float, n_panels: int, order: int = 16):
    tn, tw = legendre.leggauss(order)
    edges = np.linspace(0.0, t_max, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    ts = (mid[:, None] + half[:, None] * tn[None, :]).ravel()
    ws = (half[:, None] * tw[None, :]).ravel()
    return ts, ws


def fast_retrieval_efficiency(ensemble: AtomicEnsemble, spin0: SpinWave,
                              direction: Direction = Direction.BACKWARD,
                              t_max: float = 25.0, n_panels: int = 200) -> float:
    ts, ws = _composite_gauss(t_max, n_panels)
    field = fast_retrieval_field(ensemble, spin0, ts, direction)
    return float(ws @ np.abs(field) ** 2)


def slow_retrieval_efficiency(ensemble: AtomicEnsemble, spin0: SpinWave, omega_r: float,
                              direction: Direction = Direction.BACKWARD,
                              n_panels: int = 400) -> float:
    om = omega_r / ensemble.gamma_eg
    if not om > 0:
        raise InvalidArgument("omega_r must be > 0")
    # the integrand is negligible once sqrt(K t) exceeds sqrt(d) by ~8
    t_max = (math.sqrt(ensemble.d) + 8.0) ** 2 / (om * om)
    ts, ws = _composite_gauss(t_max, n_panels)
    field = _slow_field(ensemble.d, om, spin0, ts, direction)
    return float(ws @ np.abs(field) ** 2)


def pi_pulse_transfer_loss(ensemble: AtomicEnsemble, omega_r: float) -> float:
    """Worst-case fractional amplitude damping during a square pi pulse at ``omega_r`` (rad/s)."""
    if not omega_r > 0:
        raise InvalidArgument("omega_r must be > 0")
    tau_r = math.pi / (2.0 * omega_r)
    return -math.expm1(-0.5 * ensemble.gamma_eg * (1.0 + ensemble.d) * tau_r)
