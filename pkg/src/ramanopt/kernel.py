"""Complete-retrieval kernel, efficiencies and optimal spin waves.

For a spin wave ``S`` stored in the sample, the probability of retrieving it
as a photon through the ``z = 0`` face (backward read) once all excitation
has left the medium is

    eta = sum_ij w_i w_j conj(S(x_i)) k(x_i, x_j) S(x_j)

with ``k(x1, x2) = d/2 * exp(-d (x1 + x2) / 2) * I0(d sqrt(x1 x2))``, where
``x`` is the distance from the exit face in units of ``L``.  Retrieval
through the far face (forward read) is the same functional applied to the
mirrored spin wave.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Direction,
    IncompatibleGrids,
    InvalidArgument,
    NumericalFailure,
    SpatialGrid,
    SpinWave,
    exponential_spin_wave,
    flat_spin_wave,
    make_grid,
    reverse,
)
from .specfun import bessel_i_scaled, i0_product_exponent

NORM_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RetrievalKernel:
    d: float
    grid: SpatialGrid
    matrix: np.ndarray

    def weighted(self) -> np.ndarray:
        """Symmetric operator W^1/2 K W^1/2 whose spectrum gives the efficiencies."""
        sw = np.sqrt(self.grid.weights)
        return sw[:, None] * self.matrix * sw[None, :]


@dataclass(frozen=True)
class EfficiencyReport:
    d: float
    eta_star: float
    eta_res: float
    eta_fwd: float
    eta_offres: float
    alpha_L_used: float
    tau_w_used: float


def kernel_value(d: float, x1, x2):
    if not d > 0:
        raise InvalidArgument(f"d must be > 0, got {d!r}")
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if np.any((x1 < 0) | (x1 > 1)) or np.any((x2 < 0) | (x2 > 1)):
        raise InvalidArgument("kernel positions must lie in [0, 1]")
    k = 0.5 * d * i0_product_exponent(d * x1, d * x2)
    return float(k) if k.ndim == 0 else k


def build_kernel(d: float, grid: SpatialGrid) -> RetrievalKernel:
    x = grid.nodes
    m = kernel_value(d, x[:, None], x[None, :])
    # enforce exact symmetry regardless of how the broadcast was evaluated
    m = np.triu(m) + np.triu(m, 1).T
    m.setflags(write=False)
    return RetrievalKernel(float(d), grid, m)


def _check_spin(kernel: RetrievalKernel, spin: SpinWave):
    if not spin.grid.same_as(kernel.grid):
        raise IncompatibleGrids("spin wave and kernel live on different grids")
    if not spin.is_normalized(NORM_TOL):
        raise InvalidArgument(f"spin wave must be normalized (norm = {spin.norm:.12g})")


def _quadratic_form(kernel: RetrievalKernel, amplitude: np.ndarray) -> float:
    v = kernel.grid.weights * amplitude
    return float(np.real(np.vdot(v, kernel.matrix @ v)))


def efficiency(kernel: RetrievalKernel, spin: SpinWave,
               direction: Direction = Direction.BACKWARD) -> float:
    """Complete-retrieval efficiency of ``spin`` read out in ``direction``."""
    _check_spin(kernel, spin)
    if Direction(direction) is Direction.FORWARD:
        spin = reverse(spin)
    return _quadratic_form(kernel, spin.amplitude)


def power_iteration(a: np.ndarray, tol: float = 1e-12, max_iter: int = 100_000,
                    start: np.ndarray | None = None) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a symmetric matrix with a positive top eigenvalue.

    Stops when successive unit iterates differ by less than ``tol`` in the
    max norm.
    """
    n = a.shape[0]
    v = np.ones(n) if start is None else np.asarray(start, dtype=float).copy()
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        y = a @ v
        ny = np.linalg.norm(y)
        if ny == 0 or not math.isfinite(ny):
            raise NumericalFailure("power iteration collapsed to zero")
        y /= ny
        if np.max(np.abs(y - v)) < tol:
            return float(y @ (a @ y)), y
        v = y
    raise NumericalFailure(f"power iteration did not converge in {max_iter} iterations")


def optimal_spin_wave(d: float, grid: SpatialGrid | None = None,
                      kernel: RetrievalKernel | None = None) -> tuple[float, SpinWave]:
    """Best possible backward efficiency and the spin wave achieving it."""
    if not d > 0:
        raise InvalidArgument(f"d must be > 0, got {d!r}")
    if kernel is None:
        kernel = build_kernel(d, grid if grid is not None else make_grid(512))
    grid = kernel.grid
    _, v = power_iteration(kernel.weighted())
    amp = v / np.sqrt(grid.weights)
    if amp.mean() < 0:
        amp = -amp
    spin = SpinWave(grid, amp).normalized()
    # Rayleigh quotient on the normalized vector is the most accurate eigenvalue
    return _quadratic_form(kernel, spin.amplitude), spin


def flat_efficiency_analytic(d: float) -> float:
    """1 - exp(-d) (I0(d) + I1(d)), the flat-spin-wave efficiency."""
    if not d > 0:
        raise InvalidArgument(f"d must be > 0, got {d!r}")
    return 1.0 - (bessel_i_scaled(0, d) + bessel_i_scaled(1, d))


def tau_w_approx(d: float) -> float:
    """Write-pulse duration gamma_eg * tau_W giving a near-optimal shape."""
    if not d >= 0:
        raise InvalidArgument(f"d must be >= 0, got {d!r}")
    return 1.0 / (1.0 + 0.5 * d)


def alpha_from_write(d: float, gamma_tau: float) -> float:
    """Spatial decay constant alpha*L of the spin wave left by a write pulse."""
    if not gamma_tau > 0:
        raise InvalidArgument(f"gamma_tau must be > 0, got {gamma_tau!r}")
    if math.isinf(gamma_tau):
        return 2.0 * d
    return 2.0 * d * gamma_tau / (1.0 + gamma_tau)


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-10,
                       max_iter: int = 500) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi]; stop when the bracketed values
    differ by less than ``tol``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    e = a + _INV_PHI * (b - a)
    fc, fe = f(c), f(e)
    for _ in range(max_iter):
        if abs(fc - fe) < tol and (b - a) < 1e-6 * max(1.0, abs(hi)):
            break
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_PHI * (b - a)
            fe = f(e)
    # endpoints are admissible too
    cands = [(fc, c), (fe, e), (f(lo), lo), (f(hi), hi)]
    best = max(cands)
    return best[1], best[0]


def best_fit_exponential(d: float, grid: SpatialGrid | None = None,
                         kernel: RetrievalKernel | None = None) -> tuple[float, float]:
    """alpha*L in [0, 4d] maximizing the backward efficiency of an exponential wave."""
    if not d > 0:
        raise InvalidArgument(f"d must be > 0, got {d!r}")
    if kernel is None:
        kernel = build_kernel(d, grid if grid is not None else make_grid(512))

    def eta(alpha_L):
        return efficiency(kernel, exponential_spin_wave(kernel.grid, alpha_L))

    return golden_section_max(eta, 0.0, 4.0 * d)


def overlap(a: SpinWave, b: SpinWave) -> float:
    """|<a|b>|^2 with the grid's quadrature weights."""
    if not a.grid.same_as(b.grid):
        raise IncompatibleGrids("spin waves live on different grids")
    return float(abs(np.vdot(a.amplitude, a.grid.weights * b.amplitude)) ** 2)


def efficiency_report(d: float, grid: SpatialGrid | None = None) -> EfficiencyReport:
    """All four efficiencies compared in the retrieval table, for one depth."""
    grid = grid if grid is not None else make_grid(512)
    kernel = build_kernel(d, grid)
    gamma_tau = tau_w_approx(d)
    alpha_L = alpha_from_write(d, gamma_tau)
    spin = exponential_spin_wave(grid, alpha_L)
    eta_star, _ = optimal_spin_wave(d, kernel=kernel)
    return EfficiencyReport(
        d=float(d),
        eta_star=eta_star,
        eta_res=efficiency(kernel, spin, Direction.BACKWARD),
        eta_fwd=efficiency(kernel, spin, Direction.FORWARD),
        eta_offres=flat_efficiency_analytic(d),
        alpha_L_used=alpha_L,
        tau_w_used=gamma_tau,
    )


def flat_efficiency_numeric(d: float, grid: SpatialGrid | None = None) -> float:
    grid = grid if grid is not None else make_grid(512)
    return efficiency(build_kernel(d, grid), flat_spin_wave(grid))
