"""Optimal spin-wave shapes and retrieval efficiencies for Raman single-photon sources."""

from .core import (
    AtomicEnsemble,
    Direction,
    PulseKind,
    PulseSpec,
    QuadratureRule,
    SpatialGrid,
    SpinWave,
    exponential_spin_wave,
    flat_spin_wave,
    make_grid,
    reverse,
)
from .kernel import (
    EfficiencyReport,
    RetrievalKernel,
    best_fit_exponential,
    build_kernel,
    efficiency,
    efficiency_report,
    flat_efficiency_analytic,
    optimal_spin_wave,
    tau_w_approx,
)

__version__ = "0.1.0"
