"""Time-domain read-out for a sweep of read Rabi frequencies.

Shows the approach to the complete-retrieval efficiency as the pi pulse
gets faster, together with the photon-budget residual of each run.
"""

import argparse

from ramanopt.core import AtomicEnsemble, exponential_spin_wave, flat_spin_wave, make_grid, pi_read_pulse
from ramanopt.dynamics import pi_pulse_transfer_loss, simulate_read
from ramanopt.kernel import alpha_from_write, build_kernel, efficiency, optimal_spin_wave, tau_w_approx


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=float, default=20.0)
    ap.add_argument("--spin", choices=["flat", "exponential", "optimal"], default="exponential")
    ap.add_argument("--grid", type=int, default=256)
    ap.add_argument("--factors", type=float, nargs="+", default=[1, 3, 10, 30, 100])
    args = ap.parse_args()
    d = args.d
    grid = make_grid(args.grid)
    if args.spin == "flat":
        spin = flat_spin_wave(grid)
    elif args.spin == "optimal":
        spin = optimal_spin_wave(d, grid)[1]
    else:
        spin = exponential_spin_wave(grid, alpha_from_write(d, tau_w_approx(d)))
    ens = AtomicEnsemble(d=d, d_bar=d, gamma_eg=1.0, gamma_es=1.0)
    eta_k = efficiency(build_kernel(d, grid), spin)
    print(f"d = {d:g}, {args.spin} spin wave, kernel efficiency {eta_k:.6f}")
    print(f"{'factor':>8} {'eta':>10} {'rel err':>10} {'pulse loss':>11} {'budget':>10} {'steps':>6}")
    for f in args.factors:
        omega = f * 0.5 * (1.0 + d)
        rec = simulate_read(ens, spin, pi_read_pulse(omega))
        print(f"{f:>8g} {rec.efficiency:>10.6f} {rec.efficiency / eta_k - 1:>10.2e} "
              f"{pi_pulse_transfer_loss(ens, omega):>11.2e} {rec.max_budget_error:>10.1e} "
              f"{len(rec.times) - 1:>6d}")


if __name__ == "__main__":
    main()
