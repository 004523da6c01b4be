"""Feasibility numbers for the Rb-87 D2 preset, including regime margins."""

import argparse

from ramanopt import cli


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--strictness", type=float, default=10.0)
    ap.add_argument("--tau-d-us", type=float, default=None)
    args = ap.parse_args()
    cfg = cli.RunConfig("feasibility", preset="rb87", strictness=args.strictness,
                        tau_d_us=args.tau_d_us).validate()
    rep = cli.cmd_feasibility(cfg)
    print(f"tau_W            {rep['tau_w_s'] * 1e9:.2f} ns   (gamma_eg tau_W = {rep['gamma_eg_tau_w']:.4f})")
    print(f"alpha L          {rep['alpha_l']:.4f}")
    print(f"|theta0|         {rep['theta0_mag']:.4e}")
    print(f"n_w              {rep['n_w']:.3e}")
    print(f"Omega_R >>       2 pi x {rep['omega_r_threshold_mhz']:.3f} MHz")
    print(f"eta_res          {rep['eta_res']:.4f}   (eta* = {rep['eta_star']:.4f}, "
          f"flat = {rep['eta_offres']:.4f})")
    print(f"\nregime checks at strictness {rep['strictness']:g}:")
    for c in rep["regimes"]:
        flag = "ok  " if c["satisfied"] else "FAIL"
        print(f"  {flag} {c['name']:<24} margin {c['margin']:9.3f}   {c['expression']}")


if __name__ == "__main__":
    main()
