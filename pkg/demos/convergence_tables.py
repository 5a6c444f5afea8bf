#!/usr/bin/env python3
"""Truncation-convergence tables for the jump-driven models.

Prices are computed with N = 2, 3, 5, 8 volatility modes and compared with
the N = 10 baseline; each cell is the relative absolute difference in
percent.  Two sweeps per model: delivery lag theta (T0 = 1, K = 1) and jump
intensity beta (T0 = 2, K = 2, theta = 1).

By default the exact no-arbitrage drift is used (the forward is a
martingale, so put-call parity holds to quadrature precision); pass
--published-drift to use the fixed-lag drift convention of the source
formulas instead.

Usage: python demos/convergence_tables.py [--published-drift]
"""

import argparse
from dataclasses import replace

from fwdsv import BasisSystem, JumpModelParams, NelsonSiegelCurve, PricingRequest
from fwdsv.pricer import convergence_table, format_percent

N_LIST = [2, 3, 5, 8, 10]


def print_table(title, rows, sweep_values):
    by_n = {}
    for value, n, pct in rows:
        by_n.setdefault(n, {})[value] = pct
    print(f"\n{title}")
    header = "    N " + "".join(f"{v:>9g}" for v in sweep_values)
    print(header)
    print("-" * len(header))
    for n in N_LIST[:-1]:
        cells = "".join(f"{format_percent(by_n[n][v]) + '%':>9}" for v in sweep_values)
        print(f"{n:5d} {cells}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--published-drift", action="store_true",
                    help="use the fixed-lag drift of the published closed forms")
    args = ap.parse_args()

    system = BasisSystem(alpha=0.1, n_max=10)
    curve = NelsonSiegelCurve()

    def build(factory, beta):
        m = factory(beta=beta, N=10)
        return m if args.published_drift else m.with_no_arbitrage_drift()

    thetas = [1.0, 3.0, 5.0, 10.0, 20.0]
    betas = [0.5, 1.0, 2.0, 5.0]
    for factory, name in ((JumpModelParams.levy, "pure-jump"),
                          (JumpModelParams.bns, "mean-reverting")):
        req = PricingRequest(model=build(factory, 1.0), T0=1.0, theta=1.0, K=1.0)
        rows = convergence_table(req, N_LIST, "theta", thetas, system, curve)
        print_table(f"{name}: price difference vs N=10, theta sweep (T0=1, K=1, beta=1)",
                    rows, thetas)

        req = PricingRequest(model=build(factory, 1.0), T0=2.0, theta=1.0, K=2.0)
        rows = convergence_table(req, N_LIST, "beta", betas, system, curve)
        print_table(f"{name}: price difference vs N=10, beta sweep (T0=2, K=2, theta=1)",
                    rows, betas)


if __name__ == "__main__":
    main()
