"""Flow statistics: cone approach, asymptotic convergence, transitivity.

Run: python3 demos/flow_stats.py   (takes a minute or two)
"""
import math

import numpy as np

from conetrace import (
    PhaseCell,
    TangentState,
    builtin,
    cone_approach_experiment,
    convergence_profile,
    equidistant_reparam,
    state_at,
    trace,
    transitivity_scan,
)


def cone_approach(s):
    rows, quantiles = cone_approach_experiment(s, 50, 100.0, seed=1)
    print("running-min cone distance after length 100, 50 random trajectories:")
    for q, v in sorted(quantiles.items()):
        print(f"  q{int(q * 100):02d} = {v:.6f}")
    print("  (the closed cylinder core is the exception: it stays at sin(pi/8))")


def convergence(s):
    # two geodesics aimed at a common far target converge after reparametrization
    theta = 0.23
    qx, qy = 1000.0 * math.cos(theta), 1000.0 * math.sin(theta)
    pair = []
    for sgn in (-1.0, 1.0):
        bx, by = sgn * 0.5 * -math.sin(theta), sgn * 0.5 * math.cos(theta)
        pair.append(trace(s, TangentState(0, bx, by, math.atan2(qy - by, qx - bx)), 950.0))
    g1, g2 = pair
    c = equidistant_reparam(s, g1, g2)
    if c >= 0:
        g1 = trace(s, state_at(g1, c), 930.0)
    else:
        g2 = trace(s, state_at(g2, -c), 930.0)
    prof = convergence_profile(s, g1, g2, 920.0, n_samples=9)
    print(f"\naimed pair, equidistant shift c = {c:.6f}; distance profile:")
    for t, d in prof:
        print(f"  t={t:7.1f}  d={d:.6f}")


def transitivity(s):
    rng = np.random.default_rng(0)
    print("\ntransitivity scans (cells sharing a direction sector):")
    for k in range(3):
        idir = int(rng.integers(64))
        o = PhaseCell(0, 4, 8, idir)
        u = PhaseCell(0, 11, 8, idir)
        r = transitivity_scan(s, o, u, 100.0, 0.5, 1000, seed=k)
        print(f"  pair {k}: success={r.success} first_hit={r.report.first_hit} "
              f"t0_estimate={r.report.t0_estimate}")


def main():
    s = builtin("octagon6pi")
    cone_approach(s)
    convergence(s)
    transitivity(s)


if __name__ == "__main__":
    main()
