#!/usr/bin/env python3
"""Numbers behind the ThresholdConfig defaults (stdlib only).

eps_detect: a ball B_r counts as concentrating once it holds 5% of one
bubble's curvature energy 384 pi^2. The table shows the ball radius, in units
of the bubble scale, at which a standard bubble reaches a given fraction, so a
5% threshold fires at about 0.4 scales: well inside the bubble, yet above
what a smooth background on the desk-scale charts ever collects.

d'' (offset bound of essentially-same sequences): two sequences following one
bubble have centres differing by lattice quantization only, so their offset
|x1 - x2| / (r1 + r2) stays below about sqrt(n) h / (2 * 2 h) < 1 (scales are
at least 2h on the default radii). Sequences at the two_bubble centres use
concentration radii r_k = rho * lambda_k, rho the 5% radius above, so their
offsets grow like separation / (2 rho lambda_k). The second table prints
both; 3 sits between them over the whole family.
"""

import argparse
import math


def simpson(f, a, b, n=20000):
    h = (b - a) / n
    s = f(a) + f(b)
    for i in range(1, n):
        s += f(a + i * h) * (4 if i % 2 else 2)
    return s * h / 3


def energy_density(r):
    # R = 12 and dV = (2 / (1 + r^2))^4 |S^3| r^3 dr for the unit bubble.
    return 144.0 * (2.0 / (1.0 + r * r)) ** 4 * 2.0 * math.pi**2 * r**3


def bubble_energy_fraction(rho):
    total = 384.0 * math.pi**2
    return simpson(energy_density, 0.0, rho) / total


def radius_for_fraction(frac):
    lo, hi = 0.0, 100.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if bubble_energy_fraction(mid) < frac:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--dim", type=int, default=4)
    ap.add_argument("--spacing", type=float, default=2 * 1.5 / 40, help="chart spacing h")
    ap.add_argument("--separation", type=float, default=1.2, help="distance between the two bubble centres")
    ap.add_argument("--lambda-start", type=float, default=0.5)
    ap.add_argument("--lambda-ratio", type=float, default=0.82)
    ap.add_argument("--family-len", type=int, default=6)
    ap.add_argument("--level", type=float, default=0.05, help="eps_detect as a fraction of 384 pi^2")
    args = ap.parse_args()

    print("fraction of 384 pi^2   ball radius / bubble scale")
    for frac in (0.01, 0.02, 0.05, 0.1, 0.25, 0.5):
        print(f"{frac:>20.2f}   {radius_for_fraction(frac):.4f}")

    h = args.spacing
    same = math.sqrt(args.dim) * h / (2 * 2 * h)
    print(f"\nsame-bubble offset bound (quantization only): {same:.3f}")
    rho = radius_for_fraction(args.level)
    print(" k   lambda_k   r_k      two-bubble offset")
    lam = args.lambda_start
    for k in range(1, args.family_len + 1):
        r = rho * lam
        print(f"{k:>2}   {lam:.4f}   {r:.4f}   {args.separation / (2 * r):.3f}")
        lam *= args.lambda_ratio


if __name__ == "__main__":
    main()
