#!/usr/bin/env python3
"""Decay exponents of Q[bbk] and Q[psi_as] on generic and screen-approach rays.

Prints one CSV row per (ray, field) with the fitted slope and r^2.  Ray
directions come from a seeded generator so the table is reproducible.

    python scripts/headline_scan.py --rays 5 --samples 12 --out scan.csv
"""

import argparse
import csv
import sys

import numpy as np

from tricoul import residual as R
from tricoul.kinematics import JacobiMomentum

Q = JacobiMomentum.from_array((0.3, -0.5, 0.8, 0.6, 0.4, -0.2))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[1])
    ap.add_argument("--rays", type=int, default=5, help="rays per family")
    ap.add_argument("--samples", type=int, default=12)
    ap.add_argument("--t-min", type=float, default=1e2)
    ap.add_argument("--t-max", type=float, default=1e4)
    ap.add_argument("--x-fixed", type=float, default=3.0, help="|x_j| on screen rays")
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=505)
    ap.add_argument("--out")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    ts = R.geometric_t(args.t_min, args.t_max, args.samples)
    fields = {k: R.make_field(k, Q, args.alpha) for k in ("bbk", "psi_as")}
    rays = [("generic", 0, R.generic_ray(rng.normal(size=6), ts)) for _ in range(args.rays)]
    for i in range(args.rays):
        j = i % 3 + 1
        x = rng.normal(size=3)
        x *= args.x_fixed / np.linalg.norm(x)
        rays.append(("screen", j, R.screen_ray(j, x, rng.normal(size=3), ts)))

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["family", "pair", "ray", "field", "slope", "r2"])
    for n, (fam, j, ray) in enumerate(rays):
        for name, f in fields.items():
            fit = R.decay_fit(f, ray, Q, args.alpha, strict=False)
            w.writerow([fam, j, n, name, f"{fit.slope:.4f}", f"{fit.r_squared:.4f}"])
            fh.flush()
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
