"""Map random points of the SL(2,R) Oshima space to the Riemann sphere and tally regions per orbit."""

import argparse
from collections import Counter

import numpy as np

from oshimalab import build_group
from oshimalab.lie import random_sl
from oshimalab.oshima import act, chordal, mobius, orbit_class, random_point, sl2_sphere, sphere_region


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)
    G = build_group("sl2r")
    rng = np.random.default_rng(args.seed)
    tally = Counter()
    worst = 0.0
    for k in range(args.samples):
        p = random_point(G, rng, pattern=[(k % 3) - 1])
        z = sl2_sphere(G, p)
        tally[(orbit_class(p).label(), sphere_region(z))] += 1
        g = random_sl(2, rng)
        worst = max(worst, chordal(sl2_sphere(G, act(g, p)), mobius(g, z)))
    for (cls, region), count in sorted(tally.items()):
        print(f"orbit {cls}: {count:5d} points in {region}")
    print(f"equivariance: max chordal distance {worst:.2e}")


if __name__ == "__main__":
    main()
