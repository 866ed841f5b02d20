"""Print window distances from H_(2^-n) to the limit subgroup, for sl2r and the four sl3r limits."""

import argparse
import csv
import sys

import numpy as np

from oshimalab import build_group
from oshimalab.fell import DEFAULT_EPS, DEFAULT_R, distance_table
from oshimalab.verify import fell_limit_targets


def paths(G, steps):
    if G.roots.rank == 1:
        yield "t=2^-n -> 0", [np.array([2.0**-k]) for k in range(1, steps + 1)], np.zeros(1)
        return
    for _, t_lim, _ in fell_limit_targets(G):
        label = "t -> (" + ",".join(f"{v:g}" for v in t_lim) + ")"
        zero = t_lim == 0.0
        seq = []
        for k in range(1, steps + 1):
            t = t_lim.copy()
            t[zero] = 2.0**-k
            if not zero.any():
                t = t_lim * (1.0 + 2.0**-k)
            seq.append(t)
        yield label, seq, t_lim


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--group", default="sl2r")
    ap.add_argument("--steps", type=int, default=10)
    ap.add_argument("--R", type=float, default=DEFAULT_R)
    ap.add_argument("--eps", type=float, default=DEFAULT_EPS)
    ap.add_argument("--csv", action="store_true", help="CSV on standard output")
    args = ap.parse_args(argv)
    G = build_group(args.group)
    writer = csv.writer(sys.stdout) if args.csv else None
    if writer:
        writer.writerow(["path", "n", "t", "window_distance"])
    for label, seq, t_lim in paths(G, args.steps):
        rows = distance_table(G, seq, t_lim, R=args.R, eps=args.eps)
        if not writer:
            print(f"# {G.name}: {label}  (R={args.R}, eps={args.eps})")
        for r in rows:
            t = ",".join(f"{v:.6g}" for v in r["t"])
            if writer:
                writer.writerow([label, r["step"] + 1, t, r["window_distance"]])
            else:
                print(f"n={r['step'] + 1:3d}  t=({t})  window distance {r['window_distance']:.3e}")


if __name__ == "__main__":
    main()
