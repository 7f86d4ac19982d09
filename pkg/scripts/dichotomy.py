"""Sup norms of f_k = L^k f along chains at several |lambda|.

Unit-sphere chains stay flat in k; off-sphere chains grow or decay by |lambda|
per step.  Prints one table per scale.
"""
import argparse

import numpy as np

from nilharm.eigenchain import ChainSpec, ChainTerm, boundedness_summary, chain_sup_norms
from nilharm.nilgroup import group_from_name


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--group", default="heisenberg-1")
    parser.add_argument("--scales", type=float, nargs="+", default=[0.5, 1.0, 2.0])
    parser.add_argument("--kmax", type=int, default=6)
    parser.add_argument("--budget", type=int, default=1024)
    args = parser.parse_args()

    a = group_from_name(args.group)
    direction = np.zeros(a.k)
    direction[-1] = 1.0
    ks = range(-args.kmax, args.kmax + 1)
    for s in args.scales:
        spec = ChainSpec((ChainTerm(s * direction, (0,) * a.n, 1.0),))
        sups = chain_sup_norms(a, spec, ks, budget=args.budget)
        summary = boundedness_summary(sups)
        print(f"|lambda| = {s:g}  max/min = {summary['max_min_ratio']:.4g}")
        for k in ks:
            print(f"  k={k:+3d}  sup|f_k| ~ {sups[k]:.6e}")


if __name__ == "__main__":
    main()
