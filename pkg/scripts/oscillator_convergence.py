"""Convergence of the sampled Hermite operator residual in the grid size."""
import argparse

import numpy as np

from nilharm.schrodinger_rep import oscillator_residual


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--d", type=float, nargs="+", default=[1.0])
    parser.add_argument("--alpha", type=int, nargs="+", default=[2])
    args = parser.parse_args()

    sizes = [128, 256, 512, 1024, 2048]
    for richardson in (0, 1):
        errs = [oscillator_residual(tuple(args.d), tuple(args.alpha), points=p, richardson=richardson)
                for p in sizes]
        print(f"richardson levels = {richardson}")
        for i, (p, e) in enumerate(zip(sizes, errs)):
            order = f"{np.log2(errs[i - 1] / e):.2f}" if i else "-"
            print(f"  points={p:5d}  residual {e:.3e}  observed order {order}")


if __name__ == "__main__":
    main()
