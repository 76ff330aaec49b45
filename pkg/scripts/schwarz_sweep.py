"""Sampled mixed-Schwarz constants over s and alpha for random matrices, written as CSV."""

import argparse
import csv
import sys

import numpy as np

from gramcert._rng import keyed_rng
from gramcert.schwarz import SchwarzProblem, optimize_s, schwarz_constant_exact


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--matrices", type=int, default=20)
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-o", "--output", default="-")
    args = ap.parse_args()

    s_grid = np.linspace(-0.5, 1.5, 9)
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    w = csv.writer(out, lineterminator="\r\n")
    w.writerow(["matrix", "m", "n", "alpha", "s", "sampled", "exact", "gap"])
    for idx in range(args.matrices):
        rng = keyed_rng(args.seed, "schwarz-sweep", idx)
        m, n = (int(v) for v in rng.integers(1, 9, size=2))
        T = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
        for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
            prob = SchwarzProblem(T, alpha)
            exact = schwarz_constant_exact(prob).constant
            opt = optimize_s(prob, s_grid, args.samples, seed=idx)
            for s, v in opt.values.items():
                w.writerow([idx, m, n, alpha, f"{s:g}", repr(v), repr(exact), repr(exact - v)])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
