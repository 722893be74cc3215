"""Total-variation gap of the WS and NW product approximations over a probability sweep."""

import argparse
import csv
import sys

from cnsdist import models
from cnsdist.cns import convolution_identity


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--m", type=int, default=25)
    ap.add_argument("--p", type=float, nargs="+", default=[0.1, 0.05, 0.02, 0.01, 0.005])
    ap.add_argument("--distance", type=int, nargs="+", default=[1, 10, 25, 40, 300],
                    help="ring distances of the pairs to check")
    args = ap.parse_args(argv)
    w = csv.writer(sys.stdout)
    w.writerow(["model", "p", "distance", "total_variation"])
    for kind, make in (("ws", models.ws), ("nw", models.nw)):
        for p in args.p:
            model = make(args.n, args.m, p)
            for d in args.distance:
                lhs, rhs = convolution_identity(model, (0, d))
                w.writerow([kind, p, d, f"{lhs.total_variation(rhs):.6e}"])


if __name__ == "__main__":
    main()
