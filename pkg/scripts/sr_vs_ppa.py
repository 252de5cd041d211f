"""Maximum polarization of state-reset cooling and PPA for several register sizes.

Long-format CSV: protocol, n, eps_b, simulated fixed point, closed form.
"""

import argparse
import csv
import sys

import numpy as np

from coolsim import ProtocolSpec, fixed_point
from coolsim.analytics import predict_ppa_asymptote, predict_sr_asymptote


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4, 5])
    ap.add_argument("--count", type=int, default=45)
    ap.add_argument("--stop", type=float, default=0.9)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout)
    out.writerow(["protocol", "n", "eps_b", "eps_max_sim", "eps_max_theory"])
    grid = np.linspace(args.stop / args.count, args.stop, args.count)
    predictors = {"srgn": predict_sr_asymptote, "ppa": predict_ppa_asymptote}
    for kind, predictor in predictors.items():
        for n in args.n:
            for eps in grid:
                eps = float(eps)
                sim = fixed_point(ProtocolSpec(kind, n), eps, args.tol).eps_inf
                out.writerow([kind, n, repr(eps), repr(sim), repr(predictor(n, eps))])


if __name__ == "__main__":
    main()
