"""Two-qubit fixed points versus bath polarization for every two-qubit protocol.

Writes CSV with one row per bath polarization, simulated and closed-form.
"""

import argparse
import csv
import sys

import numpy as np

from coolsim import ProtocolSpec, fixed_point
from coolsim.analytics import predict_noe_asymptote, predict_ppa_asymptote, predict_sr_asymptote


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--start", type=float, default=0.01)
    ap.add_argument("--stop", type=float, default=0.9)
    ap.add_argument("--count", type=int, default=90)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args(argv)

    out = csv.writer(sys.stdout)
    out.writerow(["eps_b", "srg2_sim", "srg2_theory", "noe_sim", "noe_theory",
                  "ppa_sim", "ppa_theory"])
    for eps in np.linspace(args.start, args.stop, args.count):
        eps = float(eps)
        row = [eps]
        for kind, theory in [("srg2", predict_sr_asymptote(2, eps)),
                             ("noe", predict_noe_asymptote(eps)),
                             ("ppa", predict_ppa_asymptote(2, eps))]:
            row += [fixed_point(ProtocolSpec(kind, 2), eps, args.tol).eps_inf, theory]
        out.writerow([repr(x) for x in row])


if __name__ == "__main__":
    main()
