"""Low-polarization coefficient strings of NOE-based cooling.

Prints the converged polarization of every qubit in units of the bath
polarization, next to the expected integer series, for both compression modes.
"""

import argparse

from coolsim import InnerPolicy, ProtocolSpec, fixed_point
from coolsim.analytics import noe_hbac_coefficients
from coolsim.state import shifted_scaled_diagonal


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=7)
    ap.add_argument("--eps-b", type=float, default=1e-5)
    args = ap.parse_args(argv)
    # full-sort sub-chains converge more slowly as n grows
    inner = InnerPolicy(max_inner=2000)

    for mode in ("subset_three_bit_sort", "full_sort"):
        print(mode)
        for n in range(2, args.max_n + 1):
            fp = fixed_point(ProtocolSpec("noe_hbac", n, inner=inner, compression_mode=mode), args.eps_b)
            got = shifted_scaled_diagonal(fp.state, args.eps_b)
            print(f"  n={n}: {' '.join(f'{g:.3f}' for g in got)}"
                  f"  expected {list(noe_hbac_coefficients(n, mode))}  ({fp.rounds_used} rounds)")


if __name__ == "__main__":
    main()
