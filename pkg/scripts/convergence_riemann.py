"""L1(rho) of the expanding density jump against an N=5000 reference, for both time/space orders."""
import argparse

from flrwflow.cli import convergence_table
from flrwflow.cli_io import parse_config


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-end", type=float, default=1.1)
    ap.add_argument("--reference", type=int, default=5000)
    ap.add_argument("--grids", default="50,100,200,400")
    args = ap.parse_args()
    grids = [int(g) for g in args.grids.split(",")]
    base = parse_config(f"test = expanding_riemann\nt_end = {args.t_end}\n")
    for label, cfg in (("rk4 + second order", base),
                       ("euler + first order", base.replace(integrator="euler", space_order=1))):
        print(label)
        for n, l1, linf in convergence_table(cfg, grids, args.reference):
            print(f"  N={n:5d}  L1={l1:.4e}  Linf={linf:.4e}")


if __name__ == "__main__":
    main()
