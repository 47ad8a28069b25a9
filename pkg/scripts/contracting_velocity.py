"""Track how many cells keep a velocity away from {-1/eps, 0, 1/eps} as t approaches 0 from below."""
import argparse

import numpy as np

from flrwflow.cli_io import parse_config
from flrwflow.diagnostics import rescale_contracting, velocity_indicators
from flrwflow.driver import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=0.5)
    ap.add_argument("--t-end", type=float, default=-1e-12)
    ap.add_argument("--tol", type=float, default=0.05)
    args = ap.parse_args()
    times = [t for t in (-1e-2, -1e-3, -1e-4, -1e-5, -1e-6, -1e-8, -1e-10, -1e-12) if t <= args.t_end]
    cfg = parse_config(f"test = contracting_oscillatory\nk = {args.k}\nt_end = {args.t_end}\n"
                       f"snapshots = {','.join(map(str, times))}\n")
    r = run(cfg.to_runspec())
    print(f"{'t':>10} {'min rho':>11} {'max rho_tilde':>14} {'max dist':>9} {'outside':>8}")
    for s in r.snapshots:
        d = velocity_indicators(s.q, cfg.params())[0]
        rt = rescale_contracting(s.q, s.t, cfg.params())
        print(f"{s.t:10.2e} {s.q[0].min():11.3e} {rt.max():14.5f} {d.max():9.3e} {int((d > args.tol).sum()):8d}")


if __name__ == "__main__":
    main()
