"""Recompute the regression constants used by the acceptance suite."""
import numpy as np

from flrwflow.cli_io import parse_config
from flrwflow.diagnostics import rescale_contracting
from flrwflow.driver import run


def main():
    for geom in ("bxa", "bxb"):
        cfg = parse_config(f"test = steady_b2\ngeometry = {geom}\nscheme = hll\n")
        r = run(cfg.to_runspec())
        dev = np.abs(r.final_q - r.initial.q).max(axis=1)
        print(f"hll steady drift {geom}: rho {float(dev[0])!r}  u {float(dev[1])!r}")
    cfg = parse_config("test = contracting_oscillatory\nk = 0.5\nsnapshots = -1e-2,-1e-3,-1e-4,-1e-5,-1e-6\n")
    r = run(cfg.to_runspec())
    peaks = [float(rescale_contracting(s.q, s.t, cfg.params()).max()) for s in r.snapshots]
    print(f"contracting rho_tilde peaks {peaks}; factor {max(peaks) / min(peaks)!r}")


if __name__ == "__main__":
    main()
