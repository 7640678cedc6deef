"""Fp, QE, CE and CPR over 650-1000 nm for perpendicular and 45 degree dipoles in Au/ZnS."""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from strata import DipoleSource, cpr_spectrum, preset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--preset", default="au-zns")
    ap.add_argument("--na", type=float, default=0.95)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    stack = preset(args.preset)
    with open(args.out / "cpr_spectra.csv", "w") as f, ProcessPoolExecutor(args.workers) as ex:
        f.write("theta_deg,wavelength_nm,fp,qe,ce_rad,ce_tot,cpr\n")
        for theta in (0.0, 45.0):
            res = cpr_spectrum(stack, DipoleSource(650.0, 25.0, 3, theta), 650.0, 1000.0, 176,
                               na=args.na, map_fn=ex.map)
            for r in res:
                f.write(f"{theta:g}," + ",".join(f"{v:.10g}" for v in
                                                  (r.wavelength_nm, r.fp, r.qe, r.ce_rad, r.ce_tot, r.cpr)) + "\n")
            band = [r.cpr for r in res if r.wavelength_nm >= 700]
            print(f"theta {theta:g}: mean CPR over 700-1000 nm {np.nanmean(band):.4g}")


if __name__ == "__main__":
    main()
