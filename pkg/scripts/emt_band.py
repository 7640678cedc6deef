"""Effective permittivity of the 30/30 nm Au/ZnS multilayer over 650-1000 nm."""

import argparse
from pathlib import Path

import numpy as np

from strata import get_material, hyperbolicity_band


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    band = hyperbolicity_band(get_material("Au"), get_material("ZnS"), 30.0, 30.0, 650.0, 1000.0, 176)
    rows = [(b.wavelength_nm, b.eps_perp.real, b.eps_perp.imag, b.eps_par.real, b.eps_par.imag, b.is_hyperbolic)
            for b in band]
    np.savetxt(args.out / "emt_band.csv", rows, delimiter=",", fmt="%.10g",
               header="wavelength_nm,re_eps_perp,im_eps_perp,re_eps_par,im_eps_par,is_hyperbolic", comments="")
    n_hyp = sum(b.is_hyperbolic for b in band)
    print(f"hyperbolic at {n_hyp}/{len(band)} wavelengths")


if __name__ == "__main__":
    main()
