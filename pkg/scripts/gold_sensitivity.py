"""Au/ZnS perpendicular Purcell spectrum with tabulated vs Drude-Lorentz gold."""

import argparse
from pathlib import Path

import numpy as np

from strata import DipoleSource, purcell
from strata.stack import five_layer_stack


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    wls = np.arange(650.0, 1000.0 + 1e-9, 10.0)
    rows = []
    for wl in wls:
        vals = [purcell(five_layer_stack("ZnS", "ZnS", metal=m), DipoleSource(wl, 25.0, 3)).gamma_perp
                for m in ("Au", "Au-drude")]
        rows.append((wl, *vals))
    np.savetxt(args.out / "gold_sensitivity.csv", rows, delimiter=",", fmt="%.10g",
               header="wavelength_nm,fp_perp_tabulated,fp_perp_drude", comments="")
    rel = np.array([abs(a - b) / a for _, a, b in rows])
    print(f"max relative difference between gold models: {rel.max():.3f}")


if __name__ == "__main__":
    main()
