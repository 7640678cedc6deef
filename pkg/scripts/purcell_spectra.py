"""Purcell factor and rate relative to a coverslip for the three presets, both orientations."""

import argparse
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from strata import DipoleSource, preset, purcell
from strata.emission import coverslip_reference

PRESETS = ("au-pva", "au-pva-zns", "au-zns")


def job(args):
    name, wl = args
    r = purcell(preset(name), DipoleSource(wl, 25.0, 3))
    ref_stack, ref_dip = coverslip_reference(DipoleSource(wl, 25.0, 3))
    ref = purcell(ref_stack, ref_dip)
    return name, wl, r.gamma_perp, r.gamma_par, r.gamma_perp / ref.gamma_perp, r.gamma_par / ref.gamma_par


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--step", type=float, default=2.0, help="wavelength step in nm")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    wls = np.arange(650.0, 1000.0 + 1e-9, args.step)
    jobs = [(name, float(w)) for name in PRESETS for w in wls]
    with ProcessPoolExecutor(args.workers) as ex:
        rows = list(ex.map(job, jobs))

    with open(args.out / "purcell_spectra.csv", "w") as f:
        f.write("preset,wavelength_nm,fp_perp,fp_par,rel_coverslip_perp,rel_coverslip_par\n")
        for name, *vals in rows:
            f.write(name + "," + ",".join(f"{v:.10g}" for v in vals) + "\n")
    for name in PRESETS:
        fp = np.array([r[2] for r in rows if r[0] == name])
        print(f"{name}: Fp_perp {fp.min():.1f}-{fp.max():.1f}, peak at {wls[fp.argmax()]:.0f} nm")


if __name__ == "__main__":
    main()
