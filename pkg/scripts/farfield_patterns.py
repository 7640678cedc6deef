"""Far-field patterns at 900 nm for a vertical dipole on glass and inside the Au/ZnS stack."""

import argparse
from pathlib import Path

from strata import DipoleSource, angular_pattern, collection, preset
from strata.farfield import power_budget

CASES = {
    "coverslip": (preset("coverslip"), DipoleSource(900.0, 20.0, 1)),
    "au-zns": (preset("au-zns"), DipoleSource(900.0, 25.0, 3)),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    with open(args.out / "farfield_patterns.csv", "w") as f:
        f.write("case,side,theta_deg,p\n")
        for name, (stack, dip) in CASES.items():
            for side in ("up", "down"):
                pat = angular_pattern(stack, dip, side)
                for th, p in zip(pat.theta_deg, pat.p):
                    f.write(f"{name},{side},{th:.4g},{p:.10g}\n")
            g, up, down = power_budget(stack, dip).mix(dip.theta_deg)
            c = collection(stack, dip)
            print(f"{name}: up {up / g:.3g}, down {down / g:.3g}, absorbed {1 - (up + down) / g:.4g}, "
                  f"CE(NA 0.95, up) {c.ce_tot:.3g}")


if __name__ == "__main__":
    main()
