"""Perpendicular dipole above a metal half-space versus closed-form limits.

The oracle is coded without the stack or quadrature machinery. Close to a
lossy metal the non-radiative rate of a perpendicular dipole splits into

* lossy surface waves, the quasi-static image-dipole term
  ``3 Im[(eps - 1)/(eps + 1)] / (8 (k d)^3)``, and
* the surface plasmon, the pole of r_p at ``s_p = sqrt(eps / (eps + 1))``,
  whose residue gives ``Re[(3/2) i pi s_p^3 / c_p Res(r_p) exp(2 i k c_p d)]``.

Their sum is compared with the solver's evanescent (s > 1) integral.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .emission import DipoleSource, EmissionProblem
from .materials import get_material
from .stack import LayerStack

DREXHAGE_TOLERANCE = 0.10
DREXHAGE_CHECK_GAPS = (2.0, 4.0, 6.0, 8.0, 10.0)


def _sqrt_up(z: complex) -> complex:
    r = cmath.sqrt(z)
    return -r if r.imag < 0 else r


def image_dipole_rate(eps: complex, k0: float, gap_nm: float) -> float:
    """Quasi-static image-dipole rate of a perpendicular dipole in vacuum above ``eps``."""
    R = (eps - 1) / (eps + 1)
    return 3.0 * R.imag / (8.0 * (k0 * gap_nm) ** 3)


def spp_pole_rate(eps: complex, k0: float, gap_nm: float) -> float:
    """Surface-plasmon pole contribution for a perpendicular dipole in vacuum above ``eps``."""
    sp = cmath.sqrt(eps / (eps + 1))
    if sp.real < 0:
        sp = -sp
    c1 = _sqrt_up(1 - sp * sp)
    c2 = _sqrt_up(eps - sp * sp)
    # r_p = (eps c1 - c2) / (eps c1 + c2) vanishes in the denominator at the pole
    residue = 2 * eps * c1 / (-sp * (eps / c1 + 1 / c2))
    return (1.5j * cmath.pi * sp**3 / c1 * residue * cmath.exp(2j * k0 * c1 * gap_nm)).real


@dataclass(frozen=True)
class DrexhageRow:
    gap_nm: float
    fp_total: float
    fp_radiative_window: float
    fp_evanescent: float
    oracle_image: float
    oracle_spp: float

    @property
    def oracle_nonradiative(self) -> float:
        return self.oracle_image + self.oracle_spp

    @property
    def rel_error(self) -> float:
        return abs(self.fp_evanescent - self.oracle_nonradiative) / self.oracle_nonradiative


def half_space(metal: str = "Au") -> LayerStack:
    return LayerStack(get_material(metal), (), get_material("vacuum"))


def drexhage_curve(gaps_nm, wavelength_nm: float = 650.0, metal: str = "Au") -> list[DrexhageRow]:
    """Solver decomposition and oracle terms for a perpendicular dipole at each gap."""
    stack = half_space(metal)
    eps = stack.lower.eps(wavelength_nm)
    k0 = 2 * np.pi / wavelength_nm
    rows = []
    for g in gaps_nm:
        prob = EmissionProblem(stack, DipoleSource(wavelength_nm, float(g), 1, 0.0))
        res = prob.integrate(1e-8)
        tot, prop = float(res.total[0]), float(res.propagating[0])
        rows.append(DrexhageRow(float(g), tot, prop, tot - prop,
                                image_dipole_rate(eps, k0, g), spp_pole_rate(eps, k0, g)))
    return rows


def monotone_after_peak(values) -> bool:
    """True if the sequence is non-increasing from its maximum onwards."""
    v = np.asarray(values, dtype=float)
    i = int(np.argmax(v))
    return bool(np.all(np.diff(v[i:]) <= 0))


@dataclass(frozen=True)
class DrexhageReport:
    rows: list[DrexhageRow]
    max_rel_error: float
    monotone: bool

    @property
    def passed(self) -> bool:
        return self.max_rel_error < DREXHAGE_TOLERANCE and self.monotone


def drexhage_validation(wavelength_nm: float = 650.0, metal: str = "Au",
                        gaps_nm=None) -> DrexhageReport:
    """Curve over 2-100 nm; agreement is judged on the 2-10 nm gaps."""
    if gaps_nm is None:
        gaps_nm = np.concatenate([np.arange(2.0, 20.0, 1.0), np.arange(20.0, 101.0, 5.0)])
    rows = drexhage_curve(gaps_nm, wavelength_nm, metal)
    check = [r for r in rows if r.gap_nm in DREXHAGE_CHECK_GAPS]
    err = max((r.rel_error for r in check), default=float("nan"))
    return DrexhageReport(rows, err, monotone_after_peak([r.fp_total for r in rows]))
