"""Effective-medium description of a periodic metal/dielectric stack.

Subscripts follow one fixed convention: ``eps_perp`` is the thickness-weighted
arithmetic average (fields in the layer plane) and ``eps_par`` the harmonic
average (field along the stack axis),

    eps_perp = (eps_m d_m + eps_d d_d) / (d_m + d_d)
    1 / eps_par = (d_m / eps_m + d_d / eps_d) / (d_m + d_d).

The medium is hyperbolic when Re(eps_perp) * Re(eps_par) < 0. Iso-frequency
points obey k_par^2 / eps_par + k_perp^2 / eps_perp = 1 in units of omega/c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .materials import ComplexPermittivity, Material


@dataclass(frozen=True)
class EffectivePermittivity:
    eps_perp: complex
    eps_par: complex
    wavelength_nm: float
    fill_fraction_metal: float

    @property
    def is_hyperbolic(self) -> bool:
        return self.eps_perp.real * self.eps_par.real < 0


@dataclass(frozen=True)
class IsoFrequencyPoint:
    k_par: float
    k_perp: complex

    def residual(self, eff: EffectivePermittivity) -> complex:
        return self.k_par**2 / eff.eps_par + self.k_perp**2 / eff.eps_perp - 1


def _eps(x) -> complex:
    return complex(x.eps if isinstance(x, ComplexPermittivity) else x)


def effective_permittivity(eps_m, eps_d, d_m: float, d_d: float,
                           wavelength_nm: float = float("nan")) -> EffectivePermittivity:
    """Arithmetic/harmonic averages of two constituents of thickness d_m, d_d."""
    if d_m < 0 or d_d < 0 or not np.isfinite(d_m + d_d):
        raise DomainError(f"thicknesses must be finite and >= 0, got {d_m!r}, {d_d!r}")
    if d_m + d_d == 0:
        raise DomainError("at least one thickness must be positive")
    em, ed = _eps(eps_m), _eps(eps_d)
    if isinstance(eps_m, ComplexPermittivity):
        wavelength_nm = eps_m.wavelength_nm
    f = d_m / (d_m + d_d)
    # skip absent constituents so the pure limits are exact
    if f == 0:
        return EffectivePermittivity(ed, ed, wavelength_nm, 0.0)
    if f == 1:
        return EffectivePermittivity(em, em, wavelength_nm, 1.0)
    perp = (em * d_m + ed * d_d) / (d_m + d_d)
    par = (d_m + d_d) / (d_m / em + d_d / ed)
    return EffectivePermittivity(complex(perp), complex(par), wavelength_nm, f)


@dataclass(frozen=True)
class BandSample:
    wavelength_nm: float
    eps_perp: complex
    eps_par: complex
    is_hyperbolic: bool


def hyperbolicity_band(metal: Material, dielectric: Material, d_m: float, d_d: float,
                       wl_min: float, wl_max: float, n_points: int) -> list[BandSample]:
    """EMT components and classification on an even wavelength grid."""
    if not wl_min < wl_max:
        raise DomainError(f"need wl_min < wl_max, got {wl_min!r}, {wl_max!r}")
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points!r}")
    wls = np.linspace(wl_min, wl_max, n_points)
    em = np.atleast_1d(metal.eps(wls))
    ed = np.atleast_1d(dielectric.eps(wls))
    out = []
    for wl, a, b in zip(wls, em, ed):
        e = effective_permittivity(a, b, d_m, d_d, float(wl))
        out.append(BandSample(float(wl), e.eps_perp, e.eps_par, e.is_hyperbolic))
    return out


def iso_frequency_k_perp(eff: EffectivePermittivity, k_par: float) -> IsoFrequencyPoint:
    """k_perp = sqrt(eps_perp (1 - k_par^2 / eps_par)), branch Im >= 0."""
    k = np.sqrt(complex(eff.eps_perp * (1 - k_par**2 / eff.eps_par)))
    if k.imag < 0 or (k.imag == 0 and k.real < 0):
        k = -k
    return IsoFrequencyPoint(float(k_par), complex(k))
