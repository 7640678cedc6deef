"""Far-field patterns, quantum efficiency and collection efficiency.

The power reaching a lossless cladding of index ``n_c`` is carried by the
plane-wave components with ``s = (n_c / n_host) sin(theta)``, theta being the
propagation angle in the cladding. With F(s) the transmitted flux per unit s
(host units) the phi-integrated pattern in vacuum-rate units is

    p(theta) = (n_c^2 / n_host) cos(theta) F(s) / s,

normalised so that the integral of ``p sin(theta)`` over both sides equals
QE * gamma_theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .emission import DipoleSource, EmissionProblem, orientation_weights, purcell
from .errors import DomainError, StrataError
from .quadrature import gauss_kronrod
from .stack import LayerStack

DEFAULT_DTHETA_DEG = 0.25
DEFAULT_NA = 0.95


@dataclass
class AngularPattern:
    side: str
    theta_deg: np.ndarray
    p: np.ndarray
    p_perp: np.ndarray
    p_par: np.ndarray
    n_cladding: float

    def trapezoid_power(self) -> float:
        """Radiated power on this side by the trapezoid rule on the sample grid."""
        th = np.radians(self.theta_deg)
        return float(np.trapezoid(self.p * np.sin(th), th))


@dataclass(frozen=True)
class CollectionResult:
    fp: float
    qe: float
    ce_rad: float
    ce_tot: float
    cpr: float
    na: float
    theta_max_deg: float
    wavelength_nm: float = float("nan")
    error: str | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None


def _side_index(prob: EmissionProblem, side: str) -> int:
    if side == "up":
        return prob.stack.n_media - 1
    if side == "down":
        return 0
    raise DomainError(f"side must be 'up' or 'down', got {side!r}")


def cladding_index(prob: EmissionProblem, side: str) -> float:
    """Real index of the cladding on ``side``; DomainError if it absorbs."""
    i = _side_index(prob, side)
    e = prob.eps[i]
    if e.real <= 0 or abs(e.imag) > 1e-12 * abs(e):
        name = prob.stack.medium(i).name
        raise DomainError(f"far field undefined in absorbing cladding {name!r} (eps={e:.4g})")
    return math.sqrt(e.real)


def _kink_angles(prob: EmissionProblem, n_c: float) -> list[float]:
    """Cladding angles (rad) where some medium's light line or the host's is crossed."""
    out = []
    for sp in prob.breakpoints() + [1.0]:
        x = sp * prob.n_host / n_c
        if 0 < x < 1:
            out.append(math.asin(x))
    return sorted(set(out))


def _pattern_components(prob: EmissionProblem, side: str, n_c: float, theta):
    """(p_perp, p_par) at cladding angles ``theta`` (rad)."""
    theta = np.asarray(theta, dtype=float)
    ratio = n_c / prob.n_host
    s = ratio * np.sin(theta)
    # c = 0 exactly gives 0/0 in the flux expressions; the limit is finite, so
    # step the angle just inside the host light line
    at_line = np.abs(s - 1.0) < 1e-12
    if np.any(at_line):
        theta = np.where(at_line, np.arcsin(min((1.0 - 1e-9) / ratio, 1.0)), theta)
        s = ratio * np.sin(theta)
    fperp, fpar = prob.cladding_flux(s, side, per_s=True)
    pref = n_c**2 / prob.n_host * np.cos(theta)
    return pref * fperp, pref * fpar


def angular_pattern(stack: LayerStack, dipole: DipoleSource, side: str = "up",
                    n_theta: int | None = None) -> AngularPattern:
    """Phi-integrated far-field power density p(theta) in the cladding on ``side``.

    The default grid has 0.25 degree spacing from 0 to 90 degrees inclusive.
    """
    prob = EmissionProblem(stack, dipole)
    n_c = cladding_index(prob, side)
    if n_theta is None:
        n_theta = int(round(90.0 / DEFAULT_DTHETA_DEG)) + 1
    if n_theta < 2:
        raise DomainError("n_theta must be >= 2")
    th_deg = np.linspace(0.0, 90.0, n_theta)
    pp, pl = _pattern_components(prob, side, n_c, np.radians(th_deg))
    wp, wl = orientation_weights(dipole.theta_deg)
    return AngularPattern(side, th_deg, wp * pp + wl * pl, pp, pl, n_c)


def _radiated(prob: EmissionProblem, side: str, theta_max: float, rtol: float) -> np.ndarray:
    """Integral of (p_perp, p_par) sin(theta) over [0, theta_max] on ``side``."""
    n_c = cladding_index(prob, side)
    if theta_max <= 0:
        return np.zeros(2)

    def f(th):
        pp, pl = _pattern_components(prob, side, n_c, th)
        return np.array([pp, pl]) * np.sin(th)

    pts = [k for k in _kink_angles(prob, n_c) if k < theta_max]
    res = gauss_kronrod(f, 0.0, theta_max, rtol=rtol, atol=1e-14, points=pts)
    return np.asarray(res.value, dtype=float)


@dataclass(frozen=True)
class PowerBudget:
    """Per-orientation totals in vacuum-rate units."""

    gamma: np.ndarray  # (perp, par)
    up: np.ndarray
    down: np.ndarray

    def mix(self, theta_deg):
        w = np.array(orientation_weights(theta_deg))
        return float(w @ self.gamma), float(w @ self.up), float(w @ self.down)


def power_budget(stack: LayerStack, dipole: DipoleSource, rtol: float = 1e-7) -> PowerBudget:
    prob = EmissionProblem(stack, dipole)
    rates = purcell(stack, dipole)
    up = _radiated(prob, "up", math.pi / 2, rtol)
    down = _radiated(prob, "down", math.pi / 2, rtol)
    return PowerBudget(np.array([rates.gamma_perp, rates.gamma_par]), up, down)


def quantum_efficiency(stack: LayerStack, dipole: DipoleSource) -> float:
    """Far-field radiated power over total dissipated power."""
    g, up, down = power_budget(stack, dipole).mix(dipole.theta_deg)
    return (up + down) / g


def net_flux_radiated(stack: LayerStack, dipole: DipoleSource, side: str, rtol: float = 1e-8) -> np.ndarray:
    """Outgoing flux at the dipole plane over the cladding's propagating window.

    Uses reflection coefficients only, so for a lossless stack it must agree
    with the transmitted power from :func:`angular_pattern`.
    """
    prob = EmissionProblem(stack, dipole)
    n_c = cladding_index(prob, side)
    s_end = n_c / prob.n_host
    pts = [p for p in prob.breakpoints() if p < s_end]

    def flux(s):
        return np.array(prob.net_flux(s)[side])

    t_end = math.pi / 2 if s_end >= 1 else math.asin(s_end)
    r = gauss_kronrod(lambda t: flux(np.sin(t)) * np.cos(t), 0.0, t_end, rtol=rtol, atol=1e-14,
                      points=[math.asin(p) for p in pts if p < 1])
    total = np.asarray(r.value, dtype=float)
    if s_end > 1:
        r2 = gauss_kronrod(lambda u: flux(np.cosh(u)) * np.sinh(u), 0.0, math.acosh(s_end), rtol=rtol,
                           atol=1e-14, points=[math.acosh(p) for p in pts if p > 1])
        total = total + r2.value
    return prob.n_host * total


def theta_max_deg(na: float, n_clad: float) -> float:
    if not 0 < na <= n_clad:
        raise DomainError(f"NA must be in (0, {n_clad:g}] for this cladding, got {na!r}")
    return math.degrees(math.asin(min(na / n_clad, 1.0)))


def collection(stack: LayerStack, dipole: DipoleSource, na: float = DEFAULT_NA, side: str = "up",
               rtol: float = 1e-7) -> CollectionResult:
    """Purcell factor, QE and the fraction of far-field power inside the NA cone."""
    prob = EmissionProblem(stack, dipole)
    n_c = cladding_index(prob, side)
    th_max = theta_max_deg(na, n_c)
    budget = power_budget(stack, dipole, rtol)
    g, up, down = budget.mix(dipole.theta_deg)
    cone = _radiated(prob, side, math.radians(th_max), rtol)
    w = np.array(orientation_weights(dipole.theta_deg))
    collected = float(w @ cone)
    radiated = up + down
    qe = radiated / g
    ce_rad = collected / radiated if radiated > 0 else 0.0
    ce_tot = qe * ce_rad
    return CollectionResult(g, qe, ce_rad, ce_tot, g * ce_tot, na, th_max, dipole.wavelength_nm)


def cpr_spectrum(stack: LayerStack, dipole: DipoleSource, wl_min: float, wl_max: float, n: int,
                 na: float = DEFAULT_NA, side: str = "up", map_fn=map) -> list[CollectionResult]:
    """Collection results on ``n`` evenly spaced wavelengths.

    A wavelength that fails is returned with NaN metrics and ``error`` set.
    ``map_fn`` may be an ordered parallel map such as ``Executor.map``.
    """
    if n < 1 or (n > 1 and not wl_max > wl_min):
        raise DomainError("need n >= 1 and wl_min < wl_max")
    wls = np.linspace(wl_min, wl_max, n) if n > 1 else np.array([wl_min])
    jobs = [(stack, dipole.at(wavelength_nm=float(w)), na, side) for w in wls]
    return list(map_fn(_cpr_job, jobs))


def _cpr_job(args) -> CollectionResult:
    stack, dip, na, side = args
    try:
        return collection(stack, dip, na, side)
    except StrataError as exc:
        nan = float("nan")
        return CollectionResult(nan, nan, nan, nan, nan, na, nan, dip.wavelength_nm,
                                error=f"{type(exc).__name__}: {exc}")
