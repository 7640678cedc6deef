"""Decay-rate enhancement of a point dipole inside a planar stack.

The power dissipated by the dipole is written as an integral over the
normalized in-plane wavevector ``s = k_par / k_host``. With ``c = sqrt(1 - s^2)``
(branch Im >= 0), ``A = r_up exp(2 i kz d_up)`` and ``B = r_down exp(2 i kz d_down)``:

    K_perp(s) = 3/2 Re[ s^3 / c * (1 + A_p)(1 + B_p) / (1 - A_p B_p) ]
    K_par(s)  = 3/4 Re[ s / c * ( (1 + A_s)(1 + B_s) / (1 - A_s B_s)
                                  + c^2 (1 - A_p)(1 - B_p) / (1 - A_p B_p) ) ]

Both integrate to 1 with no interfaces, i.e. they are normalised to the same
dipole in the unbounded host medium. Rates returned by :func:`purcell` are
converted to vacuum units by multiplying with the host index.

Integration runs in ``t`` with ``s = sin t`` on the propagating window and in
``u`` with ``s = cosh u`` on the evanescent tail; both substitutions cancel the
``1 / c`` endpoint singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .quadrature import gauss_kronrod
from .stack import LayerStack, _response

# floor on Im(eps) for lossless negative-permittivity media; keeps poles off the real axis
MIN_METAL_LOSS = 1e-6

S_MAX_FLOOR = 10.0
S_MAX_CEILING = 1000.0
TAIL_RTOL = 1e-9
TAIL_POWER = 3.0


@dataclass(frozen=True)
class DipoleSource:
    """Dipole at ``z_nm`` inside medium ``host_layer``.

    For a finite layer ``z_nm`` is measured up from the layer's lower boundary.
    If the host is a cladding, ``z_nm`` is the distance to its only interface.
    ``theta_deg`` is the angle between the dipole and the stack normal.
    """

    wavelength_nm: float
    z_nm: float
    host_layer: int
    theta_deg: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.wavelength_nm) and self.wavelength_nm > 0):
            raise DomainError(f"wavelength must be positive, got {self.wavelength_nm!r}")
        if not 0.0 <= self.theta_deg <= 90.0:
            raise DomainError(f"theta_deg must be in [0, 90], got {self.theta_deg!r}")

    def moved(self, dz: float) -> "DipoleSource":
        return DipoleSource(self.wavelength_nm, self.z_nm + dz, self.host_layer, self.theta_deg)

    def at(self, *, wavelength_nm=None, theta_deg=None, z_nm=None) -> "DipoleSource":
        return DipoleSource(
            self.wavelength_nm if wavelength_nm is None else wavelength_nm,
            self.z_nm if z_nm is None else z_nm,
            self.host_layer,
            self.theta_deg if theta_deg is None else theta_deg,
        )


def orientation_weights(theta_deg):
    th = math.radians(theta_deg)
    return math.cos(th) ** 2, math.sin(th) ** 2


@dataclass(frozen=True)
class DecayRates:
    """Purcell factors in units of the vacuum rate."""

    gamma_perp: float
    gamma_par: float
    theta_deg: float = 0.0
    err_estimate: float = 0.0

    @property
    def gamma_theta(self) -> float:
        wp, wl = orientation_weights(self.theta_deg)
        return self.gamma_perp * wp + self.gamma_par * wl

    def at_angle(self, theta_deg) -> "DecayRates":
        return DecayRates(self.gamma_perp, self.gamma_par, theta_deg, self.err_estimate)


@dataclass
class DissipationSpectrum:
    """Normalised dP/ds per orientation, host-medium units."""

    s: np.ndarray
    K_perp: np.ndarray
    K_par: np.ndarray


def host_bounds(stack: LayerStack, host: int):
    """Admissible z range (open interval) for a dipole in medium ``host``."""
    last = stack.n_media - 1
    if not 0 <= host <= last:
        raise DomainError(f"host_layer must be in 0..{last}, got {host}")
    if stack.n_media == 2 or host in (0, last):
        return 0.0, np.inf
    return 0.0, stack.thickness(host)


class EmissionProblem:
    """Precomputed geometry and permittivities for one (stack, dipole) pair."""

    def __init__(self, stack: LayerStack, dipole: DipoleSource):
        self.stack = stack
        self.dipole = dipole
        h = dipole.host_layer
        lo, hi = host_bounds(stack, h)
        z = dipole.z_nm
        if not (np.isfinite(z) and lo < z < hi):
            raise DomainError(
                f"dipole z={z!r} nm outside host medium {h}; admissible range is "
                f"({lo:g}, {hi:g}) nm, endpoints excluded"
            )
        last = stack.n_media - 1
        wl = dipole.wavelength_nm
        eps = stack.eps(wl).astype(complex)
        lossless_metal = (eps.real < 0) & (eps.imag < MIN_METAL_LOSS)
        eps[lossless_metal] = eps[lossless_metal].real + 1j * MIN_METAL_LOSS
        eh = eps[h]
        if eh.real <= 0 or abs(eh.imag) > 1e-12 * abs(eh):
            raise DomainError(f"host medium {stack.medium(h).name!r} must be a lossless dielectric (eps={eh})")
        self.eps = eps
        self.eps_host = eh.real
        self.n_host = math.sqrt(eh.real)
        self.k0 = 2 * math.pi / wl
        self.k_host = self.k0 * self.n_host
        self.thick = [stack.thickness(i) for i in range(stack.n_media)]
        if h == last:
            self.d_up, self.d_down = np.inf, z
        elif h == 0:
            self.d_up, self.d_down = z, np.inf
        else:
            self.d_up, self.d_down = self.thick[h] - z, z
        self.up_idx = list(range(h, last + 1))
        self.down_idx = list(range(h, -1, -1))

    # -- coefficients ---------------------------------------------------
    def responses(self, s):
        up = _response(self.eps, self.thick, self.up_idx, self.n_host, s, self.k0)
        dn = _response(self.eps, self.thick, self.down_idx, self.n_host, s, self.k0)
        return up, dn

    @staticmethod
    def host_c(s):
        c = np.sqrt(1.0 - np.asarray(s, dtype=complex) ** 2)
        return np.where(c.imag < 0, -c, c)

    def _round_trip(self, c, d):
        if np.isinf(d):
            return np.zeros_like(c)
        return np.exp(2j * self.k_host * c * d)

    def round_trips(self, s):
        """(A, B, c, up, down) with A/B keyed by polarization."""
        s = np.asarray(s, dtype=float)
        c = self.host_c(s)
        up, dn = self.responses(s)
        eu = self._round_trip(c, self.d_up)
        ed = self._round_trip(c, self.d_down)
        A = {pol: up.r(pol) * eu for pol in "sp"}
        B = {pol: dn.r(pol) * ed for pol in "sp"}
        return A, B, c, up, dn

    # -- kernels ------------------------------------------------------------
    @staticmethod
    def _brackets(A, B, c):
        fp = (1 + A["p"]) * (1 + B["p"]) / (1 - A["p"] * B["p"])
        fs = (1 + A["s"]) * (1 + B["s"]) / (1 - A["s"] * B["s"])
        gp = (1 - A["p"]) * (1 - B["p"]) / (1 - A["p"] * B["p"])
        return fp, fs, gp

    def kernels(self, s):
        """K_perp(s), K_par(s); infinite at s = 1 exactly."""
        s = np.asarray(s, dtype=float)
        A, B, c, _, _ = self.round_trips(s)
        fp, fs, gp = self._brackets(A, B, c)
        with np.errstate(divide="ignore", invalid="ignore"):
            kperp = 1.5 * np.real(s**3 / c * fp)
            kpar = 0.75 * np.real(s / c * (fs + c**2 * gp))
        return kperp, kpar

    def integrand_propagating(self, t):
        """K ds/dt for s = sin t, t in [0, pi/2]."""
        s = np.sin(t)
        A, B, c, _, _ = self.round_trips(s)
        fp, fs, gp = self._brackets(A, B, c)
        cr = np.cos(t)
        return np.array([1.5 * np.real(s**3 * fp), 0.75 * np.real(s * (fs + cr**2 * gp))])

    def integrand_evanescent(self, u):
        """K ds/du for s = cosh u."""
        s = np.cosh(u)
        A, B, c, _, _ = self.round_trips(s)
        fp, fs, gp = self._brackets(A, B, c)
        w2 = np.sinh(u) ** 2
        return np.array([1.5 * s**3 * np.imag(fp), 0.75 * s * np.imag(fs - w2 * gp)])

    # -- fluxes ---------------------------------------------------------------
    def source_amplitudes(self, A, B):
        """Upward/downward plane-wave amplitudes at the dipole plane.

        Keys are (orientation, pol); the horizontal dipole's p-wave is
        antisymmetric in z for H_y.
        """
        out = {}
        for key, pol, sign in (("perp", "p", 1.0), ("par_s", "s", 1.0), ("par_p", "p", -1.0)):
            a, b = A[pol], B[pol]
            den = 1 - a * b
            out[key] = ((1 + sign * b) / den, (sign + a) / den, pol)
        return out

    @staticmethod
    def weights(s, c):
        """Per-side source weights W (so that K_free = 2 W |1/c|^2 Re c)."""
        return {
            "perp": 0.75 * s**3,
            "par_s": 0.375 * s,
            "par_p": 0.375 * s * np.abs(c) ** 2,
        }

    def net_flux(self, s):
        """Net power per ds leaving a thin slab around the dipole, up and down.

        Uses reflection coefficients only. Returns dict side -> (perp, par).
        """
        s = np.asarray(s, dtype=float)
        A, B, c, _, _ = self.round_trips(s)
        amps = self.source_amplitudes(A, B)
        W = self.weights(s, c)
        inv_c2 = 1.0 / np.abs(c) ** 2
        res = {"up": {}, "down": {}}
        for key, (u_up, u_dn, pol) in amps.items():
            a, b = A[pol], B[pol]
            fu = np.real((1 + a) * np.conj(c * (1 - a)))
            fd = np.real((1 + b) * np.conj(c * (1 - b)))
            res["up"][key] = W[key] * inv_c2 * np.abs(u_up) ** 2 * fu
            res["down"][key] = W[key] * inv_c2 * np.abs(u_dn) ** 2 * fd
        return {side: (v["perp"], v["par_s"] + v["par_p"]) for side, v in res.items()}

    def cladding_flux(self, s, side, *, per_s=False):
        """Power per ds delivered to the far cladding on ``side`` (transmission route).

        Zero where the cladding does not propagate. With ``per_s`` the result
        is divided by s analytically (finite at s = 0).
        """
        s = np.asarray(s, dtype=float)
        A, B, c, up, dn = self.round_trips(s)
        amps = self.source_amplitudes(A, B)
        resp, d = (up, self.d_up) if side == "up" else (dn, self.d_down)
        phase = np.ones_like(c) if np.isinf(d) else np.exp(1j * self.k_host * c * d)
        W = self.weights(s, c)
        if per_s:
            W = {"perp": 0.75 * s**2, "par_s": 0.375 * np.ones_like(s), "par_p": 0.375 * np.abs(c) ** 2}
        with np.errstate(divide="ignore", invalid="ignore"):
            inv_c2 = 1.0 / np.abs(c) ** 2
            out = {}
            for key, (u_up, u_dn, pol) in amps.items():
                amp = u_up if side == "up" else u_dn
                q_ref = self.n_host if pol == "s" else 1.0 / self.n_host
                flux = np.abs(amp * phase * resp.t(pol)) ** 2 * np.maximum(resp.q_far[pol].real, 0.0) / q_ref
                out[key] = W[key] * inv_c2 * flux
        return out["perp"], out["par_s"] + out["par_p"]

    # -- integration ----------------------------------------------------------
    def breakpoints(self):
        """Light lines of every other medium, plus planar plasmon estimates, in s."""
        pts = set()
        nr = np.sqrt(self.eps).real
        for i, e in enumerate(self.eps):
            if i == self.dipole.host_layer:
                continue
            if abs(e.imag) < 0.1 * abs(e) and e.real > 0:
                pts.add(float(nr[i] / self.n_host))
        for i in range(len(self.eps) - 1):
            e1, e2 = self.eps[i], self.eps[i + 1]
            if (e1.real < 0) != (e2.real < 0) and (e1 + e2) != 0:
                sp = np.sqrt(e1 * e2 / (e1 + e2)).real / self.n_host
                if np.isfinite(sp) and sp > 0:
                    pts.add(float(sp))
        return sorted(p for p in pts if p > 0 and abs(p - 1.0) > 1e-9)

    def d_min(self):
        return min(self.d_up, self.d_down)

    def integrate(self, rtol=1e-6) -> "PowerIntegral":
        """Total normalised power (perp, par) with error estimates.

        The propagating window s < 1 is kept separately as ``propagating``.
        The evanescent range is integrated in chunks of doubling s_max until
        the tail bound |K(s_max)| / (2 k_host d_min - 3 / s_max) falls below
        1e-9 of the running total.
        """
        pts = self.breakpoints()
        tp = [math.asin(p) for p in pts if p < 1]
        res = gauss_kronrod(self.integrand_propagating, 0.0, math.pi / 2, rtol=rtol, points=tp)
        prop = np.array(res.value, dtype=float)
        total = prop.copy()
        err = np.array(res.error, dtype=float)
        converged = res.converged
        ev_pts = [p for p in pts if p > 1]
        s_hi = min(max(S_MAX_FLOOR, 1.5 * max(ev_pts, default=0.0)), S_MAX_CEILING)
        s_lo = 1.0
        dmin = self.d_min()
        alpha = 2 * self.k_host * dmin
        while True:
            u_lo, u_hi = math.acosh(s_lo), math.acosh(s_hi)
            up = [math.acosh(p) for p in ev_pts if s_lo < p < s_hi]
            atol = 0.1 * rtol * float(np.max(np.abs(total)))
            r = gauss_kronrod(self.integrand_evanescent, u_lo, u_hi, rtol=rtol, atol=atol, points=up)
            total = total + r.value
            err = err + r.error
            converged &= r.converged
            k_end = np.abs(np.array(self.kernels(np.array([s_hi])))[:, 0])
            # K <= C s^3 exp(-alpha s) past the last pole, whose tail integral
            # is bounded by K(s_hi) / (alpha - 3 / s_hi)
            rate = alpha - TAIL_POWER / s_hi
            tail = k_end / rate if rate > 0 else np.full(2, np.inf)
            if np.all(tail <= TAIL_RTOL * np.maximum(np.abs(total), 1e-300)):
                break
            if s_hi >= S_MAX_CEILING:
                raise AccuracyError(
                    f"evanescent tail not converged at s_max={S_MAX_CEILING:g} "
                    f"(tail estimate {tail.max():.3g} vs integral {np.abs(total).max():.3g}); "
                    "dipole too close to an interface",
                    estimate=float(tail.max()),
                )
            s_lo, s_hi = s_hi, min(2 * s_hi, S_MAX_CEILING)
        if not converged:
            raise AccuracyError(
                f"quadrature did not reach rtol={rtol:g} (error estimate {err.max():.3g})",
                estimate=float(err.max()),
            )
        return PowerIntegral(total, err, prop, s_hi)


@dataclass
class PowerIntegral:
    total: np.ndarray
    error: np.ndarray
    propagating: np.ndarray
    s_max: float


def dissipation_spectrum(stack: LayerStack, dipole: DipoleSource, s_grid) -> DissipationSpectrum:
    """Sample K_perp, K_par on ``s_grid``.

    ``s_grid`` is an array of s values or a ``(s_max, n)`` pair for a uniform
    grid from 0. Samples landing exactly on the host light line s = 1, where
    the kernels diverge integrably, are moved to 1 - 1e-9.
    """
    if isinstance(s_grid, tuple) and len(s_grid) == 2:
        s = np.linspace(0.0, float(s_grid[0]), int(s_grid[1]))
    else:
        s = np.asarray(s_grid, dtype=float)
    if np.any(s < 0):
        raise DomainError("s must be >= 0")
    s = np.where(np.abs(s - 1.0) < 1e-12, 1.0 - 1e-9, s)
    prob = EmissionProblem(stack, dipole)
    kperp, kpar = prob.kernels(s)
    return DissipationSpectrum(s, kperp, kpar)


def purcell(stack: LayerStack, dipole: DipoleSource, rtol: float = 1e-6) -> DecayRates:
    prob = EmissionProblem(stack, dipole)
    res = prob.integrate(rtol)
    n = prob.n_host
    return DecayRates(n * float(res.total[0]), n * float(res.total[1]), dipole.theta_deg,
                      n * float(res.error.max()))


def coverslip_reference(dipole: DipoleSource, height_nm: float = 20.0) -> tuple[LayerStack, DipoleSource]:
    """Reference geometry: emitter ``height_nm`` above a glass coverslip, in air."""
    from .stack import preset

    ref = preset("coverslip")
    return ref, DipoleSource(dipole.wavelength_nm, height_nm, 1, dipole.theta_deg)


def relative_rate(stack: LayerStack, dipole: DipoleSource, reference: LayerStack | None = None,
                  reference_dipole: DipoleSource | None = None) -> float:
    """Gamma(structure) / Gamma(reference) for the dipole's orientation.

    With no reference, the coverslip geometry of :func:`coverslip_reference` is used.
    """
    if reference is None:
        reference, ref_dip = coverslip_reference(dipole)
    else:
        ref_dip = reference_dipole or dipole
    g = purcell(stack, dipole).gamma_theta
    g_ref = purcell(reference, ref_dip).gamma_theta
    return g / g_ref


def position_sweep(stack: LayerStack, dipole: DipoleSource, offsets, axis: str = "z"):
    """Rates at ``dipole.z_nm + offset`` for each offset.

    Only ``axis="z"`` is meaningful: the planar model is exactly invariant
    under in-plane displacement, so "x"/"y" return the base rates repeated.
    """
    if axis not in ("x", "y", "z"):
        raise DomainError(f"axis must be x, y or z, got {axis!r}")
    offsets = [float(o) for o in offsets]
    if axis != "z":
        base = purcell(stack, dipole)
        return [(o, base) for o in offsets]
    lo, hi = host_bounds(stack, dipole.host_layer)
    bad = [o for o in offsets if not lo < dipole.z_nm + o < hi]
    if bad:
        raise DomainError(
            f"offsets {bad} leave the host layer; admissible offsets are "
            f"({lo - dipole.z_nm:g}, {hi - dipole.z_nm:g}) nm"
        )
    return [(o, purcell(stack, dipole.moved(o))) for o in offsets]
