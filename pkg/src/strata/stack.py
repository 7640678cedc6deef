"""Planar multilayers and their generalized reflection/transmission.

Media are indexed bottom to top: 0 is the lower cladding, 1..N the finite
layers, N+1 the upper cladding. All coefficients are vectorised over the
normalized in-plane wavevector ``s = k_par / k_host``.

Amplitude conventions: s-polarization uses E_y, p-polarization uses H_y.
With ``q = kz`` (s) or ``q = kz / eps`` (p) a single interface then has
``r = (q1 - q2) / (q1 + q2)``, ``t = 2 q1 / (q1 + q2)`` for both, and the
z-flux of a plane wave is proportional to ``Re(q) |amplitude|^2``. A perfect
conductor gives r_s = -1, r_p = +1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .materials import ComplexPermittivity, Material, get_material


@dataclass(frozen=True)
class Layer:
    material: Material
    thickness_nm: float

    def __post_init__(self):
        d = self.thickness_nm
        if not (np.isfinite(d) and d > 0):
            raise ValueError(f"layer thickness must be finite and > 0, got {d!r}")


@dataclass(frozen=True)
class LayerStack:
    lower: Material
    layers: tuple[Layer, ...]
    upper: Material

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))

    @property
    def n_media(self) -> int:
        return len(self.layers) + 2

    def medium(self, i: int) -> Material:
        if i == 0:
            return self.lower
        if i == self.n_media - 1:
            return self.upper
        return self.layers[i - 1].material

    def thickness(self, i: int) -> float:
        """Thickness of medium ``i``; claddings are infinite."""
        if i == 0 or i == self.n_media - 1:
            return np.inf
        return self.layers[i - 1].thickness_nm

    def eps(self, wavelength_nm: float) -> np.ndarray:
        return np.array([self.medium(i).eps(wavelength_nm) for i in range(self.n_media)])

    def flipped(self) -> "LayerStack":
        """Same structure seen upside down (medium i -> n_media - 1 - i)."""
        return LayerStack(self.upper, tuple(reversed(self.layers)), self.lower)

    def with_thickness(self, layer_index: int, thickness_nm: float) -> "LayerStack":
        """Copy with finite layer ``layer_index`` (medium index) resized."""
        layers = list(self.layers)
        layers[layer_index - 1] = replace(layers[layer_index - 1], thickness_nm=thickness_nm)
        return LayerStack(self.lower, tuple(layers), self.upper)


def five_layer_stack(outer: str, middle: str, *, metal="Au", metal_nm=30.0, outer_nm=30.0,
               middle_nm=50.0, substrate="glass", superstrate="air") -> LayerStack:
    """glass | outer | metal | middle | metal | outer | air."""
    o, m, c = get_material(outer), get_material(metal), get_material(middle)
    return LayerStack(
        get_material(substrate),
        (Layer(o, outer_nm), Layer(m, metal_nm), Layer(c, middle_nm), Layer(m, metal_nm), Layer(o, outer_nm)),
        get_material(superstrate),
    )


# (stack builder, default host medium index)
PRESETS = {
    "au-pva": (lambda: five_layer_stack("PVA", "PVA"), 3),
    # intermediate design: ZnS outer dielectric, emitter still in the PVA matrix
    "au-pva-zns": (lambda: five_layer_stack("ZnS", "PVA"), 3),
    "au-zns": (lambda: five_layer_stack("ZnS", "ZnS"), 3),
    # bare coverslip; emitter in the air above the glass
    "coverslip": (lambda: LayerStack(get_material("glass"), (), get_material("air")), 1),
}


def preset(name: str) -> LayerStack:
    try:
        return PRESETS[name][0]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


KZ_FLOOR = 1e-6


def kz_normalized(eps, beta):
    """kz / k0 = sqrt(eps - beta^2) on the branch Im >= 0 (Re >= 0 when real)."""
    kz = np.sqrt(np.asarray(eps, dtype=complex) - np.asarray(beta, dtype=complex) ** 2)
    return np.where(kz.imag < 0, -kz, kz)


def admittance(pol, eps, kz):
    if pol == "s":
        return kz
    if pol == "p":
        return kz / eps
    raise ValueError(f"polarization must be 's' or 'p', got {pol!r}")


def fresnel(eps1, eps2, s, pol):
    """Single-interface reflection from medium 1 into medium 2.

    ``s`` is the in-plane wavevector in units of ``Re(n1) k0``.
    """
    e1 = eps1.eps if isinstance(eps1, ComplexPermittivity) else complex(eps1)
    e2 = eps2.eps if isinstance(eps2, ComplexPermittivity) else complex(eps2)
    beta = np.asarray(s, dtype=float) * np.sqrt(e1).real
    q1 = admittance(pol, e1, kz_normalized(e1, beta))
    q2 = admittance(pol, e2, kz_normalized(e2, beta))
    return (q1 - q2) / (q1 + q2)


@dataclass
class SMatrix:
    """Two-port scattering matrix of a slab, left port to right port.

    outgoing_left = r_l * in_left + t_rl * in_right
    outgoing_right = t_lr * in_left + r_r * in_right
    """

    r_l: np.ndarray
    t_lr: np.ndarray
    t_rl: np.ndarray
    r_r: np.ndarray

    @classmethod
    def identity(cls, shape=()):
        z, o = np.zeros(shape, complex), np.ones(shape, complex)
        return cls(z, o, o.copy(), z.copy())

    @classmethod
    def interface(cls, q1, q2):
        den = q1 + q2
        return cls((q1 - q2) / den, 2 * q1 / den, 2 * q2 / den, (q2 - q1) / den)

    @classmethod
    def propagation(cls, phase):
        """Homogeneous slab with one-way factor ``phase = exp(i kz d)``."""
        z = np.zeros_like(phase)
        return cls(z, phase, phase, z.copy())

    def star(self, other: "SMatrix") -> "SMatrix":
        """Redheffer star product: ``self`` on the left, ``other`` on the right."""
        d = 1.0 / (1.0 - self.r_r * other.r_l)
        return SMatrix(
            r_l=self.r_l + self.t_rl * other.r_l * self.t_lr * d,
            t_lr=other.t_lr * d * self.t_lr,
            t_rl=self.t_rl * d * other.t_rl,
            r_r=other.r_r + other.t_lr * self.r_r * other.t_rl * d,
        )


def smatrix(eps: Sequence[complex], thickness_nm: Sequence[float], beta, k0, pol) -> SMatrix:
    """S-matrix from semi-infinite ``eps[0]`` to semi-infinite ``eps[-1]``.

    ``thickness_nm`` lists the interior media (``len(eps) - 2`` entries).
    Ports are referenced at the first and last interface.
    """
    if len(thickness_nm) != len(eps) - 2:
        raise ValueError("need one thickness per interior medium")
    beta = np.asarray(beta, dtype=float)
    # kz = 0 in an interior layer (exactly at its light line) makes the star
    # product 0/0; the response is even in an interior kz, so the nudge costs
    # O(KZ_FLOOR^2). Claddings are left alone.
    kz = [kz_normalized(e, beta) for e in eps]
    kz[1:-1] = [np.where(np.abs(k) < KZ_FLOOR, 1j * KZ_FLOOR, k) for k in kz[1:-1]]
    q = [admittance(pol, e, k) for e, k in zip(eps, kz)]
    S = SMatrix.identity(beta.shape)
    for j in range(len(eps) - 1):
        if j > 0:
            S = S.star(SMatrix.propagation(np.exp(1j * k0 * kz[j] * thickness_nm[j - 1])))
        S = S.star(SMatrix.interface(q[j], q[j + 1]))
    return S


@dataclass
class HalfSpaceResponse:
    """Everything on one side of a source layer, seen from inside it.

    ``r_*`` are referenced at the boundary of the source layer facing ``side``
    and ``t_*`` give the amplitude in the far cladding at its own boundary.
    ``q_near``/``q_far`` are the admittances (units of k0) needed for flux
    normalisation; ``empty`` is set when the source layer is itself the
    cladding on that side, in which case r = 0 and t = 1 trivially.
    """

    s: np.ndarray
    r_s: np.ndarray
    r_p: np.ndarray
    t_s: np.ndarray
    t_p: np.ndarray
    q_near: dict
    q_far: dict
    empty: bool = False

    def r(self, pol):
        return self.r_s if pol == "s" else self.r_p

    def t(self, pol):
        return self.t_s if pol == "s" else self.t_p

    def transmittance(self, pol):
        """Flux-normalised |t|^2; meaningful where the near medium propagates."""
        return np.abs(self.t(pol)) ** 2 * self.q_far[pol].real / self.q_near[pol].real

    def reflectance(self, pol):
        return np.abs(self.r(pol)) ** 2


def side_media(stack: LayerStack, source_layer: int, side: str) -> list[int]:
    """Medium indices from the source layer outwards to the far cladding."""
    last = stack.n_media - 1
    if not 0 <= source_layer <= last:
        raise IndexError(f"source_layer must be in 0..{last}, got {source_layer}")
    if side == "up":
        return list(range(source_layer, last + 1))
    if side == "down":
        return list(range(source_layer, -1, -1))
    raise ValueError(f"side must be 'up' or 'down', got {side!r}")


def _response(eps_all, thick_all, idx, n_host, s, k0, eps_override=None):
    s = np.asarray(s, dtype=float)
    beta = s * n_host
    eps_seq = [eps_all[i] for i in idx]
    if eps_override is not None:
        eps_seq[0] = eps_override
    near = {pol: admittance(pol, eps_seq[0], kz_normalized(eps_seq[0], beta)) for pol in "sp"}
    if len(idx) == 1:
        one = np.ones(s.shape, complex)
        zero = np.zeros(s.shape, complex)
        return HalfSpaceResponse(s, zero, zero.copy(), one, one.copy(), near, dict(near), empty=True)
    thick = [thick_all[i] for i in idx[1:-1]]
    far = {pol: admittance(pol, eps_seq[-1], kz_normalized(eps_seq[-1], beta)) for pol in "sp"}
    Ss = smatrix(eps_seq, thick, beta, k0, "s")
    Sp = smatrix(eps_seq, thick, beta, k0, "p")
    return HalfSpaceResponse(s, Ss.r_l, Sp.r_l, Ss.t_lr, Sp.t_lr, near, far)


def half_space_response(stack: LayerStack, source_layer: int, side: str,
                        wavelength_nm: float, s) -> HalfSpaceResponse:
    """Generalized r/t of the sub-stack on ``side`` of ``source_layer``.

    ``s`` is normalized by ``Re(n)`` of the source layer.
    """
    idx = side_media(stack, source_layer, side)
    eps = stack.eps(wavelength_nm)
    thick = [stack.thickness(i) for i in range(stack.n_media)]
    n_host = np.sqrt(eps[source_layer]).real
    k0 = 2 * np.pi / wavelength_nm
    return _response(eps, thick, idx, n_host, s, k0)
