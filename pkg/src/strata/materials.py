"""Complex relative permittivity of the materials used in the stacks.

Every material maps a vacuum wavelength in nm to eps = (n + i k)**2 with the
exp(-i omega t) convention, so passive media have Im(eps) >= 0. Wavelengths
outside a material's declared band raise :class:`MaterialRangeError`; tables
are never extrapolated.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import MaterialRangeError, StrataError, TableParseError

HC_EV_NM = 1239.841984

MATERIALS_DIR_ENV = "STRATA_MATERIALS_DIR"


@dataclass(frozen=True)
class ComplexPermittivity:
    eps: complex
    wavelength_nm: float

    @property
    def index(self) -> complex:
        return np.sqrt(self.eps)


@dataclass(frozen=True)
class Material:
    """Base class; subclasses implement ``_eps`` on an array of wavelengths."""

    name: str
    band: tuple[float, float]

    def _check_band(self, wl):
        lo, hi = self.band
        wl = np.asarray(wl, dtype=float)
        if np.any(~np.isfinite(wl)) or np.any(wl < lo) or np.any(wl > hi):
            bad = wl[(wl < lo) | (wl > hi) | ~np.isfinite(wl)].flat[0]
            raise MaterialRangeError(self.name, float(bad), self.band)
        return wl

    def eps(self, wavelength_nm):
        """Permittivity at one wavelength (complex) or an array of them."""
        wl = self._check_band(wavelength_nm)
        out = np.asarray(self._eps(wl), dtype=complex)
        return complex(out) if out.ndim == 0 else out

    def _eps(self, wl):
        raise NotImplementedError

    @property
    def kind(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantIndex(Material):
    n: float = 1.0
    k: float = 0.0
    band: tuple[float, float] = (100.0, 20000.0)

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"{self.name}: negative extinction coefficient")

    def _eps(self, wl):
        return np.broadcast_to(complex(self.n, self.k) ** 2, np.shape(wl))

    @property
    def kind(self):
        return "constant-index"


@dataclass(frozen=True)
class ConstantPermittivity(Material):
    """Fixed eps, for idealised media such as a near-perfect mirror."""

    value: complex = 1.0
    band: tuple[float, float] = (100.0, 20000.0)

    def __post_init__(self):
        if complex(self.value).imag < 0:
            raise ValueError(f"{self.name}: Im(eps) < 0 is not passive")

    def _eps(self, wl):
        return np.broadcast_to(complex(self.value), np.shape(wl))

    @property
    def kind(self):
        return "constant-permittivity"


@dataclass(frozen=True)
class Sellmeier(Material):
    """eps = A + sum_i B_i lam^2 / (lam^2 - C_i), lam in micrometres."""

    A: float = 1.0
    B: tuple[float, ...] = ()
    C: tuple[float, ...] = ()

    def _eps(self, wl):
        lam2 = (np.asarray(wl) * 1e-3) ** 2
        eps = np.full(np.shape(lam2), float(self.A))
        for b, c in zip(self.B, self.C):
            eps = eps + b * lam2 / (lam2 - c)
        return eps.astype(complex)

    @classmethod
    def from_pole_form(cls, name, band, A, terms):
        """Build from n^2 = A + sum_i P_i / (lam^2 - C_i)."""
        B = tuple(p / c for p, c in terms)
        A_std = A - sum(B)
        return cls(name=name, band=band, A=A_std, B=B, C=tuple(c for _, c in terms))

    @property
    def kind(self):
        return "sellmeier"


@dataclass(frozen=True)
class DrudeLorentz(Material):
    """Free-electron term plus optional Lorentz oscillators, energies in eV.

    eps = eps_inf - wp^2 / (w^2 + i g w) + sum_j f_j w_j^2 / (w_j^2 - w^2 - i g_j w)
    """

    eps_inf: float = 1.0
    plasma_ev: float = 0.0
    damping_ev: float = 0.0
    oscillators: tuple[tuple[float, float, float], ...] = ()

    def _eps(self, wl):
        w = HC_EV_NM / np.asarray(wl)
        eps = self.eps_inf - self.plasma_ev**2 / (w**2 + 1j * self.damping_ev * w)
        for f, w0, g in self.oscillators:
            eps = eps + f * w0**2 / (w0**2 - w**2 - 1j * g * w)
        return eps

    @property
    def kind(self):
        return "drude-lorentz"


@dataclass(frozen=True)
class Tabulated(Material):
    """Measured (n, k) samples; n and k are interpolated linearly in wavelength."""

    wavelength_nm: np.ndarray = field(default_factory=lambda: np.zeros(0))
    n: np.ndarray = field(default_factory=lambda: np.zeros(0))
    k: np.ndarray = field(default_factory=lambda: np.zeros(0))
    source: str = ""

    def _eps(self, wl):
        n = np.interp(wl, self.wavelength_nm, self.n)
        k = np.interp(wl, self.wavelength_nm, self.k)
        return (n + 1j * k) ** 2

    @property
    def kind(self):
        return "tabulated"

    # arrays are not hashable; identity is enough for caching purposes
    __hash__ = object.__hash__

    def __eq__(self, other):
        if not isinstance(other, Tabulated):
            return NotImplemented
        return (
            self.name == other.name
            and np.array_equal(self.wavelength_nm, other.wavelength_nm)
            and np.array_equal(self.n, other.n)
            and np.array_equal(self.k, other.k)
        )


def permittivity(material: Material, wavelength_nm: float) -> ComplexPermittivity:
    return ComplexPermittivity(material.eps(float(wavelength_nm)), float(wavelength_nm))


def ingest_nk_table(path, name: str | None = None) -> Tabulated:
    """Read a ``wavelength_nm,n,k`` CSV into a tabulated material.

    Lines starting with ``#`` are comments. Row numbers in errors are 1-based
    file line numbers.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        err = StrataError(f"cannot read material table {path}: {exc}")
        err.exit_code = 4
        raise err from exc
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = next(csv.reader([stripped]))
        if not header_seen:
            if [f.strip() for f in fields] != ["wavelength_nm", "n", "k"]:
                raise TableParseError(path, lineno, "expected header 'wavelength_nm,n,k'")
            header_seen = True
            continue
        if len(fields) != 3:
            raise TableParseError(path, lineno, f"expected 3 fields, got {len(fields)}")
        try:
            wl, n, k = (float(f) for f in fields)
        except ValueError:
            raise TableParseError(path, lineno, f"non-numeric field in {stripped!r}") from None
        if not all(np.isfinite([wl, n, k])):
            raise TableParseError(path, lineno, "non-finite value")
        if k < 0:
            raise TableParseError(path, lineno, f"negative k ({k:g})")
        if rows and wl <= rows[-1][0]:
            raise TableParseError(path, lineno, "wavelengths must be strictly increasing")
        rows.append((wl, n, k))
    if not header_seen:
        raise TableParseError(path, 1, "missing header")
    if len(rows) < 2:
        raise TableParseError(path, len(text.splitlines()), "need at least 2 data rows")
    data = np.array(rows)
    data.setflags(write=False)
    return Tabulated(
        name=name or path.stem,
        band=(float(data[0, 0]), float(data[-1, 0])),
        wavelength_nm=data[:, 0],
        n=data[:, 1],
        k=data[:, 2],
        source=str(path),
    )


def _gold_table() -> Tabulated:
    ref = resources.files("strata") / "data" / "au_johnson_christy.csv"
    with resources.as_file(ref) as p:
        return ingest_nk_table(p, name="Au")


# Indices quoted for PVA and ZnS at 900 nm, SiC and diamond in the visible/NIR,
# and fused silica as a generic coverslip.
_BUILTIN = {
    "vacuum": lambda: ConstantIndex("vacuum", n=1.0),
    "air": lambda: ConstantIndex("air", n=1.0),
    "glass": lambda: ConstantIndex("glass", n=1.45),
    "PVA": lambda: ConstantIndex("PVA", n=1.47),
    "ZnS": lambda: ConstantIndex("ZnS", n=2.30),
    "SiC": lambda: ConstantIndex("SiC", n=2.59),
    "diamond": lambda: ConstantIndex("diamond", n=2.39),
    "Au": _gold_table,
    # free-electron fit to the tabulated gold at 892 nm; no interband term, so
    # the band stops short of the d-band edge
    "Au-drude": lambda: DrudeLorentz(
        "Au-drude", band=(600.0, 2000.0), eps_inf=1.0, plasma_ev=7.99, damping_ev=0.081
    ),
    # cubic ZnS, pole form n^2 = 8.393 + 0.14383/(l^2 - 0.2421^2) + 4430.99/(l^2 - 36.71^2)
    "ZnS-sellmeier": lambda: Sellmeier.from_pole_form(
        "ZnS-sellmeier", (400.0, 13000.0), 8.393, [(0.14383, 0.2421**2), (4430.99, 36.71**2)]
    ),
    "glass-sellmeier": lambda: Sellmeier(
        "glass-sellmeier",
        band=(210.0, 3710.0),
        A=1.0,
        B=(0.6961663, 0.4079426, 0.8974794),
        C=(0.0684043**2, 0.1162414**2, 9.896161**2),
    ),
    # near-perfect conductor for image-dipole limits
    "pec": lambda: ConstantPermittivity("pec", value=-1.0e6),
}

_CACHE: dict[str, Material] = {}


def known_materials() -> list[str]:
    names = set(_BUILTIN)
    d = os.environ.get(MATERIALS_DIR_ENV)
    if d and Path(d).is_dir():
        names.update(p.stem for p in Path(d).glob("*.csv"))
    return sorted(names, key=str.lower)


def get_material(name: str) -> Material:
    """Look up a built-in material, then ``$STRATA_MATERIALS_DIR/<name>.csv``."""
    lookup = {k.lower(): k for k in _BUILTIN}
    key = lookup.get(name.lower())
    if key is not None:
        if key not in _CACHE:
            _CACHE[key] = _BUILTIN[key]()
        return _CACHE[key]
    # directory tables are re-read so edits to the files are picked up
    d = os.environ.get(MATERIALS_DIR_ENV)
    candidate = Path(d) / f"{name}.csv" if d else None
    if candidate is None or not candidate.is_file():
        raise KeyError(f"unknown material {name!r}; known: {', '.join(known_materials())}")
    return ingest_nk_table(candidate, name=name)
