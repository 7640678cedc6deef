"""JSON run configuration: strict parsing, defaults and canonical form.

Every problem is reported as a :class:`ConfigError` carrying the JSON path of
the offending value, e.g. ``stack.layers[2].thickness_nm``. Validation is
complete before any computation starts.

Minimal example::

    {"stack": {"preset": "au-zns"}, "dipole": {"wavelength_nm": 900}}
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .emission import DipoleSource, host_bounds
from .errors import ConfigError, MaterialRangeError, StrataError
from .materials import (ConstantIndex, ConstantPermittivity, Material, get_material, ingest_nk_table,
                        known_materials)
from .stack import PRESETS, Layer, LayerStack, preset

OBJECTIVES = ("fp_perp", "qe", "ce_tot", "cpr")
FORMATS = ("csv", "json")
DEFAULT_GRID_CAP = 1_000_000


@dataclass(frozen=True)
class MaterialSpec:
    """Inline material: constant (n, k), constant eps, or an n,k table file."""

    n: float | None = None
    k: float = 0.0
    eps: tuple[float, float] | None = None
    table: str | None = None


@dataclass(frozen=True)
class LayerSpec:
    material: str
    thickness_nm: float


@dataclass(frozen=True)
class StackConfig:
    preset: str | None = None
    lower: str | None = None
    upper: str | None = None
    layers: tuple[LayerSpec, ...] = ()


@dataclass(frozen=True)
class BandConfig:
    min_nm: float
    max_nm: float
    n: int

    def wavelengths(self) -> np.ndarray:
        return np.linspace(self.min_nm, self.max_nm, self.n)


@dataclass(frozen=True)
class DipoleConfig:
    wavelength_nm: float | None = None
    band: BandConfig | None = None
    # None places the dipole at the centre of a finite host layer
    z_nm: float | None = None
    theta_deg: float = 0.0
    host_layer: int | None = None


@dataclass(frozen=True)
class CollectionConfig:
    na: float = 0.95
    side: str = "up"


@dataclass(frozen=True)
class SpectrumConfig:
    s_max: float = 5.0
    n: int = 1001


@dataclass(frozen=True)
class FarfieldConfig:
    n_theta: int = 361


@dataclass(frozen=True)
class EmtConfig:
    metal: str = "Au"
    dielectric: str = "ZnS"
    d_m_nm: float = 30.0
    d_d_nm: float = 30.0
    wl_min_nm: float = 650.0
    wl_max_nm: float = 1000.0
    n_points: int = 176


@dataclass(frozen=True)
class ValidateConfig:
    wavelength_nm: float = 650.0
    metal: str = "Au"
    gap_min_nm: float = 2.0
    gap_max_nm: float = 50.0
    gap_step_nm: float = 1.0


@dataclass(frozen=True)
class SweepAxis:
    path: str
    min: float
    max: float
    n_points: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.n_points == 1:
            return np.array([self.min])
        return np.linspace(self.min, self.max, self.n_points)


@dataclass(frozen=True)
class SweepConfig:
    parameters: tuple[SweepAxis, ...]
    objective: str = "fp_perp"
    wavelength_nm: float | None = None
    band: BandConfig | None = None
    max_points: int = DEFAULT_GRID_CAP


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "."
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    stack: StackConfig
    dipole: DipoleConfig
    materials: dict = field(default_factory=dict)
    collection: CollectionConfig = CollectionConfig()
    spectrum: SpectrumConfig = SpectrumConfig()
    farfield: FarfieldConfig = FarfieldConfig()
    emt: EmtConfig = EmtConfig()
    validate: ValidateConfig = ValidateConfig()
    sweep: SweepConfig | None = None
    output: OutputConfig = OutputConfig()
    base_dir: str = field(default=".", compare=False)

    # -- model construction ---------------------------------------------------
    def material(self, name: str) -> Material:
        if name in self.materials:
            return _build_material(name, self.materials[name], Path(self.base_dir))
        return get_material(name)

    def build_stack(self) -> LayerStack:
        st = self.stack
        if st.preset is not None:
            return preset(st.preset)
        return LayerStack(self.material(st.lower), tuple(Layer(self.material(l.material), l.thickness_nm)
                                                         for l in st.layers), self.material(st.upper))

    def host_layer(self) -> int:
        if self.dipole.host_layer is not None:
            return self.dipole.host_layer
        if self.stack.preset is not None:
            return PRESETS[self.stack.preset][1]
        n = len(self.stack.layers)
        return n // 2 + 1 if n else 1

    def wavelengths(self) -> np.ndarray:
        d = self.dipole
        return np.array([d.wavelength_nm]) if d.band is None else d.band.wavelengths()

    def dipole_source(self, wavelength_nm: float | None = None, stack: LayerStack | None = None) -> DipoleSource:
        stack = stack or self.build_stack()
        h = self.host_layer()
        z = self.dipole.z_nm
        if z is None:
            lo, hi = host_bounds(stack, h)
            z = 0.5 * (lo + hi) if np.isfinite(hi) else 20.0
        wl = self.dipole.wavelength_nm if wavelength_nm is None else wavelength_nm
        if wl is None:
            wl = float(self.wavelengths()[0])
        return DipoleSource(float(wl), float(z), h, self.dipole.theta_deg)

    # -- serialisation ----------------------------------------------------------
    def to_dict(self, expand_preset: bool = False) -> dict:
        d = asdict(self)
        d.pop("base_dir")
        st = d["stack"]
        if expand_preset and self.stack.preset is not None:
            s = self.build_stack()
            st.update(preset=None, lower=s.lower.name, upper=s.upper.name,
                      layers=[{"material": l.material.name, "thickness_nm": l.thickness_nm} for l in s.layers])
            d["dipole"]["host_layer"] = self.host_layer()
        if st["preset"] is not None:
            st = {"preset": st["preset"]}
        else:
            st.pop("preset")
        d["stack"] = st
        d["materials"] = {k: {kk: vv for kk, vv in v.items() if vv is not None}
                          for k, v in d["materials"].items()}
        for sec in ("dipole", "sweep"):
            if d.get(sec) and d[sec].get("band") is not None:
                b = d[sec]["band"]
                d[sec]["band"] = {"min_nm": b["min_nm"], "max_nm": b["max_nm"], "n": b["n"]}
        return _to_json_types(d)


def _to_json_types(x):
    if isinstance(x, dict):
        return {k: _to_json_types(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_to_json_types(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    return x


def canonical_json(cfg: RunConfig | dict) -> str:
    """Sorted keys, two-space indent, shortest round-trip float repr."""
    d = cfg.to_dict() if isinstance(cfg, RunConfig) else cfg
    return json.dumps(d, sort_keys=True, indent=2, allow_nan=False) + "\n"


# -- parsing helpers --------------------------------------------------------------

def _join(path, key):
    return f"{path}.{key}" if path else key


def _obj(x, path) -> dict:
    if not isinstance(x, dict):
        raise ConfigError(path, f"expected an object, got {type(x).__name__}")
    return x


def _keys(d: dict, allowed, path):
    extra = sorted(set(d) - set(allowed))
    if extra:
        raise ConfigError(_join(path, extra[0]), f"unknown key; allowed: {', '.join(sorted(allowed))}")


def _num(d, key, path, default=None, *, required=False, lo=None, hi=None, lo_open=False, integer=False):
    p = _join(path, key)
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(p, "required")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(p, f"expected a number, got {json.dumps(v)}")
    if integer:
        if isinstance(v, float) and not v.is_integer():
            raise ConfigError(p, f"expected an integer, got {v!r}")
        v = int(v)
    else:
        v = float(v)
    if not math.isfinite(v):
        raise ConfigError(p, "must be finite")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(p, f"must be {'>' if lo_open else '>='} {lo:g}, got {v:g}")
    if hi is not None and v > hi:
        raise ConfigError(p, f"must be <= {hi:g}, got {v:g}")
    return v


def _str(d, key, path, default=None, *, required=False, choices=None):
    p = _join(path, key)
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(p, "required")
        return default
    v = d[key]
    if not isinstance(v, str):
        raise ConfigError(p, f"expected a string, got {json.dumps(v)}")
    if choices is not None and v not in choices:
        raise ConfigError(p, f"must be one of {', '.join(choices)}, got {v!r}")
    return v


def _build_material(name: str, spec: MaterialSpec, base_dir: Path) -> Material:
    if spec.table is not None:
        return ingest_nk_table(base_dir / spec.table, name=name)
    if spec.eps is not None:
        return ConstantPermittivity(name, value=complex(*spec.eps))
    return ConstantIndex(name, n=spec.n, k=spec.k)


def _parse_materials(raw, path, base_dir: Path) -> dict:
    out = {}
    for name, m in _obj(raw, path).items():
        p = _join(path, name)
        m = _obj(m, p)
        _keys(m, ("n", "k", "eps", "table"), p)
        if name.lower() in {b.lower() for b in known_materials()}:
            raise ConfigError(p, "name clashes with a built-in or directory material")
        kinds = [k for k in ("n", "eps", "table") if k in m]
        if len(kinds) != 1:
            raise ConfigError(p, "give exactly one of n, eps or table")
        if "table" in m:
            t = _str(m, "table", p)
            if not (base_dir / t).is_file():
                raise ConfigError(_join(p, "table"), f"file not found: {base_dir / t}")
            spec = MaterialSpec(table=t)
        elif "eps" in m:
            e = m["eps"]
            if not (isinstance(e, list) and len(e) == 2 and all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in e)):
                raise ConfigError(_join(p, "eps"), "expected [re, im]")
            if e[1] < 0:
                raise ConfigError(_join(p, "eps"), "Im(eps) must be >= 0")
            spec = MaterialSpec(eps=(float(e[0]), float(e[1])))
        else:
            spec = MaterialSpec(n=_num(m, "n", p, lo=0, lo_open=True), k=_num(m, "k", p, 0.0, lo=0))
        try:
            mat = _build_material(name, spec, base_dir)
        except StrataError as exc:
            raise ConfigError(p, str(exc)) from exc
        out[name] = (spec, mat)
    return out


def _check_material(name, path, materials):
    if name in materials:
        return materials[name][1]
    try:
        return get_material(name)
    except KeyError:
        known = sorted(set(known_materials()) | set(materials), key=str.lower)
        raise ConfigError(path, f"unknown material {name!r}; known: {', '.join(known)}") from None
    except StrataError as exc:
        raise ConfigError(path, str(exc)) from exc


def _parse_band(raw, path) -> BandConfig:
    b = _obj(raw, path)
    _keys(b, ("min_nm", "max_nm", "n"), path)
    lo = _num(b, "min_nm", path, required=True, lo=0, lo_open=True)
    hi = _num(b, "max_nm", path, required=True, lo=0, lo_open=True)
    n = _num(b, "n", path, required=True, lo=1, integer=True)
    if n > 1 and not hi > lo:
        raise ConfigError(_join(path, "max_nm"), "must exceed min_nm")
    return BandConfig(lo, hi, n)


def _parse_stack(raw, materials) -> StackConfig:
    path = "stack"
    s = _obj(raw, path)
    if "preset" in s:
        _keys(s, ("preset",), path)
        name = _str(s, "preset", path, choices=tuple(PRESETS))
        return StackConfig(preset=name)
    _keys(s, ("lower", "upper", "layers"), path)
    lower = _str(s, "lower", path, required=True)
    upper = _str(s, "upper", path, required=True)
    _check_material(lower, "stack.lower", materials)
    _check_material(upper, "stack.upper", materials)
    raw_layers = s.get("layers", [])
    if not isinstance(raw_layers, list):
        raise ConfigError("stack.layers", "expected a list")
    layers = []
    for i, l in enumerate(raw_layers):
        p = f"stack.layers[{i}]"
        l = _obj(l, p)
        _keys(l, ("material", "thickness_nm"), p)
        m = _str(l, "material", p, required=True)
        _check_material(m, _join(p, "material"), materials)
        d = _num(l, "thickness_nm", p, required=True, lo=0, lo_open=True)
        layers.append(LayerSpec(m, d))
    return StackConfig(None, lower, upper, tuple(layers))


def _parse_dipole(raw) -> DipoleConfig:
    path = "dipole"
    d = _obj(raw, path)
    _keys(d, ("wavelength_nm", "band", "z_nm", "theta_deg", "host_layer"), path)
    wl = _num(d, "wavelength_nm", path, lo=0, lo_open=True)
    band = _parse_band(d["band"], "dipole.band") if d.get("band") is not None else None
    if (wl is None) == (band is None):
        raise ConfigError(path, "give exactly one of wavelength_nm or band")
    return DipoleConfig(
        wavelength_nm=wl,
        band=band,
        z_nm=_num(d, "z_nm", path),
        theta_deg=_num(d, "theta_deg", path, 0.0, lo=0, hi=90),
        host_layer=_num(d, "host_layer", path, lo=0, integer=True),
    )


def _parse_simple(cls, raw, path, spec):
    """``spec`` maps key -> kwargs for _num/_str (with 'kind')."""
    d = _obj(raw, path) if raw is not None else {}
    _keys(d, spec, path)
    kw = {}
    for key, opts in spec.items():
        opts = dict(opts)
        kind = opts.pop("kind")
        default = getattr(cls(), key)
        if kind == "str":
            kw[key] = _str(d, key, path, default, **opts)
        else:
            kw[key] = _num(d, key, path, default, **opts)
    return cls(**kw)


def _parse_sweep(raw) -> SweepConfig:
    path = "sweep"
    s = _obj(raw, path)
    _keys(s, ("parameters", "objective", "wavelength_nm", "band", "max_points"), path)
    params = s.get("parameters")
    if not isinstance(params, list) or not params:
        raise ConfigError("sweep.parameters", "expected a non-empty list")
    axes = []
    for i, a in enumerate(params):
        p = f"sweep.parameters[{i}]"
        a = _obj(a, p)
        _keys(a, ("path", "min", "max", "n_points", "scale"), p)
        ax = SweepAxis(
            path=_str(a, "path", p, required=True),
            min=_num(a, "min", p, required=True),
            max=_num(a, "max", p, required=True),
            n_points=_num(a, "n_points", p, required=True, lo=1, integer=True),
            scale=_str(a, "scale", p, "linear", choices=("linear",)),
        )
        if ax.n_points > 1 and not ax.max > ax.min:
            raise ConfigError(_join(p, "max"), "must exceed min")
        axes.append(ax)
    paths = [a.path for a in axes]
    if len(set(paths)) != len(paths):
        raise ConfigError("sweep.parameters", "duplicate parameter path")
    wl = _num(s, "wavelength_nm", path, lo=0, lo_open=True)
    band = _parse_band(s["band"], "sweep.band") if s.get("band") is not None else None
    if wl is not None and band is not None:
        raise ConfigError(path, "give at most one of wavelength_nm or band")
    return SweepConfig(
        parameters=tuple(axes),
        objective=_str(s, "objective", path, "fp_perp", choices=OBJECTIVES),
        wavelength_nm=wl,
        band=band,
        max_points=_num(s, "max_points", path, DEFAULT_GRID_CAP, lo=1, integer=True),
    )


_TOP_KEYS = ("materials", "stack", "dipole", "collection", "spectrum", "farfield", "emt", "validate",
             "sweep", "output")


def config_from_dict(data, base_dir=".") -> RunConfig:
    data = _obj(data, "")
    _keys(data, _TOP_KEYS, "")
    base = Path(base_dir)
    materials = _parse_materials(data.get("materials", {}), "materials", base)
    if "stack" not in data:
        raise ConfigError("stack", "required")
    if "dipole" not in data:
        raise ConfigError("dipole", "required")
    stack = _parse_stack(data["stack"], materials)
    dipole = _parse_dipole(data["dipole"])
    collection = _parse_simple(CollectionConfig, data.get("collection"), "collection", {
        "na": {"kind": "num", "lo": 0, "lo_open": True},
        "side": {"kind": "str", "choices": ("up", "down")},
    })
    spectrum = _parse_simple(SpectrumConfig, data.get("spectrum"), "spectrum", {
        "s_max": {"kind": "num", "lo": 0, "lo_open": True},
        "n": {"kind": "num", "lo": 2, "integer": True},
    })
    farfield = _parse_simple(FarfieldConfig, data.get("farfield"), "farfield", {
        "n_theta": {"kind": "num", "lo": 2, "integer": True},
    })
    emt = _parse_simple(EmtConfig, data.get("emt"), "emt", {
        "metal": {"kind": "str"}, "dielectric": {"kind": "str"},
        "d_m_nm": {"kind": "num", "lo": 0}, "d_d_nm": {"kind": "num", "lo": 0},
        "wl_min_nm": {"kind": "num", "lo": 0, "lo_open": True},
        "wl_max_nm": {"kind": "num", "lo": 0, "lo_open": True},
        "n_points": {"kind": "num", "lo": 2, "integer": True},
    })
    _check_material(emt.metal, "emt.metal", materials)
    _check_material(emt.dielectric, "emt.dielectric", materials)
    if emt.d_m_nm + emt.d_d_nm == 0:
        raise ConfigError("emt", "d_m_nm and d_d_nm cannot both be zero")
    if not emt.wl_max_nm > emt.wl_min_nm:
        raise ConfigError("emt.wl_max_nm", "must exceed wl_min_nm")
    validate = _parse_simple(ValidateConfig, data.get("validate"), "validate", {
        "wavelength_nm": {"kind": "num", "lo": 0, "lo_open": True},
        "metal": {"kind": "str"},
        "gap_min_nm": {"kind": "num", "lo": 0, "lo_open": True},
        "gap_max_nm": {"kind": "num", "lo": 0, "lo_open": True},
        "gap_step_nm": {"kind": "num", "lo": 0, "lo_open": True},
    })
    _check_material(validate.metal, "validate.metal", materials)
    sweep = _parse_sweep(data["sweep"]) if data.get("sweep") is not None else None
    output = _parse_simple(OutputConfig, data.get("output"), "output", {
        "directory": {"kind": "str"},
        "format": {"kind": "str", "choices": FORMATS},
    })
    cfg = RunConfig(stack, dipole, {k: v[0] for k, v in materials.items()}, collection, spectrum,
                    farfield, emt, validate, sweep, output, str(base))
    _check_physics(cfg)
    if sweep is not None:
        expanded = cfg.to_dict(expand_preset=True)
        for i, ax in enumerate(sweep.parameters):
            try:
                get_path(expanded, ax.path)
            except KeyError as exc:
                raise ConfigError(f"sweep.parameters[{i}].path", str(exc.args[0])) from None
    return cfg


def _check_physics(cfg: RunConfig):
    """Checks that need the assembled stack: host index, dipole position, wavelength bands."""
    stack = cfg.build_stack()
    h = cfg.host_layer()
    if not 0 <= h < stack.n_media:
        raise ConfigError("dipole.host_layer", f"must be in 0..{stack.n_media - 1}, got {h}")
    lo, hi = host_bounds(stack, h)
    z = cfg.dipole.z_nm
    if z is not None and not lo < z < hi:
        raise ConfigError("dipole.z_nm", f"must lie strictly inside the host, ({lo:g}, {hi:g}) nm; got {z:g}")
    wl_path = "dipole.band" if cfg.dipole.band is not None else "dipole.wavelength_nm"
    wls = cfg.wavelengths()
    for i in range(stack.n_media):
        try:
            stack.medium(i).eps(wls)
        except MaterialRangeError as exc:
            raise ConfigError(wl_path, str(exc)) from None


def parse_config(text: str, base_dir=".") -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    return config_from_dict(data, base_dir)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        err = StrataError(f"cannot read config {path}: {exc}")
        err.exit_code = 4
        raise err from exc
    return parse_config(text, base_dir=path.parent)


# -- path access used by sweeps -----------------------------------------------------

_TOKEN = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)|\[(\d+)\]")


def _tokens(path: str):
    toks = []
    for part in path.split("."):
        m_all = list(_TOKEN.finditer(part))
        if not m_all or "".join(m.group(0) for m in m_all) != part or m_all[0].group(1) is None:
            raise KeyError(f"malformed parameter path {path!r}")
        for m in m_all:
            toks.append(m.group(1) if m.group(1) is not None else int(m.group(2)))
    return toks


def get_path(d, path: str):
    cur = d
    for t in _tokens(path):
        if isinstance(t, int):
            if not isinstance(cur, list) or t >= len(cur):
                raise KeyError(f"path {path!r} does not resolve (index {t})")
        elif not isinstance(cur, dict) or t not in cur:
            raise KeyError(f"path {path!r} does not resolve (key {t!r})")
        cur = cur[t]
    return cur


def set_path(d, path: str, value):
    """Copy of ``d`` with ``path`` replaced by ``value``."""
    get_path(d, path)
    out = copy.deepcopy(d)
    cur = out
    toks = _tokens(path)
    for t in toks[:-1]:
        cur = cur[t]
    cur[toks[-1]] = value
    return out
