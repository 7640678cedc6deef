"""Full-factorial parameter sweeps over a run configuration.

Parameters are addressed by paths into the canonical config dictionary with
presets expanded, e.g. ``stack.layers[2].thickness_nm`` or ``dipole.z_nm``.
Grid order is fixed (first axis varies slowest), so results do not depend on
how the evaluation is distributed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .config import RunConfig, SweepConfig, config_from_dict, set_path
from .emission import purcell
from .errors import ConfigError, DomainError, StrataError
from .farfield import collection


class SweepPointError(StrataError):
    """Evaluation failed at one grid point; carries the parameter tuple."""

    def __init__(self, params: dict, cause: Exception):
        self._args = (params, cause)
        self.params = params
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)
        desc = ", ".join(f"{k}={v!r}" for k, v in params.items())
        super().__init__(f"sweep point ({desc}) failed: {type(cause).__name__}: {cause}")

    def to_dict(self):
        d = super().to_dict()
        d["params"] = self.params
        return d


def band_average(values, wl_min: float, wl_max: float) -> float:
    """Trapezoidal mean of (wavelength, value) samples lying in [wl_min, wl_max]."""
    pts = sorted((float(w), float(v)) for w, v in values if wl_min <= w <= wl_max)
    if len(pts) < 2:
        raise DomainError(f"need >= 2 samples in [{wl_min:g}, {wl_max:g}] nm, got {len(pts)}")
    w, v = np.array(pts).T
    return float(np.trapezoid(v, w) / (w[-1] - w[0]))


def _metrics_at(cfg: RunConfig, objective: str, wavelength_nm: float) -> dict:
    stack = cfg.build_stack()
    dip = cfg.dipole_source(wavelength_nm, stack)
    if objective == "fp_perp":
        r = purcell(stack, dip)
        return {"fp_perp": r.gamma_perp, "fp_par": r.gamma_par}
    c = collection(stack, dip, cfg.collection.na, cfg.collection.side)
    return {"fp": c.fp, "qe": c.qe, "ce_rad": c.ce_rad, "ce_tot": c.ce_tot, "cpr": c.cpr}


def evaluate_objective(cfg: RunConfig, spec: SweepConfig) -> tuple[float, dict]:
    """Objective value and auxiliary metrics, at one wavelength or band-averaged."""
    if spec.band is not None:
        wls = spec.band.wavelengths()
        per = [_metrics_at(cfg, spec.objective, float(w)) for w in wls]
        if len(wls) == 1:
            metrics = per[0]
        else:
            metrics = {k: band_average(list(zip(wls, [m[k] for m in per])), wls[0], wls[-1]) for k in per[0]}
    else:
        wl = spec.wavelength_nm if spec.wavelength_nm is not None else float(cfg.wavelengths()[0])
        metrics = _metrics_at(cfg, spec.objective, wl)
    return metrics[spec.objective], metrics


@dataclass
class SweepResult:
    paths: tuple[str, ...]
    params: list[tuple[float, ...]]
    values: list[float]
    aux: list[dict]
    objective: str

    @property
    def argmax(self) -> int:
        return argmax_index(self.params, self.values)

    @property
    def best(self) -> tuple[tuple[float, ...], float]:
        i = self.argmax
        return self.params[i], self.values[i]

    def columns(self) -> list[str]:
        extra = sorted(k for k in (self.aux[0] if self.aux else {}) if k != self.objective)
        return list(self.paths) + [self.objective] + extra

    def rows(self) -> list[list]:
        cols = self.columns()[len(self.paths) + 1:]
        return [list(p) + [v] + [a[c] for c in cols]
                for p, v, a in zip(self.params, self.values, self.aux)]


def argmax_index(params, values) -> int:
    """Largest value; ties go to the lexicographically smallest parameter tuple."""
    best = None
    for i, (p, v) in enumerate(zip(params, values)):
        if math.isnan(v):
            continue
        if best is None or v > values[best] or (v == values[best] and tuple(p) < tuple(params[best])):
            best = i
    if best is None:
        raise DomainError("no finite objective values")
    return best


def grid(spec: SweepConfig) -> list[tuple[float, ...]]:
    size = math.prod(a.n_points for a in spec.parameters)
    if size > spec.max_points:
        raise ConfigError("sweep.parameters", f"grid has {size} points, cap is {spec.max_points}")
    axes = [[float(x) for x in a.values()] for a in spec.parameters]
    return list(itertools.product(*axes))


def _point_job(args):
    base, paths, point, spec, objective_fn, base_dir = args
    d = base
    for path, val in zip(paths, point):
        d = set_path(d, path, val)
    params = dict(zip(paths, point))
    try:
        cfg = config_from_dict(d, base_dir)
        if objective_fn is not None:
            return objective_fn(cfg)
        return evaluate_objective(cfg, spec)
    except (StrataError, ValueError) as exc:
        raise SweepPointError(params, exc) from exc


def run_sweep(base: RunConfig, spec: SweepConfig | None = None, *, objective_fn=None,
              map_fn=map) -> SweepResult:
    """Evaluate ``spec`` (default ``base.sweep``) on its full grid.

    ``objective_fn(cfg) -> (value, aux)`` replaces the built-in objectives.
    ``map_fn`` must preserve order (``map`` or ``Executor.map``).
    """
    spec = spec or base.sweep
    if spec is None:
        raise ConfigError("sweep", "no sweep section in the config")
    pts = grid(spec)
    paths = tuple(a.path for a in spec.parameters)
    d = base.to_dict(expand_preset=True)
    d["sweep"] = None
    jobs = [(d, paths, p, spec, objective_fn, base.base_dir) for p in pts]
    out = list(map_fn(_point_job, jobs))
    return SweepResult(paths, pts, [float(v) for v, _ in out], [a for _, a in out], spec.objective)
