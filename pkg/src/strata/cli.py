"""Command-line entry point: ``strata <subcommand> --config run.json``.

Every subcommand writes one table (``<subcommand>.csv`` or ``.json``) into the
output directory and prints a one-line summary. Failures print an error JSON
object on stderr and exit with 2 (config), 3 (numeric/domain) or 4 (I/O).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load_config, parse_config
from .emission import EmissionProblem, dissipation_spectrum, purcell
from .emt import hyperbolicity_band
from .errors import DomainError, StrataError
from .farfield import angular_pattern, cladding_index, cpr_spectrum
from .sweep import run_sweep
from .validation import DREXHAGE_CHECK_GAPS, DREXHAGE_TOLERANCE, drexhage_curve, monotone_after_peak

UNITS = {
    "wavelength_nm": "nm",
    "gamma_perp": "vacuum rate",
    "gamma_par": "vacuum rate",
    "gamma_theta": "vacuum rate",
    "err_estimate": "vacuum rate",
    "s": "k_par/k_host",
    "K_perp": "per unit s, host-medium rate",
    "K_par": "per unit s, host-medium rate",
    "side": "up|down",
    "theta_deg": "deg in cladding",
    "p": "vacuum rate per rad (phi-integrated)",
    "fp": "vacuum rate",
    "qe": "1",
    "ce_rad": "1",
    "ce_tot": "1",
    "cpr": "vacuum rate",
    "re_eps_perp": "1",
    "im_eps_perp": "1",
    "re_eps_par": "1",
    "im_eps_par": "1",
    "is_hyperbolic": "bool",
    "gap_nm": "nm",
    "fp_total": "vacuum rate",
    "fp_radiative_window": "vacuum rate",
    "fp_evanescent": "vacuum rate",
    "oracle_image": "vacuum rate",
    "oracle_spp": "vacuum rate",
    "oracle_nonradiative": "vacuum rate",
    "rel_error": "1",
}


class ValidationFailed(StrataError):
    pass


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list]
    summary: str
    notes: list[str] = field(default_factory=list)
    failure: StrataError | None = None


# -- formatting --------------------------------------------------------------------

def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _json_cell(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return None if not math.isfinite(x) else float(x)
    return x


def _unit(col: str) -> str:
    if col in UNITS:
        return UNITS[col]
    for suffix, unit in (("_nm", "nm"), ("_deg", "deg")):
        if col.endswith(suffix):
            return unit
    return "1"


def render(table: Table, fmt: str) -> str:
    units = {c: _unit(c) for c in table.columns}
    if fmt == "json":
        doc = {
            "version": f"strata {__version__}",
            "columns": table.columns,
            "units": units,
            "notes": table.notes,
            "rows": [[_json_cell(x) for x in r] for r in table.rows],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    lines = [f"# strata {__version__}"]
    lines.append("# units: " + "; ".join(f"{c} [{u}]" for c, u in units.items()))
    lines += [f"# {n}" for n in table.notes]
    lines.append(",".join(table.columns))
    lines += [",".join(_cell(x) for x in r) for r in table.rows]
    return "\n".join(lines) + "\n"


def write_atomic(path: Path, text: str):
    """Write via a temporary file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        # mkstemp creates 0600; give the usual umask-derived mode
        mask = os.umask(0)
        os.umask(mask)
        os.chmod(tmp, 0o666 & ~mask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@contextmanager
def mapper(threads: int):
    """Order-preserving map, optionally over a process pool."""
    if threads <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=threads) as ex:
        yield lambda fn, jobs: ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads)))


# -- subcommands ------------------------------------------------------------------

def _purcell_job(args):
    stack, dip = args
    return purcell(stack, dip)


def cmd_purcell(cfg: RunConfig, map_fn) -> Table:
    stack = cfg.build_stack()
    jobs = [(stack, cfg.dipole_source(float(w), stack)) for w in cfg.wavelengths()]
    res = list(map_fn(_purcell_job, jobs))
    rows = [[d.wavelength_nm, r.gamma_perp, r.gamma_par, r.gamma_theta, r.err_estimate] for (_, d), r in zip(jobs, res)]
    i = int(np.argmax([r[3] for r in rows]))
    return Table("purcell", ["wavelength_nm", "gamma_perp", "gamma_par", "gamma_theta", "err_estimate"], rows,
                 f"purcell: {len(rows)} wavelength(s), peak gamma_theta {rows[i][3]:.6g} at {rows[i][0]:g} nm")


def _single_wavelength(cfg: RunConfig, what: str) -> float:
    if cfg.dipole.wavelength_nm is None:
        raise DomainError(f"{what} needs dipole.wavelength_nm, not a band")
    return cfg.dipole.wavelength_nm


def cmd_spectrum(cfg: RunConfig, map_fn) -> Table:
    stack = cfg.build_stack()
    dip = cfg.dipole_source(_single_wavelength(cfg, "spectrum"), stack)
    sp = dissipation_spectrum(stack, dip, (cfg.spectrum.s_max, cfg.spectrum.n))
    rows = [[s, a, b] for s, a, b in zip(sp.s, sp.K_perp, sp.K_par)]
    i = int(np.argmax(sp.K_perp))
    return Table("spectrum", ["s", "K_perp", "K_par"], rows,
                 f"spectrum: {len(rows)} samples at {dip.wavelength_nm:g} nm, peak K_perp {sp.K_perp[i]:.6g} at s={sp.s[i]:.4g}")


def cmd_farfield(cfg: RunConfig, map_fn) -> Table:
    stack = cfg.build_stack()
    dip = cfg.dipole_source(_single_wavelength(cfg, "farfield"), stack)
    prob = EmissionProblem(stack, dip)
    rows, notes = [], []
    best = (-1.0, "", 0.0)
    for side in ("up", "down"):
        try:
            cladding_index(prob, side)
        except DomainError as exc:
            notes.append(f"{side} side skipped: {exc}")
            continue
        pat = angular_pattern(stack, dip, side, cfg.farfield.n_theta)
        for th, p in zip(pat.theta_deg, pat.p):
            rows.append([side, th, p])
            if p > best[0]:
                best = (p, side, th)
    if not rows:
        raise DomainError("both claddings absorb; no far field")
    return Table("farfield", ["side", "theta_deg", "p"], rows,
                 f"farfield: peak p {best[0]:.6g} at {best[2]:g} deg ({best[1]})", notes)


def cmd_cpr(cfg: RunConfig, map_fn) -> Table:
    stack = cfg.build_stack()
    wls = cfg.wavelengths()
    dip = cfg.dipole_source(float(wls[0]), stack)
    res = cpr_spectrum(stack, dip, float(wls[0]), float(wls[-1]), len(wls), cfg.collection.na, cfg.collection.side,
                       map_fn=map_fn)
    rows = [[r.wavelength_nm, r.fp, r.qe, r.ce_rad, r.ce_tot, r.cpr] for r in res]
    notes = [f"flagged {r.wavelength_nm:g} nm: {r.error}" for r in res if not r.ok]
    good = [r for r in rows if math.isfinite(r[5])]
    if not good:
        raise StrataError(f"cpr failed at every wavelength; first: {res[0].error}")
    i = int(np.argmax([r[5] for r in good]))
    summary = f"cpr: {len(rows)} wavelength(s), peak cpr {good[i][5]:.6g} at {good[i][0]:g} nm"
    if notes:
        summary += f", {len(notes)} flagged"
    return Table("cpr", ["wavelength_nm", "fp", "qe", "ce_rad", "ce_tot", "cpr"], rows, summary, notes)


def cmd_emt(cfg: RunConfig, map_fn) -> Table:
    e = cfg.emt
    band = hyperbolicity_band(cfg.material(e.metal), cfg.material(e.dielectric), e.d_m_nm, e.d_d_nm,
                              e.wl_min_nm, e.wl_max_nm, e.n_points)
    rows = [[b.wavelength_nm, b.eps_perp.real, b.eps_perp.imag, b.eps_par.real, b.eps_par.imag, b.is_hyperbolic]
            for b in band]
    n_h = sum(b.is_hyperbolic for b in band)
    return Table("emt", ["wavelength_nm", "re_eps_perp", "im_eps_perp", "re_eps_par", "im_eps_par", "is_hyperbolic"],
                 rows, f"emt: {n_h}/{len(band)} samples hyperbolic over {e.wl_min_nm:g}-{e.wl_max_nm:g} nm")


def cmd_sweep(cfg: RunConfig, map_fn) -> Table:
    res = run_sweep(cfg, map_fn=map_fn)
    best, val = res.best
    desc = ", ".join(f"{p}={v:g}" for p, v in zip(res.paths, best))
    return Table("sweep", res.columns(), res.rows(),
                 f"sweep: {len(res.values)} points, best {res.objective} {val:.6g} at {desc}")


def cmd_validate(cfg: RunConfig, map_fn) -> Table:
    v = cfg.validate
    gaps = np.arange(v.gap_min_nm, v.gap_max_nm + 0.5 * v.gap_step_nm, v.gap_step_nm)
    rows = drexhage_curve(gaps, v.wavelength_nm, v.metal)
    check = drexhage_curve(DREXHAGE_CHECK_GAPS, v.wavelength_nm, v.metal)
    err = max(r.rel_error for r in check)
    mono = monotone_after_peak([r.fp_total for r in rows])
    ok = err < DREXHAGE_TOLERANCE and mono
    cols = ["gap_nm", "fp_total", "fp_radiative_window", "fp_evanescent", "oracle_image", "oracle_spp",
            "oracle_nonradiative", "rel_error"]
    table = Table("validate", cols,
                  [[r.gap_nm, r.fp_total, r.fp_radiative_window, r.fp_evanescent, r.oracle_image, r.oracle_spp,
                    r.oracle_nonradiative, r.rel_error] for r in rows],
                  f"validate: max relative error {err:.3g} over 2-10 nm gaps (limit {DREXHAGE_TOLERANCE:g}), "
                  f"monotone={'yes' if mono else 'no'}: {'PASS' if ok else 'FAIL'}")
    if not ok:
        table.failure = ValidationFailed(table.summary)
    return table


COMMANDS = {
    "emt": cmd_emt,
    "purcell": cmd_purcell,
    "spectrum": cmd_spectrum,
    "farfield": cmd_farfield,
    "cpr": cmd_cpr,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
}

# validate runs without a config file
_DEFAULT_CONFIG = '{"stack": {"preset": "au-zns"}, "dipole": {"wavelength_nm": 900}}'


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="strata", description="Dipole emission in planar multilayers.")
    ap.add_argument("--version", action="version", version=f"strata {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration", required=name != "validate")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        p.add_argument("--format", choices=("csv", "json"), help="overrides output.format")
        p.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on it)")
    return ap


def _fail(exc: StrataError) -> int:
    d = exc.to_dict()
    d["exit_code"] = exc.exit_code
    print(json.dumps(d, sort_keys=True), file=sys.stderr)
    return exc.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = parse_config(_DEFAULT_CONFIG)
        fmt = args.format or cfg.output.format
        out_dir = Path(args.out or (Path(cfg.base_dir) / cfg.output.directory))
        if args.threads < 1:
            raise DomainError("--threads must be >= 1")
        with mapper(args.threads) as map_fn:
            table = COMMANDS[args.command](cfg, map_fn)
        path = out_dir / f"{table.name}.{fmt}"
        try:
            write_atomic(path, render(table, fmt))
        except OSError as exc:
            err = StrataError(f"cannot write {path}: {exc}")
            err.exit_code = 4
            raise err from exc
    except StrataError as exc:
        return _fail(exc)
    print(f"{table.summary} -> {path}")
    if table.failure is not None:
        return _fail(table.failure)
    return 0


if __name__ == "__main__":
    sys.exit(main())
