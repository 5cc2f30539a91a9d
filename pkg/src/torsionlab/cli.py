"""Command-line frontend.

Runs are described by plain ``key=value`` config files; every key can also
be given (or overridden) on the command line as ``--key value``.  Five
commands cover the package surface:

    radial     closed-form ball solution samples plus functional catalog
    solve      discrete torsion solve: field values and Neumann trace
    verify     identity report for a discrete solve (exit 1 on failure)
    rigidity   simplex descent of the Neumann-deviation objective
    sweep      J over a parametrized family of domains

Output is CSV or JSON (one object per row), written with full float
precision so identical configs produce byte-identical artifacts.

Exit codes: 0 success / all verdicts pass, 1 verdict failure, 2 invalid
config, 3 solver non-convergence.
"""

from __future__ import annotations

import io
import json
import math
import re
import sys
from dataclasses import dataclass, field

from .closed_form import radial_torsion_solution
from .discretization import (
    SolverConvergenceError,
    StarDomain,
    solve_torsion,
    neumann_trace,
)
from .functionals import compute_catalog, identity_report
from .geometry import make_profile
from .rigidity import ball_family, offset_family, optimize_shape, sweep

__all__ = ["RunConfig", "ConfigError", "parse_config", "run", "main"]

COMMANDS = ("radial", "solve", "verify", "rigidity", "sweep")
GEOMETRIES = ("euclidean", "spherical", "hyperbolic")
FORMATS = ("csv", "json")
FAMILIES = ("offset", "ball")

# r_max for profile construction: the hemisphere cap is a hard geometric
# bound, the others are generous working limits for desk-scale runs.
_R_MAX = {"euclidean": 50.0, "spherical": math.pi / 2, "hyperbolic": 50.0}

_COEFF_KEY = re.compile(r"^([ab])([1-9][0-9]?)$")

_SCALAR_KEYS = {
    "command": str,
    "geometry": str,
    "n": int,
    "R0": float,
    "Ns": int,
    "Ntheta": int,
    "tol": float,
    "max_iter": int,
    "report_tol": float,
    "out": str,
    "format": str,
    "seed": int,
    "modes": int,
    "budget": int,
    "family": str,
    "family_values": str,
}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


@dataclass
class RunConfig:
    command: str = ""
    geometry: str = "spherical"
    n: int = 2
    R0: float = math.pi / 4
    cos_coeffs: dict = field(default_factory=dict)   # harmonic index -> a_k
    sin_coeffs: dict = field(default_factory=dict)
    Ns: int = 64
    Ntheta: int = 128
    tol: float = 1e-10
    max_iter: int | None = None
    report_tol: float = 1e-2
    out: str | None = None
    format: str = "csv"
    seed: int = 0
    modes: int = 2
    budget: int = 200
    family: str = "offset"
    family_values: tuple = (0.0, 0.05, 0.1, 0.2)

    def domain(self) -> StarDomain:
        K = max([0, *self.cos_coeffs.keys(), *self.sin_coeffs.keys()])
        a = tuple(self.cos_coeffs.get(k, 0.0) for k in range(1, K + 1))
        b = tuple(self.sin_coeffs.get(k, 0.0) for k in range(1, K + 1))
        return StarDomain(self.R0, a, b)

    def profile(self):
        return make_profile(self.geometry, _R_MAX[self.geometry])


def _parse_value(key: str, raw: str, where: str):
    caster = _SCALAR_KEYS[key]
    try:
        if caster is int:
            return int(raw)
        if caster is float:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{where}: key {key!r} expects a {caster.__name__}, "
                          f"got {raw!r}") from None


def parse_config(text: str = "", overrides=()) -> RunConfig:
    """Parse a key=value config body plus (key, value) override pairs.

    Unknown keys, malformed values and violated module preconditions are
    all reported as ``ConfigError`` with the source line (or flag) named.
    """
    cfg = RunConfig()
    sources = {}

    def apply(key: str, raw: str, where: str):
        key = key.strip()
        raw = raw.strip()
        sources[key] = where
        m = _COEFF_KEY.match(key)
        if m:
            kind, idx = m.group(1), int(m.group(2))
            try:
                val = float(raw)
            except ValueError:
                raise ConfigError(
                    f"{where}: key {key!r} expects a float, got {raw!r}"
                ) from None
            target = cfg.cos_coeffs if kind == "a" else cfg.sin_coeffs
            target[idx] = val
            return
        if key not in _SCALAR_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        value = _parse_value(key, raw, where)
        if key == "family_values":
            try:
                cfg.family_values = tuple(float(v) for v in value.split(","))
            except ValueError:
                raise ConfigError(
                    f"{where}: family_values expects comma-separated floats, "
                    f"got {value!r}") from None
        else:
            setattr(cfg, key, value)

    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"config line {lineno}: expected key=value, got {body!r}")
        key, raw = body.split("=", 1)
        apply(key, raw, f"config line {lineno}")

    for key, raw in overrides:
        apply(key, raw, f"flag --{key}")

    _validate(cfg, sources)
    return cfg


def _validate(cfg: RunConfig, sources: dict) -> None:
    def where(key: str) -> str:
        return sources.get(key, "config")

    def fail(key: str, message: str):
        raise ConfigError(f"{where(key)}: {message}")

    if cfg.command not in COMMANDS:
        fail("command", f"command must be one of {COMMANDS}, got {cfg.command!r}")
    if cfg.geometry not in GEOMETRIES:
        fail("geometry", f"geometry must be one of {GEOMETRIES}, got {cfg.geometry!r}")
    if cfg.n < 2:
        fail("n", f"n must be >= 2, got {cfg.n}")
    if cfg.command != "radial" and cfg.n != 2:
        fail("n", f"command {cfg.command!r} runs the grid solver, which is "
                  f"surface-only (n = 2); got n = {cfg.n}")
    if not (cfg.R0 > 0 and math.isfinite(cfg.R0)):
        fail("R0", f"R0 must be positive, got {cfg.R0}")
    if cfg.Ns < 8:
        fail("Ns", f"Ns must be at least 8, got {cfg.Ns}")
    if cfg.Ntheta < 16 or cfg.Ntheta % 2:
        fail("Ntheta", f"Ntheta must be even and at least 16, got {cfg.Ntheta}")
    if not (cfg.tol > 0):
        fail("tol", f"tol must be positive, got {cfg.tol}")
    if cfg.max_iter is not None and cfg.max_iter < 1:
        fail("max_iter", f"max_iter must be positive, got {cfg.max_iter}")
    if not (cfg.report_tol > 0):
        fail("report_tol", f"report_tol must be positive, got {cfg.report_tol}")
    if cfg.format not in FORMATS:
        fail("format", f"format must be one of {FORMATS}, got {cfg.format!r}")
    if not (1 <= cfg.modes <= 8):
        fail("modes", f"modes must lie in 1..8, got {cfg.modes}")
    if cfg.budget < 50:
        fail("budget", f"budget must be at least 50, got {cfg.budget}")
    if cfg.family not in FAMILIES:
        fail("family", f"family must be one of {FAMILIES}, got {cfg.family!r}")

    r_max = _R_MAX[cfg.geometry]
    try:
        domain = cfg.domain()
    except ValueError as exc:
        raise ConfigError(f"{where('R0')}: {exc}") from None
    if cfg.command == "radial":
        if cfg.R0 >= r_max:
            fail("R0", f"ball radius R0 = {cfg.R0} reaches the profile bound "
                       f"r_max = {r_max:.10g}")
    elif domain.max_radius >= r_max:
        fail("R0", f"domain radius {domain.max_radius:.10g} reaches the "
                   f"profile bound r_max = {r_max:.10g}"
                   + (" (hemisphere cap)" if cfg.geometry == "spherical" else ""))
    if cfg.command == "sweep":
        for v in cfg.family_values:
            bound = v + cfg.R0 if cfg.family == "offset" else v
            if cfg.family == "offset" and not (0 <= v < cfg.R0):
                fail("family_values", f"offset {v} must lie in [0, R0)")
            if bound >= r_max:
                fail("family_values", f"family member {v} leaves the profile "
                                      f"bound r_max = {r_max:.10g}")


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".17g")


def _emit(rows: list, columns: list, cfg: RunConfig) -> None:
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for row in rows:
            buf.write(",".join(_format_cell(row.get(c)) for c in columns) + "\n")
        payload = buf.getvalue()
    else:
        payload = json.dumps([{c: row.get(c) for c in columns} for row in rows],
                             indent=2, allow_nan=True) + "\n"
    if cfg.out is None:
        sys.stdout.write(payload)
    else:
        with open(cfg.out, "w", newline="") as sink:
            sink.write(payload)


def _run_radial(cfg: RunConfig) -> int:
    profile = cfg.profile()
    sol = radial_torsion_solution(profile, cfg.n, cfg.R0)
    rows = []
    radii = [cfg.R0 * (j - 0.5) / cfg.Ns for j in range(1, cfg.Ns + 1)]
    for r in radii:
        rows.append({"record": "sample", "name": "u", "r": r, "value": float(sol.u(r))})
        rows.append({"record": "sample", "name": "u_r", "r": r, "value": float(sol.u_r(r))})
    for name, value in compute_catalog(sol).as_dict().items():
        rows.append({"record": "catalog", "name": name, "r": None, "value": value})
    _emit(rows, ["record", "name", "r", "value"], cfg)
    return 0


def _run_solve(cfg: RunConfig) -> int:
    field_ = solve_torsion(cfg.profile(), cfg.domain(), cfg.Ns, cfg.Ntheta,
                           tol=cfg.tol, max_iter=cfg.max_iter)
    grid = field_.grid
    values, weights = neumann_trace(field_)
    rows = []
    for j in range(grid.ns):
        for i in range(grid.ntheta):
            rows.append({"record": "node", "j": j, "i": i,
                         "theta": float(grid.theta[i]), "r": float(grid.r[j, i]),
                         "value": float(field_.values[j, i]), "weight": None})
    for i in range(grid.ntheta):
        rows.append({"record": "neumann", "j": None, "i": i,
                     "theta": float(grid.theta[i]), "r": float(grid.rho[i]),
                     "value": float(values[i]), "weight": float(weights[i])})
    _emit(rows, ["record", "j", "i", "theta", "r", "value", "weight"], cfg)
    return 0


def _run_verify(cfg: RunConfig) -> int:
    field_ = solve_torsion(cfg.profile(), cfg.domain(), cfg.Ns, cfg.Ntheta,
                           tol=cfg.tol, max_iter=cfg.max_iter)
    report = identity_report(compute_catalog(field_), cfg.report_tol)
    rows = [{
        "label": rec.label,
        "hypothesis_class": rec.hypothesis_class,
        "lhs": rec.lhs,
        "rhs": rec.rhs,
        "abs_residual": rec.abs_residual,
        "rel_residual": rec.rel_residual,
        "verdict": rec.verdict,
    } for rec in report]
    _emit(rows, ["label", "hypothesis_class", "lhs", "rhs", "abs_residual",
                 "rel_residual", "verdict"], cfg)
    return 0 if report.all_applicable_pass else 1


def _run_rigidity(cfg: RunConfig) -> int:
    trace = optimize_shape(cfg.domain(), cfg.modes, cfg.profile(), cfg.budget,
                           cfg.Ns, cfg.Ntheta, solver_tol=cfg.tol)
    columns = (["index", "evaluations", "j", "spread", "r0"]
               + [f"a{k}" for k in range(1, cfg.modes + 1)]
               + [f"b{k}" for k in range(1, cfg.modes + 1)]
               + ["status"])
    rows = []
    for row in trace.rows:
        cells = {"index": row.index, "evaluations": row.evaluations,
                 "j": row.j, "spread": row.spread, "r0": row.r0,
                 "status": None}
        for k in range(1, cfg.modes + 1):
            cells[f"a{k}"] = row.cos_coeffs[k - 1] if k <= len(row.cos_coeffs) else 0.0
            cells[f"b{k}"] = row.sin_coeffs[k - 1] if k <= len(row.sin_coeffs) else 0.0
        rows.append(cells)
    if rows:
        rows[-1] = dict(rows[-1], status=trace.status)
    _emit(rows, columns, cfg)
    return 0


def _run_sweep(cfg: RunConfig) -> int:
    profile = cfg.profile()
    if cfg.family == "offset":
        family = offset_family(cfg.R0, cfg.family_values)
    else:
        family = ball_family(cfg.family_values)
    table = sweep(family, profile, cfg.Ns, cfg.Ntheta, tol=cfg.tol)
    rows = [{"parameter": r.parameter, "j": r.j, "c_mean": r.c_mean,
             "c_std": r.c_std, "status": r.status} for r in table]
    _emit(rows, ["parameter", "j", "c_mean", "c_std", "status"], cfg)
    return 0


_RUNNERS = {
    "radial": _run_radial,
    "solve": _run_solve,
    "verify": _run_verify,
    "rigidity": _run_rigidity,
    "sweep": _run_sweep,
}


def run(cfg: RunConfig) -> int:
    try:
        return _RUNNERS[cfg.command](cfg)
    except SolverConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    path = None
    overrides = []
    k = 0
    while k < len(argv):
        token = argv[k]
        if token.startswith("--"):
            if k + 1 >= len(argv):
                print(f"flag {token} is missing a value", file=sys.stderr)
                return 2
            overrides.append((token[2:], argv[k + 1]))
            k += 2
        elif path is None:
            path = token
            k += 1
        else:
            print(f"unexpected positional argument {token!r}", file=sys.stderr)
            return 2

    text = ""
    if path is not None:
        try:
            with open(path) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"cannot read config file {path!r}: {exc}", file=sys.stderr)
            return 2
    try:
        cfg = parse_config(text, overrides)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
