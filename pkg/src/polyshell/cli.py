"""Command-line front end.

Subcommands: ``indent``, ``relax``, ``sweep``, ``table1``, ``converge`` and
``verify``. Settings come from an optional ``key = value`` config file
(``--config``) and are overridden by flags. Without ``--out`` the CSV goes to
stdout; with ``--out DIR`` CSV and SVG files are written there and a
``key: value`` summary is printed.

Exit codes: 0 success, 1 solver failure (or failed ``verify``), 2 bad config.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, report
from .contact import DEFAULT_CONTACT_TOL, indent, relax
from .energy import ElasticParams
from .errors import DomainError, SolverError
from .geometry import build_polygon
from .solver import SolverOptions

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2

DEFAULT_N_LIST = "10,12,15,18,20,22,25,28,30,33,35,38,40"


class ConfigError(Exception):
    pass


def _floats(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:count`` (inclusive linspace)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:count")
        return list(np.linspace(float(parts[0]), float(parts[1]), int(parts[2])))
    return [float(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


# option name -> (type, default, help)
OPTIONS = {
    "n": (int, 10, "vertex count"),
    "circumradius": (float, 1.0, "circumradius R0 of the reference polygon"),
    "k": (float, 1.0, "stretching constant"),
    "kappa": (float, 1.0, "bending constant"),
    "f": (float, 0.25, "load (per vertex, or total with --force-mode total)"),
    "force_mode": (str, "per-vertex", "per-vertex | total"),
    "f_grid": (str, "0:1.2:50", "sweep grid: a,b,c or start:stop:count"),
    "counts": (str, "3,5,7", "target contact counts for table1"),
    "n_list": (str, DEFAULT_N_LIST, "vertex counts for converge (ascending)"),
    "total_force": (float, 2.25, "total load for converge"),
    "samples": (int, 720, "resampling points for the shape discrepancy"),
    "bending_rows": (str, "all", "all | free_only"),
    "contact_tol": (float, DEFAULT_CONTACT_TOL, "contact tolerance, relative to R0"),
    "stat_tol": (float, 1e-10, "stationarity tolerance"),
    "feas_tol": (float, 1e-10, "feasibility tolerance"),
    "comp_tol": (float, 1e-10, "complementarity tolerance"),
    "c_pdas": (float, 1.0, "PDAS complementarity constant"),
    "max_iters": (int, 0, "PDAS iteration cap (0: 10 n)"),
    "seed": (int, 42, "random seed for verify"),
    "instances": (int, 100, "random instances for verify"),
    "out": (str, "", "output directory (default: CSV on stdout)"),
    "figures": (str, "yes", "render SVG figures when --out is set (yes | no)"),
}


def read_config(path) -> dict:
    values = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"config line {lineno}: unknown field '{key}'")
        typ = OPTIONS[key][0]
        try:
            values[key] = typ(value)
        except ValueError as exc:
            raise ConfigError(f"config field '{key}': cannot parse {value!r}") from exc
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyshell", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "indent": "single loaded equilibrium",
        "relax": "load, then release with irreversible adhesion",
        "sweep": "height and contact count over a force grid",
        "table1": "relaxed free-arc radius per contact count",
        "converge": "shape vs vertex count at fixed total load",
        "verify": "randomised solver and assembly property suite",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="key = value file; flags override it")
        for key, (typ, _, hlp) in OPTIONS.items():
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, type=typ, default=None, help=hlp)
        p.add_argument("--R", dest="circumradius", type=float, default=None, help=argparse.SUPPRESS)
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = {k: v[1] for k, v in OPTIONS.items()}
    if args.config:
        cfg.update(read_config(args.config))
    for key in OPTIONS:
        value = getattr(args, key)
        if value is not None:
            cfg[key] = value
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    def need(ok, field, msg):
        if not ok:
            raise ConfigError(f"{field}: {msg}")

    need(cfg["n"] >= 3, "n", "must be >= 3")
    for key in ("circumradius", "k", "kappa", "contact_tol", "stat_tol", "feas_tol", "comp_tol", "c_pdas"):
        need(np.isfinite(cfg[key]) and cfg[key] > 0, key, "must be > 0")
    need(np.isfinite(cfg["f"]) and cfg["f"] >= 0, "f", "must be >= 0")
    need(np.isfinite(cfg["total_force"]) and cfg["total_force"] >= 0, "total_force", "must be >= 0")
    need(cfg["force_mode"] in ("per-vertex", "total"), "force_mode", "must be per-vertex or total")
    need(cfg["bending_rows"] in ("all", "free_only"), "bending_rows", "must be all or free_only")
    need(cfg["figures"] in ("yes", "no"), "figures", "must be yes or no")
    need(cfg["max_iters"] >= 0, "max_iters", "must be >= 0")
    need(cfg["samples"] >= 3, "samples", "must be >= 3")
    need(cfg["instances"] >= 1, "instances", "must be >= 1")
    try:
        grid = _floats(cfg["f_grid"])
    except ValueError as exc:
        raise ConfigError(f"f_grid: {exc}") from exc
    need(len(grid) > 0 and all(g >= 0 for g in grid), "f_grid", "must be nonnegative")
    need(all(b >= a for a, b in zip(grid, grid[1:])), "f_grid", "must be sorted ascending")
    cfg["_f_grid"] = grid
    try:
        cfg["_counts"] = _ints(cfg["counts"])
        cfg["_n_list"] = _ints(cfg["n_list"])
    except ValueError as exc:
        raise ConfigError(f"counts/n_list: {exc}") from exc
    need(all(n >= 3 for n in cfg["_n_list"]) and cfg["_n_list"], "n_list", "needs vertex counts >= 3")
    need(cfg["_n_list"] == sorted(cfg["_n_list"]), "n_list", "must be ascending")


def _per_vertex(cfg, f):
    return f / (cfg["n"] - 1) if cfg["force_mode"] == "total" else f


def _opts(cfg) -> SolverOptions:
    return SolverOptions(
        stat_tol=cfg["stat_tol"],
        feas_tol=cfg["feas_tol"],
        comp_tol=cfg["comp_tol"],
        c_pdas=cfg["c_pdas"],
        max_iters=cfg["max_iters"] or None,
    )


class Output:
    def __init__(self, cfg, stdout):
        self.dir = Path(cfg["out"]) if cfg["out"] else None
        self.figures = self.dir is not None and cfg["figures"] == "yes"
        self.stdout = stdout

    def table(self, name: str, text: str):
        if self.dir is None:
            self.stdout.write(text)
        else:
            report.write_text(self.dir / name, text)

    def summary(self, pairs):
        if self.dir is not None:
            text = report.summary(pairs)
            report.write_text(self.dir / "summary.txt", text)
            self.stdout.write(text)


def _config_observables(cfg_obj):
    fit = analysis.free_arc_fit(cfg_obj)
    h0 = analysis.reference_height(cfg_obj.polygon)
    h = analysis.apparent_height(cfg_obj)
    pairs = [
        ("phase", cfg_obj.phase),
        ("n", cfg_obj.polygon.n),
        ("force_per_vertex", cfg_obj.force),
        ("contacts", len(cfg_obj.contact_set)),
        ("contact_set", cfg_obj.contact_set),
        ("height", h),
        ("height_drop", h0 - h),
        ("elastic_energy", cfg_obj.elastic_energy),
        ("solver", cfg_obj.solve.method),
        ("iterations", cfg_obj.solve.iterations),
        ("kkt_residual", cfg_obj.solve.kkt_residual),
    ]
    if fit is not None:
        pairs += [
            ("fit_center_x", fit.center[0]),
            ("fit_center_y", fit.center[1]),
            ("fit_radius", fit.radius),
            ("fit_R_over_R0", fit.radius / cfg_obj.polygon.circumradius),
            ("fit_rms", fit.rms_residual),
        ]
    return pairs, fit


def cmd_indent(cfg, out: Output):
    polygon = build_polygon(cfg["n"], cfg["circumradius"])
    params = ElasticParams(cfg["k"], cfg["kappa"])
    c = indent(
        polygon,
        params,
        _per_vertex(cfg, cfg["f"]),
        bending_rows=cfg["bending_rows"],
        contact_tol=cfg["contact_tol"],
        opts=_opts(cfg),
    )
    out.table("vertices.csv", report.vertices_csv(c))
    pairs, fit = _config_observables(c)
    out.summary(pairs)
    if out.figures:
        report.plot_config(c, out.dir / "indent.svg", fit)
    return c


def cmd_relax(cfg, out: Output):
    polygon = build_polygon(cfg["n"], cfg["circumradius"])
    params = ElasticParams(cfg["k"], cfg["kappa"])
    loaded = indent(
        polygon,
        params,
        _per_vertex(cfg, cfg["f"]),
        bending_rows=cfg["bending_rows"],
        contact_tol=cfg["contact_tol"],
        opts=_opts(cfg),
    )
    relaxed = relax(loaded, _opts(cfg))
    out.table("vertices.csv", report.vertices_csv(relaxed))
    pairs, fit = _config_observables(relaxed)
    pairs.insert(1, ("indented_contacts", len(loaded.contact_set)))
    pairs.insert(2, ("indented_energy", loaded.elastic_energy))
    out.summary(pairs)
    if out.figures:
        report.plot_config(loaded, out.dir / "indent.svg", analysis.free_arc_fit(loaded))
        report.plot_config(relaxed, out.dir / "relax.svg", fit)


def cmd_sweep(cfg, out: Output):
    grid = [_per_vertex(cfg, f) for f in cfg["_f_grid"]]
    params = ElasticParams(cfg["k"], cfg["kappa"])
    records = analysis.force_sweep(
        cfg["n"],
        cfg["circumradius"],
        params,
        grid,
        bending_rows=cfg["bending_rows"],
        contact_tol=cfg["contact_tol"],
        opts=_opts(cfg),
    )
    out.table("sweep.csv", report.sweep_csv(records))
    out.summary(
        [
            ("points", len(records)),
            ("contact_plateaus", len({r.contacts for r in records})),
            ("min_height", min(r.height for r in records)),
        ]
    )
    if out.figures:
        h0 = analysis.reference_height(build_polygon(cfg["n"], cfg["circumradius"]))
        report.plot_sweep(records, out.dir / "sweep.svg", h0)


def cmd_table1(cfg, out: Output):
    params = ElasticParams(cfg["k"], cfg["kappa"])
    rows = analysis.relaxation_study(
        cfg["n"],
        cfg["circumradius"],
        params,
        cfg["_counts"],
        bending_rows=cfg["bending_rows"],
        contact_tol=cfg["contact_tol"],
        opts=_opts(cfg),
    )
    out.table("table1.csv", report.table1_csv(rows))
    out.summary([(f"R_over_R0[{r.contacts}]", r.r_over_r0 if r.reached else "unreached") for r in rows])
    if out.figures:
        report.plot_table1(rows, out.dir / "table1.svg")


def cmd_converge(cfg, out: Output):
    params = ElasticParams(cfg["k"], cfg["kappa"])
    rows = analysis.convergence_study(
        cfg["_n_list"],
        cfg["total_force"],
        cfg["circumradius"],
        params,
        samples=cfg["samples"],
        bending_rows=cfg["bending_rows"],
        contact_tol=cfg["contact_tol"],
        opts=_opts(cfg),
    )
    out.table("converge.csv", report.converge_csv(rows))
    out.summary([("n_max", rows[-1].n), ("total_force", cfg["total_force"])])
    if out.figures:
        report.plot_convergence(rows, out.dir / "converge.svg")


def cmd_verify(cfg, out: Output):
    from .verify import run_suite

    checks = run_suite(cfg["seed"], cfg["instances"])
    for c in checks:
        out.stdout.write(c.line() + "\n")
    return all(c.passed for c in checks)


COMMANDS = {
    "indent": cmd_indent,
    "relax": cmd_relax,
    "sweep": cmd_sweep,
    "table1": cmd_table1,
    "converge": cmd_converge,
    "verify": cmd_verify,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = resolve(args)
    except ConfigError as exc:
        stderr.write(f"polyshell: configuration error: {exc}\n")
        return EXIT_CONFIG
    out = Output(cfg, stdout)
    try:
        ok = COMMANDS[args.command](cfg, out)
    except SolverError as exc:
        stderr.write(f"polyshell: solver failure: {exc}\n")
        return EXIT_SOLVER
    except DomainError as exc:
        stderr.write(f"polyshell: configuration error: {exc}\n")
        return EXIT_CONFIG
    if args.command == "verify" and not ok:
        return EXIT_SOLVER
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
