"""CSV tables and SVG figures for experiment output."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .analysis import CircleFit, ConvergenceRow, SweepRecord, TableRow
from .contact import DeformedConfig
from .errors import SolverError

VERTICES_HEADER = ["index", "x_ref", "y_ref", "x_def", "y_def", "in_contact"]
SWEEP_HEADER = ["f", "height", "height_drop", "contacts"]
TABLE1_HEADER = ["contacts", "f_used", "R_over_R0", "rms"]
CONVERGE_HEADER = ["n", "apex_height", "discrepancy"]

FEASIBILITY_TOL = 1e-9


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def check_feasible(cfg: DeformedConfig, tol: float = FEASIBILITY_TOL) -> None:
    ymin = float(np.min(cfg.deformed_vertices[:, 1]))
    if ymin < -tol * cfg.polygon.circumradius:
        raise SolverError(f"configuration penetrates the surface: min y = {ymin:.3e}")


def vertices_csv(cfg: DeformedConfig) -> str:
    check_feasible(cfg)
    ref, d = cfg.polygon.vertices, cfg.deformed_vertices
    rows = (
        (i + 1, ref[i, 0], ref[i, 1], d[i, 0], d[i, 1], (i + 1) in cfg.contact_set)
        for i in range(cfg.polygon.n)
    )
    return _csv(VERTICES_HEADER, rows)


def sweep_csv(records: list[SweepRecord]) -> str:
    return _csv(SWEEP_HEADER, ((r.f, r.height, r.height_drop, r.contacts) for r in records))


def table1_csv(rows: list[TableRow]) -> str:
    return _csv(TABLE1_HEADER, ((r.contacts, r.f_used, r.r_over_r0, r.rms) for r in rows))


def converge_csv(rows: list[ConvergenceRow]) -> str:
    for r in rows:
        check_feasible(r.config)
    return _csv(CONVERGE_HEADER, ((r.n, r.apex_height, r.discrepancy) for r in rows))


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def summary(pairs) -> str:
    """``key: value`` lines, floats at full precision."""
    lines = []
    for key, value in pairs:
        if isinstance(value, (list, tuple, frozenset, set)):
            value = " ".join(fmt(v) for v in sorted(value))
        else:
            value = fmt(value) if not isinstance(value, str) else value
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


# --- figures ---------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "polyshell"
    return plt


def _closed(v):
    return np.vstack([v, v[:1]])


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None})
    return path


def plot_config(cfg: DeformedConfig, path, fit: CircleFit | None = None, title: str | None = None):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 5))
    ref = _closed(cfg.polygon.vertices)
    d = _closed(cfg.deformed_vertices)
    R = cfg.polygon.circumradius
    ax.axhline(0.0, color="k", lw=1.5)
    ax.plot(ref[:, 0], ref[:, 1], "--", color="0.5", lw=1, label="reference")
    ax.plot(d[:, 0], d[:, 1], "-o", color="C0", ms=3, lw=1.5, label=cfg.phase)
    contact = [v - 1 for v in sorted(cfg.contact_set)]
    ax.plot(cfg.deformed_vertices[contact, 0], cfg.deformed_vertices[contact, 1], "s", color="C3", ms=5)
    if fit is not None:
        t = np.linspace(0, 2 * np.pi, 361)
        ax.plot(
            fit.center[0] + fit.radius * np.cos(t),
            fit.center[1] + fit.radius * np.sin(t),
            "--",
            color="C3",
            lw=0.8,
            label=f"fit R/R0={fit.radius / R:.3f}",
        )
    ax.set_aspect("equal")
    ax.set_xlim(-2.2 * R, 2.2 * R)
    ax.set_ylim(-0.3 * R, 2.3 * R)
    ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_sweep(records: list[SweepRecord], path, reference_height: float):
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.8))
    f = np.array([r.f for r in records])
    rel = np.array([r.height / reference_height for r in records])
    nc = np.array([r.contacts for r in records])
    ax1.plot(f, rel, "-", color="0.6", lw=0.8)
    ax1.scatter(f, rel, s=6 * nc, c=nc, cmap="viridis", zorder=3)
    ax1.set_xlabel("force per vertex")
    ax1.set_ylabel("height / initial height")
    ax2.step(f, nc, where="post")
    ax2.set_xlabel("force per vertex")
    ax2.set_ylabel("contacts")
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_table1(rows: list[TableRow], path):
    plt = _pyplot()
    shown = [r for r in rows if r.config is not None]
    fig, axes = plt.subplots(1, max(1, len(shown)), figsize=(3.2 * max(1, len(shown)), 3.4), squeeze=False)
    for ax, r in zip(axes[0], shown):
        cfg = r.config
        d = _closed(cfg.deformed_vertices)
        ax.axhline(0.0, color="k", lw=1.2)
        ax.plot(d[:, 0], d[:, 1], "-o", ms=3)
        ax.set_aspect("equal")
        label = "n/a" if r.r_over_r0 is None else f"{r.r_over_r0:.3f}"
        ax.set_title(f"{r.contacts} contacts, R/R0={label}", fontsize=9)
    fig.tight_layout()
    out = _save(fig, path)
    plt.close(fig)
    return out


def plot_convergence(rows: list[ConvergenceRow], path):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.axhline(0.0, color="k", lw=1.2)
    for i, r in enumerate(rows):
        d = _closed(r.config.deformed_vertices)
        ax.plot(d[:, 0], d[:, 1], "-", lw=1, color=plt.cm.viridis(i / max(1, len(rows) - 1)), label=f"n={r.n}")
    if rows:
        # circumscribed reference circle, apex and symmetry axis aligned with the last outline
        last = rows[-1]
        R = last.config.polygon.circumradius
        t = np.linspace(0, 2 * np.pi, 361)
        ax.plot(R * np.cos(t), last.apex_height - R + R * np.sin(t), ":", color="k", lw=1)
    ax.set_aspect("equal")
    ax.legend(fontsize=7, ncol=2)
    out = _save(fig, path)
    plt.close(fig)
    return out
