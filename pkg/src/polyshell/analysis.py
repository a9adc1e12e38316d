"""Observables derived from deformed configurations.

Apparent height, least-squares circle fits of the free arc, force sweeps,
the relaxed-radius table and the vertex-count convergence study.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .contact import DEFAULT_CONTACT_TOL, DeformedConfig, indent, relax
from .energy import BendingRows, ElasticParams, build_model
from .errors import DegenerateInputError, DomainError, SolverError
from .geometry import Polygon, build_polygon
from .solver import SolverOptions


@dataclass(frozen=True)
class CircleFit:
    center: np.ndarray
    radius: float
    rms_residual: float
    point_count: int
    iterations: int = 0


@dataclass(frozen=True)
class SweepRecord:
    f: float
    height: float
    height_drop: float
    contacts: int
    fit: CircleFit | None = None


@dataclass(frozen=True)
class TableRow:
    contacts: int
    f_used: float | None
    r_over_r0: float | None
    rms: float | None
    config: DeformedConfig | None = None

    @property
    def reached(self) -> bool:
        return self.r_over_r0 is not None


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    config: DeformedConfig
    apex_height: float
    discrepancy: float


def threads() -> int:
    try:
        return max(1, int(os.environ.get("POLYSHELL_THREADS", "")))
    except ValueError:
        return max(1, min(4, os.cpu_count() or 1))


def _map(fn, items):
    items = list(items)
    workers = min(threads(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def apparent_height(cfg: DeformedConfig) -> float:
    return float(np.max(cfg.deformed_vertices[:, 1]))


def reference_height(polygon: Polygon) -> float:
    return float(np.max(polygon.heights))


def fit_circle(points, max_iter: int = 50, tol: float = 1e-12) -> CircleFit:
    """Geometric least-squares circle through ``points``.

    Starts from the algebraic (Kasa) fit, then refines ``sum (|p - c| - r)^2``
    with Gauss-Newton until the step falls below ``tol``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
        raise DegenerateInputError("need at least 3 points in the plane")
    x, y = pts[:, 0], pts[:, 1]
    # centring keeps the algebraic system well conditioned far from the origin
    shift = pts.mean(axis=0)
    xs, ys = x - shift[0], y - shift[1]
    A = np.column_stack([xs, ys, np.ones_like(xs)])
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise DegenerateInputError("points are collinear")
    sol, *_ = np.linalg.lstsq(A, xs**2 + ys**2, rcond=None)
    a, b = sol[0] / 2, sol[1] / 2
    r = np.sqrt(sol[2] + a * a + b * b)
    params = np.array([a, b, r])

    it = 0
    for it in range(1, max_iter + 1):
        dx, dy = xs - params[0], ys - params[1]
        rho = np.hypot(dx, dy)
        if np.any(rho == 0):
            break
        res = rho - params[2]
        J = np.column_stack([-dx / rho, -dy / rho, -np.ones_like(rho)])
        step, *_ = np.linalg.lstsq(J, -res, rcond=None)
        params = params + step
        if np.max(np.abs(step)) < tol * max(1.0, abs(params[2])):
            break
    center = params[:2] + shift
    radius = abs(float(params[2]))
    rms = float(np.sqrt(np.mean((np.hypot(x - center[0], y - center[1]) - radius) ** 2)))
    return CircleFit(center, radius, rms, len(pts), it)


def free_arc_fit(cfg: DeformedConfig) -> CircleFit | None:
    """Circle fit over vertices outside the contact set, or ``None`` if degenerate."""
    free = [v - 1 for v in cfg.free_vertices]
    if len(free) < 3:
        return None
    try:
        return fit_circle(cfg.deformed_vertices[free])
    except DegenerateInputError:
        return None


def force_sweep(
    n: int,
    circumradius: float,
    params: ElasticParams,
    f_grid,
    *,
    bending_rows: BendingRows = "all",
    contact_tol: float = DEFAULT_CONTACT_TOL,
    opts: SolverOptions | None = None,
) -> list[SweepRecord]:
    f_grid = np.asarray(f_grid, dtype=float)
    if f_grid.ndim != 1 or np.any(f_grid < 0) or np.any(np.diff(f_grid) < 0):
        raise DomainError("force grid must be ascending and nonnegative")
    polygon = build_polygon(n, circumradius)
    model = build_model(polygon, params, bending_rows)
    h0 = reference_height(polygon)

    def one(f):
        try:
            cfg = indent(polygon, model=model, f=f, contact_tol=contact_tol, opts=opts)
        except SolverError as exc:
            raise SolverError(f"solve failed at f={f!r}: {exc}", exc.result) from exc
        h = apparent_height(cfg)
        return SweepRecord(float(f), h, h0 - h, len(cfg.contact_set), free_arc_fit(cfg))

    return _map(one, f_grid)


def relaxation_study(
    n: int,
    circumradius: float,
    params: ElasticParams,
    target_contact_counts,
    *,
    bending_rows: BendingRows = "all",
    contact_tol: float = DEFAULT_CONTACT_TOL,
    rel_tol: float = 1e-6,
    opts: SolverOptions | None = None,
) -> list[TableRow]:
    """Relaxed free-arc radius over ``R0`` for each target contact count.

    For every target, the smallest indentation force giving at least that many
    contacts is bracketed by doubling and then bisected to ``rel_tol``. If the
    count there overshoots the target, the row is reported as not reached.
    """
    polygon = build_polygon(n, circumradius)
    model = build_model(polygon, params, bending_rows)

    def contacts_at(f):
        cfg = indent(polygon, model=model, f=f, contact_tol=contact_tol, opts=opts)
        return len(cfg.contact_set), cfg

    f_scale = params.k * circumradius

    def row(target):
        target = int(target)
        if target < 1 or target > n:
            return TableRow(target, None, None, None)
        count, cfg = contacts_at(0.0)
        lo, hi = 0.0, None
        if count >= target:
            hi, hi_cfg = 0.0, cfg
        else:
            f = 1e-3 * f_scale
            while f < 1e6 * f_scale:
                count, cfg = contacts_at(f)
                if count >= target:
                    hi, hi_cfg = f, cfg
                    break
                lo, f = f, 2 * f
            if hi is None:
                return TableRow(target, None, None, None)
            while hi - lo > rel_tol * hi:
                mid = 0.5 * (lo + hi)
                count, cfg = contacts_at(mid)
                if count >= target:
                    hi, hi_cfg = mid, cfg
                else:
                    lo = mid
        if len(hi_cfg.contact_set) != target:
            return TableRow(target, hi, None, None)
        relaxed = relax(hi_cfg, opts)
        fit = free_arc_fit(relaxed)
        if hi == 0.0:
            # no indentation: the relaxed shape is the inscribed reference polygon
            return TableRow(target, 0.0, 1.0, fit.rms_residual if fit else 0.0, relaxed)
        if fit is None:
            return TableRow(target, hi, None, None, relaxed)
        return TableRow(target, hi, fit.radius / circumradius, fit.rms_residual, relaxed)

    return _map(row, target_contact_counts)


def resample_closed(vertices, count: int) -> np.ndarray:
    """``count`` points equally spaced by arc length along the closed polyline."""
    pts = np.asarray(vertices, dtype=float)
    loop = np.vstack([pts, pts[:1]])
    seg = np.hypot(*np.diff(loop, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    t = np.linspace(0.0, s[-1], count, endpoint=False)
    return np.column_stack([np.interp(t, s, loop[:, 0]), np.interp(t, s, loop[:, 1])])


def hausdorff(a, b) -> float:
    d = cdist(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def shape_discrepancy(va, vb, samples: int = 720) -> float:
    return hausdorff(resample_closed(va, samples), resample_closed(vb, samples))


def convergence_study(
    n_list,
    total_force: float,
    circumradius: float,
    params: ElasticParams,
    *,
    samples: int = 720,
    bending_rows: BendingRows = "all",
    contact_tol: float = DEFAULT_CONTACT_TOL,
    opts: SolverOptions | None = None,
) -> list[ConvergenceRow]:
    """Indent rings of increasing vertex count under the same total load.

    Each ring gets ``total_force / (n - 1)`` per vertex. The discrepancy is
    the Hausdorff distance between arc-length resampled outlines, measured
    against the largest ``n`` in the list.
    """
    n_list = [int(n) for n in n_list]
    if not n_list or any(b < a for a, b in zip(n_list, n_list[1:])):
        raise DomainError("n_list must be non-empty and ascending")

    def one(n):
        polygon = build_polygon(n, circumradius)
        return indent(
            polygon,
            params,
            total_force / (n - 1),
            bending_rows=bending_rows,
            contact_tol=contact_tol,
            opts=opts,
        )

    cfgs = _map(one, n_list)
    ref = cfgs[-1].deformed_vertices
    return [
        ConvergenceRow(n, cfg, apparent_height(cfg), shape_discrepancy(cfg.deformed_vertices, ref, samples))
        for n, cfg in zip(n_list, cfgs)
    ]
