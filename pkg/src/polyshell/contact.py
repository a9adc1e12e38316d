"""Two-phase indentation experiment.

Phase I presses the ring with a uniform downward load on ``P2 .. Pn``.
Phase II removes the load while every vertex that reached the surface stays
on it (it may still slide horizontally).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .energy import BendingRows, ElasticParams, EnergyModel, build_model, total_energy
from .errors import DomainError
from .geometry import Polygon
from .solver import ConstraintSet, SolveResult, SolverOptions, solve_pdas, uniform_load

DEFAULT_CONTACT_TOL = 1e-7


@dataclass(frozen=True)
class DeformedConfig:
    polygon: Polygon
    model: EnergyModel
    U: np.ndarray
    deformed_vertices: np.ndarray
    contact_set: frozenset[int]
    phase: Literal["indented", "relaxed"]
    force: float
    solve: SolveResult
    contact_tol: float = DEFAULT_CONTACT_TOL

    @property
    def free_vertices(self) -> list[int]:
        return [v for v in range(1, self.polygon.n + 1) if v not in self.contact_set]

    @property
    def elastic_energy(self) -> float:
        return total_energy(self.model, self.U)


def deform(polygon: Polygon, U) -> np.ndarray:
    """Deformed vertex positions, ``P_i' = P_i + u_i`` with ``u_1 = 0``."""
    disp = np.vstack([np.zeros((1, 2)), np.asarray(U, dtype=float).reshape(-1, 2)])
    return polygon.vertices + disp


def detect_contacts(vertices, tol: float = DEFAULT_CONTACT_TOL) -> frozenset[int]:
    """1-based labels of vertices with ``y <= tol``. ``P1`` is always included."""
    if tol <= 0:
        raise DomainError(f"contact tolerance must be > 0, got {tol!r}")
    y = np.asarray(vertices, dtype=float)[:, 1]
    return frozenset({1} | {int(i) + 1 for i in np.flatnonzero(y <= tol)})


def _config(polygon, model, res, phase, force, tol) -> DeformedConfig:
    verts = deform(polygon, res.U)
    return DeformedConfig(
        polygon=polygon,
        model=model,
        U=res.U,
        deformed_vertices=verts,
        contact_set=detect_contacts(verts, tol * polygon.circumradius),
        phase=phase,
        force=force,
        solve=res,
        contact_tol=tol,
    )


def indent(
    polygon: Polygon,
    params: ElasticParams | None = None,
    f: float = 0.0,
    *,
    model: EnergyModel | None = None,
    bending_rows: BendingRows = "all",
    contact_tol: float = DEFAULT_CONTACT_TOL,
    opts: SolverOptions | None = None,
) -> DeformedConfig:
    """Equilibrium under a downward force ``f`` on every vertex but ``P1``.

    ``contact_tol`` is relative to the circumradius.
    """
    if not np.isfinite(f) or f < 0:
        raise DomainError(f"force per vertex must be >= 0, got {f!r}")
    model = model or build_model(polygon, params, bending_rows)
    cons = ConstraintSet.surface(polygon)
    res = solve_pdas(model, uniform_load(polygon.n, f), cons, opts)
    return _config(polygon, model, res, "indented", float(f), contact_tol)


def relax(cfg: DeformedConfig, opts: SolverOptions | None = None) -> DeformedConfig:
    """Remove the load, keeping contact vertices on the surface.

    Pinned vertices may slide horizontally; the remaining vertices keep their
    non-penetration bound. ``P1`` stays fully fixed.
    """
    if cfg.phase != "indented":
        raise DomainError("relax expects an indented configuration")
    polygon, model = cfg.polygon, cfg.model
    cons = ConstraintSet.surface(polygon, pinned=cfg.contact_set - {1})
    res = solve_pdas(model, np.zeros(model.size), cons, opts)
    return _config(polygon, model, res, "relaxed", 0.0, cfg.contact_tol)


def mirror_label(v: int, n: int) -> int:
    """Label of the vertex mirrored through the vertical axis (``P1 <-> P1``)."""
    return (n - (v - 1)) % n + 1
