"""Bound-constrained quadratic minimisation for the ring model.

Minimise ``1/2 U^T H U - F^T U`` subject to ``y_i + u_{i,y} >= 0`` for every
free vertex, with optional *pinned* vertices whose vertical displacement is
held at ``-y_i`` (on the surface, free to slide). Horizontal components are
never constrained.

:func:`solve_pdas` is the production path (primal-dual active set). The
oracle :func:`solve_oracle` reaches the same minimiser independently, by
enumerating active sets for small rings or by projected gradient descent.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .energy import EnergyModel
from .errors import ConvergenceError, DomainError, SingularSystemError
from .geometry import Polygon

log = logging.getLogger(__name__)


def uniform_load(n: int, f: float) -> np.ndarray:
    """Force field ``(0, -f)`` on each of ``P2 .. Pn``, flattened to ``2n-2``."""
    F = np.zeros(2 * n - 2)
    F[1::2] = -f
    return F


def as_force(model: EnergyModel, F) -> np.ndarray:
    F = np.asarray(F, dtype=float).reshape(-1)
    if F.shape != (model.size,):
        raise DomainError(f"force must have {model.size} components, got {F.size}")
    if not np.all(np.isfinite(F)):
        raise DomainError("force must be finite")
    return F


@dataclass(frozen=True)
class ConstraintSet:
    """Vertical lower bounds for ``P2 .. Pn`` plus pinned vertex labels.

    ``lower_bounds[j]`` bounds ``u_y`` of vertex ``j + 2``. ``pinned`` holds
    1-based labels whose ``u_y`` equals its bound.
    """

    lower_bounds: np.ndarray
    pinned: frozenset[int] = frozenset()

    def __post_init__(self):
        lb = np.asarray(self.lower_bounds, dtype=float)
        if lb.ndim != 1 or not np.all(np.isfinite(lb)):
            raise DomainError("lower_bounds must be a finite 1-d array")
        n = lb.size + 1
        bad = [v for v in self.pinned if not 2 <= v <= n]
        if bad:
            raise DomainError(f"pinned vertices must lie in 2..{n}, got {sorted(bad)}")
        object.__setattr__(self, "lower_bounds", lb)
        object.__setattr__(self, "pinned", frozenset(int(v) for v in self.pinned))

    @classmethod
    def surface(cls, polygon: Polygon, pinned=()) -> "ConstraintSet":
        return cls(-polygon.heights[1:].copy(), frozenset(pinned))

    @property
    def n(self) -> int:
        return self.lower_bounds.size + 1

    def inequality_vertices(self) -> list[int]:
        return [v for v in range(2, self.n + 1) if v not in self.pinned]


@dataclass(frozen=True)
class SolverOptions:
    stat_tol: float = 1e-10
    feas_tol: float = 1e-10
    comp_tol: float = 1e-10
    c_pdas: float = 1.0
    max_iters: int | None = None
    initial_active: str = "empty"  # or "all"
    fallback: bool = True
    pg_tol: float = 1e-12
    pg_max_iters: int = 2_000_000


@dataclass
class SolveResult:
    U: np.ndarray
    multipliers: np.ndarray
    active_set: frozenset[int]
    iterations: int
    kkt_residual: float
    residuals: dict = field(default_factory=dict)
    method: str = "pdas"
    pinned_forces: dict = field(default_factory=dict)

    def converged(self, opts: SolverOptions) -> bool:
        r = self.residuals
        return (
            r["stationarity"] <= opts.stat_tol
            and r["primal"] <= opts.feas_tol
            and r["dual"] <= opts.feas_tol
            and r["complementarity"] <= opts.comp_tol
        )


def _vertical(v: int) -> int:
    return 2 * (v - 2) + 1


def _equality_solve(model: EnergyModel, F, rows: list[int], values: np.ndarray):
    """Solve ``[H A^T; A 0] [U; -lam] = [F; b]`` with ``A`` selecting ``rows``.

    Cholesky of ``H`` plus a Schur complement on the constraints. Returns
    ``U`` and ``lam = (H U - F)[rows]``.
    """
    chol = model.cholesky
    u0 = cho_solve(chol, F)
    if not rows:
        return u0, np.zeros(0)
    m = model.size
    A = np.zeros((len(rows), m))
    A[np.arange(len(rows)), rows] = 1.0
    HinvAT = cho_solve(chol, A.T)
    schur = A @ HinvAT
    try:
        sc = cho_factor(0.5 * (schur + schur.T))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"singular constraint Schur complement: {exc}") from exc
    lam = cho_solve(sc, values - u0[rows])
    U = u0 + HinvAT @ lam
    # constrained coordinates are exact by construction; strip rounding
    U[rows] = values
    return U, lam


def kkt_residuals(model: EnergyModel, F, cons: ConstraintSet, U, multipliers) -> dict:
    """Stationarity, primal, dual and complementarity residuals (inf-norms)."""
    r = model.hessian @ U - F
    bounds = cons.lower_bounds
    uy = U[1::2]
    lam = np.asarray(multipliers, dtype=float)
    pinned_idx = np.array(sorted(v - 2 for v in cons.pinned), dtype=int)
    ineq_idx = np.array([v - 2 for v in cons.inequality_vertices()], dtype=int)

    stat = r.copy()
    stat[1::2] -= lam
    if pinned_idx.size:
        stat[2 * pinned_idx + 1] = 0.0
    gap = uy - bounds
    primal = 0.0
    if ineq_idx.size:
        primal = max(primal, float(np.max(np.maximum(-gap[ineq_idx], 0.0))))
    if pinned_idx.size:
        primal = max(primal, float(np.max(np.abs(gap[pinned_idx]))))
    dual = float(np.max(np.maximum(-lam, 0.0), initial=0.0))
    comp = float(np.max(np.abs(lam[ineq_idx] * gap[ineq_idx]), initial=0.0)) if ineq_idx.size else 0.0
    return {
        "stationarity": float(np.max(np.abs(stat), initial=0.0)),
        "primal": primal,
        "dual": dual,
        "complementarity": comp,
    }


def _finish(model, F, cons, U, active, iterations, method) -> SolveResult:
    r = model.hessian @ U - F
    lam = np.zeros(cons.n - 1)
    for v in active:
        lam[v - 2] = r[_vertical(v)]
    pinned_forces = {v: float(r[_vertical(v)]) for v in sorted(cons.pinned)}
    res = kkt_residuals(model, F, cons, U, lam)
    return SolveResult(
        U=U,
        multipliers=lam,
        active_set=frozenset(active),
        iterations=iterations,
        kkt_residual=max(res.values()),
        residuals=res,
        method=method,
        pinned_forces=pinned_forces,
    )


def solve_equality(model: EnergyModel, F, cons: ConstraintSet, active=()) -> SolveResult:
    """Hold pinned and ``active`` vertices at their bounds; ignore all other bounds.

    The residuals in the result are measured against the full ``cons``, so a
    solution that violates a dropped bound shows a nonzero primal residual.
    """
    F = as_force(model, F)
    active = frozenset(active) - cons.pinned
    fixed = sorted(cons.pinned | active)
    rows = [_vertical(v) for v in fixed]
    U, _ = _equality_solve(model, F, rows, cons.lower_bounds[[v - 2 for v in fixed]])
    return _finish(model, F, cons, U, active, 1, "equality")


def solve_pdas(
    model: EnergyModel, F, cons: ConstraintSet, opts: SolverOptions | None = None
) -> SolveResult:
    """Primal-dual active set method.

    Each iteration solves the equality-constrained system for the current
    guess, then re-selects the active set as
    ``{i : lam_i + c (b_i - u_i) > 0}``. Stops when the set repeats itself
    and all KKT residuals are within tolerance.
    """
    opts = opts or SolverOptions()
    F = as_force(model, F)
    n = cons.n
    if n != model.polygon.n:
        raise DomainError("constraint set and model disagree on vertex count")
    max_iters = opts.max_iters or 10 * n
    candidates = cons.inequality_vertices()
    bounds = cons.lower_bounds
    active = frozenset(candidates) if opts.initial_active == "all" else frozenset()
    seen = {active}
    result = None
    for it in range(1, max_iters + 1):
        fixed = sorted(cons.pinned | active)
        rows = [_vertical(v) for v in fixed]
        U, lam_fixed = _equality_solve(model, F, rows, bounds[[v - 2 for v in fixed]])
        lam = dict(zip(fixed, lam_fixed))
        new_active = frozenset(
            v
            for v in candidates
            if (lam[v] if v in active else 0.0) + opts.c_pdas * (bounds[v - 2] - U[_vertical(v)])
            > 0.0
        )
        result = _finish(model, F, cons, U, active, it, "pdas")
        if new_active == active:
            if result.converged(opts):
                return result
            raise ConvergenceError(
                f"active set settled but KKT residuals fail: {result.residuals}", result
            )
        if new_active in seen:
            if not opts.fallback:
                raise ConvergenceError("active set cycled", result)
            log.warning("PDAS cycled after %d iterations, falling back to projected gradient", it)
            fb = _projected_gradient(model, F, cons, opts)
            fb.iterations += it
            return fb
        seen.add(new_active)
        active = new_active
    raise ConvergenceError(f"PDAS did not converge in {max_iters} iterations", result)


def _enumerate(model, F, cons, opts) -> SolveResult:
    candidates = cons.inequality_vertices()
    best, best_viol = None, np.inf
    for size in range(len(candidates) + 1):
        for subset in itertools.combinations(candidates, size):
            try:
                res = solve_equality(model, F, cons, subset)
            except SingularSystemError:
                continue
            viol = max(res.residuals["primal"], res.residuals["dual"])
            if viol < best_viol:
                best, best_viol = res, viol
    if best is None or best_viol > max(opts.feas_tol, 1e-8):
        raise ConvergenceError("no feasible, dual-feasible active set found", best)
    best.method = "enumeration"
    best.iterations = 2 ** len(candidates)
    return best


def _projected_gradient(model, F, cons, opts) -> SolveResult:
    H = model.hessian
    step = 1.0 / np.linalg.eigvalsh(H)[-1]
    bounds = cons.lower_bounds
    ineq = np.array([_vertical(v) for v in cons.inequality_vertices()], dtype=int)
    pinned = np.array([_vertical(v) for v in sorted(cons.pinned)], dtype=int)
    lb_ineq = bounds[(ineq - 1) // 2]
    lb_pin = bounds[(pinned - 1) // 2]

    def project(x):
        if ineq.size:
            x[ineq] = np.maximum(x[ineq], lb_ineq)
        if pinned.size:
            x[pinned] = lb_pin
        return x

    U = project(np.zeros(model.size))
    for it in range(1, opts.pg_max_iters + 1):
        U_new = project(U - step * (H @ U - F))
        delta = np.max(np.abs(U_new - U), initial=0.0)
        U = U_new
        if delta < opts.pg_tol:
            break
    else:
        raise ConvergenceError(
            f"projected gradient did not converge in {opts.pg_max_iters} iterations",
            _finish(model, F, cons, U, frozenset(), opts.pg_max_iters, "projected_gradient"),
        )
    gap = U[1::2] - bounds
    active = frozenset(v for v in cons.inequality_vertices() if gap[v - 2] <= 0.0)
    return _finish(model, F, cons, U, active, it, "projected_gradient")


def solve_oracle(
    model: EnergyModel, F, cons: ConstraintSet, opts: SolverOptions | None = None, method: str = "auto"
) -> SolveResult:
    """Reference minimiser by exhaustive active-set enumeration (``n <= 8``)
    or fixed-step projected gradient descent."""
    opts = opts or SolverOptions()
    F = as_force(model, F)
    if method == "auto":
        method = "enumeration" if cons.n <= 8 else "projected_gradient"
    if method == "enumeration":
        return _enumerate(model, F, cons, opts)
    if method == "projected_gradient":
        return _projected_gradient(model, F, cons, opts)
    raise DomainError(f"unknown oracle method {method!r}")
