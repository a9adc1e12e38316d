"""Randomised property suite behind the ``verify`` subcommand."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contact import indent, mirror_label
from .energy import ElasticParams, bending_energy, build_model, gradient, stretching_energy, total_energy
from .geometry import build_polygon
from .oracles import bending_energy_sum, central_difference_gradient, stretching_energy_sum
from .solver import ConstraintSet, SolverOptions, solve_oracle, solve_pdas


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def random_instance(rng: np.random.Generator, n_range=(3, 8)):
    """Random ring, elastic constants and downward load."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    R = float(rng.uniform(0.5, 2.0))
    params = ElasticParams(k=float(rng.uniform(0.1, 5.0)), kappa=float(rng.uniform(0.1, 5.0)))
    polygon = build_polygon(n, R)
    model = build_model(polygon, params)
    F = np.zeros(2 * n - 2)
    F[1::2] = -rng.uniform(0.0, 2.0, n - 1) * params.k * R
    return model, F, ConstraintSet.surface(polygon)


def random_feasible(rng: np.random.Generator, cons: ConstraintSet, count: int, scale: float = 1.0):
    """``count`` random points of the admissible set, a third of them touching a bound."""
    m = 2 * (cons.n - 1)
    V = rng.normal(0.0, scale, (count, m))
    lb = cons.lower_bounds
    V[:, 1::2] = lb + np.abs(rng.normal(0.0, scale, (count, cons.n - 1)))
    touch = rng.random((count, cons.n - 1)) < 1 / 3
    V[:, 1::2] = np.where(touch, lb, V[:, 1::2])
    for v in cons.pinned:
        V[:, 2 * (v - 2) + 1] = lb[v - 2]
    return V


def variational_gap(model, F, U, V) -> float:
    """Smallest ``(H U - F) . (V - U)`` over the rows of ``V``."""
    r = model.hessian @ U - F
    return float(np.min((V - U) @ r))


def check_oracle_equivalence(rng, instances: int = 100, tol: float = 1e-6, kkt_tol: float = 1e-9) -> Check:
    worst_diff = worst_kkt = 0.0
    for _ in range(instances):
        model, F, cons = random_instance(rng)
        a = solve_pdas(model, F, cons)
        b = solve_oracle(model, F, cons, method="enumeration")
        worst_diff = max(worst_diff, float(np.max(np.abs(a.U - b.U))))
        worst_kkt = max(worst_kkt, a.kkt_residual)
    ok = worst_diff <= tol and worst_kkt <= kkt_tol
    return Check(
        "pdas_vs_enumeration",
        ok,
        f"{instances} instances, max |dU| = {worst_diff:.2e} (tol {tol:g}), max KKT = {worst_kkt:.2e} (tol {kkt_tol:g})",
    )


def check_variational_inequality(rng, instances: int = 20, samples: int = 1000, tol: float = 1e-8) -> Check:
    worst = np.inf
    for _ in range(instances):
        model, F, cons = random_instance(rng)
        res = solve_pdas(model, F, cons)
        V = random_feasible(rng, cons, samples, model.polygon.circumradius)
        worst = min(worst, variational_gap(model, F, res.U, V))
    return Check("variational_inequality", worst >= -tol, f"min (HU-F).(V-U) = {worst:.2e} (>= -{tol:g})")


def check_energy_assembly(rng, trials: int = 100) -> Check:
    worst_rel = worst_fd = 0.0
    for _ in range(trials):
        n = int(rng.integers(3, 13))
        params = ElasticParams(float(rng.uniform(0.1, 5)), float(rng.uniform(0.1, 5)))
        polygon = build_polygon(n, float(rng.uniform(0.5, 2)))
        model = build_model(polygon, params)
        U = rng.normal(0.0, 0.3, 2 * n - 2)
        for got, want in (
            (stretching_energy(model, U), stretching_energy_sum(polygon, params.k, U)),
            (bending_energy(model, U), bending_energy_sum(polygon, params.kappa, U)),
        ):
            worst_rel = max(worst_rel, abs(got - want) / max(abs(want), 1e-300))
        fd = central_difference_gradient(lambda x: total_energy(model, x), U)
        worst_fd = max(worst_fd, float(np.max(np.abs(fd - gradient(model, U)))))
    min_eig = np.inf
    for n in range(3, 65):
        model = build_model(build_polygon(n))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(model.sigma.T @ model.sigma)[0]))
        np.linalg.cholesky(model.hessian)
    ok = worst_rel <= 1e-12 and worst_fd <= 1e-6 and min_eig > 0
    return Check(
        "energy_assembly",
        ok,
        f"max rel err {worst_rel:.2e}, max FD err {worst_fd:.2e}, min eig(S^T S) n=3..64 {min_eig:.3e}",
    )


def check_trivial_and_symmetry(rng) -> Check:
    worst_zero = worst_sym = 0.0
    for n in range(3, 21):
        polygon = build_polygon(n)
        cfg0 = indent(polygon, ElasticParams(), 0.0)
        worst_zero = max(worst_zero, float(np.max(np.abs(cfg0.U))))
        f = float(rng.uniform(0.01, 1.0))
        d = indent(polygon, ElasticParams(), f).deformed_vertices
        for v in range(1, n + 1):
            w = mirror_label(v, n) - 1
            diff = abs(d[v - 1, 0] + d[w, 0]) + abs(d[v - 1, 1] - d[w, 1])
            worst_sym = max(worst_sym, diff)
    ok = worst_zero <= 1e-14 and worst_sym <= 1e-9
    return Check("zero_load_and_mirror_symmetry", ok, f"max |U| at f=0 {worst_zero:.1e}, max mirror defect {worst_sym:.1e}")


def check_uniqueness(rng, instances: int = 50, tol: float = 1e-9) -> Check:
    worst = 0.0
    for _ in range(instances):
        model, F, cons = random_instance(rng, (3, 16))
        a = solve_pdas(model, F, cons, SolverOptions(initial_active="empty"))
        b = solve_pdas(model, F, cons, SolverOptions(initial_active="all"))
        worst = max(worst, float(np.max(np.abs(a.U - b.U))))
    return Check("unique_minimiser", worst <= tol, f"empty vs all-active start, max |dU| = {worst:.2e}")


def run_suite(seed: int = 0, instances: int = 100) -> list[Check]:
    rng = np.random.default_rng(seed)
    return [
        check_energy_assembly(rng),
        check_oracle_equivalence(rng, instances),
        check_variational_inequality(rng),
        check_uniqueness(rng),
        check_trivial_and_symmetry(rng),
    ]
