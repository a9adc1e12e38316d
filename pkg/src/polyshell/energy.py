"""Quadratic elastic energy of the discrete ring.

The displacement vector ``U`` stacks ``(u_x, u_y)`` for vertices ``P2 .. Pn``;
``P1`` is fixed, so its displacement never appears. With ``k`` the stretching
and ``kappa`` the bending constant, the total energy is ``1/2 U^T H U`` where

    H = k * Sigma^T Sigma + kappa * C^2 * Theta^T Theta.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.linalg import cho_factor

from .errors import DomainError
from .geometry import Polygon, bending_constant, edge_vectors

BendingRows = Literal["all", "free_only"]


@dataclass(frozen=True)
class ElasticParams:
    k: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("k", "kappa"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be > 0, got {value!r}")


def dof(vertex: int) -> tuple[int, int]:
    """Columns of ``U`` holding ``(u_x, u_y)`` of the 1-based ``vertex`` (>= 2)."""
    return 2 * (vertex - 2), 2 * (vertex - 2) + 1


def assemble_sigma(p: Polygon) -> np.ndarray:
    """Edge-difference operator, ``2n x (2n-2)``.

    Block row ``r`` (edge ``P_r -> P_{r+1}``) maps ``U`` to ``u_r - u_{r+1}``
    with ``u_1 = 0``.
    """
    n = p.n
    sigma = np.zeros((2 * n, 2 * n - 2))
    eye = np.eye(2)
    for r in range(n):
        for vertex, sign in ((r + 1, 1.0), ((r + 1) % n + 1, -1.0)):
            if vertex == 1:
                continue
            c = dof(vertex)[0]
            sigma[2 * r : 2 * r + 2, c : c + 2] += sign * eye
    return sigma


def assemble_theta(p: Polygon, rows: BendingRows = "all") -> np.ndarray:
    """Linearised angle-change operator.

    Row for vertex ``i`` carries ``-e_i`` on ``u_{i-1}``, ``e_i - e_{i-1}`` on
    ``u_i`` and ``e_{i-1}`` on ``u_{i+1}``, where ``e_i = P_i -> P_{i+1}`` on the
    undeformed polygon. ``rows="all"`` keeps the row for the angle at ``P1``
    (``n x (2n-2)``); ``"free_only"`` drops it.
    """
    n = p.n
    e = edge_vectors(p)
    theta = np.zeros((n, 2 * n - 2))
    for i in range(n):
        e_next, e_prev = e[i], e[i - 1]
        stencil = (
            ((i - 1) % n, -e_next),
            (i, e_next - e_prev),
            ((i + 1) % n, e_prev),
        )
        for j, coeff in stencil:
            if j == 0:
                continue
            c = dof(j + 1)[0]
            theta[i, c : c + 2] += coeff
    if rows == "free_only":
        return theta[1:]
    if rows != "all":
        raise DomainError(f"bending_rows must be 'all' or 'free_only', got {rows!r}")
    return theta


@dataclass(frozen=True)
class EnergyModel:
    polygon: Polygon
    params: ElasticParams
    sigma: np.ndarray
    theta: np.ndarray
    c: float
    hessian: np.ndarray
    bending_rows: BendingRows = "all"
    _chol: tuple = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.hessian.shape[0]

    @property
    def cholesky(self):
        """Cached ``scipy.linalg.cho_factor`` of the Hessian."""
        return self._chol

    def _check(self, U) -> np.ndarray:
        U = np.asarray(U, dtype=float)
        if U.shape != (self.size,):
            raise DomainError(f"displacement must have shape ({self.size},), got {U.shape}")
        return U


def build_model(
    p: Polygon, params: ElasticParams | None = None, bending_rows: BendingRows = "all"
) -> EnergyModel:
    params = params or ElasticParams()
    sigma = assemble_sigma(p)
    theta = assemble_theta(p, bending_rows)
    c = bending_constant(p)
    h = params.k * sigma.T @ sigma + params.kappa * c**2 * theta.T @ theta
    h = 0.5 * (h + h.T)
    chol = cho_factor(h)
    for a in (sigma, theta, h):
        a.setflags(write=False)
    return EnergyModel(p, params, sigma, theta, c, h, bending_rows, chol)


def stretching_energy(model: EnergyModel, U) -> float:
    d = model.sigma @ model._check(U)
    return 0.5 * model.params.k * float(d @ d)


def bending_energy(model: EnergyModel, U) -> float:
    a = model.theta @ model._check(U)
    return 0.5 * model.params.kappa * model.c**2 * float(a @ a)


def total_energy(model: EnergyModel, U) -> float:
    return stretching_energy(model, U) + bending_energy(model, U)


def gradient(model: EnergyModel, U) -> np.ndarray:
    return model.hessian @ model._check(U)
