"""Loop-based reference forms used to cross-check the matrix assembly.

Nothing here touches ``Sigma``, ``Theta`` or ``H``; every quantity is summed
vertex by vertex from the polygon geometry.
"""

from __future__ import annotations

import numpy as np

from .geometry import Polygon, bending_constant


def _displacements(polygon: Polygon, U) -> np.ndarray:
    return np.vstack([np.zeros((1, 2)), np.asarray(U, dtype=float).reshape(-1, 2)])


def stretching_energy_sum(polygon: Polygon, k: float, U) -> float:
    """``k/4 * sum_i sum_{j in {i-1, i+1}} |u_i - u_j|^2`` with indices mod n."""
    u = _displacements(polygon, U)
    n = polygon.n
    total = 0.0
    for i in range(n):
        for j in ((i - 1) % n, (i + 1) % n):
            d = u[i] - u[j]
            total += d @ d
    return 0.25 * k * total


def bending_energy_sum(polygon: Polygon, kappa: float, U, rows: str = "all") -> float:
    """``kappa C^2 / 2 * sum_i (e_{i-1}.u_{i+1} + (e_i - e_{i-1}).u_i - e_i.u_{i-1})^2``."""
    u = _displacements(polygon, U)
    P = polygon.vertices
    n = polygon.n
    C = bending_constant(polygon)
    start = 0 if rows == "all" else 1
    total = 0.0
    for i in range(start, n):
        e_prev = P[i] - P[(i - 1) % n]
        e_next = P[(i + 1) % n] - P[i]
        a = e_prev @ u[(i + 1) % n] + (e_next - e_prev) @ u[i] - e_next @ u[(i - 1) % n]
        total += a * a
    return 0.5 * kappa * C**2 * total


def central_difference_gradient(fun, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g
