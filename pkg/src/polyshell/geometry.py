"""Reference configuration of a regular polygon resting on a flat surface.

The surface is the line ``y = 0``. Vertex ``P1`` sits at the origin and the
polygon centre lies directly above it, so every other vertex has ``y > 0``.
Vertices are stored as an ``(n, 2)`` array in counter-clockwise order;
row ``i`` holds the 1-based vertex ``P_{i+1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Polygon:
    n: int
    circumradius: float
    vertices: np.ndarray

    @property
    def edge_length(self) -> float:
        return 2.0 * self.circumradius * np.sin(np.pi / self.n)

    @property
    def center(self) -> np.ndarray:
        return np.array([0.0, self.circumradius])

    @property
    def heights(self) -> np.ndarray:
        return self.vertices[:, 1]


def build_polygon(n: int, circumradius: float = 1.0) -> Polygon:
    """Regular ``n``-gon with ``P1 = (0, 0)`` and centre ``(0, circumradius)``."""
    if int(n) != n or n < 3:
        raise DomainError(f"n must be an integer >= 3, got {n!r}")
    if not np.isfinite(circumradius) or circumradius <= 0:
        raise DomainError(f"circumradius must be > 0, got {circumradius!r}")
    n = int(n)
    angles = -np.pi / 2 + 2 * np.pi * np.arange(n) / n
    verts = np.column_stack(
        [circumradius * np.cos(angles), circumradius + circumradius * np.sin(angles)]
    )
    # cos/sin at -pi/2 leave ~1e-17 residue; P1 is pinned to the origin exactly
    verts[0] = 0.0
    verts.setflags(write=False)
    return Polygon(n=n, circumradius=float(circumradius), vertices=verts)


def edge_vectors(p: Polygon) -> np.ndarray:
    """Row ``i`` is ``P_{i+1} -> P_{i+2}`` (0-based rows, indices mod n).

    The last row closes the polygon, ``P_n -> P_1``.
    """
    return np.roll(p.vertices, -1, axis=0) - p.vertices


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def bending_ratio(p: Polygon) -> np.ndarray:
    """Per-vertex value of ``|e_i x e_{i-1}| / (|e_i|^2 |e_{i-1}|^2)``.

    For a regular polygon every entry equals :func:`bending_constant`.
    """
    e = edge_vectors(p)
    e_prev = np.roll(e, 1, axis=0)
    num = np.abs(_cross(e, e_prev))
    den = np.sum(e * e, axis=1) * np.sum(e_prev * e_prev, axis=1)
    return num / den


def bending_constant(p: Polygon) -> float:
    """Geometric weight of the linearised angle change, ``sin(2 pi / n) / l^2``."""
    return float(np.sin(2 * np.pi / p.n) / p.edge_length**2)
