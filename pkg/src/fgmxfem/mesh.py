"""Structured quadrilateral meshes of rectangular plates."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """Nodes numbered lexicographically (x fastest); elements counter-clockwise
    starting from the lower-left corner."""

    nodes: np.ndarray
    elements: np.ndarray
    a: float
    b: float
    nx: int
    ny: int

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def element_size(self):
        return min(self.a / self.nx, self.b / self.ny)

    @cached_property
    def node_elements(self):
        """Tuple of element-index arrays adjacent to each node."""
        adj = [[] for _ in range(self.n_nodes)]
        for e, conn in enumerate(self.elements):
            for nid in conn:
                adj[nid].append(e)
        return tuple(np.array(sorted(x), dtype=int) for x in adj)

    def element_coords(self, e=None):
        if e is None:
            return self.nodes[self.elements]
        return self.nodes[self.elements[e]]

    def element_areas(self):
        xy = self.element_coords()
        x, y = xy[..., 0], xy[..., 1]
        return 0.5 * np.abs(np.sum(x * np.roll(y, -1, axis=1) - np.roll(x, -1, axis=1) * y, axis=1))

    def locate(self, x, y):
        """Element index containing each point (structured lookup)."""
        hx = self.a / self.nx
        hy = self.b / self.ny
        i = np.clip(np.floor(np.asarray(x) / hx).astype(int), 0, self.nx - 1)
        j = np.clip(np.floor(np.asarray(y) / hy).astype(int), 0, self.ny - 1)
        return j * self.nx + i


def generate_mesh(a, b, nx, ny):
    """``nx * ny`` rectangular Q4 elements on ``[0, a] x [0, b]``."""
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise ValueError("need at least one element per direction")
    if not (a > 0 and b > 0):
        raise ValueError("plate dimensions must be positive")
    xs = np.linspace(0.0, a, nx + 1)
    ys = np.linspace(0.0, b, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    j, i = np.divmod(np.arange(nx * ny), nx)
    n0 = j * (nx + 1) + i
    elements = np.column_stack([n0, n0 + 1, n0 + nx + 2, n0 + nx + 1])
    return Mesh(nodes=nodes, elements=elements, a=float(a), b=float(b), nx=nx, ny=ny)


def default_divisions(a, b, base=34):
    """Divisions proportional to the side lengths with ``base`` on the shorter side."""
    short = min(a, b)
    return max(base, int(round(base * a / short))), max(base, int(round(base * b / short)))
