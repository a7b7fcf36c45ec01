"""Bilinear quadrilateral shape functions and the isoparametric map."""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError

# parent coordinates of the four corners, counter-clockwise
CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])


def shape_q4(xi, eta):
    """Values ``N (..., 4)`` and parent derivatives ``dN (..., 4, 2)``."""
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    sx = CORNERS[:, 0]
    sy = CORNERS[:, 1]
    a = 1.0 + np.multiply.outer(xi, sx)
    b = 1.0 + np.multiply.outer(eta, sy)
    N = 0.25 * a * b
    dN = np.stack([0.25 * sx * b, 0.25 * sy * a], axis=-1)
    return N, dN


def jacobian(coords, dN):
    """``J[..., i, j] = d x_j / d xi_i`` and its determinant."""
    J = np.einsum("...ki,kj->...ij", dN, coords)
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    if np.any(det <= 0.0):
        raise GeometryError("element has a non-positive Jacobian")
    return J, det


def cartesian_derivatives(coords, xi, eta):
    """Shape values, Cartesian gradients ``(..., 4, 2)`` and ``det J``."""
    N, dN = shape_q4(xi, eta)
    J, det = jacobian(coords, dN)
    Jinv = np.linalg.inv(J)
    dNxy = np.einsum("...ij,...kj->...ki", Jinv, dN)
    return N, dNxy, det


def parent_coords(coords, xy, tol=1e-14, max_iter=30):
    """Invert the bilinear map for physical points ``xy (n, 2)`` by Newton."""
    xy = np.atleast_2d(np.asarray(xy, dtype=float))
    p = np.zeros_like(xy)
    scale = np.abs(coords).max() + 1.0
    for _ in range(max_iter):
        N, dN = shape_q4(p[:, 0], p[:, 1])
        res = N @ coords - xy
        if np.abs(res).max() <= tol * scale:
            return p
        J, _ = jacobian(coords, dN)
        p -= np.linalg.solve(np.swapaxes(J, -1, -2), res[..., None])[..., 0]
    N, _ = shape_q4(p[:, 0], p[:, 1])
    if np.abs(N @ coords - xy).max() > 1e-10 * scale:
        raise GeometryError("inverse isoparametric map did not converge")
    return p
