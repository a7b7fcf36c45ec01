"""Field-consistent transverse shear interpolation for the Q4 plate.

The covariant shear strains are sampled at the edge midpoints and
interpolated linearly across the element, which removes shear locking
in the thin limit.
"""

from __future__ import annotations

import numpy as np

from .shape import jacobian, shape_q4

# tying points: gamma_xi at (0, -1), (0, 1); gamma_eta at (-1, 0), (1, 0)
_XI_TIES = np.array([[0.0, -1.0], [0.0, 1.0]])
_ETA_TIES = np.array([[-1.0, 0.0], [1.0, 0.0]])


def _covariant(coords, point, direction):
    """Row operator (4 nodes x [w, tx, ty]) of one covariant shear strain
    evaluated directly at ``point``."""
    N, dN = shape_q4(point[0], point[1])
    tangent = dN[:, direction] @ coords
    op = np.empty((4, 3))
    op[:, 0] = dN[:, direction]
    op[:, 1] = N * tangent[0]
    op[:, 2] = N * tangent[1]
    return op


def substitute_shear_strain(coords, xi, eta):
    """Assumed Cartesian shear strain operator.

    Returns ``Bs (..., 2, 4, 3)`` mapping nodal ``(w, theta_x, theta_y)`` to
    ``(gamma_xz, gamma_yz)`` at the parent points ``(xi, eta)``.
    """
    coords = np.asarray(coords, dtype=float)
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    gA, gC = (_covariant(coords, p, 0) for p in _XI_TIES)
    gD, gB = (_covariant(coords, p, 1) for p in _ETA_TIES)
    g_xi = 0.5 * np.multiply.outer(1.0 - eta, gA) + 0.5 * np.multiply.outer(1.0 + eta, gC)
    g_eta = 0.5 * np.multiply.outer(1.0 - xi, gD) + 0.5 * np.multiply.outer(1.0 + xi, gB)
    _, dN = shape_q4(xi, eta)
    J, _ = jacobian(coords, dN)
    Jinv = np.linalg.inv(J)
    cov = np.stack([g_xi, g_eta], axis=-3)
    return np.einsum("...ij,...jkc->...ikc", Jinv, cov)


def direct_shear_strain(coords, xi, eta):
    """Shear operator from the interpolated fields without tying."""
    N, dN = shape_q4(xi, eta)
    J, _ = jacobian(coords, dN)
    dNxy = np.einsum("...ij,...kj->...ki", np.linalg.inv(J), dN)
    shape = np.shape(N)[:-1] + (2, 4, 3)
    Bs = np.zeros(shape)
    Bs[..., 0, :, 0] = dNxy[..., 0]
    Bs[..., 1, :, 0] = dNxy[..., 1]
    Bs[..., 0, :, 1] = N
    Bs[..., 1, :, 2] = N
    return Bs
