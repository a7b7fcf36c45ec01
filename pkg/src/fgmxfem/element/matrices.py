"""Standard and enriched element stiffness and mass matrices.

Generalized strains are ordered ``[eps_p (3), kappa (3), gamma (2)]`` and
nodal unknowns ``(u0, v0, w0, theta_x, theta_y)``. Each enrichment block
multiplies the shape function of one node by an enrichment function:
1 (standard), the Heaviside sign, or a tip basis (``G_l`` for the
translations, ``F_l`` for the rotations).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NumericalError
from .enrichment import enrichment_F, enrichment_G
from .quadrature import gauss_square
from .shape import cartesian_derivatives
from .shear import substitute_shear_strain

NDOF_NODE = 5


@dataclass(frozen=True)
class EnrichmentFunction:
    """One 5-dof block of an element: local node plus enrichment kind.

    ``kind`` is ``"std"``, ``"H"`` or ``"tip"``; ``crack`` indexes the crack
    set, ``tip`` the crack tip and ``l`` the tip basis function (0..3).
    """

    node: int
    kind: str = "std"
    crack: int | None = None
    tip: int | None = None
    l: int | None = None


@dataclass(frozen=True)
class ElementDofLayout:
    functions: tuple

    @classmethod
    def standard(cls):
        return cls(tuple(EnrichmentFunction(k) for k in range(4)))

    @property
    def n_dof(self):
        return NDOF_NODE * len(self.functions)

    @property
    def is_standard(self):
        return all(f.kind == "std" for f in self.functions)


def _enrichment_values(fn, xy, cracks):
    """``(Et, dEt, Er, dEr)`` at physical points for one block."""
    n = len(xy)
    if fn.kind == "std":
        one = np.ones(n)
        zero = np.zeros((n, 2))
        return one, zero, one, zero
    seg = cracks[fn.crack]
    if fn.kind == "H":
        H = seg.heaviside(xy)
        zero = np.zeros((n, 2))
        return H, zero, H, zero
    r, theta = seg.tip_polar(fn.tip, xy)
    e = seg.tip_direction(fn.tip)
    alpha = np.arctan2(e[1], e[0])
    g, gx, gy = enrichment_G(r, theta, alpha)
    f, fx, fy = enrichment_F(r, theta, alpha)
    return (g[fn.l], np.column_stack([gx[fn.l], gy[fn.l]]),
            f[fn.l], np.column_stack([fx[fn.l], fy[fn.l]]))


def strain_operators(coords, layout, points, cracks=()):
    """Generalized strain operator ``B (nq, 8, ndof)``, generalized
    displacement operator ``Nm (nq, 5, ndof)`` and ``det J (nq,)`` at parent
    ``points``."""
    coords = np.asarray(coords, dtype=float)
    xi, eta = points[:, 0], points[:, 1]
    N, dN, det = cartesian_derivatives(coords, xi, eta)
    xy = N @ coords
    Bs = substitute_shear_strain(coords, xi, eta)
    nq = len(xi)
    ndof = layout.n_dof
    B = np.zeros((nq, 8, ndof))
    Nm = np.zeros((nq, 5, ndof))
    for j, fn in enumerate(layout.functions):
        k = fn.node
        Et, dEt, Er, dEr = _enrichment_values(fn, xy, cracks)
        pt = N[:, k] * Et
        gt = dN[:, k, :] * Et[:, None] + N[:, k, None] * dEt
        pr = N[:, k] * Er
        gr = dN[:, k, :] * Er[:, None] + N[:, k, None] * dEr
        c = NDOF_NODE * j
        B[:, 0, c] = gt[:, 0]
        B[:, 1, c + 1] = gt[:, 1]
        B[:, 2, c] = gt[:, 1]
        B[:, 2, c + 1] = gt[:, 0]
        B[:, 3, c + 3] = gr[:, 0]
        B[:, 4, c + 4] = gr[:, 1]
        B[:, 5, c + 3] = gr[:, 1]
        B[:, 5, c + 4] = gr[:, 0]
        if fn.kind == "tip":
            B[:, 6, c + 2] = gt[:, 0]
            B[:, 7, c + 2] = gt[:, 1]
            B[:, 6, c + 3] = pr
            B[:, 7, c + 4] = pr
        else:
            B[:, 6:8, c + 2:c + 5] = Et[:, None, None] * Bs[:, :, k, :]
        Nm[:, 0, c] = pt
        Nm[:, 1, c + 1] = pt
        Nm[:, 2, c + 2] = pt
        Nm[:, 3, c + 3] = pr
        Nm[:, 4, c + 4] = pr
    return B, Nm, det


def _inertia(section):
    return np.array([section.I0, section.I0, section.I0, section.I1, section.I1])


def _check_finite(mat, what):
    if not np.all(np.isfinite(mat)):
        raise NumericalError(f"non-finite entries in element {what} matrix")
    return mat


def element_stiffness(coords, layout, section, plan, cracks=()):
    """``sum_q w_q B^T D B det J`` over the plan, symmetrized."""
    B, _, det = strain_operators(coords, layout, plan.points, cracks)
    D = section.material_matrix()
    K = np.einsum("q,qai,ab,qbj->ij", plan.weights * det, B, D, B, optimize=True)
    return _check_finite(0.5 * (K + K.T), "stiffness")


def element_mass(coords, layout, section, plan, cracks=()):
    """``sum_q w_q N^T diag(I0, I0, I0, I1, I1) N det J`` over the plan."""
    _, Nm, det = strain_operators(coords, layout, plan.points, cracks)
    M = np.einsum("q,qai,a,qaj->ij", plan.weights * det, Nm, _inertia(section), Nm, optimize=True)
    return _check_finite(0.5 * (M + M.T), "mass")


def element_matrices(coords, layout, section, plan, cracks=()):
    """Stiffness and mass sharing one evaluation of the operators."""
    B, Nm, det = strain_operators(coords, layout, plan.points, cracks)
    w = plan.weights * det
    D = section.material_matrix()
    K = np.einsum("q,qai,ab,qbj->ij", w, B, D, B, optimize=True)
    M = np.einsum("q,qai,a,qaj->ij", w, Nm, _inertia(section), Nm, optimize=True)
    return (_check_finite(0.5 * (K + K.T), "stiffness"),
            _check_finite(0.5 * (M + M.T), "mass"))


def standard_matrices(coords_all, section):
    """Vectorized 2x2-Gauss matrices ``(ne, 20, 20)`` for unenriched elements."""
    coords_all = np.asarray(coords_all, dtype=float)
    pts, wts = gauss_square(2)
    layout = ElementDofLayout.standard()
    D = section.material_matrix()
    inertia = _inertia(section)
    ne = coords_all.shape[0]
    K = np.zeros((ne, 20, 20))
    M = np.zeros((ne, 20, 20))
    for e in range(ne):
        B, Nm, det = strain_operators(coords_all[e], layout, pts)
        w = wts * det
        K[e] = np.einsum("q,qai,ab,qbj->ij", w, B, D, B, optimize=True)
        M[e] = np.einsum("q,qai,a,qaj->ij", w, Nm, inertia, Nm, optimize=True)
    K = 0.5 * (K + np.swapaxes(K, 1, 2))
    M = 0.5 * (M + np.swapaxes(M, 1, 2))
    return _check_finite(K, "stiffness"), _check_finite(M, "mass")
