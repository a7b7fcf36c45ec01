"""Crack-tip asymptotic enrichment bases.

``G`` enriches the translations ``(u, v, w)`` and ``F`` the rotations.
Both are given in tip polar coordinates; derivatives are returned in
global Cartesian axes for a tip whose forward direction makes angle
``alpha`` with the x-axis.
"""

from __future__ import annotations

import numpy as np

from ..errors import GeometryError


def _check(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise GeometryError("enrichment evaluated at the crack tip (r = 0)")
    return r


def _to_global(f_r, f_t, r, theta, alpha):
    c, s = np.cos(theta), np.sin(theta)
    dxl = f_r * c - f_t * s / r
    dyl = f_r * s + f_t * c / r
    ca, sa = np.cos(alpha), np.sin(alpha)
    return dxl * ca - dyl * sa, dxl * sa + dyl * ca


def enrichment_G(r, theta, alpha=0.0):
    """``r^(3/2) {sin t/2, cos t/2, sin 3t/2, cos 3t/2}`` with x/y derivatives.

    Returns ``(values, d_dx, d_dy)``, each of shape ``(4,) + r.shape``.
    """
    r = _check(r)
    theta = np.asarray(theta, dtype=float)
    r32 = r**1.5
    r12 = np.sqrt(r)
    s1, c1 = np.sin(theta / 2), np.cos(theta / 2)
    s3, c3 = np.sin(1.5 * theta), np.cos(1.5 * theta)
    vals = np.stack([r32 * s1, r32 * c1, r32 * s3, r32 * c3])
    f_r = np.stack([1.5 * r12 * s1, 1.5 * r12 * c1, 1.5 * r12 * s3, 1.5 * r12 * c3])
    f_t = np.stack([0.5 * r32 * c1, -0.5 * r32 * s1, 1.5 * r32 * c3, -1.5 * r32 * s3])
    dx, dy = _to_global(f_r, f_t, r, theta, alpha)
    return vals, dx, dy


def enrichment_F(r, theta, alpha=0.0):
    """``sqrt(r) {sin t/2, cos t/2, sin t/2 sin t, cos t/2 sin t}`` with
    x/y derivatives, as for :func:`enrichment_G`."""
    r = _check(r)
    theta = np.asarray(theta, dtype=float)
    sr = np.sqrt(r)
    s1, c1 = np.sin(theta / 2), np.cos(theta / 2)
    st, ct = np.sin(theta), np.cos(theta)
    base = np.stack([s1, c1, s1 * st, c1 * st])
    vals = sr * base
    f_r = 0.5 / sr * base
    f_t = sr * np.stack([0.5 * c1, -0.5 * s1, 0.5 * c1 * st + s1 * ct, -0.5 * s1 * st + c1 * ct])
    dx, dy = _to_global(f_r, f_t, r, theta, alpha)
    return vals, dx, dy
