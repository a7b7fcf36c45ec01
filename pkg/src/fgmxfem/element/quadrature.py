"""Element quadrature plans: tensor Gauss for uncut elements, sub-triangle
rules on either side of a crack, and a collapsed fan around a crack tip."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..crack import polygon_area, split_polygon
from ..errors import GeometryError
from .shape import parent_coords, shape_q4, jacobian

TIP_ORDER = 8
BLEND_ORDER = 8
ENRICHED_TRI_ORDER = 6

_S15 = np.sqrt(15.0)
_A1, _B1 = (9 - 2 * _S15) / 21, (6 + _S15) / 21
_A2, _B2 = (9 + 2 * _S15) / 21, (6 - _S15) / 21
_W1, _W2 = (155 + _S15) / 1200, (155 - _S15) / 1200
# degree-5 seven-point rule in barycentric coordinates
TRI7_BARY = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
TRI7_W = np.array([9 / 40, _W1, _W1, _W1, _W2, _W2, _W2])


@dataclass(frozen=True)
class QuadraturePlan:
    """Parent-square points ``(n, 2)`` and weights; ``kind`` is
    ``"standard"``, ``"subdivided"`` or ``"tip"``."""

    points: np.ndarray
    weights: np.ndarray
    kind: str

    @property
    def n_points(self):
        return len(self.weights)


def gauss_square(order):
    x, w = np.polynomial.legendre.leggauss(order)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()]), np.outer(w, w).ravel()


def triangle_rule(tri, order=None):
    """Physical points and weights on triangle ``tri (3, 2)``.

    ``order=None`` gives the seven-point degree-5 rule; an integer gives a
    collapsed (Duffy) Gauss rule with ``order**2`` points whose collapsed
    vertex is ``tri[0]``, which absorbs a ``1/r`` singularity there.
    """
    tri = np.asarray(tri, dtype=float)
    area = polygon_area(tri)
    if order is None:
        return TRI7_BARY @ tri, TRI7_W * area
    x, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    U, V = np.meshgrid(t, t, indexing="ij")
    W = np.outer(wt, wt) * U * 2.0 * area
    e1 = tri[1] - tri[0]
    e2 = tri[2] - tri[0]
    pts = tri[0] + U[..., None] * ((1.0 - V)[..., None] * e1 + V[..., None] * e2)
    return pts.reshape(-1, 2), W.ravel()


def _fan(poly):
    """Triangles fanned from the centroid of a convex polygon."""
    c = poly.mean(axis=0)
    n = len(poly)
    return [np.array([c, poly[i], poly[(i + 1) % n]]) for i in range(n)]


def _to_parent(coords, pts, wts, kind):
    p = parent_coords(coords, pts)
    _, dN = shape_q4(p[:, 0], p[:, 1])
    _, det = jacobian(coords, dN)
    return QuadraturePlan(points=p, weights=wts / det, kind=kind)


def _insert_on_boundary(quad, point):
    """Vertex loop of ``quad`` with ``point`` inserted on the edge it lies on."""
    best, where = np.inf, 0
    for i in range(4):
        a, b = quad[i], quad[(i + 1) % 4]
        ab = b - a
        t = np.clip(np.dot(point - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        d = np.linalg.norm(a + t * ab - point)
        if d < best:
            best, where = d, i
    return np.insert(quad, where + 1, point, axis=0)


def quadrature_plan(coords, cuts=(), tip_enriched=False, element=None):
    """Quadrature for one element.

    ``cuts`` is a sequence of ``(CrackSegment, ElementCut)`` pairs for the
    cracks meeting the element. ``tip_enriched`` marks elements carrying
    tip-enriched nodes, which need rules beyond polynomial exactness.
    """
    coords = np.asarray(coords, dtype=float)
    cuts = [(seg, cut) for seg, cut in cuts if cut.kind != "none"]
    tips = [(seg, cut) for seg, cut in cuts if cut.kind in ("tip", "tips")]
    fulls = [(seg, cut) for seg, cut in cuts if cut.kind == "full"]
    if any(cut.kind == "tips" for _, cut in tips) or len(tips) > 1 or (tips and fulls):
        raise GeometryError("more than one crack feature inside one element", element)

    if tips:
        seg, cut = tips[0]
        tip_id = cut.tips[0]
        tip = seg.tip(tip_id)
        entry = np.asarray(cut.points[1] if tip_id == 0 else cut.points[0])
        loop = _insert_on_boundary(coords, entry)
        pts, wts = [], []
        for i in range(len(loop)):
            tri = np.array([tip, loop[i], loop[(i + 1) % len(loop)]])
            if polygon_area(tri) <= 1e-14 * polygon_area(coords):
                continue
            p, w = triangle_rule(tri, TIP_ORDER)
            pts.append(p)
            wts.append(w)
        if not pts:
            raise GeometryError("tip fan triangulation failed", element)
        return _to_parent(coords, np.concatenate(pts), np.concatenate(wts), "tip")

    if fulls:
        polys = [coords]
        for seg, _ in fulls:
            nxt = []
            for poly in polys:
                pos, neg = split_polygon(poly, seg)
                nxt.extend(p for p in (pos, neg) if polygon_area(p) > 0.0)
            polys = nxt
        order = ENRICHED_TRI_ORDER if tip_enriched else None
        pts, wts = [], []
        for poly in polys:
            for tri in _fan(poly):
                if polygon_area(tri) == 0.0:
                    continue
                p, w = triangle_rule(tri, order)
                pts.append(p)
                wts.append(w)
        if not pts:
            raise GeometryError("cut-element triangulation failed", element)
        return _to_parent(coords, np.concatenate(pts), np.concatenate(wts), "subdivided")

    p, w = gauss_square(BLEND_ORDER if tip_enriched else 2)
    return QuadraturePlan(points=p, weights=w, kind="standard")
