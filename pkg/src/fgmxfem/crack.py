"""Straight through-cracks described independently of the mesh.

A crack is a segment ``tip_a -> tip_b``. Its left-hand side (positive signed
distance) carries Heaviside value +1. Tips that sit on or outside the plate
boundary are "non-interior": they are pushed one element outside the domain
so that only genuine interior tips receive asymptotic enrichment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, GeometryError

NODE_TOL = 1e-9
SHIFT = 1e-6
AREA_TOL = 1e-4


@dataclass(frozen=True)
class CrackSegment:
    tip_a: tuple
    tip_b: tuple
    interior_a: bool = True
    interior_b: bool = True

    def __post_init__(self):
        a = tuple(float(v) for v in self.tip_a)
        b = tuple(float(v) for v in self.tip_b)
        object.__setattr__(self, "tip_a", a)
        object.__setattr__(self, "tip_b", b)
        if not math.hypot(b[0] - a[0], b[1] - a[1]) > 0:
            raise ValueError("crack length must be positive")

    @classmethod
    def centered(cls, center, length, theta):
        """Crack of ``length`` centred at ``center`` at angle ``theta`` (rad)."""
        c = np.asarray(center, dtype=float)
        half = 0.5 * length * np.array([math.cos(theta), math.sin(theta)])
        return cls(tuple(c - half), tuple(c + half))

    @classmethod
    def from_anchor(cls, anchor, length, theta, anchor_interior=False):
        """Crack starting at ``anchor`` (typically on an edge) and running a
        distance ``length`` in direction ``theta``."""
        p = np.asarray(anchor, dtype=float)
        q = p + length * np.array([math.cos(theta), math.sin(theta)])
        return cls(tuple(p), tuple(q), interior_a=anchor_interior, interior_b=True)

    @property
    def length(self):
        return math.hypot(self.tip_b[0] - self.tip_a[0], self.tip_b[1] - self.tip_a[1])

    @property
    def direction(self):
        """Unit vector from ``tip_a`` to ``tip_b``."""
        L = self.length
        return np.array([(self.tip_b[0] - self.tip_a[0]) / L, (self.tip_b[1] - self.tip_a[1]) / L])

    @property
    def normal(self):
        """Left unit normal of the ``tip_a -> tip_b`` direction."""
        e = self.direction
        return np.array([-e[1], e[0]])

    @property
    def angle(self):
        e = self.direction
        return math.atan2(e[1], e[0])

    @property
    def center(self):
        return 0.5 * (np.asarray(self.tip_a) + np.asarray(self.tip_b))

    def tip(self, tip_id):
        return np.asarray(self.tip_a if tip_id == 0 else self.tip_b)

    @property
    def interior_tips(self):
        return tuple(t for t, flag in ((0, self.interior_a), (1, self.interior_b)) if flag)

    def tip_direction(self, tip_id):
        """Unit vector pointing ahead of the tip, away from the crack body."""
        return self.direction if tip_id == 1 else -self.direction

    def signed_distance(self, p):
        p = np.asarray(p, dtype=float)
        return (p[..., 0] - self.tip_a[0]) * self.normal[0] + (p[..., 1] - self.tip_a[1]) * self.normal[1]

    def line_parameter(self, p):
        """Position along the crack, 0 at ``tip_a`` and 1 at ``tip_b``."""
        p = np.asarray(p, dtype=float)
        e = self.direction
        return ((p[..., 0] - self.tip_a[0]) * e[0] + (p[..., 1] - self.tip_a[1]) * e[1]) / self.length

    def heaviside(self, p):
        d = self.signed_distance(p)
        if np.any(d == 0.0):
            raise GeometryError("point lies exactly on the crack line; resample")
        return np.where(d > 0.0, 1.0, -1.0)

    def tip_polar(self, tip_id, p):
        """Polar coordinates ``(r, theta)`` about a tip; the crack faces lie at
        ``theta = +-pi`` and the extension ahead of the tip at ``theta = 0``."""
        if tip_id not in self.interior_tips:
            raise ValueError(f"tip {tip_id} is not an interior tip")
        p = np.asarray(p, dtype=float)
        t = self.tip(tip_id)
        e = self.tip_direction(tip_id)
        dx = p[..., 0] - t[0]
        dy = p[..., 1] - t[1]
        xl = dx * e[0] + dy * e[1]
        yl = -dx * e[1] + dy * e[0]
        r = np.hypot(xl, yl)
        if np.any(r == 0.0):
            raise GeometryError("evaluation point coincides with a crack tip")
        theta = np.arctan2(yl, xl)
        # atan2 returns -pi for points on the lower face with yl == -0.0
        theta = np.where(theta == -np.pi, np.pi, theta)
        return r, theta

    def shifted(self, offset):
        """Copy translated by ``offset`` along the normal."""
        dn = offset * self.normal
        return replace(self, tip_a=tuple(np.asarray(self.tip_a) + dn),
                       tip_b=tuple(np.asarray(self.tip_b) + dn))

    def extended(self, tip_id, delta):
        """Copy with one tip moved ``delta`` further along its own direction."""
        t = self.tip(tip_id) + delta * self.tip_direction(tip_id)
        if tip_id == 0:
            return replace(self, tip_a=tuple(t))
        return replace(self, tip_b=tuple(t))


# ---------------------------------------------------------------------------
# Element cuts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ElementCut:
    """How one crack meets one element.

    ``kind`` is ``"none"``, ``"full"`` (crack crosses from edge to edge),
    ``"tip"`` (one interior tip inside) or ``"tips"`` (both tips inside).
    ``points`` are the end points of the crack chord inside the element,
    ordered along the crack; ``tips`` lists the tip ids among them.
    """

    kind: str
    points: tuple = ()
    tips: tuple = ()


NO_CUT = ElementCut("none")


def _size(quad):
    q = np.asarray(quad)
    return float(min(np.linalg.norm(q - np.roll(q, -1, axis=0), axis=1)))


def _cut(seg, quad):
    q = np.asarray(quad, dtype=float)
    d = seg.signed_distance(q)
    if np.all(d > 0) or np.all(d < 0):
        return NO_CUT
    s = seg.line_parameter(q)
    crossings = []
    m = len(q)
    for i in range(m):
        j = (i + 1) % m
        if (d[i] > 0) != (d[j] > 0):
            t = d[i] / (d[i] - d[j])
            crossings.append(s[i] + t * (s[j] - s[i]))
    if len(crossings) < 2:
        return NO_CUT
    s_in, s_out = min(crossings), max(crossings)
    lo, hi = max(s_in, 0.0), min(s_out, 1.0)
    if lo >= hi:
        return NO_CUT
    tips = []
    if s_in < 0.0 < s_out and seg.interior_a:
        tips.append(0)
    if s_in < 1.0 < s_out and seg.interior_b:
        tips.append(1)
    A = np.asarray(seg.tip_a)
    vec = np.asarray(seg.tip_b) - A
    points = (tuple(A + lo * vec), tuple(A + hi * vec))
    kind = "full" if not tips else ("tip" if len(tips) == 1 else "tips")
    return ElementCut(kind, points, tuple(tips))


def _is_degenerate(seg, quad):
    q = np.asarray(quad, dtype=float)
    h = _size(q)
    d = seg.signed_distance(q)
    s = seg.line_parameter(q)
    slack = h / seg.length
    near = (np.abs(d) <= NODE_TOL * h) & (s >= -slack) & (s <= 1.0 + slack)
    if np.any(near):
        return True
    for tip_id in seg.interior_tips:
        if _point_edge_distance(seg.tip(tip_id), q) <= NODE_TOL * h:
            return True
    return False


def intersect_element(seg, quad):
    """Describe how ``seg`` cuts the convex quadrilateral ``quad``.

    If the crack line grazes a vertex or a tip sits on an edge, the crack is
    nudged (normal shift, then tip extension) before the cut is computed.
    """
    q = np.asarray(quad, dtype=float)
    h = _size(q)
    for _ in range(4):
        if not _is_degenerate(seg, q):
            return _cut(seg, q)
        seg = _regularize_once(seg, [q], h)
    raise GeometryError("could not resolve a degenerate crack/element intersection")


def split_polygon(poly, seg):
    """Split a convex polygon by the crack line into ``(positive, negative)``
    sub-polygons (either may be empty)."""
    P = np.asarray(poly, dtype=float)
    d = seg.signed_distance(P)
    pos, neg = [], []
    m = len(P)
    for i in range(m):
        j = (i + 1) % m
        pi, di, dj = P[i], d[i], d[j]
        if di >= 0:
            pos.append(pi)
        if di <= 0:
            neg.append(pi)
        if (di > 0 and dj < 0) or (di < 0 and dj > 0):
            x = pi + di / (di - dj) * (P[j] - pi)
            pos.append(x)
            neg.append(x)
    return np.array(pos).reshape(-1, 2), np.array(neg).reshape(-1, 2)


def polygon_area(poly):
    P = np.asarray(poly, dtype=float)
    if len(P) < 3:
        return 0.0
    x, y = P[:, 0], P[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def _point_edge_distance(p, quad):
    q = np.asarray(quad, dtype=float)
    best = np.inf
    for i in range(len(q)):
        a, b = q[i], q[(i + 1) % len(q)]
        ab = b - a
        t = np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(a + t * ab - p)))
    return best


# ---------------------------------------------------------------------------
# Regularisation against the mesh
# ---------------------------------------------------------------------------

def _regularize_once(seg, quads, h):
    """One perturbation step; returns a possibly modified segment."""
    allpts = np.concatenate([np.asarray(q) for q in quads]) if quads else np.zeros((0, 2))
    if allpts.size:
        d = seg.signed_distance(allpts)
        s = seg.line_parameter(allpts)
        slack = h / seg.length
        near = (np.abs(d) <= NODE_TOL * h) & (s >= -slack) & (s <= 1.0 + slack)
        if np.any(near):
            return seg.shifted(SHIFT * h)
    for tip_id in seg.interior_tips:
        t = seg.tip(tip_id)
        for q in quads:
            if _point_edge_distance(t, q) <= NODE_TOL * h:
                return seg.extended(tip_id, SHIFT * h)
    return seg


def _nearby_elements(seg, mesh, margin):
    xy = mesh.element_coords()
    lo = xy.min(axis=1)
    hi = xy.max(axis=1)
    pts = np.array([seg.tip_a, seg.tip_b])
    clo = pts.min(axis=0) - margin
    chi = pts.max(axis=0) + margin
    hit = np.all(hi >= clo, axis=1) & np.all(lo <= chi, axis=1)
    return np.flatnonzero(hit)


def regularize_crack(seg, mesh):
    """Place ``seg`` in general position with respect to ``mesh``.

    Tips on or outside the plate boundary become non-interior and are moved
    one element size outside; a crack line passing through a node (or along
    an edge) is shifted by ``1e-6`` element sizes along its normal; an
    interior tip lying on an element edge is extended by the same amount.
    """
    h = mesh.element_size
    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    for tip_id in (0, 1):
        t = seg.tip(tip_id)
        inside = bool(np.all(t > lo + NODE_TOL * h) and np.all(t < hi - NODE_TOL * h))
        flag = seg.interior_a if tip_id == 0 else seg.interior_b
        if not inside or not flag:
            seg = replace(seg, **{"interior_a" if tip_id == 0 else "interior_b": False})
            if inside:
                continue
            seg = seg.extended(tip_id, h)
    for _ in range(8):
        near = _nearby_elements(seg, mesh, h)
        quads = [mesh.element_coords(e) for e in near]
        new = _regularize_once(seg, quads, h)
        if new == seg:
            return seg
        seg = new
    raise GeometryError("crack could not be moved into general position")


# ---------------------------------------------------------------------------
# Node classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrackEnrichment:
    """Enrichment sets of one crack.

    ``heaviside_nodes``: sorted node ids with Heaviside enrichment.
    ``tip_nodes``: node id -> tip id (0 or 1) for asymptotic enrichment.
    ``cuts``: element id -> :class:`ElementCut` for every element it touches.
    ``excluded``: nodes dropped by the area criterion.
    ``heaviside_sign``: side of the crack each Heaviside node lies on.
    """

    crack: CrackSegment
    heaviside_nodes: tuple
    tip_nodes: dict
    cuts: dict
    excluded: tuple = ()
    heaviside_sign: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NodeClassification:
    per_crack: tuple

    @property
    def cracks(self):
        return tuple(c.crack for c in self.per_crack)

    @property
    def heaviside_nodes(self):
        return tuple(sorted(set().union(*[c.heaviside_nodes for c in self.per_crack])))

    @property
    def tip_nodes(self):
        out = {}
        for c in self.per_crack:
            out.update(c.tip_nodes)
        return dict(sorted(out.items()))

    @property
    def is_empty(self):
        return all(not c.heaviside_nodes and not c.tip_nodes for c in self.per_crack)

    def enriched_elements(self):
        """Sorted element ids touched by any enrichment."""
        return sorted(set().union(*[c.cuts.keys() for c in self.per_crack]))


def _side_areas(seg, quad, cut):
    area = polygon_area(quad)
    if cut.kind == "full":
        pos, neg = split_polygon(quad, seg)
        return polygon_area(pos), polygon_area(neg)
    centroid = np.asarray(quad).mean(axis=0)
    return (area, 0.0) if seg.signed_distance(centroid) > 0 else (0.0, area)


def classify_crack(seg, mesh, tol=AREA_TOL):
    seg = regularize_crack(seg, mesh)
    cuts = {}
    for e in _nearby_elements(seg, mesh, 0.0):
        cut = _cut(seg, mesh.element_coords(e))
        if cut.kind != "none":
            cuts[int(e)] = cut
    if not cuts:
        raise ConfigError(f"crack {seg.tip_a}->{seg.tip_b} lies entirely outside the plate")

    tip_nodes = {}
    for e, cut in cuts.items():
        if cut.kind == "tips":
            raise GeometryError("both tips of one crack lie in the same element", e)
        if cut.kind != "tip":
            continue
        tip_id = cut.tips[0]
        for nid in mesh.elements[e]:
            nid = int(nid)
            if nid in tip_nodes and tip_nodes[nid] != tip_id:
                p = mesh.nodes[nid]
                da = np.linalg.norm(p - seg.tip(tip_nodes[nid]))
                if np.linalg.norm(p - seg.tip(tip_id)) < da:
                    tip_nodes[nid] = tip_id
            else:
                tip_nodes[nid] = tip_id

    candidates = sorted({int(n) for e, cut in cuts.items() if cut.kind == "full"
                         for n in mesh.elements[e]} - set(tip_nodes))
    heaviside, excluded = [], []
    for nid in candidates:
        above = below = 0.0
        for e in mesh.node_elements[nid]:
            quad = mesh.element_coords(e)
            ap, an = _side_areas(seg, quad, cuts.get(int(e), NO_CUT))
            above += ap
            below += an
        total = above + below
        if min(above, below) / total < tol:
            excluded.append(nid)
        else:
            heaviside.append(nid)
    return CrackEnrichment(
        crack=seg,
        heaviside_nodes=tuple(heaviside),
        tip_nodes=dict(sorted(tip_nodes.items())),
        cuts=dict(sorted(cuts.items())),
        excluded=tuple(excluded),
        heaviside_sign={n: float(np.sign(seg.signed_distance(mesh.nodes[n]))) for n in heaviside},
    )


def classify_nodes(cracks, mesh, tol=AREA_TOL):
    """Heaviside (N^c) and tip (N^f) node sets for every crack.

    Tip enrichment is topological: the four nodes of the element holding an
    interior tip. Heaviside candidates are the remaining nodes of elements
    crossed by the crack; a candidate whose support is split with relative
    area below ``tol`` on one side is dropped.
    """
    return NodeClassification(tuple(classify_crack(seg, mesh, tol) for seg in cracks))
