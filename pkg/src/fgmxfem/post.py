"""Mode-shape reconstruction, legacy VTK export and frequency tables."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .assembly import element_dofs, element_layout
from .element import ElementDofLayout
from .element.matrices import _enrichment_values
from .element.shape import parent_coords, shape_q4
from .errors import GeometryError
from .mesh import default_divisions

GAP = "NA"
DECIMALS = 4
NUDGE = 1e-9
FIELD_NAMES = ("u", "v", "w", "theta_x", "theta_y")


@dataclass(frozen=True)
class ModeShapeField:
    """Fields sampled on a tensor grid; arrays have shape ``(ny, nx)``."""

    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    theta_x: np.ndarray
    theta_y: np.ndarray

    def normalized(self):
        """Copy scaled so that ``max |w| = 1`` with that extreme positive."""
        i = np.unravel_index(np.argmax(np.abs(self.w)), self.w.shape)
        s = self.w[i]
        if s == 0.0:
            return self
        return ModeShapeField(self.x, self.y, *(getattr(self, f) / s for f in FIELD_NAMES))


def _nudge(points, cracks, h):
    """Move samples off crack lines (towards +normal) and off tips."""
    p = np.array(points, dtype=float)
    for seg in cracks:
        d = seg.signed_distance(p)
        s = seg.line_parameter(p)
        on = (np.abs(d) < NUDGE) & (s >= 0.0) & (s <= 1.0)
        p[on] += (NUDGE - d[on])[:, None] * seg.normal
        for tip_id in seg.interior_tips:
            t = seg.tip(tip_id)
            r = np.linalg.norm(p - t, axis=1)
            at = r < NUDGE * h
            p[at] = t + NUDGE * h * seg.tip_direction(tip_id)
    return p


def evaluate_field(model, vector, points):
    """Enriched approximation of ``(u, v, w, theta_x, theta_y)`` at points.

    ``vector`` is a global dof vector; returns an ``(n, 5)`` array.
    """
    mesh = model.mesh
    cracks = model.cracks
    pts = _nudge(points, cracks, mesh.element_size)
    elems = mesh.locate(pts[:, 0], pts[:, 1])
    out = np.zeros((len(pts), 5))
    std = ElementDofLayout.standard()
    for e in np.unique(elems):
        sel = np.flatnonzero(elems == e)
        conn = mesh.elements[e]
        coords = mesh.element_coords(e)
        layout = model.layouts.get(int(e), std)
        if layout is std and model.classification is not None:
            layout = element_layout(conn, model.classification)
        dofs = element_dofs(conn, layout, model.dofmap)
        ue = vector[dofs].reshape(-1, 5)
        xi = parent_coords(coords, pts[sel])
        N, _ = shape_q4(xi[:, 0], xi[:, 1])
        xy = pts[sel]
        for j, fn in enumerate(layout.functions):
            try:
                Et, _, Er, _ = _enrichment_values(fn, xy, cracks)
            except GeometryError:
                raise GeometryError("sample point on a crack singularity", int(e)) from None
            pt = N[:, fn.node] * Et
            pr = N[:, fn.node] * Er
            out[sel, :3] += pt[:, None] * ue[j, :3]
            out[sel, 3:] += pr[:, None] * ue[j, 3:]
    return out


def sample_mode(system, vector, grid=101, normalize=True):
    """Sample a free-dof mode vector of ``system`` on a ``grid x grid`` lattice."""
    model = system.model
    full = system.expand(vector)
    nx = ny = int(grid)
    x = np.linspace(0.0, model.mesh.a, nx)
    y = np.linspace(0.0, model.mesh.b, ny)
    X, Y = np.meshgrid(x, y)
    vals = evaluate_field(model, full, np.column_stack([X.ravel(), Y.ravel()]))
    f = ModeShapeField(x, y, *(vals[:, i].reshape(ny, nx) for i in range(5)))
    return f.normalized() if normalize else f


# ---------------------------------------------------------------------------
# Legacy VTK
# ---------------------------------------------------------------------------

def write_vtk(path, field_, title="mode shape"):
    """ASCII legacy-VTK structured grid with scalars ``u, v, w`` and the
    rotation vector."""
    ny, nx = field_.w.shape
    X, Y = np.meshgrid(field_.x, field_.y)
    lines = [
        "# vtk DataFile Version 3.0",
        title,
        "ASCII",
        "DATASET STRUCTURED_GRID",
        f"DIMENSIONS {nx} {ny} 1",
        f"POINTS {nx * ny} double",
    ]
    lines += [f"{px!r} {py!r} 0.0" for px, py in zip(X.ravel().tolist(), Y.ravel().tolist())]
    lines.append(f"POINT_DATA {nx * ny}")
    for name in ("w", "u", "v"):
        lines += [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
        lines += [repr(float(val)) for val in getattr(field_, name).ravel()]
    lines.append("VECTORS rotation double")
    lines += [f"{tx!r} {ty!r} 0.0" for tx, ty in
              zip(field_.theta_x.ravel().tolist(), field_.theta_y.ravel().tolist())]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_vtk(path):
    """Read a file written by :func:`write_vtk`."""
    with open(path) as fh:
        tokens = fh.read().split("\n")
    it = iter(tokens)
    data = {}
    nx = ny = None
    pts = None
    for line in it:
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "DIMENSIONS":
            nx, ny = int(parts[1]), int(parts[2])
        elif parts[0] == "POINTS":
            n = int(parts[1])
            pts = np.array([[float(v) for v in next(it).split()] for _ in range(n)])
        elif parts[0] == "SCALARS":
            next(it)
            data[parts[1]] = np.array([float(next(it)) for _ in range(nx * ny)])
        elif parts[0] == "VECTORS":
            data[parts[1]] = np.array([[float(v) for v in next(it).split()] for _ in range(nx * ny)])
    x = pts[:nx, 0]
    y = pts[::nx, 1]
    rot = data["rotation"]
    shape = (ny, nx)
    return ModeShapeField(x, y, data["u"].reshape(shape), data["v"].reshape(shape),
                          data["w"].reshape(shape), rot[:, 0].reshape(shape),
                          rot[:, 1].reshape(shape))


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def _crack_label(c):
    if c.type == "center":
        where = f"@({c.center[0]:g},{c.center[1]:g})"
    elif c.type == "edge":
        where = f"@{c.edge}:{c.position:g}"
    else:
        where = f"@tip({c.tip[0]:g},{c.tip[1]:g}){'-' if c.direction == 'backward' else ''}"
    return f"{c.type}{where}:d/a={c.d_over_a:g}:theta={c.theta:g}"


def config_columns(cfg):
    """Resolved inputs of a run as an ordered mapping."""
    g = cfg.geometry
    m = cfg.materials
    name = lambda p: p if isinstance(p, str) else dict(p).get("name", "inline")
    return {
        "name": cfg.name,
        "a": g.a,
        "b": g.b,
        "h": g.h,
        "b_over_a": g.b_over_a,
        "a_over_h": g.a_over_h,
        "ceramic": name(m.ceramic),
        "metal": name(m.metal),
        "n": m.n,
        "T_ref": m.T_ref,
        "nu_mode": m.nu_mode,
        "normalization": m.normalization,
        "kappa_mode": cfg.solver.kappa_mode,
        "bc": cfg.bc,
        "nx": cfg.mesh.nx or default_divisions(g.a, g.b, cfg.mesh.base)[0],
        "ny": cfg.mesh.ny or default_divisions(g.a, g.b, cfg.mesh.base)[1],
        "cracks": ";".join(_crack_label(c) for c in cfg.cracks) or "none",
    }


def result_row(cfg, Omegas, extra=None, error=None):
    row = dict(extra or {})
    row.update(config_columns(cfg))
    k = cfg.solver.k_modes
    for i in range(k):
        if Omegas is None or i >= len(Omegas):
            row[f"Omega_{i + 1}"] = GAP
        else:
            row[f"Omega_{i + 1}"] = round(float(Omegas[i]), DECIMALS)
    row["error"] = error or ""
    return row


def _sort_key(value, centre=None):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        if centre is not None:
            return (0, abs(value - centre), float(value), "")
        return (0, float(value), 0.0, "")
    return (1, 0.0, 0.0, str(value))


def tabulate(rows, keys, pair_about=None):
    """Deterministically ordered copy of sweep ``rows``.

    Rows are sorted by the tuple of ``keys``. ``pair_about=(key, centre)``
    orders that key by distance from ``centre`` so that mirror values such
    as ``theta`` and ``90 - theta`` sit next to each other.
    """
    def key(row):
        return tuple(
            _sort_key(row.get(k), pair_about[1] if pair_about and k == pair_about[0] else None)
            for k in keys
        )

    return sorted(rows, key=key)


def write_csv_rows(path, rows):
    if not rows:
        raise ValueError("no rows to write")
    fields = []
    for row in rows:
        fields.extend(k for k in row if k not in fields)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, restval=GAP, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(float(v)) if isinstance(v, float) and not math.isnan(v) else v)
                             for k, v in row.items()})
