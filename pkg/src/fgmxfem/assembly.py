"""Global degree-of-freedom map, sparse assembly and boundary conditions.

Standard unknowns of node ``i`` occupy ``5 i .. 5 i + 4``. Enriched blocks
follow, crack by crack: Heaviside nodes in ascending order, then tip nodes
with their four basis blocks. Every block has five components in the
order ``(u0, v0, w0, theta_x, theta_y)``, so ``dof % 5`` is the component.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .crack import NodeClassification
from .element import (
    ElementDofLayout,
    EnrichmentFunction,
    element_matrices,
    quadrature_plan,
    standard_matrices,
)
from .errors import ConfigError

NDOF_NODE = 5
BC_TYPES = ("SS", "CC", "CFFF")
MEMBRANE = (0, 1)
FLEXURAL = (2, 3, 4)


@dataclass(frozen=True)
class DofMap:
    """Start index of every 5-dof block keyed by
    ``(node, kind, crack, tip, l)``."""

    n_nodes: int
    blocks: dict
    n_dof: int

    @property
    def n_enriched(self):
        return self.n_dof - NDOF_NODE * self.n_nodes

    def start(self, node, fn):
        if fn.kind == "std":
            return NDOF_NODE * node
        return self.blocks[(node, fn.kind, fn.crack, fn.tip, fn.l)]

    def node_blocks(self, node):
        """Start indices of all blocks attached to ``node``."""
        starts = [NDOF_NODE * node]
        starts.extend(s for key, s in self.blocks.items() if key[0] == node)
        return starts


def build_dof_map(n_nodes, classification=None):
    blocks = {}
    offset = NDOF_NODE * n_nodes
    if classification is not None:
        for ci, enr in enumerate(classification.per_crack):
            for node in enr.heaviside_nodes:
                blocks[(node, "H", ci, None, None)] = offset
                offset += NDOF_NODE
            for node, tip in enr.tip_nodes.items():
                for l in range(4):
                    blocks[(node, "tip", ci, tip, l)] = offset
                    offset += NDOF_NODE
    return DofMap(n_nodes=n_nodes, blocks=blocks, n_dof=offset)


def element_layout(conn, classification=None):
    """Enrichment blocks of one element given its node ids ``conn``."""
    fns = [EnrichmentFunction(k) for k in range(4)]
    if classification is not None:
        for ci, enr in enumerate(classification.per_crack):
            hset = set(enr.heaviside_nodes)
            for k, node in enumerate(conn):
                node = int(node)
                if node in hset:
                    fns.append(EnrichmentFunction(k, "H", ci))
                if node in enr.tip_nodes:
                    tip = enr.tip_nodes[node]
                    fns.extend(EnrichmentFunction(k, "tip", ci, tip, l) for l in range(4))
    return ElementDofLayout(tuple(fns))


def element_dofs(conn, layout, dofmap):
    idx = []
    for fn in layout.functions:
        s = dofmap.start(int(conn[fn.node]), fn)
        idx.extend(range(s, s + NDOF_NODE))
    return np.asarray(idx, dtype=np.int64)


@dataclass(eq=False)
class EnrichedModel:
    """Mesh, section, crack classification and assembled global matrices."""

    mesh: object
    section: object
    classification: NodeClassification | None
    dofmap: DofMap
    K: sp.csr_array
    M: sp.csr_array
    layouts: dict = field(default_factory=dict)

    @property
    def cracks(self):
        return () if self.classification is None else self.classification.cracks

    @property
    def n_dof(self):
        return self.dofmap.n_dof


def _to_csr(rows, cols, vals, n):
    A = sp.coo_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                     shape=(n, n))
    return A.tocsr()


def assemble(mesh, section, classification=None):
    """Scatter-add element matrices into global sparse ``K`` and ``M``.

    Elements without enriched nodes use the 2x2 Gauss kernel; the others
    integrate on their crack-adapted quadrature plan.
    """
    if classification is not None and classification.is_empty:
        classification = None
    dofmap = build_dof_map(mesh.n_nodes, classification)
    cracks = () if classification is None else classification.cracks
    Kstd, Mstd = standard_matrices(mesh.element_coords(), section)
    cuts_by_elem = {}
    tip_nodes = set()
    if classification is not None:
        for ci, enr in enumerate(classification.per_crack):
            for e, cut in enr.cuts.items():
                cuts_by_elem.setdefault(e, []).append((enr.crack, cut))
            tip_nodes.update(enr.tip_nodes)
    rows, cols, kv, mv = [], [], [], []
    layouts = {}
    for e, conn in enumerate(mesh.elements):
        layout = element_layout(conn, classification)
        if layout.is_standard:
            dofs = element_dofs(conn, layout, dofmap)
            Ke, Me = Kstd[e], Mstd[e]
        else:
            layouts[e] = layout
            dofs = element_dofs(conn, layout, dofmap)
            plan = quadrature_plan(
                mesh.element_coords(e),
                cuts_by_elem.get(e, ()),
                tip_enriched=any(int(n) in tip_nodes for n in conn),
                element=e,
            )
            Ke, Me = element_matrices(mesh.element_coords(e), layout, section, plan, cracks)
        r = np.repeat(dofs, len(dofs))
        c = np.tile(dofs, len(dofs))
        rows.append(r)
        cols.append(c)
        kv.append(Ke.ravel())
        mv.append(Me.ravel())
    n = dofmap.n_dof
    K = _to_csr(rows, cols, kv, n)
    M = _to_csr(rows, cols, mv, n)
    return EnrichedModel(mesh=mesh, section=section, classification=classification,
                         dofmap=dofmap, K=K, M=M, layouts=layouts)


def assemble_plain(mesh, section):
    """Conventional (unenriched) assembly, kept separate as a reference."""
    Ke, Me = standard_matrices(mesh.element_coords(), section)
    base = NDOF_NODE * mesh.elements
    dofs = (base[:, :, None] + np.arange(NDOF_NODE)).reshape(len(base), -1)
    rows = [np.repeat(d, 20) for d in dofs]
    cols = [np.tile(d, 20) for d in dofs]
    n = NDOF_NODE * mesh.n_nodes
    K = _to_csr(rows, cols, [k.ravel() for k in Ke], n)
    M = _to_csr(rows, cols, [m.ravel() for m in Me], n)
    return K, M


# ---------------------------------------------------------------------------
# Boundary conditions
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class ConstrainedSystem:
    """Free-dof stiffness and mass with the map back to global dofs."""

    model: EnrichedModel
    bc: str
    K: sp.csr_array
    M: sp.csr_array
    free: np.ndarray
    constrained: np.ndarray

    @property
    def components(self):
        """Component index (0..4) of each free dof."""
        return self.free % NDOF_NODE

    def expand(self, vectors):
        """Global vectors (zeros on constrained dofs) from free-dof vectors."""
        vectors = np.asarray(vectors)
        out = np.zeros((self.model.n_dof,) + vectors.shape[1:], dtype=vectors.dtype)
        out[self.free] = vectors
        return out


def node_constraints(mesh, bc):
    """Boolean mask ``(n_nodes, 5)`` of constrained components."""
    if bc not in BC_TYPES:
        raise ConfigError(f"unknown boundary condition {bc!r}; use one of {BC_TYPES}", "bc")
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    tol = 1e-9 * mesh.element_size
    x0, x1 = x.min(), x.max()
    y0, y1 = y.min(), y.max()
    on_x0 = np.abs(x - x0) <= tol
    on_x1 = np.abs(x - x1) <= tol
    on_y0 = np.abs(y - y0) <= tol
    on_y1 = np.abs(y - y1) <= tol
    mask = np.zeros((mesh.n_nodes, NDOF_NODE), dtype=bool)
    if bc == "SS":
        xe = on_x0 | on_x1
        ye = on_y0 | on_y1
        mask[xe, 0] = mask[xe, 2] = mask[xe, 4] = True
        mask[ye, 1] = mask[ye, 2] = mask[ye, 3] = True
    elif bc == "CC":
        mask[on_x0 | on_x1 | on_y0 | on_y1, :] = True
    else:
        mask[on_x0, :] = True
    return mask


def apply_bcs(model, bc):
    """Eliminate constrained rows and columns. Enriched blocks of a
    constrained node are constrained in the same components."""
    mask = node_constraints(model.mesh, bc)
    fixed = np.zeros(model.n_dof, dtype=bool)
    for node in np.flatnonzero(mask.any(axis=1)):
        comps = np.flatnonzero(mask[node])
        for s in model.dofmap.node_blocks(int(node)):
            fixed[s + comps] = True
    free = np.flatnonzero(~fixed)
    K = model.K[free][:, free]
    M = model.M[free][:, free]
    return ConstrainedSystem(model=model, bc=bc, K=sp.csr_array(K), M=sp.csr_array(M),
                             free=free, constrained=np.flatnonzero(fixed))


def split_components(system):
    """Free-dof index sets ``(membrane, flexural)``."""
    comp = system.components
    return np.flatnonzero(np.isin(comp, MEMBRANE)), np.flatnonzero(np.isin(comp, FLEXURAL))


def dump_matrix(path, A):
    """Write ``A`` as ``row col value`` lines (zero-based)."""
    C = sp.coo_array(A)
    order = np.lexsort((C.col, C.row))
    with open(path, "w") as fh:
        fh.write(f"% {A.shape[0]} {A.shape[1]} {C.nnz}\n")
        for i in order:
            fh.write(f"{C.row[i]} {C.col[i]} {float(C.data[i])!r}\n")


def load_matrix(path):
    with open(path) as fh:
        header = fh.readline().split()
        n, m = int(header[1]), int(header[2])
        data = np.loadtxt(fh, ndmin=2)
    if data.size == 0:
        return sp.csr_array((n, m))
    return sp.csr_array((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))), shape=(n, m))
