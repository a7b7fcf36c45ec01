"""End-to-end modal analysis: configuration -> section -> cracks -> model
-> eigenpairs -> artifacts."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .assembly import apply_bcs, assemble, dump_matrix, split_components
from .config import RunConfig
from .crack import CrackSegment, classify_nodes
from .eigensolver import ModalResult, nondimensionalize, solve_generalized
from .errors import ConfigError, ModelError, NearSingularMassError
from .materials import FgmComposition, get_phase, load_library, property_at_temperature
from .mesh import default_divisions, generate_mesh
from .section import integrate_section

log = logging.getLogger(__name__)


@dataclass(eq=False)
class RunResult:
    config: RunConfig
    modal: ModalResult
    system: object
    section: object
    timings: dict = field(default_factory=dict)

    @property
    def Omegas(self):
        return self.modal.Omegas

    @property
    def omegas(self):
        return self.modal.omegas


def build_composition(mat):
    library = load_library(mat.library) if mat.library else None
    phases = []
    for key in ("ceramic", "metal"):
        entry = getattr(mat, key)
        phases.append(get_phase(dict(entry) if isinstance(entry, tuple) else entry, library))
    ceramic, metal = phases
    try:
        return FgmComposition(ceramic, metal, mat.n, T_ref=mat.T_ref, nu_mode=mat.nu_mode,
                              nu=mat.nu, temperature_dependent=mat.temperature_dependent)
    except ValueError as exc:
        raise ConfigError(str(exc), "materials") from None


def normalization_constants(comp, normalization="reference"):
    """Ceramic ``(rho_c, E_c)`` used in the frequency parameter.

    ``reference`` takes the tabulated modulus ``P0``; ``evaluated`` the
    modulus at the analysis temperature.
    """
    c = comp.ceramic
    if normalization == "evaluated" and comp.temperature_dependent:
        return c.rho, property_at_temperature(c, comp.T_ref)
    return c.rho, c.E_reference


def _inward(edge):
    return {"left": (1.0, 0.0), "right": (-1.0, 0.0),
            "bottom": (0.0, 1.0), "top": (0.0, -1.0)}[edge]


def build_crack(spec, a, b, index=0):
    """Crack segment in absolute coordinates, or None for zero length."""
    path = f"cracks[{index}]"
    d = spec.d_over_a * a
    if d == 0.0:
        return None
    th = math.radians(spec.theta)
    e = np.array([math.cos(th), math.sin(th)])
    if spec.type == "center":
        return CrackSegment.centered((spec.center[0] * a, spec.center[1] * b), d, th)
    if spec.type == "edge":
        anchor = {
            "left": (0.0, spec.position * b), "right": (a, spec.position * b),
            "bottom": (spec.position * a, 0.0), "top": (spec.position * a, b),
        }[spec.edge]
        dot = float(e @ np.array(_inward(spec.edge)))
        if abs(dot) < 1e-12:
            raise ConfigError("an edge crack cannot run along its edge", f"{path}.theta")
        if dot < 0:
            e = -e
        return CrackSegment.from_anchor(anchor, d, math.atan2(e[1], e[0]))
    if spec.direction == "backward":
        e = -e
    tip = np.array([spec.tip[0] * a, spec.tip[1] * b])
    return CrackSegment(tuple(tip + d * e), tuple(tip))


def build_mesh(cfg):
    g = cfg.geometry
    nx, ny = default_divisions(g.a, g.b, cfg.mesh.base)
    return generate_mesh(g.a, g.b, cfg.mesh.nx or nx, cfg.mesh.ny or ny)


def solve_system(system, k_modes, decouple=True):
    """Lowest eigenpairs of a constrained system. When the section has no
    membrane-bending coupling the membrane and flexural blocks are solved
    separately and merged."""
    section = system.model.section
    K = system.K.toarray()
    M = system.M.toarray()
    n = K.shape[0]
    if not decouple or section.coupled or n == 0:
        return solve_generalized(K, M, k_modes)
    parts = []
    for idx in split_components(system):
        if idx.size == 0:
            continue
        sub = solve_generalized(K[np.ix_(idx, idx)], M[np.ix_(idx, idx)], min(k_modes, idx.size))
        parts.append((idx, sub))
    lam = np.concatenate([p.eigenvalues for _, p in parts])
    res = np.concatenate([p.residuals for _, p in parts])
    vecs = np.zeros((n, lam.size))
    col = 0
    for idx, p in parts:
        m = p.eigenvalues.size
        vecs[idx, col:col + m] = p.vectors
        col += m
    order = np.argsort(lam, kind="stable")[:k_modes]
    lam = lam[order]
    return ModalResult(omegas=np.sqrt(np.clip(lam, 0.0, None)), vectors=vecs[:, order],
                       residuals=res[order], eigenvalues=lam)


def build_model(cfg):
    """Section, crack classification and assembled model for ``cfg``."""
    g = cfg.geometry
    comp = build_composition(cfg.materials)
    section = integrate_section(comp, g.h, cfg.solver.kappa_mode, cfg.solver.order)
    mesh = build_mesh(cfg)
    segs = [s for s in (build_crack(c, g.a, g.b, i) for i, c in enumerate(cfg.cracks))
            if s is not None]
    classification = classify_nodes(segs, mesh) if segs else None
    model = assemble(mesh, section, classification)
    return comp, section, model


def run(cfg):
    """Execute the full pipeline for one configuration."""
    t0 = time.perf_counter()
    comp, section, model = build_model(cfg)
    t1 = time.perf_counter()
    system = apply_bcs(model, cfg.bc)
    if cfg.outputs.dump_matrices:
        dump_matrix(f"{cfg.outputs.dump_matrices}_K.txt", system.K)
        dump_matrix(f"{cfg.outputs.dump_matrices}_M.txt", system.M)
    try:
        modal = solve_system(system, cfg.solver.k_modes, cfg.solver.decouple)
    except NearSingularMassError as exc:
        gdof = int(system.free[exc.dof]) if exc.dof < system.free.size else exc.dof
        raise ModelError(
            f"mass matrix is near-singular at global dof {gdof}; "
            "an enrichment function is nearly dependent on the others"
        ) from exc
    t2 = time.perf_counter()
    rho_c, E_c = normalization_constants(comp, cfg.materials.normalization)
    g = cfg.geometry
    modal = modal.with_omegas(nondimensionalize(modal.omegas, g.b, g.h, rho_c, E_c))
    log.info("%s: n_dof=%d free=%d Omega=%s", cfg.name, model.n_dof, system.free.size,
             np.array2string(modal.Omegas, precision=4))
    result = RunResult(config=cfg, modal=modal, system=system, section=section,
                       timings={"build": t1 - t0, "solve": t2 - t1})
    write_artifacts(result)
    return result


def write_artifacts(result):
    from .post import sample_mode, write_csv_rows, result_row, write_vtk

    out = result.config.outputs
    if out.csv:
        write_csv_rows(out.csv, [result_row(result.config, result.Omegas)])
    if out.vtk:
        field_ = sample_mode(result.system, result.modal.vectors[:, out.vtk_mode - 1], out.grid)
        write_vtk(out.vtk, field_)
