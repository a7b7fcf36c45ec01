"""Run configuration: schema, defaults and geometry resolution.

A configuration is a YAML mapping with the sections ``geometry``,
``materials``, ``cracks``, ``bc``, ``mesh``, ``solver`` and ``outputs``.
Lengths are given as ratios plus one reference length ``a`` (default 1 m).
Crack positions are fractions of the plate sides and angles are degrees.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field

import yaml

from .assembly import BC_TYPES
from .errors import ConfigError
from .mesh import default_divisions
from .section import KAPPA_MODES

CRACK_TYPES = ("center", "edge", "tip")
EDGES = ("left", "right", "bottom", "top")
MAX_MODES = 20


def _number(value, path, positive=False, minimum=None):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", path)
    if positive and not value > 0:
        raise ConfigError(f"must be positive, got {value}", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", path)
    return value


def _choice(value, choices, path):
    if value not in choices:
        raise ConfigError(f"must be one of {list(choices)}, got {value!r}", path)
    return value


def _pair(value, path):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError("expected a pair [x, y]", path)
    return (_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))


def _mapping(raw, path, allowed):
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("expected a mapping", path)
    unknown = sorted(set(raw) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown keys {unknown}", path)
    return raw


@dataclass(frozen=True)
class Geometry:
    a: float
    b: float
    h: float

    @property
    def b_over_a(self):
        return self.b / self.a

    @property
    def a_over_h(self):
        return self.a / self.h


@dataclass(frozen=True)
class Materials:
    ceramic: object
    metal: object
    n: float = 0.0
    T_ref: float = 300.0
    nu_mode: str = "constant"
    nu: float | None = None
    temperature_dependent: bool = True
    normalization: str = "reference"
    library: str | None = None


@dataclass(frozen=True)
class CrackSpec:
    """``center``: centred at ``center`` (fractions of a, b).
    ``edge``: starts on ``edge`` at ``position`` (fraction along that edge)
    and runs into the plate along a line at ``theta`` to the x-axis.
    ``tip``: interior tip at ``tip`` running along ``theta``, or against it
    when ``direction`` is ``backward``."""

    type: str
    d_over_a: float
    theta: float = 0.0
    center: tuple = (0.5, 0.5)
    edge: str | None = None
    position: float = 0.5
    tip: tuple | None = None
    direction: str = "forward"


@dataclass(frozen=True)
class MeshSpec:
    nx: int | None = None
    ny: int | None = None
    base: int = 34


@dataclass(frozen=True)
class SolverSpec:
    k_modes: int = 6
    kappa_mode: str = "constant"
    order: int = 30
    decouple: bool = True


@dataclass(frozen=True)
class OutputSpec:
    csv: str | None = None
    vtk: str | None = None
    vtk_mode: int = 1
    grid: int = 101
    dump_matrices: str | None = None
    verbosity: int = 0


@dataclass(frozen=True)
class RunConfig:
    geometry: Geometry
    materials: Materials
    cracks: tuple = ()
    bc: str = "SS"
    mesh: MeshSpec = field(default_factory=MeshSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    outputs: OutputSpec = field(default_factory=OutputSpec)
    name: str = "run"

    def to_dict(self):
        """Effective configuration with every default resolved."""
        d = asdict(self)
        d["geometry"] = {"a": self.geometry.a, "b": self.geometry.b, "h": self.geometry.h}
        relevant = {"center": ("center",), "edge": ("edge", "position"),
                    "tip": ("tip", "direction")}
        d["cracks"] = [
            {k: (list(v) if isinstance(v, tuple) else v) for k, v in c.items()
             if k in ("type", "d_over_a", "theta") or k in relevant[c["type"]]}
            for c in d["cracks"]
        ]
        nx, ny = default_divisions(self.geometry.a, self.geometry.b, self.mesh.base)
        d["mesh"] = {"nx": self.mesh.nx or nx, "ny": self.mesh.ny or ny, "base": self.mesh.base}
        m = d["materials"]
        for key in ("ceramic", "metal"):
            if isinstance(m[key], tuple):
                m[key] = dict(m[key])
        return d

    def dump(self, path=None):
        text = yaml.safe_dump(self.to_dict(), sort_keys=False)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text


def _geometry(raw):
    g = _mapping(raw, "geometry", ("a", "b", "h", "b_over_a", "a_over_b", "a_over_h", "b_over_h"))
    a = _number(g.get("a", 1.0), "geometry.a", positive=True)
    if "b" in g:
        b = _number(g["b"], "geometry.b", positive=True)
    elif "a_over_b" in g:
        b = a / _number(g["a_over_b"], "geometry.a_over_b", positive=True)
    else:
        b = a * _number(g.get("b_over_a", 1.0), "geometry.b_over_a", positive=True)
    given = [k for k in ("h", "a_over_h", "b_over_h") if k in g]
    if len(given) != 1:
        raise ConfigError("give exactly one of h, a_over_h, b_over_h", "geometry")
    key = given[0]
    val = _number(g[key], f"geometry.{key}", positive=True)
    h = val if key == "h" else (a / val if key == "a_over_h" else b / val)
    return Geometry(a=a, b=b, h=h)


def _phase_entry(value, path):
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        return tuple(sorted(value.items()))
    raise ConfigError("expected a phase name or an inline mapping", path)


def _materials(raw):
    keys = ("ceramic", "metal", "n", "T_ref", "nu_mode", "nu", "temperature_dependent",
            "normalization", "library")
    m = _mapping(raw, "materials", keys)
    for k in ("ceramic", "metal"):
        if k not in m:
            raise ConfigError("missing field", f"materials.{k}")
    nu = m.get("nu")
    td = m.get("temperature_dependent", True)
    if not isinstance(td, bool):
        raise ConfigError("expected true or false", "materials.temperature_dependent")
    return Materials(
        ceramic=_phase_entry(m["ceramic"], "materials.ceramic"),
        metal=_phase_entry(m["metal"], "materials.metal"),
        n=_number(m.get("n", 0.0), "materials.n", minimum=0.0),
        T_ref=_number(m.get("T_ref", 300.0), "materials.T_ref", positive=True),
        nu_mode=_choice(m.get("nu_mode", "constant"), ("constant", "mori-tanaka"), "materials.nu_mode"),
        nu=None if nu is None else _number(nu, "materials.nu", positive=True),
        temperature_dependent=td,
        normalization=_choice(m.get("normalization", "reference"), ("reference", "evaluated"),
                              "materials.normalization"),
        library=m.get("library"),
    )


def _crack(raw, i):
    path = f"cracks[{i}]"
    c = _mapping(raw, path, ("type", "d_over_a", "theta", "center", "edge", "position", "tip",
                             "direction"))
    ctype = _choice(c.get("type", "center"), CRACK_TYPES, f"{path}.type")
    if "d_over_a" not in c:
        raise ConfigError("missing field", f"{path}.d_over_a")
    spec = dict(
        type=ctype,
        d_over_a=_number(c["d_over_a"], f"{path}.d_over_a", minimum=0.0),
        theta=_number(c.get("theta", 0.0), f"{path}.theta"),
    )
    if ctype == "center":
        spec["center"] = _pair(c.get("center", (0.5, 0.5)), f"{path}.center")
    elif ctype == "edge":
        if "edge" not in c:
            raise ConfigError("missing field", f"{path}.edge")
        spec["edge"] = _choice(c["edge"], EDGES, f"{path}.edge")
        spec["position"] = _number(c.get("position", 0.5), f"{path}.position")
    else:
        if "tip" not in c:
            raise ConfigError("missing field", f"{path}.tip")
        spec["tip"] = _pair(c["tip"], f"{path}.tip")
        spec["direction"] = _choice(c.get("direction", "forward"), ("forward", "backward"),
                                    f"{path}.direction")
    return CrackSpec(**spec)


def _int(value, path, minimum=None, maximum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}", path)
    if maximum is not None and value > maximum:
        raise ConfigError(f"must be <= {maximum}", path)
    return value


def parse_config(raw):
    """Validate a raw mapping into a :class:`RunConfig`."""
    top = _mapping(raw, "<root>", ("name", "geometry", "materials", "cracks", "bc", "mesh",
                                   "solver", "outputs"))
    if "materials" not in top:
        raise ConfigError("missing section", "materials")
    cracks_raw = top.get("cracks") or []
    if not isinstance(cracks_raw, list):
        raise ConfigError("expected a list", "cracks")
    m = _mapping(top.get("mesh"), "mesh", ("nx", "ny", "base"))
    s = _mapping(top.get("solver"), "solver", ("k_modes", "kappa_mode", "order", "decouple"))
    o = _mapping(top.get("outputs"), "outputs", ("csv", "vtk", "vtk_mode", "grid",
                                                 "dump_matrices", "verbosity"))
    decouple = s.get("decouple", True)
    if not isinstance(decouple, bool):
        raise ConfigError("expected true or false", "solver.decouple")
    k_modes = _int(s.get("k_modes", 6), "solver.k_modes", 1, MAX_MODES)
    return RunConfig(
        name=str(top.get("name", "run")),
        geometry=_geometry(top.get("geometry")),
        materials=_materials(top["materials"]),
        cracks=tuple(_crack(c, i) for i, c in enumerate(cracks_raw)),
        bc=_choice(top.get("bc", "SS"), BC_TYPES, "bc"),
        mesh=MeshSpec(
            nx=None if m.get("nx") is None else _int(m["nx"], "mesh.nx", 1),
            ny=None if m.get("ny") is None else _int(m["ny"], "mesh.ny", 1),
            base=_int(m.get("base", 34), "mesh.base", 1),
        ),
        solver=SolverSpec(
            k_modes=k_modes,
            kappa_mode=_choice(s.get("kappa_mode", "constant"), KAPPA_MODES, "solver.kappa_mode"),
            order=_int(s.get("order", 30), "solver.order", 20),
            decouple=decouple,
        ),
        outputs=OutputSpec(
            csv=o.get("csv"),
            vtk=o.get("vtk"),
            vtk_mode=_int(o.get("vtk_mode", 1), "outputs.vtk_mode", 1, k_modes),
            grid=_int(o.get("grid", 101), "outputs.grid", 2),
            dump_matrices=o.get("dump_matrices"),
            verbosity=_int(o.get("verbosity", 0), "outputs.verbosity", 0),
        ),
    )


def load_config(path):
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return parse_config(raw)


def set_path(raw, dotted, value):
    """Copy of ``raw`` with the entry at a dotted path (``cracks.0.theta``)
    replaced by ``value``."""
    out = copy.deepcopy(raw)
    node = out
    keys = dotted.split(".")
    for i, key in enumerate(keys):
        last = i == len(keys) - 1
        if isinstance(node, list):
            try:
                idx = int(key)
            except ValueError:
                raise ConfigError("list index expected", dotted) from None
            if idx >= len(node):
                raise ConfigError("index out of range", dotted)
            if last:
                node[idx] = value
            else:
                node = node[idx]
        else:
            if last:
                node[key] = value
            else:
                node = node.setdefault(key, {})
    return out
