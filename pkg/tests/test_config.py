import pytest
import yaml
from numpy.testing import assert_allclose

from fgmxfem.config import load_config, parse_config, set_path
from fgmxfem.errors import ConfigError

BASE = {
    "geometry": {"b_over_a": 0.5, "a_over_h": 10},
    "materials": {"ceramic": "Si3N4", "metal": "SUS304", "n": 1, "nu": 0.28},
    "cracks": [{"type": "edge", "edge": "left", "d_over_a": 0.5}],
}


def test_defaults_and_geometry():
    cfg = parse_config(BASE)
    assert (cfg.geometry.a, cfg.geometry.b, cfg.geometry.h) == (1.0, 0.5, 0.1)
    assert cfg.bc == "SS" and cfg.solver.k_modes == 6 and cfg.solver.kappa_mode == "constant"
    assert cfg.materials.T_ref == 300.0 and cfg.materials.normalization == "reference"
    assert cfg.cracks[0].position == 0.5
    cfg = parse_config({**BASE, "geometry": {"a": 2.0, "a_over_b": 2, "b_over_h": 100}})
    assert_allclose([cfg.geometry.b, cfg.geometry.h], [1.0, 0.01])


@pytest.mark.parametrize("path, value, where", [
    ("geometry.a_over_h", -1, "geometry.a_over_h"),
    ("materials.n", "x", "materials.n"),
    ("bc", "SFSF", "bc"),
    ("solver.k_modes", 0, "solver.k_modes"),
    ("solver.k_modes", 21, "solver.k_modes"),
    ("solver.kappa_mode", "other", "solver.kappa_mode"),
    ("cracks.0.edge", "middle", "cracks[0].edge"),
    ("cracks.0.bogus", 1, "cracks[0]"),
    ("mesh.nx", 1.5, "mesh.nx"),
    ("extra", 1, "<root>"),
])
def test_invalid_fields_name_their_path(path, value, where):
    with pytest.raises(ConfigError) as info:
        parse_config(set_path(BASE, path, value))
    assert info.value.path == where
    assert where in str(info.value)


def test_missing_thickness():
    with pytest.raises(ConfigError, match="geometry"):
        parse_config({**BASE, "geometry": {"a": 1.0}})


def test_effective_config_roundtrip(tmp_path):
    cfg = parse_config(BASE)
    path = tmp_path / "eff.yaml"
    cfg.dump(path)
    again = load_config(path)
    assert again.geometry == cfg.geometry
    assert again.materials == cfg.materials
    assert again.cracks == cfg.cracks
    assert again.solver == cfg.solver
    assert (again.mesh.nx, again.mesh.ny) == (68, 34)
    assert yaml.safe_load(path.read_text())["mesh"]["nx"] == 68


def test_set_path():
    raw = set_path(BASE, "cracks.0.theta", 30)
    assert raw["cracks"][0]["theta"] == 30 and "theta" not in BASE["cracks"][0]
    with pytest.raises(ConfigError):
        set_path(BASE, "cracks.3.theta", 0)
