import numpy as np
import pytest
from numpy.testing import assert_allclose

from fgmxfem.assembly import apply_bcs, assemble
from fgmxfem.crack import CrackSegment, classify_nodes
from fgmxfem.config import parse_config
from fgmxfem.mesh import generate_mesh
from fgmxfem.pipeline import solve_system
from fgmxfem.post import (
    GAP,
    evaluate_field,
    read_vtk,
    result_row,
    sample_mode,
    tabulate,
    write_csv_rows,
    write_vtk,
)


@pytest.fixture(scope="module")
def plain_system():
    from conftest import homogeneous
    from fgmxfem.section import integrate_section

    mesh = generate_mesh(1.0, 1.0, 8, 8)
    sec = integrate_section(homogeneous(), 0.05)
    system = apply_bcs(assemble(mesh, sec), "SS")
    return system, solve_system(system, 3)


@pytest.fixture(scope="module")
def cantilever():
    from conftest import homogeneous
    from fgmxfem.section import integrate_section

    mesh = generate_mesh(1.0, 1.0, 16, 16)
    sec = integrate_section(homogeneous(), 0.1)
    seg = CrackSegment.from_anchor((1.0, 0.5), 0.5, np.pi)
    system = apply_bcs(assemble(mesh, sec, classify_nodes([seg], mesh)), "CFFF")
    return system, solve_system(system, 2)


def test_normalization_and_nodal_values(plain_system):
    system, modal = plain_system
    f = sample_mode(system, modal.vectors[:, 0], grid=17)
    assert_allclose(np.abs(f.w).max(), 1.0, rtol=1e-14)
    assert f.w.flat[np.argmax(np.abs(f.w))] == pytest.approx(1.0)
    raw = sample_mode(system, modal.vectors[:, 0], grid=9, normalize=False)
    full = system.expand(modal.vectors[:, 0])
    w_nodes = full[2::5].reshape(9, 9)
    assert_allclose(raw.w, w_nodes, atol=1e-12 * np.abs(w_nodes).max())


def test_uncracked_field_continuous(plain_system):
    system, modal = plain_system
    full = system.expand(modal.vectors[:, 1])
    x = 0.375
    y = np.linspace(0.01, 0.99, 25)
    left = evaluate_field(system.model, full, np.column_stack([np.full_like(y, x - 1e-13), y]))
    right = evaluate_field(system.model, full, np.column_stack([np.full_like(y, x + 1e-13), y]))
    assert np.abs(left - right).max() < 1e-9 * np.abs(left).max()


def test_crack_opening_in_cantilever_modes(cantilever):
    system, modal = cantilever
    model = system.model
    seg = model.cracks[0]
    xs = np.linspace(0.6, 0.95, 8)
    jumps = []
    for i in range(2):
        full = system.expand(modal.vectors[:, i])
        up = evaluate_field(model, full, np.column_stack([xs, np.full_like(xs, seg.tip_a[1] + 1e-7)]))
        lo = evaluate_field(model, full, np.column_stack([xs, np.full_like(xs, seg.tip_a[1] - 1e-7)]))
        wmax = np.abs(sample_mode(system, modal.vectors[:, i], 21, normalize=False).w).max()
        jumps.append(np.abs(up[:, 2] - lo[:, 2]).max() / wmax)
    assert jumps[0] < 1e-3
    assert jumps[1] > 100 * jumps[0]


def test_sampling_on_crack_and_tip(cantilever):
    system, modal = cantilever
    seg = system.model.cracks[0]
    full = system.expand(modal.vectors[:, 0])
    pts = np.array([[0.8, seg.tip_a[1]], seg.tip(1)])
    vals = evaluate_field(system.model, full, pts)
    assert np.all(np.isfinite(vals))


def test_vtk_roundtrip(tmp_path, plain_system):
    system, modal = plain_system
    f = sample_mode(system, modal.vectors[:, 0], grid=11)
    path = tmp_path / "mode.vtk"
    write_vtk(path, f)
    text = path.read_text()
    assert text.startswith("# vtk DataFile Version 3.0") and "np.float64" not in text
    back = read_vtk(path)
    for name in ("x", "y", "u", "v", "w", "theta_x", "theta_y"):
        assert np.array_equal(getattr(back, name), getattr(f, name))


def test_tabulate_orders_and_pairs():
    rows = [{"theta": t, "Omega_1": 1.0} for t in (90, 0, 50, 40, 10, 80)]
    out = tabulate(rows, ["theta"])
    assert [r["theta"] for r in out] == [0, 10, 40, 50, 80, 90]
    paired = tabulate(rows, ["theta"], pair_about=("theta", 45))
    assert [r["theta"] for r in paired] == [40, 50, 10, 80, 0, 90]
    assert len(tabulate([{"theta": t} for t in range(0, 91, 10)], ["theta"])) == 10


def test_result_row_gaps(tmp_path):
    cfg = parse_config({"geometry": {"a_over_h": 10}, "materials": {"ceramic": "Al2O3", "metal": "Al"},
                        "solver": {"k_modes": 3}})
    row = result_row(cfg, [1.234567, 2.0])
    assert row["Omega_1"] == 1.2346 and row["Omega_3"] == GAP
    failed = result_row(cfg, None, error="ModelError: boom")
    assert all(failed[f"Omega_{i}"] == GAP for i in (1, 2, 3))
    assert list(row)[:3] == ["name", "a", "b"]
    path = tmp_path / "t.csv"
    write_csv_rows(path, [row, failed])
    lines = path.read_text().splitlines()
    assert len(lines) == 3 and "NA" in lines[2] and "boom" in lines[2]
