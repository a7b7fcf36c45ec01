import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from fgmxfem.errors import ConfigError, DomainError
from fgmxfem.materials import (
    PRESETS,
    FgmComposition,
    MaterialPhase,
    density_at,
    effective_E_nu,
    get_phase,
    load_library,
    mori_tanaka_moduli,
    property_at_temperature,
    volume_fraction_ceramic,
    young_poisson_from_KG,
)

SI3N4 = PRESETS["Si3N4"]
SUS304 = PRESETS["SUS304"]


def test_si3n4_modulus_at_300K():
    E = property_at_temperature(SI3N4, 300.0)
    factor = 1 - 3.070e-4 * 300 + 2.160e-7 * 300**2 - 8.946e-11 * 300**3
    assert_allclose(factor, 0.9249246, rtol=1e-7)
    assert_allclose(E, 348.43e9 * factor, rtol=1e-14)
    assert_allclose(E, 3.2227e11, rtol=1e-4)


def test_sus304_modulus_at_300K():
    expected = 201.04e9 * (1 + 3.079e-4 * 300 - 6.534e-7 * 300**2)
    assert_allclose(property_at_temperature(SUS304, 300.0), expected, rtol=1e-14)


@pytest.mark.parametrize("T", [250.0, 700.0, 1200.0])
def test_constant_polynomial_returns_P0(T):
    assert property_at_temperature(PRESETS["Al"], T) == 70e9


@pytest.mark.parametrize("T", [0.0, -5.0])
def test_nonpositive_temperature_rejected(T):
    with pytest.raises(DomainError):
        property_at_temperature(SI3N4, T)


def test_out_of_range_temperature_warns():
    with pytest.warns(RuntimeWarning):
        property_at_temperature(SI3N4, 1500.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        property_at_temperature(SI3N4, 600.0)


def test_temperature_derivative_matches_polynomial():
    P0, Pm1, P1, P2, P3 = SI3N4.E_coeffs
    T, dT = 300.0, 1e-3
    fd = (property_at_temperature(SI3N4, T + dT) - property_at_temperature(SI3N4, T - dT)) / (2 * dT)
    exact = P0 * (-Pm1 / T**2 + P1 + 2 * P2 * T + 3 * P3 * T**2)
    assert_allclose(fd, exact, rtol=1e-6)


def test_phase_invariants():
    with pytest.raises(ValueError):
        MaterialPhase("bad", (0.0, 0, 0, 0, 0), 0.3, 1000.0)
    with pytest.raises(ValueError):
        MaterialPhase("bad", (1e9, 0, 0, 0, 0), 0.5, 1000.0)
    with pytest.raises(ValueError):
        MaterialPhase("bad", (1e9, 0, 0, 0, 0), 0.3, -1.0)
    for phase in PRESETS.values():
        for T in np.linspace(250, 1200, 20):
            assert property_at_temperature(phase, T) > 0


def comp(n, ceramic="Al2O3", metal="Al", **kw):
    return FgmComposition(PRESETS[ceramic], PRESETS[metal], n, **kw)


@pytest.mark.parametrize("n", [0.2, 1.0, 5.0])
def test_volume_fraction_surfaces(n):
    h = 0.1
    assert volume_fraction_ceramic(comp(n), h / 2, h) == 1.0
    assert volume_fraction_ceramic(comp(n), -h / 2, h) == 0.0


def test_volume_fraction_examples():
    h = 0.2
    assert_allclose(volume_fraction_ceramic(comp(1.0), 0.0, h), 0.5)
    assert_allclose(volume_fraction_ceramic(comp(0.0), np.linspace(-h / 2, h / 2, 7), h), 1.0)


def test_volume_fraction_domain():
    with pytest.raises(DomainError):
        volume_fraction_ceramic(comp(1.0), 0.06, 0.1)
    with pytest.raises(DomainError):
        FgmComposition(PRESETS["Al2O3"], PRESETS["Al"], -1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 20.0), st.floats(0.0, 20.0), st.floats(-0.999, 1.0))
def test_volume_fraction_ordering(n1, n2, s):
    h = 1.0
    z = s * h / 2
    lo, hi = sorted((n1, n2))
    z_grid = np.linspace(-h / 2, h / 2, 21)
    v = volume_fraction_ceramic(comp(lo), z_grid, h)
    assert np.all(np.diff(v) >= 0)
    assert volume_fraction_ceramic(comp(lo), z, h) >= volume_fraction_ceramic(comp(hi), z, h) - 1e-15


def mt_oracle(Ec, nuc, Em, num, Vc):
    """Symbol-by-symbol Mori-Tanaka estimate."""
    Kc, Gc = Ec / (3 * (1 - 2 * nuc)), Ec / (2 * (1 + nuc))
    Km, Gm = Em / (3 * (1 - 2 * num)), Em / (2 * (1 + num))
    Vm = 1 - Vc
    K = Km + (Kc - Km) * Vc / (1 + Vm * (Kc - Km) / (Km + 4 * Gm / 3))
    f1 = Gm * (9 * Km + 8 * Gm) / (6 * (Km + 2 * Gm))
    G = Gm + (Gc - Gm) * Vc / (1 + Vm * (Gc - Gm) / (Gm + f1))
    E = 9 * K * G / (3 * K + G)
    nu = (3 * K - 2 * G) / (2 * (3 * K + G))
    return K, G, E, nu


def test_mori_tanaka_al_alumina_midpoint():
    K, G = mori_tanaka_moduli(comp(1.0), 0.5)
    Ko, Go, Eo, nuo = mt_oracle(380e9, 0.3, 70e9, 0.3, 0.5)
    assert_allclose([K, G], [Ko, Go], rtol=1e-13)
    E, nu = young_poisson_from_KG(K, G)
    assert_allclose([E, nu], [Eo, nuo], rtol=1e-13)
    assert 70e9 < E < 380e9


def test_mori_tanaka_limits():
    Kc, Gc, Km, Gm = comp(1.0).phase_moduli()
    assert_allclose(mori_tanaka_moduli(comp(1.0), 0.0), (Km, Gm), rtol=1e-15)
    assert_allclose(mori_tanaka_moduli(comp(1.0), 1.0), (Kc, Gc), rtol=1e-15)
    with pytest.raises(DomainError):
        mori_tanaka_moduli(comp(1.0), 1.2)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.0, 1.0), st.sampled_from([("Al2O3", "Al"), ("ZrO2", "Al"), ("Si3N4", "SUS304")]))
def test_mori_tanaka_bounds(Vc, pair):
    c = comp(1.0, *pair, nu=0.28) if pair[0] == "Si3N4" else comp(1.0, *pair)
    Kc, Gc, Km, Gm = c.phase_moduli()
    K, G = mori_tanaka_moduli(c, Vc)
    tol = 1e-9
    assert min(Kc, Km) * (1 - tol) <= K <= max(Kc, Km) * (1 + tol)
    assert min(Gc, Gm) * (1 - tol) <= G <= max(Gc, Gm) * (1 + tol)
    E, nu = young_poisson_from_KG(K, G)
    Ec, Em = c.phase_E(c.ceramic), c.phase_E(c.metal)
    assert min(Ec, Em) * (1 - tol) <= E <= max(Ec, Em) * (1 + tol)
    assert 0 < nu < 0.5


def test_young_poisson_roundtrip():
    E0, nu0 = 70e9, 0.3
    E, nu = young_poisson_from_KG(E0 / (3 * (1 - 2 * nu0)), E0 / (2 * (1 + nu0)))
    assert_allclose([E, nu], [E0, nu0], rtol=1e-12)
    _, nu = young_poisson_from_KG(5e9, 5e9)
    assert_allclose(nu, 1 / 8, rtol=1e-15)
    with pytest.raises(DomainError):
        young_poisson_from_KG(-1.0, 1.0)


def test_density_examples():
    c = comp(1.0, "Si3N4", "SUS304", nu=0.28)
    assert_allclose(density_at(c, 0.0, 0.1), 5268.0, rtol=1e-15)
    assert_allclose(density_at(c, 0.05, 0.1), 2370.0, rtol=1e-15)
    c2 = comp(2.0, "Si3N4", "SUS304", nu=0.28)
    h = 0.1
    assert_allclose(density_at(c2, h / 4, h), 8166 + (2370 - 8166) * 0.75**2, rtol=1e-14)
    with pytest.raises(DomainError):
        density_at(c2, h, h)


def test_constant_nu_mode():
    c = comp(1.0, "Si3N4", "SUS304", nu=0.28)
    z = np.linspace(-0.05, 0.05, 9)
    E, nu = effective_E_nu(c, z, 0.1)
    assert np.all(nu == 0.28)
    cm = comp(1.0, "Si3N4", "SUS304", nu_mode="mori-tanaka")
    E2, nu2 = effective_E_nu(cm, z, 0.1)
    assert_allclose(E, E2, rtol=1e-15)
    assert np.all((nu2 > 0) & (nu2 < 0.5))
    with pytest.raises(ValueError):
        FgmComposition(PRESETS["Al2O3"], PRESETS["SUS304"], 1.0)


def test_temperature_convention():
    td = comp(0.0, "Si3N4", "SUS304", nu=0.28)
    ref = comp(0.0, "Si3N4", "SUS304", nu=0.28, temperature_dependent=False)
    assert_allclose(td.phase_E(td.ceramic), property_at_temperature(SI3N4, 300.0))
    assert ref.phase_E(ref.ceramic) == 348.43e9


def test_library_roundtrip(tmp_path):
    path = tmp_path / "lib.yaml"
    path.write_text("phases:\n  X:\n    E: 1.0e9\n    nu: 0.25\n    rho: 1000\n")
    lib = load_library(path)
    assert lib["X"].E_coeffs == (1e9, 0.0, 0.0, 0.0, 0.0)
    assert get_phase("X", lib).nu == 0.25
    with pytest.raises(ConfigError):
        get_phase("nope")
    bad = tmp_path / "bad.yaml"
    bad.write_text("phases:\n  Y:\n    nu: 0.25\n    rho: 1000\n")
    with pytest.raises(ConfigError, match="materials.Y"):
        load_library(bad)
    assert get_phase({"E": 2e9, "nu": 0.3, "rho": 10.0}).E_reference == 2e9


def test_presets_match_tables():
    assert (PRESETS["Al"].E_reference, PRESETS["Al"].nu, PRESETS["Al"].rho) == (70e9, 0.3, 2702)
    assert (PRESETS["Al2O3"].E_reference, PRESETS["Al2O3"].rho) == (380e9, 3800)
    assert (PRESETS["ZrO2"].E_reference, PRESETS["ZrO2"].rho) == (200e9, 5700)
    assert SI3N4.E_coeffs == (348.43e9, 0.0, -3.070e-4, 2.160e-7, -8.946e-11)
    assert SUS304.E_coeffs == (201.04e9, 0.0, 3.079e-4, -6.534e-7, 0.0)
    assert (SI3N4.rho, SUS304.rho, SI3N4.k_thermal, SUS304.k_thermal) == (2370, 8166, 9.19, 12.04)
