"""Constituent data and through-thickness homogenization of FGM plates.

Properties of each phase follow the cubic temperature law
``P(T) = P0 (P_-1/T + 1 + P1 T + P2 T^2 + P3 T^3)``. The ceramic volume
fraction follows a power law in ``z``; effective moduli come from the
Mori-Tanaka estimate and density from the rule of mixtures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import yaml

from .errors import ConfigError, DomainError

T_RANGE = (250.0, 1200.0)
DEFAULT_T_REF = 300.0


@dataclass(frozen=True)
class MaterialPhase:
    """One constituent (ceramic or metal).

    ``E_coeffs`` are ``(P0, P_-1, P1, P2, P3)`` with ``P0`` in Pa.
    ``k_thermal`` and ``alpha_coeffs`` are carried as data only.
    """

    name: str
    E_coeffs: tuple
    nu: float
    rho: float
    k_thermal: float | None = None
    alpha_coeffs: tuple | None = None

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.E_coeffs)
        if len(coeffs) != 5:
            raise ValueError(f"{self.name}: E_coeffs needs 5 values, got {len(coeffs)}")
        object.__setattr__(self, "E_coeffs", coeffs)
        if not coeffs[0] > 0:
            raise ValueError(f"{self.name}: P0 must be positive")
        if not self.rho > 0:
            raise ValueError(f"{self.name}: density must be positive")
        if not 0.0 < self.nu < 0.5:
            raise ValueError(f"{self.name}: Poisson's ratio must lie in (0, 0.5)")

    @property
    def E_reference(self):
        """Tabulated modulus ``P0``."""
        return self.E_coeffs[0]

    def E(self, T):
        return property_at_temperature(self, T)


def property_at_temperature(phase, T):
    """Young's modulus of ``phase`` at absolute temperature ``T`` (K)."""
    T = float(T)
    if not T > 0:
        raise DomainError(f"temperature must be positive, got {T}")
    if not T_RANGE[0] <= T <= T_RANGE[1]:
        warnings.warn(
            f"T={T} K is outside the fitted range {T_RANGE}; extrapolating",
            RuntimeWarning,
            stacklevel=2,
        )
    P0, Pm1, P1, P2, P3 = phase.E_coeffs
    return P0 * (Pm1 / T + 1.0 + P1 * T + P2 * T**2 + P3 * T**3)


@dataclass(frozen=True)
class FgmComposition:
    """Ceramic-rich top (z = h/2) graded to metal-rich bottom (z = -h/2).

    nu_mode
        ``"constant"``: Poisson's ratio fixed to ``nu`` and E taken from the
        Mori-Tanaka K and G; ``"mori-tanaka"``: both from K and G.
    temperature_dependent
        Evaluate E at ``T_ref`` from the coefficients; when False the
        tabulated ``P0`` is used directly.
    """

    ceramic: MaterialPhase
    metal: MaterialPhase
    n: float
    T_ref: float = DEFAULT_T_REF
    nu_mode: str = "constant"
    nu: float | None = None
    temperature_dependent: bool = True

    def __post_init__(self):
        if not self.n >= 0:
            raise DomainError(f"gradient index must be >= 0, got {self.n}")
        if self.nu_mode not in ("constant", "mori-tanaka"):
            raise ValueError(f"unknown nu_mode {self.nu_mode!r}")
        if self.nu_mode == "constant" and self.nu is None:
            if self.ceramic.nu != self.metal.nu:
                raise ValueError(
                    "constant-nu mode needs an explicit nu when the phases differ"
                )
            object.__setattr__(self, "nu", self.ceramic.nu)
        if self.nu is not None and not 0.0 < self.nu < 0.5:
            raise ValueError(f"nu must lie in (0, 0.5), got {self.nu}")

    def phase_E(self, phase):
        if self.temperature_dependent:
            return property_at_temperature(phase, self.T_ref)
        return phase.E_reference

    def phase_moduli(self):
        """Bulk and shear moduli ``(Kc, Gc, Km, Gm)`` of the two phases."""
        out = []
        for phase in (self.ceramic, self.metal):
            E = self.phase_E(phase)
            out.append(E / (3.0 * (1.0 - 2.0 * phase.nu)))
            out.append(E / (2.0 * (1.0 + phase.nu)))
        return tuple(out)


def _check_z(z, h):
    z = np.asarray(z, dtype=float)
    tol = 1e-12 * h
    if np.any(z < -h / 2 - tol) or np.any(z > h / 2 + tol):
        raise DomainError(f"z must lie in [-h/2, h/2] = [{-h/2}, {h/2}]")
    return np.clip(z, -h / 2, h / 2)


def volume_fraction_ceramic(comp, z, h):
    """Ceramic volume fraction ``((2z + h) / 2h) ** n``."""
    z = _check_z(z, h)
    t = (2.0 * z + h) / (2.0 * h)
    if comp.n == 0:
        return np.ones_like(t)
    return t**comp.n


def mori_tanaka_moduli(comp, Vc, T=None):
    """Effective bulk and shear moduli for ceramic volume fraction ``Vc``.

    ``T`` overrides ``comp.T_ref`` for the phase moduli when given.
    """
    Vc = np.asarray(Vc, dtype=float)
    if np.any(Vc < 0.0) or np.any(Vc > 1.0):
        raise DomainError("volume fraction must lie in [0, 1]")
    if T is not None and T != comp.T_ref:
        comp = FgmComposition(comp.ceramic, comp.metal, comp.n, T, comp.nu_mode,
                              comp.nu, comp.temperature_dependent)
    Kc, Gc, Km, Gm = comp.phase_moduli()
    Vm = 1.0 - Vc
    f1 = Gm * (9.0 * Km + 8.0 * Gm) / (6.0 * (Km + 2.0 * Gm))
    K = Km + (Kc - Km) * Vc / (1.0 + Vm * 3.0 * (Kc - Km) / (3.0 * Km + 4.0 * Gm))
    G = Gm + (Gc - Gm) * Vc / (1.0 + Vm * (Gc - Gm) / (Gm + f1))
    return K, G


def young_poisson_from_KG(K, G):
    """Isotropic ``(E, nu)`` from bulk and shear moduli."""
    K = np.asarray(K, dtype=float)
    G = np.asarray(G, dtype=float)
    if np.any(K <= 0) or np.any(G <= 0):
        raise DomainError("K and G must be positive")
    E = 9.0 * K * G / (3.0 * K + G)
    nu = (3.0 * K - 2.0 * G) / (2.0 * (3.0 * K + G))
    return E, nu


def density_at(comp, z, h):
    """Rule-of-mixtures density at ``z``."""
    Vc = volume_fraction_ceramic(comp, z, h)
    return comp.ceramic.rho * Vc + comp.metal.rho * (1.0 - Vc)


def effective_E_nu(comp, z, h):
    """Young's modulus and Poisson's ratio at ``z`` under ``comp.nu_mode``."""
    K, G = mori_tanaka_moduli(comp, volume_fraction_ceramic(comp, z, h))
    E, nu = young_poisson_from_KG(K, G)
    if comp.nu_mode == "constant":
        nu = np.full_like(E, comp.nu)
    return E, nu


# ---------------------------------------------------------------------------
# Material library
# ---------------------------------------------------------------------------

def _phase_from_mapping(name, data):
    try:
        if "E_coeffs" in data:
            coeffs = data["E_coeffs"]
            if isinstance(coeffs, dict):
                coeffs = [coeffs.get(k, 0.0) for k in ("P0", "P_-1", "P1", "P2", "P3")]
        else:
            coeffs = [data["E"], 0.0, 0.0, 0.0, 0.0]
        alpha = data.get("alpha_coeffs")
        return MaterialPhase(
            name=str(data.get("name", name)),
            E_coeffs=tuple(float(c) for c in coeffs),
            nu=float(data["nu"]),
            rho=float(data["rho"]),
            k_thermal=data.get("k_thermal"),
            alpha_coeffs=tuple(alpha) if alpha is not None else None,
        )
    except KeyError as exc:
        raise ConfigError(f"missing field {exc.args[0]!r}", f"materials.{name}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), f"materials.{name}") from None


def load_library(path=None):
    """Phases from a YAML library file; the built-in presets when ``path`` is None."""
    if path is None:
        text = resources.files("fgmxfem.data").joinpath("materials.yaml").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    raw = yaml.safe_load(text) or {}
    phases = raw.get("phases", raw)
    return {name: _phase_from_mapping(name, data) for name, data in phases.items()}


PRESETS = load_library()


def get_phase(name_or_mapping, library=None):
    if isinstance(name_or_mapping, MaterialPhase):
        return name_or_mapping
    if isinstance(name_or_mapping, dict):
        return _phase_from_mapping(name_or_mapping.get("name", "inline"), name_or_mapping)
    lib = PRESETS if library is None else library
    key = str(name_or_mapping)
    if key not in lib:
        raise ConfigError(f"unknown material {key!r}; known: {sorted(lib)}")
    return lib[key]
