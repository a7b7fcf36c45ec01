"""Plate section stiffness and inertia from the through-thickness laws."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .materials import density_at, effective_E_nu

DEFAULT_ORDER = 30
CONVERGENCE_RTOL = 1e-8
KAPPA_MODES = ("constant", "energy")


@dataclass(frozen=True)
class SectionMatrices:
    """Membrane ``A``, coupling ``B``, bending ``D`` and shear ``Es``
    stiffness plus the translational and rotary inertia ``I0``, ``I1``."""

    A: np.ndarray
    B: np.ndarray
    D: np.ndarray
    Es: np.ndarray
    I0: float
    I1: float
    kappa: float

    def material_matrix(self):
        """8x8 generalized constitutive matrix for
        ``[eps_p (3), eps_b (3), eps_s (2)]``."""
        Dm = np.zeros((8, 8))
        Dm[:3, :3] = self.A
        Dm[:3, 3:6] = self.B
        Dm[3:6, :3] = self.B
        Dm[3:6, 3:6] = self.D
        Dm[6:, 6:] = self.Es
        return Dm

    @property
    def coupled(self):
        """True when membrane and bending interact through ``B``."""
        scale = max(np.abs(self.A).max() * np.abs(self.D).max(), 1e-300) ** 0.5
        return bool(np.abs(self.B).max() > 1e-13 * scale)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["name", "i", "j", "value"])
            for name in ("A", "B", "D", "Es"):
                mat = getattr(self, name)
                for (i, j), val in np.ndenumerate(mat):
                    writer.writerow([name, i, j, repr(float(val))])
            writer.writerow(["I0", 0, 0, repr(float(self.I0))])
            writer.writerow(["I1", 0, 0, repr(float(self.I1))])
            writer.writerow(["kappa", 0, 0, repr(float(self.kappa))])


def stiffness_coeffs(E, nu):
    """Reduced stiffnesses of an isotropic layer (plane stress)."""
    E = np.asarray(E, dtype=float)
    nu = np.asarray(nu, dtype=float)
    Q11 = E / (1.0 - nu**2)
    Q12 = nu * Q11
    Q44 = E / (2.0 * (1.0 + nu))
    zero = np.zeros_like(Q11)
    return {"Q11": Q11, "Q22": Q11, "Q12": Q12, "Q16": zero, "Q26": zero,
            "Q44": Q44, "Q55": Q44, "Q66": Q44}


def _gauss(lo, hi, order):
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def thickness_rule(h, n, order=DEFAULT_ORDER, lo=None, hi=None):
    """Quadrature on ``[lo, hi]`` (default the full thickness).

    For a non-integer gradient index the volume fraction has a power-law
    singularity at the metal face, so the interval is split geometrically
    towards ``z = -h/2``; every piece uses ``order`` Gauss points.
    """
    lo = -h / 2 if lo is None else lo
    hi = h / 2 if hi is None else hi
    if float(n).is_integer() or lo > -h / 2 + 1e-15 * h:
        return _gauss(lo, hi, order)
    span = hi - lo
    ratio = 0.15
    levels = 14
    cuts = [lo + span * ratio**k for k in range(levels, -1, -1)]
    pts, wts = [], []
    prev = lo
    for c in cuts:
        z, w = _gauss(prev, c, order)
        pts.append(z)
        wts.append(w)
        prev = c
    return np.concatenate(pts), np.concatenate(wts)


def _integrate(comp, h, kappa_mode, order):
    z, w = thickness_rule(h, comp.n, order)
    E, nu = effective_E_nu(comp, z, h)
    Q = stiffness_coeffs(E, nu)
    Qbar = np.zeros((z.size, 3, 3))
    Qbar[:, 0, 0] = Q["Q11"]
    Qbar[:, 1, 1] = Q["Q22"]
    Qbar[:, 0, 1] = Qbar[:, 1, 0] = Q["Q12"]
    Qbar[:, 2, 2] = Q["Q66"]
    A = np.einsum("q,qij->ij", w, Qbar)
    B = np.einsum("q,qij->ij", w * z, Qbar)
    D = np.einsum("q,qij->ij", w * z * z, Qbar)
    G = Q["Q44"]
    Gint = float(w @ G)
    rho = density_at(comp, z, h)
    I0 = float(w @ rho)
    I1 = float(w @ (z * z * rho))
    if kappa_mode == "constant":
        kappa = 5.0 / 6.0
    elif kappa_mode == "energy":
        kappa = _energy_kappa(comp, h, order, z, w, Q["Q11"], G, Gint)
    else:
        raise ValueError(f"unknown kappa mode {kappa_mode!r}; use one of {KAPPA_MODES}")
    Es = kappa * Gint * np.eye(2)
    return SectionMatrices(A=A, B=B, D=D, Es=Es, I0=I0, I1=I1, kappa=kappa)


def _energy_kappa(comp, h, order, z, w, Q11, G, Gint):
    """Shear correction from equating the shear strain energy of the
    equilibrium shear-stress profile with that of a uniform one."""
    zn = float(w @ (z * Q11)) / float(w @ Q11)
    g = np.empty_like(z)
    for i, zi in enumerate(z):
        zz, ww = thickness_rule(h, comp.n, order, lo=-h / 2, hi=zi)
        E, nu = effective_E_nu(comp, zz, h)
        q11 = E / (1.0 - nu**2)
        g[i] = -float(ww @ (q11 * (zz - zn)))
    return float(w @ g) ** 2 / (Gint * float(w @ (g * g / G)))


def integrate_section(comp, h, kappa_mode="constant", order=DEFAULT_ORDER):
    """Section matrices of an FGM plate of thickness ``h``.

    The result is accepted only if raising the quadrature order by four
    changes no entry by more than ``1e-8`` relative.
    """
    if not h > 0:
        raise ValueError(f"thickness must be positive, got {h}")
    if order < 20:
        raise ValueError("through-thickness order must be at least 20")
    sec = _integrate(comp, h, kappa_mode, order)
    ref = _integrate(comp, h, kappa_mode, order + 4)
    for name in ("A", "B", "D", "Es", "I0", "I1"):
        a = np.atleast_1d(getattr(sec, name))
        b = np.atleast_1d(getattr(ref, name))
        scale = np.abs(b).max()
        if name == "B":
            # B vanishes for homogeneous sections; measure it against sqrt(A D)
            scale = np.sqrt(np.abs(ref.A).max() * np.abs(ref.D).max())
        if scale > 0 and np.abs(a - b).max() > CONVERGENCE_RTOL * scale:
            raise NumericalError(
                f"through-thickness quadrature for {name} not converged at order {order}"
            )
    return sec
