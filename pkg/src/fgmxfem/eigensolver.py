"""Dense symmetric generalized eigensolver for ``(K - w^2 M) x = 0``.

The pipeline is the classical one:

1. symmetric diagonal scaling so that ``diag(M) = 1`` (does not change the
   spectrum, improves the Cholesky pivots of enriched unknowns),
2. blocked Cholesky ``M = L L^T``,
3. standard form ``C = L^-1 K L^-T``,
4. blocked Householder reduction ``C = Q T Q^T`` to tridiagonal ``T``,
5. implicit-shift QL iteration on ``T`` for the eigenvalues,
6. inverse iteration on ``T`` for the requested eigenvectors, followed by
   the back-transformation ``x = S L^-T Q y``.

All matrix-level work is expressed with numpy products so that BLAS does the
heavy lifting; the scalar recurrences of steps 5 and 6 are compiled with
numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import NearSingularMassError, NumericalError

BLOCK = 96
QL_TOL = 1e-14
PIVOT_RTOL = 1e-12


@dataclass(frozen=True)
class ModalResult:
    """Lowest eigenpairs of a constrained model.

    ``vectors`` holds one mass-orthonormal mode per column over the free
    dofs. ``Omegas`` is filled by :func:`nondimensionalize` callers and may
    be ``None`` for raw matrix problems.
    """

    omegas: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    eigenvalues: np.ndarray
    Omegas: np.ndarray | None = None

    def with_omegas(self, Omegas):
        return ModalResult(self.omegas, self.vectors, self.residuals,
                           self.eigenvalues, np.asarray(Omegas))


# ---------------------------------------------------------------------------
# Cholesky and triangular inverse
# ---------------------------------------------------------------------------

def _chol_unblocked(A, offset, threshold):
    """In-place lower Cholesky of a small block; returns L (lower)."""
    n = A.shape[0]
    L = np.tril(A)
    for j in range(n):
        pivot = L[j, j]
        if not pivot > threshold:
            raise NearSingularMassError(offset + j, float(pivot), threshold)
        ljj = math.sqrt(pivot)
        L[j, j] = ljj
        L[j + 1:, j] /= ljj
        col = L[j + 1:, j]
        L[j + 1:, j + 1:] -= np.tril(np.outer(col, col))
    return L


def _tri_inv_small(L):
    """Inverse of a small lower-triangular matrix by forward substitution."""
    n = L.shape[0]
    X = np.zeros_like(L)
    for i in range(n):
        X[i, :i] = -(L[i, :i] @ X[:i, :i]) / L[i, i]
        X[i, i] = 1.0 / L[i, i]
    return X


def cholesky(M, pivot_rtol=PIVOT_RTOL, block=BLOCK):
    """Lower Cholesky factor of a symmetric positive definite matrix.

    A pivot at or below ``pivot_rtol * trace(M) / n`` raises
    :class:`NearSingularMassError` naming the offending row.
    """
    A = np.array(M, dtype=float, order="C")
    n = A.shape[0]
    if n == 0:
        return A
    threshold = pivot_rtol * float(np.trace(A)) / n
    for j in range(0, n, block):
        jb = min(block, n - j)
        J = slice(j, j + jb)
        if j:
            A[J, J] -= A[J, :j] @ A[J, :j].T
        L11 = _chol_unblocked(A[J, J], j, threshold)
        A[J, J] = L11
        if j + jb < n:
            R = slice(j + jb, n)
            if j:
                A[R, J] -= A[R, :j] @ A[J, :j].T
            A[R, J] = A[R, J] @ _tri_inv_small(L11).T
    for i in range(n - 1):
        A[i, i + 1:] = 0.0
    return A


def lower_inverse(L, block=BLOCK):
    """Inverse of a lower-triangular matrix (blocked)."""
    n = L.shape[0]
    X = np.zeros_like(L)
    for i in range(0, n, block):
        ib = min(block, n - i)
        I = slice(i, i + ib)
        Dinv = _tri_inv_small(L[I, I])
        X[I, I] = Dinv
        if i:
            X[I, :i] = -Dinv @ (L[I, :i] @ X[:i, :i])
    return X


# ---------------------------------------------------------------------------
# Householder tridiagonalization
# ---------------------------------------------------------------------------

def tridiagonalize(A, block=BLOCK):
    """Reduce symmetric ``A`` (overwritten) to tridiagonal form.

    Returns ``(d, e, tau)``. The Householder vectors are left in the strict
    lower part of ``A``: reflector ``c`` is ``H_c = I - tau[c] v v^T`` with
    ``v = [1, A[c+2:, c]]`` acting on rows ``c+1:``, and
    ``A_in = Q T Q^T`` with ``Q = H_0 H_1 ... H_{n-3}``.
    """
    n = A.shape[0]
    d = np.zeros(n)
    e = np.zeros(n)
    tau = np.zeros(max(n - 2, 0))
    if n == 0:
        return d, e, tau
    ncols = n - 2
    p = 0
    while p < ncols:
        jb = min(block, ncols - p)
        V = np.zeros((n, jb))
        W = np.zeros((n, jb))
        for j in range(jb):
            c = p + j
            if j:
                A[c:, c] -= V[c:, :j] @ W[c, :j] + W[c:, :j] @ V[c, :j]
            d[c] = A[c, c]
            alpha = A[c + 1, c]
            x = A[c + 2:, c]
            xnorm = float(np.sqrt(x @ x))
            if xnorm == 0.0:
                t = 0.0
                beta = alpha
                v = np.zeros(n - c - 1)
                v[0] = 1.0
            else:
                beta = -math.copysign(math.hypot(alpha, xnorm), alpha)
                t = (beta - alpha) / beta
                v = np.empty(n - c - 1)
                v[0] = 1.0
                v[1:] = x / (alpha - beta)
            e[c] = beta
            tau[c] = t
            A[c + 1, c] = 1.0
            A[c + 2:, c] = v[1:]
            y = A[c + 1:, c + 1:] @ v
            if j:
                Vs = V[c + 1:, :j]
                Ws = W[c + 1:, :j]
                y -= Vs @ (Ws.T @ v) + Ws @ (Vs.T @ v)
            y *= t
            y -= (0.5 * t * (y @ v)) * v
            V[c + 1:, j] = v
            W[c + 1:, j] = y
        q = p + jb
        if q < n:
            Vq = V[q:]
            Wq = W[q:]
            A[q:, q:] -= Vq @ Wq.T + Wq @ Vq.T
        p = q
    if n >= 2:
        d[n - 2] = A[n - 2, n - 2]
        e[n - 2] = A[n - 1, n - 2]
    d[n - 1] = A[n - 1, n - 1]
    return d, e, tau


def apply_q(A, tau, Y):
    """Return ``Q @ Y`` for the reflectors stored by :func:`tridiagonalize`."""
    Z = np.array(Y, dtype=float)
    n = A.shape[0]
    for c in range(n - 3, -1, -1):
        t = tau[c]
        if t == 0.0:
            continue
        v = A[c + 1:, c].copy()
        v[0] = 1.0
        Z[c + 1:] -= np.outer(t * v, v @ Z[c + 1:])
    return Z


# ---------------------------------------------------------------------------
# Tridiagonal kernels
# ---------------------------------------------------------------------------

@numba.njit(cache=True)
def _ql_eigenvalues(d, e, tol, max_sweeps):
    """Implicit-shift QL on (d, e); e[i] couples i and i+1. Returns
    (sorted eigenvalues, sweeps used); sweeps < 0 flags non-convergence."""
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    sweeps = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= tol * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                return np.sort(d), -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(d), sweeps


@numba.njit(cache=True)
def _tridiag_solve_shifted(d, e, sigma, b, eps_norm):
    """Solve (T - sigma I) x = b by LU with partial pivoting."""
    n = d.shape[0]
    # rows hold up to three upper entries after pivoting
    u0 = np.empty(n)
    u1 = np.zeros(n)
    u2 = np.zeros(n)
    mult = np.zeros(n)
    swap = np.zeros(n, dtype=np.bool_)
    a = d[0] - sigma
    bb = e[0] if n > 1 else 0.0
    for i in range(n - 1):
        lower = e[i]
        nd = d[i + 1] - sigma
        ne = e[i + 1] if i + 2 < n else 0.0
        if abs(a) >= abs(lower):
            piv = a if a != 0.0 else eps_norm
            u0[i] = piv
            u1[i] = bb
            u2[i] = 0.0
            m = lower / piv
            mult[i] = m
            a = nd - m * bb
            bb = ne
        else:
            swap[i] = True
            u0[i] = lower
            u1[i] = nd
            u2[i] = ne
            m = a / lower
            mult[i] = m
            a = bb - m * nd
            bb = -m * ne
    u0[n - 1] = a if a != 0.0 else eps_norm
    for i in range(n):
        if abs(u0[i]) < eps_norm:
            u0[i] = eps_norm if u0[i] >= 0.0 else -eps_norm
    x = b.copy()
    for i in range(n - 1):
        if swap[i]:
            t = x[i]
            x[i] = x[i + 1]
            x[i + 1] = t
        x[i + 1] -= mult[i] * x[i]
    x[n - 1] /= u0[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - u1[n - 2] * x[n - 1]) / u0[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - u1[i] * x[i + 1] - u2[i] * x[i + 2]) / u0[i]
    return x


@numba.njit(cache=True)
def _inverse_iteration(d, e, lam, seed):
    """Eigenvectors of the tridiagonal (d, e) for ascending eigenvalues lam.

    Vectors belonging to clustered eigenvalues are kept orthogonal with
    modified Gram-Schmidt at every step.
    """
    n = d.shape[0]
    k = lam.shape[0]
    tnorm = 0.0
    for i in range(n):
        s = abs(d[i]) + abs(e[i])
        if i:
            s += abs(e[i - 1])
        if s > tnorm:
            tnorm = s
    if tnorm == 0.0:
        tnorm = 1.0
    eps = 2.220446049250313e-16
    eps_norm = eps * tnorm
    cluster_tol = 1e-3 * tnorm
    Y = np.zeros((n, k))
    np.random.seed(seed)
    prev_sigma = -np.inf
    cluster_start = 0
    for j in range(k):
        sigma = lam[j]
        if j and lam[j] - lam[j - 1] > cluster_tol:
            cluster_start = j
        if sigma <= prev_sigma + 10.0 * eps_norm:
            sigma = prev_sigma + 10.0 * eps_norm
        prev_sigma = sigma
        x = np.random.uniform(-1.0, 1.0, n)
        for it in range(6):
            for jj in range(cluster_start, j):
                x -= (Y[:, jj] @ x) * Y[:, jj]
            nrm = np.sqrt(x @ x)
            x /= nrm
            x = _tridiag_solve_shifted(d, e, sigma, x, eps_norm)
        for jj in range(cluster_start, j):
            x -= (Y[:, jj] @ x) * Y[:, jj]
        x /= np.sqrt(x @ x)
        Y[:, j] = x
    return Y


def tridiagonal_eigenvalues(d, e, tol=QL_TOL):
    """All eigenvalues (ascending) of a symmetric tridiagonal matrix."""
    d = np.ascontiguousarray(d, dtype=float)
    e = np.zeros(d.shape[0]) if len(e) == 0 else np.ascontiguousarray(e, dtype=float)
    if e.shape[0] < d.shape[0]:
        e = np.concatenate([e, np.zeros(d.shape[0] - e.shape[0])])
    max_sweeps = 30 * max(d.shape[0], 1)
    lam, sweeps = _ql_eigenvalues(d, e, tol, max_sweeps)
    if sweeps < 0:
        raise NumericalError(f"QL iteration did not converge in {max_sweeps} sweeps")
    return lam


def tridiagonal_eigenvectors(d, e, lam, seed=12345):
    d = np.ascontiguousarray(d, dtype=float)
    e = np.ascontiguousarray(e, dtype=float)
    return _inverse_iteration(d, e, np.ascontiguousarray(lam, dtype=float), seed)


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------

def solve_generalized(K, M, k_modes, pivot_rtol=PIVOT_RTOL):
    """Lowest ``k_modes`` eigenpairs of the symmetric pencil ``(K, M)``.

    ``K`` and ``M`` may be dense arrays or scipy sparse matrices; they are
    densified. Returns a :class:`ModalResult` with mass-orthonormal vectors.
    """
    K = _dense(K)
    M = _dense(M)
    n = K.shape[0]
    if M.shape != (n, n):
        raise ValueError("K and M must have the same square shape")
    if n == 0:
        raise NumericalError("empty system (every dof is constrained)")
    k = int(min(k_modes, n))
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(M))):
        raise NumericalError("non-finite entries in K or M")
    mdiag = np.diag(M).copy()
    bad = np.flatnonzero(~(mdiag > 0.0))
    if bad.size:
        raise NearSingularMassError(int(bad[0]), float(mdiag[bad[0]]), 0.0)
    s = 1.0 / np.sqrt(mdiag)

    Ms = M * s[:, None]
    Ms *= s[None, :]
    Ms = 0.5 * (Ms + Ms.T)
    L = cholesky(Ms, pivot_rtol=pivot_rtol)
    del Ms
    Linv = lower_inverse(L)
    del L
    Ks = K * s[:, None]
    Ks *= s[None, :]
    C = Linv @ Ks
    del Ks
    C = C @ Linv.T
    C += C.T
    C *= 0.5

    dd, ee, tau = tridiagonalize(C)
    lam_all = tridiagonal_eigenvalues(dd, ee)
    lam = lam_all[:k]
    Y = tridiagonal_eigenvectors(dd, ee, lam)
    Z = apply_q(C, tau, Y)
    del C
    X = Linv.T @ Z
    X *= s[:, None]

    # mass-normalise and measure the residuals on the original matrices
    MX = M @ X
    norms = np.sqrt(np.einsum("ij,ij->j", X, MX))
    X /= norms
    MX /= norms
    KX = K @ X
    rq = np.einsum("ij,ij->j", X, KX)
    lam = rq
    R = KX - MX * lam
    kn = np.linalg.norm(KX, axis=0)
    kn[kn == 0.0] = 1.0
    residuals = np.linalg.norm(R, axis=0) / kn
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    X = X[:, order]
    residuals = residuals[order]
    omegas = np.sqrt(np.clip(lam, 0.0, None))
    return ModalResult(omegas=omegas, vectors=X, residuals=residuals, eigenvalues=lam)


def nondimensionalize(omega, b, h, rho_c, E_c):
    """Frequency parameter ``omega * (b^2 / h) * sqrt(rho_c / E_c)``."""
    for name, val in (("b", b), ("h", h), ("rho_c", rho_c), ("E_c", E_c)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    return np.asarray(omega) * (b * b / h) * math.sqrt(rho_c / E_c)


def _dense(A):
    if hasattr(A, "toarray"):
        return np.asarray(A.toarray(), dtype=float)
    return np.array(A, dtype=float)
