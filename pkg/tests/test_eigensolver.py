import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import assume, given, settings, strategies as st
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from fgmxfem.eigensolver import (
    apply_q,
    cholesky,
    lower_inverse,
    nondimensionalize,
    solve_generalized,
    tridiagonal_eigenvalues,
    tridiagonalize,
)
from fgmxfem.errors import NearSingularMassError


def test_diagonal_example():
    res = solve_generalized(np.diag([2.0, 3.0]), np.eye(2), 2)
    assert_allclose(res.eigenvalues, [2, 3], rtol=1e-14)
    assert_allclose(res.omegas, np.sqrt([2, 3]), rtol=1e-14)


def test_two_by_two_example():
    K = np.array([[2.0, -1.0], [-1.0, 2.0]])
    M = np.diag([2.0, 1.0])
    res = solve_generalized(K, M, 2)
    assert_allclose(res.eigenvalues, [(6 - math.sqrt(12)) / 4, (6 + math.sqrt(12)) / 4], rtol=1e-14)


def test_degenerate_spectrum():
    res = solve_generalized(np.eye(5), np.eye(5), 5)
    assert_allclose(res.eigenvalues, 1.0, rtol=1e-14)
    assert_allclose(res.vectors.T @ res.vectors, np.eye(5), atol=1e-12)


def charpoly_roots(K, M):
    """Roots of det(K - lam M) by interpolation, polished by bracketing."""
    n = K.shape[0]
    f = lambda lam: np.linalg.det(K - lam * M)
    scale = np.trace(K) / np.trace(M) * n
    xs = scale * np.linspace(0.0, 1.0, n + 1)
    coeffs = np.polyfit(xs, [f(x) for x in xs], n)
    roots = np.sort(np.roots(coeffs).real)
    out = []
    for r in roots:
        for w in (1e-8, 1e-6, 1e-4, 1e-2):
            lo, hi = r * (1 - w), r * (1 + w)
            if f(lo) * f(hi) < 0:
                out.append(brentq(f, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=500))
                break
        else:
            out.append(r)
    return np.array(out)


def spd(entries, n, boost):
    L = np.zeros((n, n))
    L[np.tril_indices(n)] = entries[: n * (n + 1) // 2]
    return L @ L.T + boost * np.eye(n)


pair = st.integers(2, 4).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.floats(-2, 2), min_size=10, max_size=10),
    st.lists(st.floats(-2, 2), min_size=10, max_size=10),
))


@settings(max_examples=150, deadline=None)
@given(pair)
def test_against_characteristic_polynomial(case):
    n, ke, me = case
    K = spd(np.array(ke), n, 0.5)
    M = spd(np.array(me), n, 0.5)
    lam = np.linalg.eigvals(np.linalg.solve(M, K)).real
    lam.sort()
    assume(np.min(np.diff(lam)) > 1e-3 * lam[-1])
    oracle = charpoly_roots(K, M)
    got = solve_generalized(K, M, n).eigenvalues
    assert_allclose(got, oracle, rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(pair, st.randoms(use_true_random=False))
def test_permutation_invariance(case, rnd):
    n, ke, me = case
    K = spd(np.array(ke), n, 0.5)
    M = spd(np.array(me), n, 0.5)
    p = list(range(n))
    rnd.shuffle(p)
    a = solve_generalized(K, M, n).eigenvalues
    b = solve_generalized(K[np.ix_(p, p)], M[np.ix_(p, p)], n).eigenvalues
    assert_allclose(a, b, rtol=1e-10)


def random_pencil(n, rng):
    A = rng.normal(size=(n, n))
    K = A @ A.T + n * np.eye(n)
    B = rng.normal(size=(n, n))
    M = B @ B.T / n + np.diag(rng.uniform(0.5, 2.0, n))
    return K, M


def test_large_pencil_against_reference(rng):
    n = 230
    K, M = random_pencil(n, rng)
    res = solve_generalized(K, M, 12)
    ref = scipy.linalg.eigh(K, M, eigvals_only=True, subset_by_index=[0, 11])
    assert_allclose(res.eigenvalues, ref, rtol=1e-10)
    V = res.vectors
    assert_allclose(V.T @ M @ V, np.eye(12), atol=1e-8)
    assert res.residuals.max() < 1e-8
    assert np.all(np.diff(res.omegas) >= 0) and np.all(res.omegas >= 0)
    rq = np.einsum("ij,ij->j", V, K @ V) / np.einsum("ij,ij->j", V, M @ V)
    assert_allclose(res.eigenvalues, rq, rtol=1e-10)


def test_scaling(rng):
    K, M = random_pencil(30, rng)
    base = solve_generalized(K, M, 5).eigenvalues
    assert_allclose(solve_generalized(3 * K, M, 5).eigenvalues, 3 * base, rtol=1e-12)
    assert_allclose(solve_generalized(K, 3 * M, 5).eigenvalues, base / 3, rtol=1e-12)


def test_building_blocks(rng):
    n = 200
    K, M = random_pencil(n, rng)
    L = cholesky(M)
    assert_allclose(L, np.linalg.cholesky(M), rtol=1e-10, atol=1e-12)
    assert_allclose(lower_inverse(L) @ L, np.eye(n), atol=1e-10)
    A = K.copy()
    d, e, tau = tridiagonalize(A)
    T = np.diag(d) + np.diag(e[: n - 1], 1) + np.diag(e[: n - 1], -1)
    Q = apply_q(A, tau, np.eye(n))
    assert_allclose(Q.T @ Q, np.eye(n), atol=1e-12)
    assert_allclose(Q @ T @ Q.T, K, atol=1e-11 * np.abs(K).max())
    assert_allclose(tridiagonal_eigenvalues(d, e), np.linalg.eigvalsh(K), rtol=1e-11)


def test_near_singular_mass_names_dof():
    M = np.eye(4)
    M[2, 2] = 1.0
    M[3, 3] = 1.0
    M[2, 3] = M[3, 2] = 1.0 - 1e-15
    with pytest.raises(NearSingularMassError) as info:
        solve_generalized(np.eye(4), M, 2)
    assert info.value.dof == 3
    with pytest.raises(NearSingularMassError):
        solve_generalized(np.eye(2), np.diag([1.0, 0.0]), 1)


def test_nondimensionalize():
    assert nondimensionalize(0.0, 1.0, 0.1, 2700, 70e9) == 0.0
    one = nondimensionalize(10.0, 1.0, 0.1, 2700, 70e9)
    assert_allclose(nondimensionalize(10.0, 2.0, 0.1, 2700, 70e9), 4 * one, rtol=1e-15)
    assert_allclose(one, 10.0 * 10.0 * math.sqrt(2700 / 70e9), rtol=1e-15)
    with pytest.raises(ValueError):
        nondimensionalize(1.0, 1.0, 0.0, 2700, 70e9)
