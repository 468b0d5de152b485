import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from pcindex import linalg as la
from pcindex.errors import BranchOnBoundary, Singular

J2 = (-0.5, 0.5)
R = np.array([[0, 1], [-1, 0]], dtype=complex)
N2 = np.array([[1, 1], [0, 1]], dtype=complex)


def test_eigen_multiplicities():
    assert la.eigen(np.eye(2)).multiplicities() == {1: (2, 2)}
    assert la.eigen(N2).multiplicities() == {1: (2, 1)}
    mult = la.eigen(np.diag([2, 3j])).multiplicities()
    assert sorted(mult.values()) == [(1, 1), (1, 1)]
    assert any(abs(v - 2) < 1e-12 for v in mult) and any(abs(v - 3j) < 1e-12 for v in mult)


def test_branch_log_scalars():
    assert abs(la.branch_log([[1]], J2)[0, 0]) < 1e-15
    assert abs(la.branch_log([[1j]], J2)[0, 0] + 0.25) < 1e-15


def test_branch_log_jordan_block():
    E = la.branch_log(N2, J2)
    assert np.allclose(E, [[0, 1j / (2 * np.pi)], [0, 0]], atol=1e-14)
    assert np.allclose(expm(-2j * np.pi * E), N2, atol=1e-13)


def test_branch_log_rejects_boundary_and_singular():
    with pytest.raises(BranchOnBoundary):
        la.branch_log([[-1]], J2)
    with pytest.raises(Singular):
        la.branch_log(np.zeros((2, 2)), J2)


def test_first_difference_across_sheets():
    # eigenvalues close in value whose logs were taken on different sheets
    a, b = np.exp(2j * np.pi * 0.49), np.exp(-2j * np.pi * 0.49)
    J = (-0.2, 0.8)
    M = np.array([[a, 1], [0, b]])
    E = la.branch_log(M, J)
    assert np.allclose(expm(-2j * np.pi * E), M, atol=1e-12)
    ev = np.linalg.eigvals(E).real
    assert np.all((ev > J[0]) & (ev < J[1]))


def _spectrum_matrix(rng, n, J):
    eps = rng.uniform(J[0] + 0.02, J[1] - 0.02, n) + 1j * rng.normal(0, 0.3, n)
    C = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return C @ np.diag(np.exp(-2j * np.pi * eps)) @ np.linalg.inv(C)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3), st.floats(1.1, 8.0))
def test_branch_log_roundtrip(seed, n, p):
    rng = np.random.default_rng(seed)
    J = (1 / p - 1, 1 / p)
    M = _spectrum_matrix(rng, n, J)
    E = la.branch_log(M, J)
    rel = np.linalg.norm(expm(-2j * np.pi * E) - M) / np.linalg.norm(M)
    assert rel < 1e-10
    assert np.linalg.norm(E @ M - M @ E) < 1e-10 * (1 + np.linalg.norm(E) * np.linalg.norm(M))
    ev = np.linalg.eigvals(E).real
    assert np.all((ev > J[0]) & (ev < J[1]))


def test_minimal_poly_degree():
    assert la.minimal_poly_degree(np.eye(3)) == 1
    assert la.minimal_poly_degree(np.diag([1, 1], 1)) == 3
    D = np.diag([1.0, 1.0, 2.0])
    assert np.allclose((D - np.eye(3)) @ (D - 2 * np.eye(3)), 0)
    assert la.minimal_poly_degree(D) == 2


def test_similar():
    assert la.similar(np.eye(2), np.eye(2))
    assert not la.similar(N2, np.eye(2))
    M = np.array([[1, 1], [0, 2]])
    X = np.array([[1, 1], [0, 1]])
    assert np.allclose(X @ np.diag([1, 2]) @ np.linalg.inv(X), M)
    assert la.similar(M, np.diag([1, 2]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_similar_under_conjugation(seed):
    rng = np.random.default_rng(seed)
    M = np.array([[2, 1, 0], [0, 2, 0], [0, 0, -1j]])
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert la.similar(M, C @ M @ np.linalg.inv(C))


def test_common_invariant_subspaces():
    out = la.common_invariant_subspaces([np.eye(2), np.eye(2)], 1)
    assert len(out) == 1 and isinstance(out[0], la.ContinuumFlag)
    out = la.common_invariant_subspaces([N2], 1)
    assert len(out) == 1
    v = out[0].basis[:, 0]
    assert abs(v[1]) < 1e-12 and abs(v[0]) > 0.5
    assert la.common_invariant_subspaces([R, N2], 1) == []


def test_invariant_lines_of_conjugated_jordan_block():
    rng = np.random.default_rng(7)
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    M = C @ np.array([[2, 1, 0], [0, 2, 0], [0, 0, 5]]) @ np.linalg.inv(C)
    assert len(la.common_invariant_subspaces([M], 1)) == 2


def test_invariant_subspaces_covariant():
    rng = np.random.default_rng(3)
    Ms = [np.array([[1, 1, 0], [0, 1, 0], [0, 0, 2]], dtype=complex),
          np.array([[1, 0, 1], [0, 3, 0], [0, 0, 1]], dtype=complex)]
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    Ci = np.linalg.inv(C)
    for d in (1, 2):
        base = la.common_invariant_subspaces(Ms, d)
        conj = la.common_invariant_subspaces([C @ M @ Ci for M in Ms], d)
        assert len(base) == len(conj)
        for V in base:
            W = la.orthonormal(C @ V.basis)
            assert any(U.contains(la.SubspaceBasis(W.shape[1], W)) for U in conj)


def test_fingerprint_examples():
    fp = la.similarity_fingerprint([np.eye(2)] * 3)
    assert np.allclose(fp, 2)
    fp = la.similarity_fingerprint([R, np.linalg.inv(R), np.eye(2)])
    # the triple product R R^-1 I is the identity, so its trace is 2
    assert np.allclose(fp, [0, 0, 2, 2, 0, 0, 2])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_fingerprint_conjugation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    Ms = [rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for _ in range(3)]
    C = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Ci = np.linalg.inv(C)
    a = la.similarity_fingerprint(Ms)
    b = la.similarity_fingerprint([C @ M @ Ci for M in Ms])
    assert np.linalg.norm(a - b) < 1e-10 * (1 + np.linalg.norm(a)) * np.linalg.cond(C)


def test_simultaneously_similar():
    rng = np.random.default_rng(0)
    Ms = [rng.normal(size=(3, 3)) for _ in range(2)]
    C = rng.normal(size=(3, 3))
    Ci = np.linalg.inv(C)
    assert la.simultaneously_similar(Ms, [C @ M @ Ci for M in Ms])
    assert not la.simultaneously_similar(Ms, [Ms[0], Ms[1].T])
