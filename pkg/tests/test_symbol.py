import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from pcindex.errors import BranchOnBoundary, InputError, Singular
from pcindex.symbol import (PiecewiseSymbol, commuting_factorize_m2, extract_data, factorization_residual,
                            jump_matrices, phi_criterion, product_defect, scalar_factorize, symbol_from_jumps)

HALF = np.array([0.0, np.pi])


def scalar(values, p=2.0, angles=HALF):
    return PiecewiseSymbol(1, p, angles, [[[v]] for v in values])


def test_constant_symbol_has_trivial_jumps():
    A = np.array([[2, 1], [0, 1j]])
    sym = PiecewiseSymbol(2, 2.0, [0.5, 2.0, 4.0], [A, A, A])
    assert all(np.allclose(M, np.eye(2)) for M in jump_matrices(sym))
    data = extract_data(sym)
    assert data.kappa == 0 and all(np.allclose(E, 0) for E in data.Es)


def test_scalar_jumps():
    Ms = jump_matrices(scalar([1, -1]))
    assert np.allclose([M[0, 0] for M in Ms], [-1, -1])


def test_symbol_from_jumps_reproduces_tuple():
    rng = np.random.default_rng(0)
    X, Y = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2))
    Ms = [X, Y, np.linalg.inv(X @ Y)]
    sym = symbol_from_jumps(Ms, [0.1, 2.0, 4.0])
    assert all(np.allclose(A, B) for A, B in zip(jump_matrices(sym), Ms))
    assert product_defect(jump_matrices(sym)) < 1e-10


def test_symbol_validation():
    with pytest.raises(InputError):
        PiecewiseSymbol(1, 2.0, [1.0, 0.5], [[[1]], [[1]]])
    with pytest.raises(InputError):
        PiecewiseSymbol(1, 1.0, [0.0], [[[1]]])
    with pytest.raises(InputError):
        PiecewiseSymbol(1, 2.0, [0.0, 1.0], [[[1]]])
    with pytest.raises(Singular):
        extract_data(PiecewiseSymbol(2, 2.0, HALF, [np.eye(2), np.zeros((2, 2))]))


def test_phi_criterion():
    assert phi_criterion(PiecewiseSymbol(2, 2.0, HALF, [np.eye(2)] * 2))
    assert not phi_criterion(scalar([1, -1], p=2.0))
    assert phi_criterion(scalar([1, -1], p=4.0))
    data = extract_data(scalar([1, -1], p=4.0))
    assert np.allclose([E[0, 0] for E in data.Es], [-0.5, -0.5])


def test_extract_data_scalar_quarter_turn():
    data = extract_data(scalar([1, 1j]))
    assert np.allclose([M[0, 0] for M in data.Ms], [-1j, 1j])
    assert np.allclose([E[0, 0] for E in data.Es], [0.25, -0.25])
    assert data.kappa == 0
    with pytest.raises(BranchOnBoundary):
        extract_data(scalar([1, 1j], p=4 / 3))


def test_scalar_factorization():
    fac = scalar_factorize(PiecewiseSymbol(1, 2.0, [1.0], [[[5]]]))
    assert fac.kappa == 0
    t = np.exp(0.3j)
    assert abs(fac.g_plus(t) - 5) < 1e-12 and abs(fac.g_minus(t) - 1) < 1e-12
    sym = scalar([1, 1j])
    fac = scalar_factorize(sym)
    assert fac.kappa == 0
    assert factorization_residual(sym, fac.product) < 1e-10


def test_scalar_factorization_unit_index():
    # both exponents fit into J_p only once p < 4/3: 3/4 + 1/4 = 1
    sym = scalar([1, np.exp(1.5j * np.pi)], p=1.2)
    fac = scalar_factorize(sym)
    assert np.allclose(fac.eps, [0.75, 0.25])
    assert fac.kappa == 1
    assert factorization_residual(sym, fac.product) < 1e-9
    assert scalar_factorize(scalar([1, np.exp(1.5j * np.pi)], p=2.0)).kappa == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 5), st.floats(1.2, 6.0))
def test_scalar_factorization_random(seed, m, p):
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0, 2 * np.pi, m))
    if m > 1 and np.min(np.diff(angles)) < 0.05:
        return
    vals = np.exp(rng.normal(size=m) + 2j * np.pi * rng.uniform(size=m))
    sym = PiecewiseSymbol(1, p, angles, [[[v]] for v in vals])
    if not phi_criterion(sym):
        return
    fac = scalar_factorize(sym)
    assert factorization_residual(sym, fac.product) < 1e-9


def test_extract_data_invariants():
    rng = np.random.default_rng(4)
    X, Y = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(2))
    sym = symbol_from_jumps([X, Y, np.linalg.inv(X @ Y)], [0.3, 2.5, 4.4], p=2.5)
    data = extract_data(sym)
    for M, E in zip(data.Ms, data.Es):
        assert np.allclose(expm(-2j * np.pi * E), M, atol=1e-10 * np.linalg.norm(M))
    s = sum(np.trace(E) for E in data.Es)
    assert abs(s.imag) < 1e-10 and abs(s.real - data.kappa) < 1e-8
    C = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    other = extract_data(PiecewiseSymbol(3, 2.5, sym.angles, [C @ A for A in sym.arcs]))
    Ci = np.linalg.inv(C)
    assert all(np.allclose(A, C @ M @ Ci) for A, M in zip(other.Ms, data.Ms))
    assert other.kappa == data.kappa
    assert np.allclose(other.zetas, data.zetas)


def commuting(M1, p):
    return symbol_from_jumps([M1, np.linalg.inv(M1)], HALF, p=p)


def test_commuting_factorization():
    assert commuting_factorize_m2(commuting(np.eye(3), 2.0)).indices == [0, 0, 0]
    sym = commuting(np.diag([1j, -1j]), 2.0)
    data = extract_data(sym)
    # exp(-2 pi i (-1/4)) = i
    assert np.allclose(data.Es[0], np.diag([-0.25, 0.25]))
    assert np.allclose(data.Es[1], np.diag([0.25, -0.25]))
    assert commuting_factorize_m2(sym).indices == [0, 0]


def test_commuting_factorization_branch_shift():
    M1 = np.diag([np.exp(-2j * np.pi * 0.4), 1])
    # p = 2: exponents 0.4 and -0.4 both fit, nothing shifts
    assert commuting_factorize_m2(commuting(M1, 2.0)).indices == [0, 0]
    # p = 1.5: J = (-1/3, 2/3) forces 0.6 for the second jump
    sym = commuting(M1, 1.5)
    fac = commuting_factorize_m2(sym)
    assert fac.indices == [1, 0]
    assert factorization_residual(sym, fac.product) < 1e-9


def test_commuting_factorization_random():
    rng = np.random.default_rng(11)
    M1 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    sym = commuting(M1, 1.7)
    fac = commuting_factorize_m2(sym)
    assert sum(fac.indices) == extract_data(sym).kappa
    assert factorization_residual(sym, fac.product) < 1e-8


def test_commuting_factorization_jordan_jump():
    # the two logarithms differ by an integer on each generalized eigenspace,
    # so their sum stays diagonalizable even for a Jordan block
    M1 = np.array([[np.exp(-2j * np.pi * 0.4), 1], [0, np.exp(-2j * np.pi * 0.4)]])
    sym = commuting(M1, 1.5)
    fac = commuting_factorize_m2(sym)
    assert fac.indices == [1, 1]
    assert factorization_residual(sym, fac.product) < 1e-9
