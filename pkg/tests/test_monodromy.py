import numpy as np
import pytest

from pcindex import fuchsian as fu
from pcindex import linalg as la
from pcindex.errors import InputError
from pcindex.integrate import Arc, IntegratorConfig, Line, reverse_path, transport, winding_number
from pcindex.monodromy import (build_loops, check_winding, factor_assembly, invariant_subspace_propagation_check,
                               monodromy, sign_convention_selftest, symbol_from_system)
from pcindex.reducibility import classify
from pcindex.symbol import extract_data, jump_matrices, scalar_factorize
from scipy.linalg import expm


def zero_system(n, m):
    a = fu.default_singularities(m)
    return fu.RationalSystem(a, [0] * n, np.zeros((n, n, m)))


def scalar_system(eps, a=None):
    eps = np.asarray(eps, dtype=complex)
    a = fu.default_singularities(len(eps)) if a is None else np.asarray(a, dtype=complex)
    return fu.RationalSystem(a, [int(round(eps.sum().real))], fu.diagonal_numerator(a, eps)[None, None, :])


def diagonal_system(rows, a=None):
    rows = np.asarray(rows, dtype=complex)
    n, m = rows.shape
    a = fu.default_singularities(m) if a is None else a
    num = np.zeros((n, n, m), dtype=complex)
    for j in range(n):
        num[j, j] = fu.poly_pad(fu.diagonal_numerator(a, rows[j]), m)
    return fu.RationalSystem(a, [int(round(r.sum().real)) for r in rows], num)


def test_single_loop_winds_once():
    loops = build_loops([1.0])
    assert len(loops) == 1
    assert check_winding(loops, [1.0])


def test_cube_root_loops():
    a = fu.default_singularities(3)
    loops = build_loops(a)
    for k, lp in enumerate(loops):
        for l, al in enumerate(a):
            w = winding_number(lp.segments, al)
            assert abs(w - (1 if k == l else 0)) < 1e-3


def test_base_on_singularity_rejected():
    with pytest.raises(InputError):
        build_loops([1.0, -1.0], base=1.0)


def test_transport_of_zero_system_is_trivial():
    A = zero_system(2, 3)
    Y0 = np.array([[1, 2], [3, 4]], dtype=complex)
    out = transport(A, [Line(0.1, 0.5j), Arc(0.0, 0.5, np.pi / 2, 2 * np.pi)], Y0)
    assert np.allclose(out, Y0, atol=1e-14)
    mono = monodromy(A)
    assert all(np.allclose(c, np.eye(2)) for c in mono.chis)


def test_transport_scalar_circle():
    eps, a = 0.3 + 0.1j, 0.2
    A = scalar_system([eps], [a])
    T = transport(A, [Arc(a, 0.5, 0.0, 2 * np.pi)])
    assert abs(T[0, 0] - np.exp(2j * np.pi * eps)) < 1e-8


def test_transport_reversal():
    A = fu.generate("triangular", (1, 0), seed=2)
    path = [Line(0.0, 0.4 + 0.3j), Arc(0.0, 0.5, np.angle(0.4 + 0.3j), 2.0)]
    T = transport(A, path)
    back = transport(A, reverse_path(path), T)
    assert np.linalg.norm(back - np.eye(2)) < 1e-8


def test_scalar_oracle():
    eps = np.array([0.21 + 0.1j, -0.4, 0.13 - 0.05j, 0.36])
    mono = monodromy(scalar_system(eps))
    for c, e in zip(mono.chis, eps):
        assert abs(c[0, 0] - np.exp(-2j * np.pi * e)) < 1e-8
    assert sign_convention_selftest() < 1e-8


@pytest.mark.parametrize("shape,indices,m", [("triangular", (1, 0), 3), ("extremal", (0, 0), 4),
                                             ("block12", (1, 0, 0), 3), ("extremal", (1, 0, -1), 3)])
def test_residues_match_monodromy(shape, indices, m):
    A = fu.generate(shape, indices, seed=3, m=m)
    mono = monodromy(A)
    assert mono.product_defect < 1e-8
    for c, E in zip(mono.chis, A.residues()):
        assert la.similar(c, expm(-2j * np.pi * E), tol=1e-6)


def test_convergence_order():
    systems = [fu.generate("triangular", (1, 0), s) for s in range(3)] + [fu.generate("extremal", (0, 0), s)
                                                                           for s in range(3)]

    def total(rt):
        cfg = IntegratorConfig(rel_tol=rt, abs_tol=rt * 1e-3, method="dp5")
        return sum(monodromy(A, cfg=cfg).product_defect for A in systems)

    hi, lo = total(1e-5), total(1e-7)
    # the defect should scale at least linearly with the tolerance
    assert np.log10(hi / lo) / 2 > 0.9


def test_symbol_of_zero_system_is_constant():
    sym = symbol_from_system(zero_system(2, 3))
    assert all(np.allclose(A, sym.arcs[0], atol=1e-10) for A in sym.arcs)


def test_symbol_of_diagonal_system_is_diagonal():
    A = diagonal_system([[0.2, -0.1, -0.1], [0.3, 0.3, 0.4]])
    sym = symbol_from_system(A)
    for G in sym.arcs:
        assert np.linalg.norm(G - np.diag(np.diag(G))) < 1e-9


def test_symbol_jumps_match_monodromy():
    A = fu.generate("extremal", (0, 0, 0), seed=6, m=3)
    Ms = jump_matrices(symbol_from_system(A))
    chis = monodromy(A).chis
    assert np.linalg.norm(la.similarity_fingerprint(Ms) - la.similarity_fingerprint(chis)) < 1e-7
    assert la.simultaneously_similar(Ms, chis, tol=1e-6)


def test_scalar_factor_assembly_matches_closed_form():
    A = scalar_system([0.2 + 0.1j, 0.45, 0.35 - 0.1j])
    fa = factor_assembly(A)
    assert fa.residual < 1e-8
    closed = scalar_factorize(fa.symbol)
    assert closed.kappa == A.kappa == 1
    ts = np.exp(1j * np.array([0.5, 2.5, 4.5])) * 0.7
    ratio = fa.g_plus(ts)[:, 0, 0] / closed.g_plus(ts)
    assert np.ptp(np.abs(ratio)) < 1e-8 and np.ptp(np.angle(ratio)) < 1e-8


def test_factor_assembly_2x2():
    A = fu.generate("extremal", (1, -1), seed=1, m=4)
    fa = factor_assembly(A)
    assert fa.residual < 1e-7
    assert fa.indices == [1, -1]
    assert fa.exterior_defect < 1e-8


def test_invariant_subspace_propagation():
    A = fu.generate("triangular", (1, 0), seed=4)
    assert invariant_subspace_propagation_check(A)
    mono = monodromy(A)
    assert all(abs(c[1, 0]) < 1e-8 * np.linalg.norm(c) for c in mono.chis)
    D = diagonal_system([[0.2, -0.1, -0.1], [0.3, 0.3, 0.4]])
    assert all(abs(c[0, 1]) + abs(c[1, 0]) < 1e-10 for c in monodromy(D).chis)


def test_extremal_monodromy_is_irreducible():
    A = fu.generate("extremal", (0, 0), seed=5, m=3)
    data = extract_data(symbol_from_system(A))
    assert classify(data).type == "A"
