import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pcindex.indices import (GapBound, compute_indices, gap_bounded_vectors, indices_2x3, indices_2x4,
                             indices_2xm, indices_3x3)
from pcindex.reducibility import ReducibilityReport
from pcindex.symbol import data_from_jumps

I2 = np.eye(2, dtype=complex)


def rep(n, kind, kappa, **ints):
    return ReducibilityReport(n, kind, ints, kappa)


def test_2x2_reducible():
    r = indices_2xm(rep(2, "C", 4, n1=3, n2=1), 4, 3)
    assert r.kind == "determined" and r.indices == (3, 1)
    r = indices_2xm(rep(2, "B", 2, n1=2, n2=0), 2, 6)
    assert r.indices == (2, 0)


def test_2x2_many_points_gives_constraints():
    r = indices_2xm(rep(2, "B", 2, n1=0, n2=2), 2, 5)
    assert r.kind == "constraints"
    assert r.constraint.gap == 3 and r.kappa == 2
    assert r.candidates == [(2, 0), (1, 1)]


def test_2x3():
    a = rep(2, "A", 0)
    assert indices_2x3(a, 3).indices == (2, 1)
    assert indices_2x3(a, 0).indices == (0, 0)
    assert indices_2x3(a, -1).indices == (0, -1)


def test_2x4():
    a = rep(2, "A", 1)
    assert indices_2x4(a, 1).indices == (1, 0)
    R = np.array([[0, 1], [-1, 0]], dtype=complex)
    Ms = [R, -I2, R, I2]
    assert indices_2x4(rep(2, "A", 0), 0, Ms=Ms).indices == (0, 0)
    r = indices_2x4(rep(2, "A", 0), 0, Ms=[R, R, R, R])
    assert r.kind == "dichotomy" and r.options == ((0, 0), (1, -1))


def test_2x4_dichotomy_carries_request():
    rng = np.random.default_rng(2)
    X, Y, Z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    Ms = [X, Y, Z, np.linalg.inv(X @ Y @ Z)]
    data = data_from_jumps(Ms, 2.0)
    r = compute_indices(rep(2, "A", data.kappa), data)
    if data.kappa % 2:
        assert r.kind == "determined"
        return
    assert r.kind == "dichotomy" and r.request is not None
    # exponent payload: the shift at the last point makes the sum (m - 2) n (n - 1) / 2 = 2
    total = sum(sum(e) for e in r.request.exponents)
    assert abs(total - 2) < 1e-9


def test_3x3_examples():
    assert indices_3x3(rep(3, "D", 3, n1=2, n2=1, n3=0), 3).indices == (2, 1, 0)
    assert indices_3x3(rep(3, "B1", 3, nu=2, N=1), 3).indices == (2, 1, 0)
    assert indices_3x3(rep(3, "A", 1), 1).indices == (1, 0, 0)
    low = [np.diag([1, 1, -1]).astype(complex)] + [np.eye(3)] * 2
    assert indices_3x3(rep(3, "A", 0), 0, Ms=low).indices == (0, 0, 0)
    r = indices_3x3(rep(3, "A", 3), 3, Ms=[np.diag([1, 2, 3]).astype(complex)] * 3)
    assert r.kind == "dichotomy" and r.options == ((1, 1, 1), (2, 1, 0))


def test_gap_bound():
    assert GapBound(2, 3).gap == 1
    assert not GapBound(3, 3)((2, 0, -2))
    assert GapBound(2, 4)((1, -1))
    assert gap_bounded_vectors(3, 3, 0) == [(1, 0, -1), (0, 0, 0)]


def test_overlapping_statements_agree():
    for nu in range(-3, 4):
        b = rep(3, "B3", 3 * nu, nu=nu, N=2 * nu)
        line = indices_3x3(b, 3 * nu)
        plane = indices_3x3(rep(3, "B2", 3 * nu, nu=nu, N=2 * nu), 3 * nu)
        assert line.indices == plane.indices == (nu, nu, nu)
        # C-3 with nu1 = nu2: flag ordering and block orderings coincide
        c3 = indices_3x3(rep(3, "C3", 3 * nu, nu1=nu, nu2=nu, nu_sharp=nu), 3 * nu)
        assert c3.indices == (nu, nu, nu)


def random_report(draw):
    kind = draw(st.sampled_from(["A", "B1", "B2", "B3", "C", "C1", "C2", "C3", "D"]))
    ints = st.integers(-6, 6)
    if kind == "A":
        return rep(3, "A", draw(ints))
    if kind.startswith("B"):
        nu, N = draw(ints), draw(ints)
        return rep(3, kind, nu + N, nu=nu, N=N)
    if kind == "C3":
        a, b, c = draw(ints), draw(ints), draw(ints)
        return rep(3, kind, a + b + c, nu1=a, nu2=b, nu_sharp=c)
    a, b, c = draw(ints), draw(ints), draw(ints)
    if kind == "C1":
        a, b = max(a, b), min(a, b)
    if kind == "C2":
        b, c = max(b, c), min(b, c)
    if kind == "D":
        a, b, c = sorted((a, b, c), reverse=True)
    return rep(3, kind, a + b + c, n1=a, n2=b, n3=c)


@settings(max_examples=400, deadline=None)
@given(st.data())
def test_3x3_table_is_total(data):
    r = random_report(data.draw)
    out = indices_3x3(r, r.kappa)
    again = indices_3x3(r, r.kappa)
    assert out.to_json() == again.to_json()
    options = [out.indices] if out.kind == "determined" else list(out.options)
    for ks in options:
        assert sum(ks) == r.kappa
        assert list(ks) == sorted(ks, reverse=True)
        if r.type == "A":
            assert GapBound(3, 3)(ks)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["A", "B", "C"]), st.integers(-6, 6), st.integers(-6, 6), st.integers(3, 7))
def test_2x2_table_is_total(kind, a, b, m):
    if kind == "C":
        a, b = max(a, b), min(a, b)
    r = rep(2, kind, a + b) if kind == "A" else rep(2, kind, a + b, n1=a, n2=b)
    out = indices_2xm(r, a + b, m)
    if out.kind == "determined":
        options = [out.indices]
    elif out.kind == "dichotomy":
        options = list(out.options)
    else:
        options = out.candidates
    for ks in options:
        assert sum(ks) == a + b and ks[0] >= ks[1]
        if kind == "A":
            assert ks[0] - ks[1] <= m - 2
