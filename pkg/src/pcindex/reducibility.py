"""Reducibility type of a jump tuple and the integers attached to it.

The type is read off the lattice of common invariant lines and planes of
[M_1, ..., M_m].  The integers are sums over k of eigenvalues of E_k on
invariant subquotients: since every E_k is a polynomial in M_k it leaves
the same subspaces invariant, so in a basis adapted to an invariant flag
Q^-1 E_k Q is block triangular and its diagonal entries are exactly the
exponents paired with the diagonal entries of Q^-1 M_k Q.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import linalg as la
from .errors import AmbiguousPairing, InputError

TOL_INT = 1e-6


@dataclass
class ReducibilityReport:
    n: int
    type: str
    integers: dict
    kappa: int
    lines: list = field(default_factory=list)
    planes: list = field(default_factory=list)

    def to_json(self):
        return {
            "n": self.n,
            "type": self.type,
            "integers": dict(self.integers),
            "kappa": self.kappa,
            "lines": [_cvec(v) for v in self.lines],
            "planes": [[_cvec(c) for c in P.T] for P in self.planes],
        }

    def signature(self):
        return (self.type, tuple(sorted(self.integers.items())))


def _cvec(v):
    v = np.asarray(v).reshape(-1)
    return [[float(x.real), float(x.imag)] for x in v]


# --- subspace bookkeeping --------------------------------------------------------

def _unit(v):
    v = np.asarray(v, dtype=complex).reshape(-1)
    return v / np.linalg.norm(v)


def _same_line(u, v, tol=1e-6):
    return abs(np.vdot(_unit(u), _unit(v))) > 1 - tol


def plane_normal(P):
    """Unit vector w with P = {x : w^H x = 0}."""
    W = la.null_space(np.asarray(P).conj().T, 1e-10)
    return _unit(W[:, 0])


@dataclass
class Lattice:
    lines: list  # unit vectors
    line_families: list  # n x d spans of continuum families
    planes: list  # n x 2 orthonormal bases
    plane_families: list  # normals spanning families of planes

    @property
    def line_count(self):
        return np.inf if self.line_families else len(self.lines)

    @property
    def plane_count(self):
        return np.inf if self.plane_families else len(self.planes)

    def line_vectors(self):
        out = list(self.lines)
        for S in self.line_families:
            out += [S[:, i] for i in range(S.shape[1])]
        return out

    def plane_bases(self):
        out = list(self.planes)
        for W in self.plane_families:
            for i in range(W.shape[1]):
                out.append(la.hyperplane_from_normal(W[:, i].conj()).basis)
        return out


def invariant_lattice(Ms, tol=None):
    """Common invariant lines and hyperplanes, deduplicated."""
    Ms = [la.as_matrix(M) for M in Ms]
    n = Ms[0].shape[0]
    lines, lfam, planes, pfam = [], [], [], []
    if n < 2:
        return Lattice(lines, lfam, planes, pfam)
    for S in la.common_invariant_subspaces(Ms, 1, tol):
        if isinstance(S, la.ContinuumFlag):
            lfam.append(S.span)
        elif not any(_same_line(S.basis, v) for v in lines):
            lines.append(_unit(S.basis))
    if n == 3:
        for S in la.common_invariant_subspaces(Ms, 2, tol):
            if isinstance(S, la.ContinuumFlag):
                # planes {x : w^T x = 0}; keep Hermitian normals
                pfam.append(S.normals.conj())
            elif not any(_same_line(plane_normal(S.basis), plane_normal(P)) for P in planes):
                planes.append(S.basis)
    return Lattice(lines, lfam, planes, pfam)


def _in_plane(v, P, tol=1e-6):
    return abs(np.vdot(plane_normal(P), _unit(v))) < tol


def _span_rank(vectors, tol=1e-6):
    if not vectors:
        return 0
    X = np.column_stack([_unit(v) for v in vectors])
    return la.numerical_rank(X, tol)


def _independent(vectors, count, tol=1e-6):
    chosen = []
    for v in vectors:
        if _span_rank(chosen + [v], tol) > len(chosen):
            chosen.append(v)
        if len(chosen) == count:
            break
    return chosen


# --- exponent pairing --------------------------------------------------------------

def adapted_basis(chain, n):
    """Unitary Q whose leading columns span the nested subspaces of chain
    (each given by a basis matrix), in order."""
    cols = np.zeros((n, 0), dtype=complex)
    for V in chain:
        V = np.asarray(V, dtype=complex).reshape(n, -1)
        R = V - cols @ (cols.conj().T @ V)
        q, s, _ = np.linalg.svd(R, full_matrices=False)
        extra = q[:, s > 1e-8]
        cols = np.hstack([cols, extra])
    if cols.shape[1] < n:
        W = la.null_space(cols.conj().T, 1e-10) if cols.shape[1] else np.eye(n, dtype=complex)
        cols = np.hstack([cols, W])
    return cols


def pair_exponents(M, E, chain=()):
    """Eigenvalues of E ordered along an invariant chain of M.

    chain lists nested M-invariant subspaces (basis matrices).  Diagonal
    blocks left larger than 1x1 are triangularized by a Schur form of the
    M block.  Returns (mus, epsilons) with mu_j = exp(-2 pi i eps_j).
    """
    M, E = la.as_matrix(M), la.as_matrix(E)
    n = M.shape[0]
    Q = adapted_basis(chain, n)
    sizes = []
    prev = 0
    for V in chain:
        d = np.asarray(V).reshape(n, -1).shape[1]
        sizes.append(d - prev if d > prev else d)
        prev = d
    if sum(sizes) < n:
        sizes.append(n - sum(sizes))
    start = 0
    for d in sizes:
        if d > 1:
            Mq = Q.conj().T @ M @ Q
            _, Z = sla.schur(Mq[start:start + d, start:start + d], output="complex")
            Q[:, start:start + d] = Q[:, start:start + d] @ Z
        start += d
    Mq = Q.conj().T @ M @ Q
    Eq = Q.conj().T @ E @ Q
    mus, eps = np.diag(Mq).copy(), np.diag(Eq).copy()
    scale = 1 + np.linalg.norm(M, 2)
    if np.max(np.abs(np.exp(-2j * np.pi * eps) - mus)) > 1e-6 * scale:
        raise AmbiguousPairing("exponents do not match the eigenvalues along the chain")
    return mus, eps


def _exponent_sums(data, chain):
    """Sums over k of the paired exponents along the chain (one per
    diagonal position)."""
    total = np.zeros(data.n, dtype=complex)
    for M, E in zip(data.Ms, data.Es):
        _, eps = pair_exponents(M, E, chain)
        total += eps
    return total


def _as_int(x, what):
    r = int(np.round(x.real))
    if abs(x - r) > TOL_INT:
        raise AmbiguousPairing("%s = %r is not an integer" % (what, complex(x)))
    return r


def _line_value(data, v):
    return _as_int(_exponent_sums(data, [np.reshape(v, (-1, 1))])[0], "line exponent sum")


def _quotient_value(data, P):
    """Exponent sum on C^n / P for an invariant hyperplane P."""
    n = data.n
    Q = adapted_basis([P], n)
    total = 0
    for E in data.Es:
        total += (Q.conj().T @ E @ Q)[n - 1, n - 1]
    return _as_int(total, "quotient exponent sum")


# --- classification ------------------------------------------------------------------

def classify2(data, tol=None):
    if data.n != 2:
        raise InputError("classify2 needs 2x2 data")
    lat = invariant_lattice(data.Ms, tol)
    kappa = data.kappa
    if lat.line_count == 0:
        return ReducibilityReport(2, "A", {}, kappa)
    if lat.line_count == 1:
        v = lat.lines[0]
        n1 = _line_value(data, v)
        return ReducibilityReport(2, "B", {"n1": n1, "n2": kappa - n1}, kappa, [v])
    vs = _independent(lat.line_vectors(), 2)
    vals = sorted([_line_value(data, v) for v in vs], reverse=True)
    if sum(vals) != kappa:
        raise AmbiguousPairing("line exponent sums do not add up to the total index")
    return ReducibilityReport(2, "C", {"n1": vals[0], "n2": vals[1]}, kappa, vs)


def classify3(data, tol=None):
    if data.n != 3:
        raise InputError("classify3 needs 3x3 data")
    lat = invariant_lattice(data.Ms, tol)
    kappa = data.kappa
    L, Pc = lat.line_count, lat.plane_count
    lines, planes = lat.line_vectors(), lat.plane_bases()

    def report(kind, ints, ls=(), ps=()):
        if ints and sum(ints.values()) != kappa:
            raise AmbiguousPairing("case integers %r do not add up to %d" % (ints, kappa))
        return ReducibilityReport(3, kind, ints, kappa, list(ls), list(ps))

    if L == 0 and Pc == 0:
        return report("A", {})
    if L == 1 and Pc == 0:
        nu = _line_value(data, lines[0])
        return report("B1", {"nu": nu, "N": kappa - nu}, lines)
    if L == 0 and Pc == 1:
        nu = _quotient_value(data, planes[0])
        return report("B2", {"nu": nu, "N": kappa - nu}, (), planes)
    if L == 1 and Pc == 1:
        v, P = lines[0], planes[0]
        if _in_plane(v, P):
            s = _exponent_sums(data, [np.reshape(v, (-1, 1)), P])
            ints = {"n1": _as_int(s[0], "n1"), "n2": _as_int(s[1], "n2"), "n3": _as_int(s[2], "n3")}
            return report("C", ints, lines, planes)
        nu = _line_value(data, v)
        return report("B3", {"nu": nu, "N": kappa - nu}, lines, planes)
    if L >= 2 and Pc == 1:
        P = planes[0]
        inside = _independent([v for v in lines if _in_plane(v, P)], 2)
        if len(inside) < 2:
            raise AmbiguousPairing("invariant lines are not contained in the invariant plane")
        a, b = sorted((_line_value(data, v) for v in inside), reverse=True)
        n3 = _quotient_value(data, P)
        return report("C1", {"n1": a, "n2": b, "n3": n3}, inside, planes)
    if L == 1 and Pc >= 2:
        v = lines[0]
        ps = [P for P in planes if _in_plane(v, P)]
        ps = _distinct_planes(ps)[:2]
        if len(ps) < 2:
            raise AmbiguousPairing("invariant planes do not contain the invariant line")
        b, c = sorted((_quotient_value(data, P) for P in ps), reverse=True)
        return report("C2", {"n1": _line_value(data, v), "n2": b, "n3": c}, lines, ps)
    if L >= 2 and Pc >= 2:
        if _span_rank(lines) >= 3:
            vs = _independent(lines, 3)
            vals = sorted((_line_value(data, v) for v in vs), reverse=True)
            return report("D", {"n1": vals[0], "n2": vals[1], "n3": vals[2]}, vs)
        ps = _distinct_planes(planes)[:2]
        W = np.vstack([plane_normal(P).conj() for P in ps])
        core = la.null_space(W, 1e-8)
        if core.shape[1] != 1:
            raise AmbiguousPairing("invariant planes do not meet in a line")
        v1 = core[:, 0]
        others = [v for v in lines if not _same_line(v, v1)]
        if not others:
            raise AmbiguousPairing("no second invariant line")
        nu1 = _line_value(data, v1)
        nus = _line_value(data, others[0])
        return report("C3", {"nu1": nu1, "nu2": kappa - nu1 - nus, "nu_sharp": nus},
                      [v1, others[0]], ps)
    raise AmbiguousPairing("inconsistent invariant subspace lattice (%s lines, %s planes)" % (L, Pc))


def _distinct_planes(planes):
    out = []
    for P in planes:
        if not any(_same_line(plane_normal(P), plane_normal(Q)) for Q in out):
            out.append(P)
    return out


def classify(data, tol=None):
    if data.n == 1:
        return ReducibilityReport(1, "scalar", {"n1": data.kappa}, data.kappa)
    if data.n == 2:
        return classify2(data, tol)
    if data.n == 3:
        return classify3(data, tol)
    raise InputError("only n <= 3 is supported")
