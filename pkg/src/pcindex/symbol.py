"""Piecewise constant matrix symbols on the unit circle and their data.

A symbol is given by m jump points a_k = exp(i theta_k) with increasing angles
and the constant values on the arcs between them; ``arcs[k]`` is the value on
the arc that ends at a_k (for k = 0 this is the arc from a_{m-1} across angle
zero), so the jump at a_k is ``arcs[k] @ inv(arcs[k + 1])``.

The data of a symbol is the tuple of jump matrices together with
branch-selected logarithms whose eigenvalues have real parts in
J_p = (1/p - 1, 1/p).

The winding term of the usual index formula vanishes identically for piecewise
constant symbols (the arg increment along each arc is zero), so the total index
is just the sum of the traces of the logarithms.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import linalg as la
from .errors import BranchOnBoundary, InputError, NonDiagonalizableSum, ResonantData, Singular

TOL_PROD = 1e-10


def branch_interval(p):
    if not p > 1:
        raise InputError("p must exceed 1, got %r" % (p,))
    return (1.0 / p - 1.0, 1.0 / p)


@dataclass
class PiecewiseSymbol:
    n: int
    p: float
    angles: np.ndarray
    arcs: list

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=float).reshape(-1)
        self.arcs = [la.as_matrix(A) for A in self.arcs]
        m = len(self.angles)
        if m < 1:
            raise InputError("need at least one jump point")
        if len(self.arcs) != m:
            raise InputError("need one arc value per jump point")
        if any(A.shape != (self.n, self.n) for A in self.arcs):
            raise InputError("arc values must be %dx%d" % (self.n, self.n))
        if np.any(np.diff(self.angles) <= 0) or self.angles[0] < 0 or self.angles[-1] >= 2 * np.pi:
            raise InputError("angles must increase strictly inside [0, 2 pi)")
        if not self.p > 1:
            raise InputError("p must exceed 1")

    @property
    def m(self):
        return len(self.angles)

    @property
    def points(self):
        return np.exp(1j * self.angles)

    def arc_index(self, t):
        """Index of the arc containing the unit-circle point t."""
        th = np.mod(np.angle(t), 2 * np.pi)
        k = np.searchsorted(self.angles, th, side="right")
        return int(k % self.m)

    def __call__(self, t):
        return self.arcs[self.arc_index(t)]

    def arc_samples(self, k, count, margin=0.0):
        """count Chebyshev points strictly inside arc k (the arc ending at
        a_k), keeping a margin from both ends."""
        hi = self.angles[k]
        lo = self.angles[k - 1] if k > 0 else self.angles[-1] - 2 * np.pi
        lo, hi = lo + margin, hi - margin
        x = np.cos((2 * np.arange(count) + 1) * np.pi / (2 * count))[::-1]
        return np.exp(1j * (0.5 * (lo + hi) + 0.5 * (hi - lo) * x))

    def conjugated(self, C):
        Ci = np.linalg.inv(C)
        return PiecewiseSymbol(self.n, self.p, self.angles, [C @ A @ Ci for A in self.arcs])


def symbol_from_jumps(Ms, angles, p=2.0, base=None):
    """Symbol whose jump matrices are exactly Ms (requires prod Ms = I)."""
    Ms = [la.as_matrix(M) for M in Ms]
    n = Ms[0].shape[0]
    arcs = [np.eye(n, dtype=complex) if base is None else la.as_matrix(base)]
    for M in Ms[:-1]:
        arcs.append(np.linalg.solve(M, arcs[-1]))
    return PiecewiseSymbol(n, p, angles, arcs)


def jump_matrices(sym):
    for A in sym.arcs:
        if not la.is_invertible(A):
            raise Singular("arc value is not invertible")
    m = sym.m
    Ms = [sym.arcs[k] @ np.linalg.inv(sym.arcs[(k + 1) % m]) for k in range(m)]
    return Ms


def product_defect(Ms):
    P = np.eye(Ms[0].shape[0], dtype=complex)
    for M in Ms:
        P = P @ M
    return float(np.linalg.norm(P - np.eye(P.shape[0])))


@dataclass
class PhiResult:
    ok: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def phi_criterion(sym, tol_branch=la.TOL_BRANCH):
    """Factorability test: no eigenvalue lambda of a jump matrix may have
    arg(lambda)/(2 pi) + 1/p within tol_branch of an integer."""
    reasons = []
    for k, A in enumerate(sym.arcs):
        if not la.is_invertible(A):
            reasons.append({"jump": k, "reason": "singular arc value"})
    if reasons:
        return PhiResult(False, reasons)
    for k, M in enumerate(jump_matrices(sym)):
        for e in la.eigen(M).eigen:
            x = np.angle(e.value) / (2 * np.pi) + 1.0 / sym.p
            dist = abs(x - np.round(x))
            if dist <= tol_branch:
                reasons.append({"jump": k, "eigenvalue": [e.value.real, e.value.imag],
                                "reason": "arg/2pi + 1/p is an integer"})
    return PhiResult(not reasons, reasons)


def is_nonresonant(E, margin=0.0):
    vals = np.linalg.eigvals(la.as_matrix(E))
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            d = vals[i] - vals[j]
            r = np.round(d.real)
            if r != 0 and abs(d - r) <= margin + 1e-12:
                return False
    return True


@dataclass
class DataPair:
    Ms: list
    Es: list
    zetas: np.ndarray
    kappa: int
    p: float
    kappa_defect: float = 0.0

    @property
    def n(self):
        return self.Ms[0].shape[0]

    @property
    def m(self):
        return len(self.Ms)

    @property
    def J(self):
        return branch_interval(self.p)

    def conjugated(self, C):
        Ci = np.linalg.inv(C)
        return DataPair([C @ M @ Ci for M in self.Ms], [C @ E @ Ci for E in self.Es],
                        self.zetas, self.kappa, self.p, self.kappa_defect)


def total_index(Es, tol=1e-6):
    s = sum(np.trace(E) for E in Es)
    k = int(np.round(s.real))
    defect = abs(s - k)
    if defect > tol:
        raise ResonantData("sum of traces %r is not an integer" % (s,))
    return k, float(defect)


def data_from_jumps(Ms, p):
    J = branch_interval(p)
    Es = [la.branch_log(M, J) for M in Ms]
    for k, E in enumerate(Es):
        if not is_nonresonant(E):
            raise ResonantData("logarithm at jump %d is resonant" % k)
    zetas = np.array([np.sort(np.linalg.eigvals(E).real) for E in Es])
    kappa, defect = total_index(Es)
    return DataPair(list(Ms), Es, zetas, kappa, p, defect)


def extract_data(sym):
    phi = phi_criterion(sym)
    if not phi.ok:
        if any(r["reason"] == "singular arc value" for r in phi.reasons):
            raise Singular("arc value is not invertible", reasons=phi.reasons)
        raise BranchOnBoundary("symbol fails the factorability criterion", reasons=phi.reasons)
    return data_from_jumps(jump_matrices(sym), sym.p)


# --- explicit factorizations ----------------------------------------------------

def log_plus(t, a):
    """log(t - a) with the cut on the ray from a away from the origin."""
    w = t - a
    u = a / abs(a)
    return np.log(np.abs(w)) + 1j * (np.angle(-w / u) + np.pi + np.angle(u))


def log_minus(t, a):
    """log(1 - a/t) with the cut on the segment from 0 to a."""
    return np.log(1 - a / t)


@dataclass
class ScalarFactorization:
    eps: np.ndarray
    points: np.ndarray
    kappa: int
    c: complex

    def g_plus(self, t):
        t = np.asarray(t, dtype=complex)
        return self.c * np.exp(-sum(e * log_plus(t, a) for e, a in zip(self.eps, self.points)))

    def g_minus(self, t):
        t = np.asarray(t, dtype=complex)
        return np.exp(sum(e * log_minus(t, a) for e, a in zip(self.eps, self.points)))

    def product(self, t):
        t = np.asarray(t, dtype=complex)
        return self.g_plus(t) * t ** self.kappa * self.g_minus(t)


def factorization_residual(sym, evaluate, samples=64):
    """max over sample points of |evaluate(t) - G(t)| (sup of matrix norm)."""
    worst = 0.0
    for k in range(sym.m):
        for t in sym.arc_samples(k, samples):
            worst = max(worst, float(np.linalg.norm(np.atleast_2d(evaluate(t)) - sym.arcs[k])))
    return worst


def scalar_factorize(sym):
    if sym.n != 1:
        raise InputError("scalar factorization needs n = 1")
    data = extract_data(sym)
    eps = np.array([E[0, 0] for E in data.Es])
    fac = ScalarFactorization(eps, sym.points, data.kappa, 1.0)
    t0 = sym.arc_samples(0, 1)[0]
    fac.c = complex(sym.arcs[0][0, 0] / fac.product(t0))
    return fac


@dataclass
class CommutingFactorization:
    indices: list
    data: DataPair
    points: np.ndarray
    C: np.ndarray = None
    S: np.ndarray = None
    right: np.ndarray = None

    def _raw(self, t):
        E1, E2 = self.data.Es
        a1, a2 = self.points
        Fp = sla.expm(-E1 * log_plus(t, a1) - E2 * log_plus(t, a2))
        Fm = sla.expm(E1 * log_minus(t, a1) + E2 * log_minus(t, a2))
        return Fp, Fm

    def g_plus(self, t):
        Fp, _ = self._raw(t)
        return self.C @ Fp @ self.S

    def lam(self, t):
        return np.diag(t ** np.asarray(self.indices, dtype=float))

    def g_minus(self, t):
        _, Fm = self._raw(t)
        return np.linalg.solve(self.S, Fm) @ self.right

    def product(self, t):
        return self.g_plus(t) @ self.lam(t) @ self.g_minus(t)


def commuting_factorize_m2(sym):
    """Factorization for two jump points, where both logarithms are
    polynomials in the same matrix and therefore commute."""
    if sym.m != 2:
        raise InputError("needs exactly two jump points")
    data = extract_data(sym)
    K = data.Es[0] + data.Es[1]
    vals, S = np.linalg.eig(K)
    if np.max(np.abs(vals.imag)) > 1e-8 or np.max(np.abs(vals.real - np.round(vals.real))) > 1e-8:
        raise NonDiagonalizableSum("E1 + E2 has non-integer eigenvalues")
    if np.linalg.cond(S) > 1e8:
        raise NonDiagonalizableSum("E1 + E2 is not diagonalizable")
    idx = np.round(vals.real).astype(int)
    order = np.argsort(-idx, kind="stable")
    idx, S = idx[order], S[:, order]
    fac = CommutingFactorization([int(v) for v in idx], data, sym.points)
    fac.S = S
    fac.right = sym.arcs[0]
    fac.C = np.eye(sym.n, dtype=complex)
    # fix the constant factor at one sample point
    t0 = sym.arc_samples(0, 1)[0]
    Fp, Fm = fac._raw(t0)
    Kt = S @ fac.lam(t0) @ np.linalg.inv(S)
    fac.C = np.linalg.inv(Fp @ Kt @ Fm)
    return fac
