"""Small dense complex matrix tools (sizes 1 to 3).

Everything downstream branches on exact eigenvalue multiplicities and on
counts of invariant subspaces, so the routines here collapse nearly equal
eigenvalues deterministically and expose their tolerances as arguments.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from math import factorial

import numpy as np
import scipy.linalg as sla

from .errors import BranchOnBoundary, NonConvergence, Singular

TOL_BRANCH = 1e-6


def as_matrix(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (M.shape,))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def tol_cluster(M):
    return 1e-8 * (1.0 + np.linalg.norm(M, 2))


def tol_det(M):
    n = M.shape[0]
    return 1e-12 * max(np.linalg.norm(M, 2), 1e-300) ** n


def is_invertible(M):
    M = as_matrix(M)
    return abs(np.linalg.det(M)) > tol_det(M)


def numerical_rank(X, tol):
    if X.size == 0:
        return 0
    s = np.linalg.svd(X, compute_uv=False)
    return int(np.sum(s > tol))


def null_space(X, tol):
    """Orthonormal basis (columns) of the numerical kernel of X."""
    n = X.shape[1]
    if X.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(X)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


@dataclass
class Eigen:
    value: complex
    alg: int
    geo: int
    # columns span the generalized eigenspace
    chain: np.ndarray = field(repr=False)


@dataclass
class Spectrum:
    eigen: list

    @property
    def values(self):
        return [e.value for e in self.eigen]

    def multiplicities(self):
        return {e.value: (e.alg, e.geo) for e in self.eigen}


def cluster_values(vals, tol):
    """Group values closer than tol (single linkage); returns (means, counts)."""
    vals = list(vals)
    groups = []
    for v in sorted(vals, key=lambda z: (round(z.real, 6), round(z.imag, 6))):
        for g in groups:
            if min(abs(v - w) for w in g) < tol:
                g.append(v)
                break
        else:
            groups.append([v])
    # a second sweep merges groups bridged by later members
    merged = True
    while merged:
        merged = False
        for i, j in combinations(range(len(groups)), 2):
            if min(abs(a - b) for a in groups[i] for b in groups[j]) < tol:
                groups[i] += groups.pop(j)
                merged = True
                break
    return [complex(np.mean(g)) for g in groups], [len(g) for g in groups]


def merge_defective(M, means, counts, reach=1e-3, tol=1e-11):
    """Merge clusters that a Jordan block split apart.

    Rounding a defective eigenvalue of multiplicity k scatters it by about
    eps^(1/k), far beyond the plain cluster tolerance.  Two clusters are
    merged when (M - lam I)^k at their mean still has a k-dimensional
    kernel to near machine precision, which distinct eigenvalues at that
    distance do not.
    """
    n = M.shape[0]
    scale = 1.0 + np.linalg.norm(M, 2)
    means, counts = list(means), list(counts)
    merged = True
    while merged and len(means) > 1:
        merged = False
        for i, j in combinations(range(len(means)), 2):
            if abs(means[i] - means[j]) > reach * scale:
                continue
            k = counts[i] + counts[j]
            lam = (counts[i] * means[i] + counts[j] * means[j]) / k
            s = np.linalg.svd(np.linalg.matrix_power(M - lam * np.eye(n), k), compute_uv=False)
            if s[n - k] <= tol * scale ** k:
                means[i], counts[i] = lam, k
                del means[j], counts[j]
                merged = True
                break
    return means, counts


def eigen(M, tol=None):
    """Clustered spectrum with algebraic/geometric multiplicities and
    generalized eigenspaces."""
    M = as_matrix(M)
    n = M.shape[0]
    tol = tol_cluster(M) if tol is None else tol
    try:
        raw = sla.eigvals(M)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NonConvergence("eigenvalue iteration failed: %s" % exc)
    if not np.all(np.isfinite(raw)):
        raise NonConvergence("non-finite eigenvalues")
    means, counts = merge_defective(M, *cluster_values(raw, tol))
    out = []
    rank_tol = 1e-8 * (1.0 + np.linalg.norm(M, 2))
    for lam, alg in zip(means, counts):
        X = M - lam * np.eye(n)
        geo = n - numerical_rank(X, rank_tol)
        geo = max(1, min(geo, alg))
        chain = null_space(np.linalg.matrix_power(X, alg), rank_tol * max(1.0, np.linalg.norm(X, 2)) ** (alg - 1))
        out.append(Eigen(lam, alg, geo, chain))
    return Spectrum(out)


# --- branch selected logarithm -------------------------------------------

def exponent_of(mu, J):
    """The unique eps with exp(-2 pi i eps) = mu and Re eps in the closed
    interval J (length one)."""
    lo, hi = J
    mu = complex(mu)
    if mu == 0:
        raise Singular("zero eigenvalue has no logarithm")
    re = -np.angle(mu) / (2 * np.pi)
    im = np.log(abs(mu)) / (2 * np.pi)
    re = re - np.floor(re - lo)
    if re >= hi:
        re -= 1.0
    return complex(re, im)


def exponent_margin(eps, J):
    return min(eps.real - J[0], J[1] - eps.real)


def _log_derivative(mu, k, eps):
    # k-th derivative of f(x) = -log(x)/(2 pi i) on the branch with f(mu) = eps
    if k == 0:
        return eps
    return -((-1) ** (k - 1)) * factorial(k - 1) / (2j * np.pi * mu ** k)


def _first_difference(a, b, fa, fb):
    # f[a, b] for the log branch, stable when a and b are close
    r = (a - b) / b
    if abs(r) < 0.5:
        d = -np.log1p(r) / (2j * np.pi)
        # the shortcut only holds when both values sit on the same sheet
        if abs(fa - fb - d) < 0.5:
            return d / (a - b)
    return (fa - fb) / (a - b)


def branch_log(M, J, tol_branch=TOL_BRANCH):
    """E with exp(-2 pi i E) = M and the real parts of its eigenvalues in J.

    E is obtained by Hermite interpolation of the chosen logarithm branch on
    the spectrum, so it is a polynomial in M.
    """
    M = as_matrix(M)
    n = M.shape[0]
    if not is_invertible(M):
        raise Singular("matrix is not invertible")
    vals = eigen(M)
    nodes, derivs = [], []
    for e in vals.eigen:
        eps = exponent_of(e.value, J)
        if exponent_margin(eps, J) <= tol_branch:
            raise BranchOnBoundary(
                "eigenvalue %r gives exponent %r on the boundary of %r" % (e.value, eps, tuple(J)),
                eigenvalue=[e.value.real, e.value.imag], exponent=[eps.real, eps.imag])
        for k in range(e.alg):
            nodes.append(e.value)
            derivs.append([_log_derivative(e.value, j, eps) for j in range(e.alg)])
    coef = _newton_hermite(nodes, derivs)
    E = np.zeros((n, n), dtype=complex)
    P = np.eye(n, dtype=complex)
    for j, c in enumerate(coef):
        E += c * P
        P = P @ (M - nodes[j] * np.eye(n))
    return E


def _newton_hermite(nodes, derivs):
    """Leading divided differences f[x0], f[x0,x1], ... for confluent nodes."""
    N = len(nodes)
    table = [[None] * N for _ in range(N)]
    for i in range(N):
        table[i][i] = derivs[i][0]
    for width in range(1, N):
        for i in range(N - width):
            j = i + width
            a, b = nodes[i], nodes[j]
            if a == b:
                table[i][j] = derivs[i][width] / factorial(width)
            elif width == 1:
                table[i][j] = _first_difference(b, a, table[j][j], table[i][i])
            else:
                table[i][j] = (table[i + 1][j] - table[i][j - 1]) / (b - a)
    return [table[0][j] for j in range(N)]


def expm_neg2pii(E):
    return sla.expm(-2j * np.pi * as_matrix(E))


# --- similarity ------------------------------------------------------------

def minimal_poly_degree(M, tol=None):
    M = as_matrix(M)
    n = M.shape[0]
    vals = eigen(M, tol)
    rtol = 1e-8 * (1.0 + np.linalg.norm(M, 2))
    deg = 0
    for e in vals.eigen:
        X = M - e.value * np.eye(n)
        # index of the eigenvalue: first k where the rank stops dropping
        prev = n
        k = 0
        while True:
            r = numerical_rank(np.linalg.matrix_power(X, k + 1), rtol * max(1.0, np.linalg.norm(X, 2)) ** k)
            if r == prev:
                break
            prev = r
            k += 1
            if k >= e.alg:
                break
        deg += max(k, 1)
    return deg


def jordan_ranks(M, lam, tol):
    n = M.shape[0]
    X = M - lam * np.eye(n)
    scale = max(1.0, np.linalg.norm(X, 2))
    return [numerical_rank(np.linalg.matrix_power(X, k), tol * scale ** (k - 1)) for k in range(1, n + 1)]


def similar(M, N, tol=None):
    M, N = as_matrix(M), as_matrix(N)
    if M.shape != N.shape:
        return False
    if tol is None:
        tol = max(tol_cluster(M), tol_cluster(N))
    sm, sn = eigen(M, tol), eigen(N, tol)
    if len(sm.eigen) != len(sn.eigen):
        return False
    rtol = 1e-8 * (1.0 + max(np.linalg.norm(M, 2), np.linalg.norm(N, 2)))
    rtol = max(rtol, tol)
    used = set()
    for e in sm.eigen:
        match = None
        for j, f in enumerate(sn.eigen):
            if j not in used and abs(e.value - f.value) < 10 * tol and e.alg == f.alg:
                match = j
                break
        if match is None:
            return False
        used.add(match)
        lam = 0.5 * (e.value + sn.eigen[match].value)
        if jordan_ranks(M, lam, rtol) != jordan_ranks(N, lam, rtol):
            return False
    return True


# --- common invariant subspaces ------------------------------------------------

@dataclass
class SubspaceBasis:
    dim: int
    basis: np.ndarray  # n x dim, orthonormal columns

    def contains(self, other, tol=1e-6):
        P = self.basis @ self.basis.conj().T
        B = other.basis
        return np.linalg.norm(B - P @ B) < tol


@dataclass
class ContinuumFlag:
    """Every d-dimensional subspace of a family is invariant.

    For lines the family is "all lines inside ``span``"; for hyperplanes it is
    "all hyperplanes {x : w^T x = 0} with w inside ``normals``".
    """
    dim: int
    span: np.ndarray = None
    normals: np.ndarray = None

    def members(self, count=2):
        """A few concrete members (used for containment tests)."""
        if self.span is not None:
            cols = [self.span[:, [i]] for i in range(min(count, self.span.shape[1]))]
            return [SubspaceBasis(1, c / np.linalg.norm(c)) for c in cols]
        out = []
        for i in range(min(count, self.normals.shape[1])):
            out.append(hyperplane_from_normal(self.normals[:, i]))
        return out


def orthonormal(B):
    q, _ = np.linalg.qr(np.asarray(B, dtype=complex))
    return q


def hyperplane_from_normal(w):
    """Orthonormal basis of {x : w^T x = 0}."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    basis = null_space(w.reshape(1, -1), 1e-12 * np.linalg.norm(w))
    return SubspaceBasis(basis.shape[1], basis)


def _common_eigen_spaces(Ms, tol):
    n = Ms[0].shape[0]
    per = []
    for M in Ms:
        per.append(eigen(M).values)
    found = []
    for combo in product(*per):
        X = np.vstack([M - lam * np.eye(n) for M, lam in zip(Ms, combo)])
        W = null_space(X, tol)
        if W.shape[1] > 0:
            found.append(W)
    return found


def default_subspace_tol(Ms):
    return 1e-6 * (1.0 + max(np.linalg.norm(M, 2) for M in Ms))


def common_invariant_subspaces(Ms, d, tol=None):
    """All d-dimensional subspaces invariant under every matrix in Ms.

    Supports d = 1 (common eigenvectors) and d = n - 1 (via transposes).
    Families of invariant subspaces come back as ContinuumFlag entries.
    """
    Ms = [as_matrix(M) for M in Ms]
    n = Ms[0].shape[0]
    if not 1 <= d <= n - 1:
        raise ValueError("d must lie in 1..n-1")
    tol = default_subspace_tol(Ms) if tol is None else tol
    out = []
    if d == 1:
        for W in _common_eigen_spaces(Ms, tol):
            if W.shape[1] == 1:
                out.append(SubspaceBasis(1, W))
            else:
                out.append(ContinuumFlag(1, span=W))
        return out
    if d == n - 1:
        for W in _common_eigen_spaces([M.T for M in Ms], tol):
            if W.shape[1] == 1:
                out.append(hyperplane_from_normal(W[:, 0]))
            else:
                out.append(ContinuumFlag(d, normals=W))
        return out
    raise NotImplementedError("only lines and hyperplanes are supported")


def is_invariant(Ms, V, tol=1e-6):
    """Whether span(V) is invariant under every M."""
    V = orthonormal(V)
    P = np.eye(V.shape[0]) - V @ V.conj().T
    return all(np.linalg.norm(P @ M @ V) < tol * (1 + np.linalg.norm(M, 2)) for M in Ms)


# --- fingerprints ----------------------------------------------------------------

def similarity_fingerprint(Ms):
    """Traces of single matrices, ordered pairs i<j and triples i<j<l."""
    Ms = [as_matrix(M) for M in Ms]
    m = len(Ms)
    fp = [np.trace(M) for M in Ms]
    fp += [np.trace(Ms[i] @ Ms[j]) for i, j in combinations(range(m), 2)]
    if m >= 3:
        fp += [np.trace(Ms[i] @ Ms[j] @ Ms[k]) for i, j, k in combinations(range(m), 3)]
    return np.array(fp, dtype=complex)


def conjugacy_space(As, Bs, tol=1e-7):
    """Basis of {X : A_k X = X B_k for all k} (vectorized, column-major)."""
    n = As[0].shape[0]
    I = np.eye(n)
    rows = [np.kron(I, A) - np.kron(B.T, I) for A, B in zip(As, Bs)]
    K = np.vstack(rows)
    scale = 1 + max(np.linalg.norm(A, 2) for A in As)
    W = null_space(K, tol * scale)
    return [W[:, i].reshape(n, n, order="F") for i in range(W.shape[1])]


def simultaneously_similar(As, Bs, tol=1e-7, rng=None):
    """Exists invertible X with A_k X = X B_k for every k."""
    space = conjugacy_space([as_matrix(A) for A in As], [as_matrix(B) for B in Bs], tol)
    if not space:
        return False
    rng = np.random.default_rng(0) if rng is None else rng
    # a random combination of the solution space is invertible iff some member is
    for _ in range(3):
        c = rng.normal(size=len(space)) + 1j * rng.normal(size=len(space))
        X = sum(ci * Xi for ci, Xi in zip(c, space))
        s = np.linalg.svd(X, compute_uv=False)
        if s[-1] > 1e-6 * s[0]:
            return True
    return False
