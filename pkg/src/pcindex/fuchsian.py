"""Fuchsian systems of standard form and scalar Fuchsian equations.

A system of standard form with singularities a_1..a_m and indices
kappa_1..kappa_n is

    A(z) = N(z) / p(z),   p(z) = prod (z - a_k),
    N_ij(z) = kappa_i delta_ij z^(m-1) + p_ij(z),  deg p_ij <= m-2+kappa_i-kappa_j,

where a negative degree bound forces p_ij = 0.  The degree bounds make
Lambda^-1 A Lambda - diag(kappa)/z = O(1/z^2) at infinity, so infinity is an
ordinary point after the gauge Lambda(z) = diag(z^kappa_j).

Polynomials are coefficient vectors in ascending powers.
"""
from dataclasses import dataclass, field
from itertools import combinations, product
from math import factorial

import numpy as np
import numpy.polynomial.polynomial as P

from . import linalg as la
from .errors import ColocatedSingularities, FuchsViolation, InputError, NotFuchsianAt

NONRES_MARGIN = 1e-3


def poly_trim(c, tol=0.0):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    k = len(c)
    while k > 1 and abs(c[k - 1]) <= tol:
        k -= 1
    return c[:k]


def poly_degree(c, tol=1e-12):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.nonzero(np.abs(c) > tol)[0]
    return int(nz[-1]) if len(nz) else -1


def poly_pad(c, length):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    out = np.zeros(length, dtype=complex)
    out[:min(length, len(c))] = c[:length]
    return out


def horner(coefs, z):
    """Evaluate a stack of polynomials; coefs (..., D), z (B,) -> (B, ...)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape + coefs.shape[:-1], dtype=complex)
    zz = z.reshape(z.shape + (1,) * (coefs.ndim - 1))
    for c in np.moveaxis(coefs, -1, 0)[::-1]:
        out = out * zz + c
    return out


def interpolate(points, values, degree):
    """Polynomial of the given degree through (points, values); the Vandermonde
    system is solved in the least squares sense when underdetermined."""
    V = np.vander(np.asarray(points, dtype=complex), degree + 1, increasing=True)
    c, *_ = np.linalg.lstsq(V, np.asarray(values, dtype=complex), rcond=None)
    return c


def check_singularities(a, tol=1e-8):
    a = np.asarray(a, dtype=complex).reshape(-1)
    for i, j in combinations(range(len(a)), 2):
        if abs(a[i] - a[j]) < tol:
            raise ColocatedSingularities("singularities %d and %d coincide" % (i, j))
    return a


def default_singularities(m):
    """m-th roots of unity (pairwise distance >= 0.5 for m <= 12)."""
    return np.exp(2j * np.pi * np.arange(m) / m)


class MatrixFunction:
    """Rational matrix function N(z)/d(z) with a common denominator."""

    def __init__(self, num, den, poles=None):
        self.num = np.asarray(num, dtype=complex)
        self.den = np.asarray(den, dtype=complex)
        self.n = self.num.shape[0]
        self.poles = None if poles is None else np.asarray(poles, dtype=complex)

    def evaluate(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return horner(self.num, z) / horner(self.den, z)[:, None, None]

    def __call__(self, z):
        return self.evaluate(np.atleast_1d(z))[0]


@dataclass
class Violation:
    kind: str
    detail: str

    def to_dict(self):
        return {"kind": self.kind, "detail": self.detail}


class RationalSystem(MatrixFunction):
    def __init__(self, singularities, indices, numerators, meta=None):
        a = check_singularities(singularities)
        self.a = a
        self.m = len(a)
        self.indices = [int(k) for k in indices]
        num = np.asarray(numerators, dtype=complex)
        super().__init__(num, P.polyfromroots(a), poles=a)
        if num.shape[:2] != (len(self.indices), len(self.indices)):
            raise InputError("numerator array does not match the number of indices")
        self.meta = dict(meta or {})

    @property
    def kappa(self):
        return sum(self.indices)

    def residues(self):
        out = []
        for k in range(self.m):
            d = np.prod([self.a[k] - self.a[l] for l in range(self.m) if l != k])
            out.append(horner(self.num, np.array([self.a[k]]))[0] / d)
        return out

    def off_leading(self):
        """Numerators with the diagonal kappa_i z^(m-1) terms removed."""
        q = self.num.copy()
        for i, kap in enumerate(self.indices):
            if q.shape[2] < self.m:
                q = np.concatenate([q, np.zeros(q.shape[:2] + (self.m - q.shape[2],))], axis=2)
            q[i, i, self.m - 1] -= kap
        return q

    def degree_bound(self, i, j):
        return self.m - 2 + self.indices[i] - self.indices[j]

    def to_json(self):
        return {
            "n": self.n,
            "singularities": [[float(z.real), float(z.imag)] for z in self.a],
            "indices": list(self.indices),
            "numerators": [[[[float(c.real), float(c.imag)] for c in poly_trim(self.num[i, j])]
                            for j in range(self.n)] for i in range(self.n)],
            "meta": _plain(self.meta),
        }

    @classmethod
    def from_json(cls, obj):
        try:
            n = int(obj["n"])
            a = [complex(*z) for z in obj["singularities"]]
            idx = [int(k) for k in obj["indices"]]
            polys = [[[complex(*c) for c in obj["numerators"][i][j]] for j in range(n)] for i in range(n)]
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise InputError("malformed system JSON: %s" % exc)
        D = max(max(len(polys[i][j]) for i in range(n) for j in range(n)), 1)
        num = np.zeros((n, n, D), dtype=complex)
        for i in range(n):
            for j in range(n):
                num[i, j, :len(polys[i][j])] = polys[i][j]
        return cls(a, idx, num, obj.get("meta"))


def _plain(obj):
    """Copy of obj with tuples, numpy scalars and complex numbers made JSON safe."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def residue_margin(E):
    """Distance of eigenvalue differences from the nonzero integers."""
    vals = np.linalg.eigvals(E)
    best = np.inf
    for i, j in combinations(range(len(vals)), 2):
        d = vals[i] - vals[j]
        for r in (np.round(d.real) - 1, np.round(d.real), np.round(d.real) + 1):
            if r != 0:
                best = min(best, abs(d - r))
    return best


def validate_standard_form(A, tol=1e-10, margin=0.0):
    """Empty list when A has the standard shape, else a list of violations."""
    out = []
    q = A.off_leading()
    scale = 1.0 + np.max(np.abs(A.num))
    for i in range(A.n):
        for j in range(A.n):
            bound = A.degree_bound(i, j)
            deg = poly_degree(q[i, j], tol * scale)
            if deg > max(bound, -1):
                out.append(Violation("degree", "entry (%d,%d) has degree %d > %d" % (i, j, deg, bound)))
    res = A.residues()
    for k, E in enumerate(res):
        if residue_margin(E) <= margin + 1e-12:
            out.append(Violation("resonant", "residue at a_%d is resonant" % k))
    tr = sum(np.trace(E) for E in res)
    if abs(tr - A.kappa) > 1e-8:
        out.append(Violation("trace", "sum of residue traces %r differs from %d" % (tr, A.kappa)))
    return out


def trace_identity_defect(A):
    return float(abs(sum(np.trace(E) for E in A.residues()) - A.kappa))


# --- random generation ------------------------------------------------------------

def random_disk(rng, size=None):
    r = np.sqrt(rng.uniform(size=size))
    th = rng.uniform(0, 2 * np.pi, size=size)
    return r * np.exp(1j * th)


def random_poly(rng, degree):
    if degree < 0:
        return np.zeros(1, dtype=complex)
    return random_disk(rng, degree + 1)


def random_exponent_table(rng, n, m, row_sums=None, total=None, J=(-0.5, 0.5), margin=1e-3,
                          generic=False, tries=10000):
    """n x m table of exponents with real parts in J (kept ``margin`` away from
    the ends).  Either every row sum is prescribed, or only the total.
    With generic=True partial sums over rows are kept away from integers."""
    lo, hi = J[0] + margin, J[1] - margin
    sums = list(row_sums) if row_sums is not None else [total / n] if total is not None else []
    if any(not m * lo < t < m * hi for t in sums):
        raise InputError("sums %r are out of reach: %d exponents in (%g, %g)" % (sums, m, J[0], J[1]))
    for _ in range(tries):
        T = rng.uniform(lo, hi, size=(n, m))
        # spread the correction evenly so that sums near the edge of the
        # feasible range are still reachable
        if row_sums is not None:
            for j in range(n):
                T[j] += (row_sums[j] - T[j].sum()) / m
        elif total is not None:
            T += (total - T.sum()) / (n * m)
        else:
            raise ValueError("need row_sums or total")
        if np.all((T > lo) & (T < hi)) and (not generic or exponents_generic(T, mixed_only=row_sums is not None)):
            return T.astype(complex)
    raise InputError("could not draw an exponent table with the requested sums")


def exponents_generic(T, margin=1e-3, mixed_only=False):
    """Sums over k of R distinct exponents at every point (1 <= R < n) stay
    away from the integers.  With mixed_only=True choices taking the same
    rows at every point are skipped (their sums are the prescribed row sums)."""
    T = np.asarray(T)
    n, m = T.shape
    for R in range(1, n):
        for choice in product(list(combinations(range(n), R)), repeat=m):
            if mixed_only and len(set(choice)) == 1:
                continue
            s = sum(T[list(rows), k].sum() for k, rows in enumerate(choice))
            if abs(s - np.round(s.real)) < margin:
                return False
    return True


def diagonal_numerator(a, eps):
    """Numerator of sum_k eps_k / (z - a_k) over p(z)."""
    m = len(a)
    out = np.zeros(m, dtype=complex)
    for k in range(m):
        out += eps[k] * poly_pad(P.polyfromroots([a[l] for l in range(m) if l != k]), m)
    return out


def _check_table(eps, n, m):
    eps = np.asarray(eps, dtype=complex)
    if eps.shape != (n, m):
        raise InputError("exponent table must be %dx%d" % (n, m))
    return eps


def _alloc(n, m, indices):
    gap = max(indices) - min(indices)
    D = max(m, 3 * (m - 1) + gap + 2)
    return np.zeros((n, n, D), dtype=complex)


def _finish(a, indices, num, meta):
    A = RationalSystem(a, indices, num, meta)
    bad = validate_standard_form(A)
    if bad:
        raise InputError("generated system failed validation: %s" % "; ".join(v.detail for v in bad))
    return A


def _sorted_desc(indices):
    return all(indices[i] >= indices[i + 1] for i in range(len(indices) - 1))


def generate_triangular_2(indices, eps, seed, singularities=None, coupled=True):
    """Upper triangular 2x2 standard-form system with diagonal residues given
    by the rows of eps and a random coupling polynomial."""
    indices = [int(k) for k in indices]
    if len(indices) != 2 or indices[0] < indices[1]:
        raise InputError("need indices kappa_1 >= kappa_2")
    rng = np.random.default_rng(seed)
    a = default_singularities(np.shape(eps)[1]) if singularities is None else check_singularities(singularities)
    m = len(a)
    eps = _check_table(eps, 2, m)
    for j in range(2):
        if abs(eps[j].sum() - indices[j]) > 1e-9:
            raise InputError("row %d of the exponent table must sum to %d" % (j, indices[j]))
    num = _alloc(2, m, indices)
    for j in range(2):
        num[j, j, :m] = diagonal_numerator(a, eps[j])
    if coupled:
        deg = m - 2 + indices[0] - indices[1]
        num[0, 1, :deg + 1] = random_poly(rng, deg)
    return _finish(a, indices, num, {"shape": "triangular2", "seed": seed})


def generate_triangular_3(indices, eps, seed, singularities=None, zero=()):
    """Upper triangular 3x3 standard-form system; couplings listed in ``zero``
    (0-based (i, j) pairs) are set to zero."""
    indices = [int(k) for k in indices]
    if len(indices) != 3 or not _sorted_desc(indices):
        raise InputError("need indices kappa_1 >= kappa_2 >= kappa_3")
    rng = np.random.default_rng(seed)
    a = default_singularities(np.shape(eps)[1]) if singularities is None else check_singularities(singularities)
    m = len(a)
    eps = _check_table(eps, 3, m)
    for j in range(3):
        if abs(eps[j].sum() - indices[j]) > 1e-9:
            raise InputError("row %d of the exponent table must sum to %d" % (j, indices[j]))
    num = _alloc(3, m, indices)
    for j in range(3):
        num[j, j, :m] = diagonal_numerator(a, eps[j])
    for i, j in ((0, 1), (0, 2), (1, 2)):
        if (i, j) not in set(map(tuple, zero)):
            deg = m - 2 + indices[i] - indices[j]
            num[i, j, :deg + 1] = random_poly(rng, deg)
    return _finish(a, indices, num, {"shape": "triangular3", "seed": seed})


def _acyclic(couplings, n):
    """Whether the coupling graph (i, j) -> entry (i, j) admits an ordering
    making the matrix triangular."""
    edges = {(i, j) for i, j in couplings if i != j}
    remaining = set(range(n))
    while remaining:
        free = [v for v in remaining if not any((v, w) in edges for w in remaining if w != v)]
        if not free:
            return False
        remaining -= set(free[:1])
    return True


def generate_pattern(indices, eps, couplings, seed, singularities=None):
    """System with diagonal residue exponents given by the rows of eps and
    random polynomials exactly at the listed off-diagonal positions.

    The coupling pattern must be triangular up to a permutation, so that the
    residue eigenvalues are the diagonal entries.  An entry whose degree
    bound is negative cannot be coupled.
    """
    indices = [int(k) for k in indices]
    n = len(indices)
    rng = np.random.default_rng(seed)
    a = default_singularities(np.shape(eps)[1]) if singularities is None else check_singularities(singularities)
    m = len(a)
    eps = _check_table(eps, n, m)
    couplings = sorted({(int(i), int(j)) for i, j in couplings})
    if not _acyclic(couplings, n):
        raise InputError("coupling pattern is not triangular up to a permutation")
    for j in range(n):
        if abs(eps[j].sum() - indices[j]) > 1e-9:
            raise InputError("row %d of the exponent table must sum to %d" % (j, indices[j]))
    num = _alloc(n, m, indices)
    for j in range(n):
        num[j, j, :m] = diagonal_numerator(a, eps[j])
    for i, j in couplings:
        deg = m - 2 + indices[i] - indices[j]
        if deg < 0:
            raise InputError("entry (%d,%d) must vanish for these indices" % (i + 1, j + 1))
        c = random_poly(rng, deg)
        while abs(c[-1]) < 0.1:
            c = random_poly(rng, deg)
        num[i, j, :deg + 1] = c
    return _finish(a, indices, num, {"shape": "pattern", "couplings": couplings, "seed": seed})


def _coupled_block(a, ki, kj, eps_i, eps_j, rng, lower_only=False):
    """2x2 standard-form block with indices (ki, kj), ki - kj in {0, 1}, whose
    residue at a_k has eigenvalues (eps_i[k], eps_j[k]).

    Returns numerators (Nii, Nij, Nji, Njj).  The off-diagonal product is the
    polynomial interpolating the required determinant values; it is split
    into factors of the admissible degrees.
    """
    m = len(a)
    d = ki - kj
    dp = np.array([np.prod([a[k] - a[l] for l in range(m) if l != k]) for k in range(m)])
    if lower_only:
        Nii = diagonal_numerator(a, eps_i)
        Njj = diagonal_numerator(a, eps_j)
        Nji = random_poly(rng, m - 2 + kj - ki)
        return Nii, np.zeros(1), Nji, Njj
    tr = (eps_i + eps_j) * dp
    s_lead = poly_pad(diagonal_numerator(a, eps_i + eps_j), m)
    # random split of the diagonal, keeping the leading coefficients
    pi = random_poly(rng, m - 2)
    Nii = poly_pad(pi, m)
    Nii[m - 1] += ki
    Njj = s_lead - Nii
    vals_i = horner(Nii, a)
    vals_j = horner(Njj, a)
    target = vals_i * vals_j - eps_i * eps_j * dp ** 2
    deg_ij = m - 2 + d
    deg_ji = m - 2 - d
    prod_deg = deg_ij + deg_ji
    if prod_deg < m - 1:
        raise InputError("block couplings cannot reach the prescribed exponents")
    extra = prod_deg - (m - 1)
    base = interpolate(a, target, m - 1)
    if extra >= 0:
        base = P.polyadd(base, P.polymul(P.polyfromroots(a), random_poly(rng, extra - 1) if extra > 0 else [0]))
    prod_poly = poly_pad(base, prod_deg + 1)
    roots = P.polyroots(poly_trim(prod_poly, 1e-14)) if poly_degree(prod_poly) > 0 else np.array([])
    lead = prod_poly[poly_degree(prod_poly)] if poly_degree(prod_poly) >= 0 else 0.0
    roots = list(roots)
    rng.shuffle(roots)
    take = roots[:deg_ji]
    Nji = P.polyfromroots(take) if take else np.ones(1, dtype=complex)
    Nij = lead * (P.polyfromroots(roots[deg_ji:]) if roots[deg_ji:] else np.ones(1, dtype=complex))
    # balance the two factors
    lam = random_disk(rng) * 0.5 + 0.75
    return Nii, Nij * lam, Nji / lam, Njj


def generate_block12_3(indices, eps, seed, singularities=None, lower_only=False, zero=()):
    """(1,2)-block 3x3 system: a scalar first component coupled upward to a
    2x2 block in components 2, 3 with nonzero entry (3,2).

    Row 0 of eps gives the scalar exponents (summing to kappa_1); rows 1 and 2
    give the residue eigenvalues of the block (jointly summing to
    kappa_2 + kappa_3).  With lower_only=True the block is lower triangular.
    """
    indices = [int(k) for k in indices]
    if len(indices) != 3 or not _sorted_desc(indices):
        raise InputError("need indices kappa_1 >= kappa_2 >= kappa_3")
    if indices[1] - indices[2] > 1:
        raise InputError("(1,2)-block needs kappa_2 - kappa_3 <= 1")
    return _block3(indices, eps, seed, singularities, lower_only, zero, top=False)


def generate_block21_3(indices, eps, seed, singularities=None, lower_only=False, zero=()):
    """(2,1)-block 3x3 system: a 2x2 block in components 1, 2 (with nonzero
    entry (2,1)) coupled upward to a scalar third component."""
    indices = [int(k) for k in indices]
    if len(indices) != 3 or not _sorted_desc(indices):
        raise InputError("need indices kappa_1 >= kappa_2 >= kappa_3")
    if indices[0] - indices[1] > 1:
        raise InputError("(2,1)-block needs kappa_1 - kappa_2 <= 1")
    return _block3(indices, eps, seed, singularities, lower_only, zero, top=True)


def _block3(indices, eps, seed, singularities, lower_only, zero, top):
    rng = np.random.default_rng(seed)
    a = default_singularities(np.shape(eps)[1]) if singularities is None else check_singularities(singularities)
    m = len(a)
    eps = _check_table(eps, 3, m)
    single = 2 if top else 0
    bi, bj = (0, 1) if top else (1, 2)
    if abs(eps[single].sum() - indices[single]) > 1e-9:
        raise InputError("scalar exponents must sum to kappa_%d" % (single + 1))
    if abs(eps[bi].sum() + eps[bj].sum() - indices[bi] - indices[bj]) > 1e-9:
        raise InputError("block exponents must sum to kappa_%d + kappa_%d" % (bi + 1, bj + 1))
    if lower_only:
        for r in (bi, bj):
            if abs(eps[r].sum() - indices[r]) > 1e-9:
                raise InputError("triangular block needs row sums equal to the indices")
    num = _alloc(3, m, indices)
    num[single, single, :m] = diagonal_numerator(a, eps[single])
    Nii, Nij, Nji, Njj = _coupled_block(a, indices[bi], indices[bj], eps[bi], eps[bj], rng, lower_only)
    for (r, c), poly in (((bi, bi), Nii), ((bi, bj), Nij), ((bj, bi), Nji), ((bj, bj), Njj)):
        poly = poly_trim(poly)
        num[r, c, :len(poly)] = poly
    zero = set(map(tuple, zero))
    for r, c in ((0, 1), (0, 2), (1, 2)):
        if (r, c) in ((bi, bj),) or (r, c) in zero:
            continue
        deg = m - 2 + indices[r] - indices[c]
        num[r, c, :deg + 1] = random_poly(rng, deg) if deg >= 0 else 0
    shape = "block21" if top else "block12"
    return _finish(a, indices, num, {"shape": shape, "seed": seed, "lower_only": lower_only})


def generate_extremal(n, m, kappa_n, eps, seed, singularities=None, alphas=None):
    """System of the extremal shape: indices kappa_n + (n-1-i)(m-2), constant
    nonzero subdiagonal, zero below it, diagonal residue exponents from eps
    (an n x m table; only the eigenvalues at each point matter)."""
    if n not in (2, 3):
        raise InputError("extremal generator supports n = 2, 3")
    if m < 3:
        raise InputError("extremal generator needs m >= 3")
    rng = np.random.default_rng(seed)
    a = default_singularities(m) if singularities is None else check_singularities(singularities)
    if len(a) != m:
        raise InputError("need m singularities")
    eps = _check_table(eps, n, m)
    indices = [int(kappa_n) + (n - 1 - i) * (m - 2) for i in range(n)]
    need = n * (n - 1) // 2 * (m - 2) + n * int(kappa_n)
    if abs(eps.sum() - need) > 1e-9:
        raise InputError("exponents must sum to %d" % need)
    if alphas is None:
        # moduli kept in [0.75, 1.25]: small constants give nearly reducible,
        # badly conditioned systems
        alphas = [rng.uniform(0.75, 1.25) * np.exp(2j * np.pi * rng.uniform()) for _ in range(n - 1)]
    if any(abs(x) < 1e-12 for x in alphas):
        raise InputError("subdiagonal constants must be nonzero")
    dp = np.array([np.prod([a[k] - a[l] for l in range(m) if l != k]) for k in range(m)])
    num = _alloc(n, m, indices)
    # diagonal: random split of the prescribed residue traces
    tr_num = poly_pad(diagonal_numerator(a, eps.sum(axis=0)), m)
    diag = []
    rest = tr_num.copy()
    for i in range(n - 1):
        d = poly_pad(random_poly(rng, m - 2), m)
        d[m - 1] += indices[i]
        diag.append(d)
        rest = rest - d
    diag.append(rest)
    for i in range(n):
        num[i, i, :m] = diag[i]
    for i in range(n - 1):
        num[i + 1, i, 0] = alphas[i]
    dv = [horner(d, a) for d in diag]
    # elementary symmetric functions of the prescribed eigenvalues, scaled
    if n == 2:
        det_target = eps[0] * eps[1] * dp ** 2
        vals12 = (dv[0] * dv[1] - det_target) / alphas[0]
        num[0, 1, :] = _fit(a, vals12, 2 * (m - 2), rng, num.shape[2])
    else:
        e2 = (eps[0] * eps[1] + eps[0] * eps[2] + eps[1] * eps[2]) * dp ** 2
        e3 = eps[0] * eps[1] * eps[2] * dp ** 3
        p12 = poly_pad(random_poly(rng, 2 * (m - 2)), num.shape[2])
        num[0, 1, :] = p12
        v12 = horner(p12, a)
        # e2 = d0 d1 + d0 d2 + d1 d2 - a1 N12 - a2 N23
        v23 = (dv[0] * dv[1] + dv[0] * dv[2] + dv[1] * dv[2] - alphas[0] * v12 - e2) / alphas[1]
        num[1, 2, :] = _fit(a, v23, 2 * (m - 2), rng, num.shape[2])
        v23 = horner(num[1, 2], a)
        # det = d0 d1 d2 - a1 N12 d2 - a2 N23 d0 + a1 a2 N13
        v13 = (e3 - dv[0] * dv[1] * dv[2] + alphas[0] * v12 * dv[2] + alphas[1] * v23 * dv[0]) / (alphas[0] * alphas[1])
        num[0, 2, :] = _fit(a, v13, 3 * (m - 2), rng, num.shape[2])
    A = _finish(a, indices, num, {"shape": "extremal", "seed": seed})
    return A


def _fit(a, values, degree, rng, length):
    """Random polynomial of the given degree taking the given values at a."""
    m = len(a)
    base = interpolate(a, values, m - 1)
    if degree > m - 1:
        base = P.polyadd(base, P.polymul(P.polyfromroots(a), random_poly(rng, degree - m)))
    elif degree < m - 1:
        raise InputError("degree too small to interpolate")
    return poly_pad(base, length)


SHAPES = ("triangular", "block12", "block21", "pattern", "extremal")


def generate(shape, indices, seed=0, m=3, p=2.0, couplings=None, singularities=None):
    """Draw exponents in the branch interval for p and build a system of the
    given shape.  For "extremal" only indices[-1] is used (the others follow
    from it); for "pattern" the indices are per component, in any order."""
    from .symbol import branch_interval
    rng = np.random.default_rng(seed)
    indices = [int(k) for k in indices]
    n = len(indices)
    J = branch_interval(p)
    a = default_singularities(m) if singularities is None else check_singularities(singularities)
    m = len(a)
    if shape == "extremal":
        kn = indices[-1]
        need = n * (n - 1) // 2 * (m - 2) + n * kn
        eps = random_exponent_table(rng, n, m, total=need, J=J, generic=True)
        return _tag(generate_extremal(n, m, kn, eps, seed, a), p, eps)
    if shape in ("block12", "block21"):
        single = 0 if shape == "block12" else 2
        pair = [1, 2] if shape == "block12" else [0, 1]
        eps = np.zeros((3, m), dtype=complex)
        for _ in range(1000):
            eps[single] = random_exponent_table(rng, 1, m, row_sums=[indices[single]], J=J)[0]
            # the block rows only share a total; each row sum stays non-integral
            eps[pair] = random_exponent_table(rng, 2, m, total=indices[pair[0]] + indices[pair[1]], J=J,
                                              generic=True)
            if exponents_generic(eps.real, mixed_only=True):
                break
        else:
            raise InputError("could not draw generic block exponents")
        gen = generate_block12_3 if shape == "block12" else generate_block21_3
        return _tag(gen(indices, eps, seed, a), p, eps)
    eps = random_exponent_table(rng, n, m, row_sums=indices, J=J, generic=True)
    if shape == "triangular":
        if n == 2:
            return _tag(generate_triangular_2(indices, eps, seed, a), p, eps)
        if n == 3:
            return _tag(generate_triangular_3(indices, eps, seed, a), p, eps)
    elif shape == "pattern":
        if couplings is None:
            raise InputError("pattern shape needs a coupling list")
        return _tag(generate_pattern(indices, eps, couplings, seed, a), p, eps)
    raise InputError("unknown shape %r for n = %d" % (shape, n))


def _tag(A, p, eps):
    A.meta.update(p=float(p), exponents=np.asarray(eps))
    return A


# --- scalar equations ------------------------------------------------------------

def falling(x, k):
    out = 1.0 + 0j
    for i in range(k):
        out = out * (x - i)
    return out


def falling_coefficients(n, k):
    """Monomial coefficients (ascending) of x(x-1)...(x-k+1)."""
    return P.polyfromroots(np.arange(k)) if k > 0 else np.ones(1)


def indicial_coefficients(exponents):
    """Coefficients (r_1..r_n) with prod (x - rho_j) = sum_k r_k x^(n-k falling),
    r_0 = 1."""
    n = len(exponents)
    target = poly_pad(P.polyfromroots(exponents), n + 1)
    B = np.zeros((n + 1, n + 1), dtype=complex)
    for k in range(n + 1):
        B[:, k] = poly_pad(falling_coefficients(n, n - k), n + 1)
    r = np.linalg.solve(B, target)
    return r[1:] / r[0]


@dataclass
class ScalarFuchsEq:
    """y^(n) + q_1 y^(n-1) + ... + q_n y = 0 with q_j = r_j(z) / p(z)^j."""
    a: np.ndarray
    r: list  # r[j-1] is the numerator polynomial of q_j
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.a = check_singularities(self.a)
        self.r = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in self.r]
        self.den = P.polyfromroots(self.a)

    @property
    def n(self):
        return len(self.r)

    @property
    def m(self):
        return len(self.a)

    def q(self, j, z):
        z = np.asarray(z, dtype=complex)
        return P.polyval(z, self.r[j - 1]) / P.polyval(z, self.den) ** j

    def local_coefficients(self, k):
        """lim (z - a_k)^j q_j(z) for j = 1..n."""
        ak = self.a[k]
        d = np.prod([ak - self.a[l] for l in range(self.m) if l != k])
        return np.array([P.polyval(ak, self.r[j - 1]) / d ** j for j in range(1, self.n + 1)])

    def infinity_coefficients(self):
        """lim z^j q_j(z) for j = 1..n (requires deg r_j <= j(m-1))."""
        out = []
        for j in range(1, self.n + 1):
            c = poly_trim(self.r[j - 1], 0.0)
            if poly_degree(c, 1e-13 * (1 + np.max(np.abs(c)))) > j * (self.m - 1):
                raise NotFuchsianAt("infinity")
            out.append(c[j * (self.m - 1)] if len(c) > j * (self.m - 1) else 0.0)
        return np.array(out, dtype=complex)

    def companion(self):
        """First-order system for W = (y^(n-1), ..., y', y)."""
        n = self.n
        den = np.atleast_1d(P.polypow(self.den, n))
        D = max(len(den), max(len(P.polymul(self.r[j - 1], P.polypow(self.den, n - j))) for j in range(1, n + 1)))
        num = np.zeros((n, n, D), dtype=complex)
        for j in range(1, n + 1):
            c = -P.polymul(self.r[j - 1], P.polypow(self.den, n - j))
            num[0, j - 1, :len(c)] = c
        for i in range(1, n):
            num[i, i - 1, :len(den)] = den
        return MatrixFunction(num, den, poles=self.a)


def indicial_exponents(eq, k):
    """Roots of the indicial polynomial at a_k, or at infinity for k = 'inf'."""
    n = eq.n
    if k == "inf":
        s = eq.infinity_coefficients()
        # y ~ z^(-rho): sum_j s_j falling(-rho, n-j) = 0
        poly = np.zeros(n + 1, dtype=complex)
        for j in range(n + 1):
            coef = 1.0 if j == 0 else s[j - 1]
            f = falling_coefficients(n, n - j)
            # substitute x = -rho
            f = f * (-1.0) ** np.arange(len(f))
            poly[:len(f)] += coef * f
        return np.sort_complex(P.polyroots(poly))
    # q_j has a pole of order at most j at a_k by construction
    r = eq.local_coefficients(k)
    poly = poly_pad(falling_coefficients(n, n), n + 1)
    for j in range(1, n + 1):
        poly += r[j - 1] * poly_pad(falling_coefficients(n, n - j), n + 1)
    return np.sort_complex(P.polyroots(poly))


def fuchs_relation_check(eq):
    """|sum of all local exponents - (points - 2) n (n-1)/2|, counting
    infinity as one of the points (an ordinary point contributes 0..n-1)."""
    n, m = eq.n, eq.m
    total = sum(np.sum(indicial_exponents(eq, k)) for k in range(m))
    total += np.sum(indicial_exponents(eq, "inf"))
    return float(abs(total - (m + 1 - 2) * n * (n - 1) / 2))


def accessory_count(n, m):
    return (m - 2) * n * (n + 1) // 2 - (m - 1) * n + 1


def _derivative_transform(n):
    """b[k][l]: polynomial in w with d^k/dz^k = sum_l b[k][l](w) d^l/dw^l."""
    b = [[np.zeros(1, dtype=complex) for _ in range(n + 1)] for _ in range(n + 1)]
    b[0][0] = np.ones(1, dtype=complex)
    w2 = np.array([0, 0, -1], dtype=complex)  # -w^2
    for k in range(n):
        for l in range(n + 1):
            c = b[k][l]
            if not np.any(c):
                continue
            # -w^2 d/dw (c(w) D^l) = -w^2 c'(w) D^l - w^2 c(w) D^(l+1)
            b[k + 1][l] = P.polyadd(b[k + 1][l], P.polymul(w2, P.polyder(c) if len(c) > 1 else [0]))
            if l + 1 <= n:
                b[k + 1][l + 1] = P.polyadd(b[k + 1][l + 1], P.polymul(w2, c))
    return b


def _laurent_matrix(a, j, deg_r, order):
    """Matrix L with (Laurent coefficients of r(z)/p(z)^j in w = 1/z up to
    w^(order-1)) = L @ coefficients of r."""
    m = len(a)
    # 1/p^j = w^(jm) prod (1 - a_k w)^(-j)
    series = np.ones(1, dtype=complex)
    for ak in a:
        geo = np.array([(ak) ** t for t in range(order + 1)], dtype=complex)
        geo_j = np.ones(1, dtype=complex)
        for _ in range(j):
            geo_j = P.polymul(geo_j, geo)[:order + 1]
        series = P.polymul(series, geo_j)[:order + 1]
    series = poly_pad(series, order + 1)
    L = np.zeros((order, deg_r + 1), dtype=complex)
    for s in range(order):
        for i in range(deg_r + 1):
            t = s - j * m + i
            if 0 <= t <= order:
                L[s, i] = series[t]
    return L


@dataclass
class AccessoryFamily:
    a: np.ndarray
    exponents: list
    particular: np.ndarray
    direction: np.ndarray
    degrees: list
    residual: float

    @property
    def n(self):
        return len(self.degrees)

    def equation(self, t):
        x = self.particular + t * self.direction
        r, pos = [], 0
        for d in self.degrees:
            r.append(x[pos:pos + d + 1].copy())
            pos += d + 1
        return ScalarFuchsEq(self.a, r, {"accessory": complex(t)})

    def parameter_of(self, eq):
        """Projection of an equation of the family onto the parameter."""
        x = np.concatenate([poly_pad(c, d + 1) for c, d in zip(eq.r, self.degrees)])
        return complex(np.vdot(self.direction, x - self.particular) / np.vdot(self.direction, self.direction))


def accessory_family(n, singularities, exponents, tol=1e-9):
    """One-parameter family of order-n equations with prescribed exponents at
    the finite singularities and an ordinary point at infinity."""
    a = check_singularities(singularities)
    m = len(a)
    exponents = [np.asarray(e, dtype=complex) for e in exponents]
    if len(exponents) != m or any(len(e) != n for e in exponents):
        raise InputError("need %d exponents at each of %d points" % (n, m))
    if accessory_count(n, m) != 1:
        raise InputError("the family has %d free parameters; only one is supported" % accessory_count(n, m))
    need = (m - 2) * n * (n - 1) / 2
    have = sum(e.sum() for e in exponents)
    if abs(have - need) > 1e-9:
        raise FuchsViolation("exponent sum %r differs from %r" % (have, need))
    degrees = [j * (m - 1) for j in range(1, n + 1)]
    offsets = np.cumsum([0] + [d + 1 for d in degrees])
    U = offsets[-1]
    rows, rhs = [], []
    # local exponents
    for k in range(m):
        coef = indicial_coefficients(exponents[k])
        d = np.prod([a[k] - a[l] for l in range(m) if l != k])
        for j in range(1, n + 1):
            row = np.zeros(U, dtype=complex)
            row[offsets[j - 1]:offsets[j]] = a[k] ** np.arange(degrees[j - 1] + 1)
            rows.append(row)
            rhs.append(coef[j - 1] * d ** j)
    # ordinary point at infinity: sum_j q_j b[n-j][l] = O(w^(2n)) for l < n
    order = 2 * n
    b = _derivative_transform(n)
    Ls = [_laurent_matrix(a, j, degrees[j - 1], order) for j in range(1, n + 1)]
    for l in range(n):
        for e in range(order):
            row = np.zeros(U, dtype=complex)
            const = 0.0
            for j in range(0, n + 1):
                bc = poly_pad(b[n - j][l], order)
                for u in range(e + 1):
                    if bc[u] == 0:
                        continue
                    if j == 0:
                        const += bc[u] * (1.0 if e - u == 0 else 0.0)
                    else:
                        row[offsets[j - 1]:offsets[j]] += bc[u] * Ls[j - 1][e - u]
            if np.any(row) or const != 0:
                rows.append(row)
                rhs.append(-const)
    K = np.array(rows)
    y = np.array(rhs)
    x, *_ = np.linalg.lstsq(K, y, rcond=None)
    residual = float(np.linalg.norm(K @ x - y))
    if residual > tol * (1 + np.linalg.norm(y)):
        raise FuchsViolation("exponents admit no equation with an ordinary point at infinity")
    _, s, vh = np.linalg.svd(K)
    rank = int(np.sum(s > 1e-10 * s[0]))
    null = vh[rank:].conj().T
    if null.shape[1] != 1:
        raise FuchsViolation("expected one accessory parameter, found %d" % null.shape[1])
    v = null[:, 0]
    v = v / v[np.argmax(np.abs(v))] * np.abs(v[np.argmax(np.abs(v))])
    v = v / np.linalg.norm(v)
    # make the particular solution orthogonal to the direction
    x = x - v * np.vdot(v, x)
    return AccessoryFamily(a, exponents, x, v, degrees, residual)
