"""Partial indices from the reducibility report.

Each result records a short tag for the rule that produced it.  Cases that the data do not
settle are returned either as a Dichotomy carrying a resolver request (the
decision is then a monodromy question for a scalar Fuchsian equation) or as
Constraints (gap bound and sum only).
"""
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import linalg as la
from .errors import InputError
from .resolver import ResolverRequest


@dataclass
class GapBound:
    """Indices kappa_1 >= ... >= kappa_n of irreducible data satisfy
    kappa_k - kappa_(k+1) <= m - 2."""
    n: int
    m: int

    @property
    def gap(self):
        return self.m - 2

    def __call__(self, indices):
        ks = list(indices)
        return all(ks[i] - ks[i + 1] <= self.gap for i in range(len(ks) - 1))

    def to_json(self):
        return {"n": self.n, "m": self.m, "max_gap": self.gap}


def gap_bounded_vectors(n, m, kappa):
    """All non-increasing integer vectors of length n with sum kappa and
    consecutive gaps at most m - 2."""
    g = m - 2
    if g < 0:
        return []
    out = []
    for gaps in product(range(g + 1), repeat=n - 1):
        # kappa_j = base + sum of the gaps after j
        tail = [sum(gaps[j:]) for j in range(n)]
        rest = kappa - sum(tail)
        if rest % n == 0:
            base = rest // n
            out.append(tuple(base + t for t in tail))
    return sorted(out, reverse=True)


@dataclass
class IndexResult:
    kind: str  # determined | dichotomy | constraints
    indices: tuple = None
    options: tuple = None
    request: ResolverRequest = None
    constraint: GapBound = None
    kappa: int = None
    rule: str = ""
    candidates: list = field(default_factory=list)

    def to_json(self):
        out = {"kind": self.kind, "kappa": self.kappa, "rule": self.rule}
        if self.kind == "determined":
            out["indices"] = list(self.indices)
        elif self.kind == "dichotomy":
            out["options"] = [list(o) for o in self.options]
            out["resolver_request"] = self.request.to_json() if self.request is not None else None
        else:
            out["max_gap"] = self.constraint.gap
            out["sum"] = self.kappa
            out["candidates"] = [list(c) for c in self.candidates]
        return out


def determined(indices, rule, kappa=None):
    ks = tuple(int(k) for k in indices)
    if any(ks[i] < ks[i + 1] for i in range(len(ks) - 1)):
        raise AssertionError("indices %r are not sorted (%s)" % (ks, rule))
    if kappa is not None and sum(ks) != kappa:
        raise AssertionError("indices %r do not sum to %d (%s)" % (ks, kappa, rule))
    return IndexResult("determined", ks, kappa=sum(ks), rule=rule)


def split_two(total):
    """(ceil(total/2), floor(total/2))."""
    return (-((-total) // 2), total // 2)


def constraints(n, m, kappa, rule):
    cands = gap_bounded_vectors(n, m, kappa)
    if len(cands) == 1:
        return determined(cands[0], rule + "; unique vector within the gap bound", kappa)
    return IndexResult("constraints", kappa=kappa, constraint=GapBound(n, m), rule=rule,
                       candidates=cands)


def exponent_payload(Es, kappa, n):
    """Eigenvalues of each E_k, with the last point shifted by 1 - kappa/n."""
    ex = [np.sort_complex(np.linalg.eigvals(E)) for E in Es]
    shift = 1 - kappa / n
    ex[-1] = ex[-1] + shift
    return [list(e) for e in ex]


# --- 2x2 ---------------------------------------------------------------------------

def indices_2xm(report, kappa, m, Ms=None, Es=None, points=None):
    t, ints = report.type, report.integers
    if t == "C" or (t == "B" and ints["n1"] >= ints["n2"]):
        return determined((ints["n1"], ints["n2"]), "2x2-reducible", kappa)
    if m == 3:
        return indices_2x3(report, kappa)
    if m == 4:
        return indices_2x4(report, kappa, Ms, Es, points)
    return constraints(2, m, kappa, "2x2, %d points: gap bound only" % m)


def indices_2x3(report, kappa):
    if kappa % 2:
        return determined(((kappa + 1) // 2, (kappa - 1) // 2), "2x2-3pt-odd", kappa)
    return determined((kappa // 2, kappa // 2), "2x2-3pt-even", kappa)


def indices_2x4(report, kappa, Ms=None, Es=None, points=None):
    if kappa % 2:
        return determined(((kappa + 1) // 2, (kappa - 1) // 2), "2x2-4pt-odd", kappa)
    if Ms is not None and any(la.minimal_poly_degree(M) == 1 for M in Ms):
        return determined((kappa // 2, kappa // 2), "2x2-4pt-scalar-jump", kappa)
    balanced = (kappa // 2, kappa // 2)
    extremal = (kappa // 2 + 1, kappa // 2 - 1)
    req = None
    if Ms is not None and Es is not None:
        req = ResolverRequest(2, 4, [np.asarray(M) for M in Ms], exponent_payload(Es, kappa, 2),
                              _points(points, 4), kappa, balanced, extremal)
    return IndexResult("dichotomy", options=(balanced, extremal), request=req, kappa=kappa,
                       rule="2x2-4pt-even")


def _points(points, m):
    if points is None:
        return np.exp(2j * np.pi * np.arange(m) / m)
    return np.asarray(points, dtype=complex)


# --- 3x3 ---------------------------------------------------------------------------

def indices_3x3(report, kappa, Ms=None, Es=None, points=None):
    t, x = report.type, report.integers
    if t in ("B1", "B3") and 2 * x["nu"] >= x["N"]:
        return determined((x["nu"],) + split_two(x["N"]), "line-first", kappa)
    if t in ("B2", "B3") and 2 * x["nu"] <= x["N"]:
        return determined(split_two(x["N"]) + (x["nu"],), "plane-first", kappa)
    if t in ("C", "C1", "C2", "D"):
        n1, n2, n3 = x["n1"], x["n2"], x["n3"]
        if (t == "C" and n1 >= n2 >= n3) or (t == "C1" and n2 >= n3) or (t == "C2" and n1 >= n2) or t == "D":
            return determined((n1, n2, n3), "flag", kappa)
        if t in ("C", "C1") and n2 < n3 and 2 * n1 >= n2 + n3:
            return determined((n1,) + split_two(n2 + n3), "line-over-block", kappa)
        if t in ("C", "C2") and n1 < n2 and n1 + n2 >= 2 * n3:
            return determined(split_two(n1 + n2) + (n3,), "block-over-quotient", kappa)
    if t == "C3":
        v1, v2, vs = x["nu1"], x["nu2"], x["nu_sharp"]
        if v1 >= v2:
            return determined(sorted((v1, v2, vs), reverse=True), "c3-flag", kappa)
        if 2 * vs >= v1 + v2:
            return determined((vs,) + split_two(v1 + v2), "c3-line-over-block", kappa)
        return determined(split_two(v1 + v2) + (vs,), "c3-block-over-quotient", kappa)
    return residual_3x3(report, kappa, Ms, Es, points)


def residual_3x3(report, kappa, Ms=None, Es=None, points=None):
    """Data outside every block or triangular rule: gaps are at most one, so
    only the total index mod 3 matters, with one open case."""
    r = kappa % 3
    if r == 1:
        return determined(((kappa + 2) // 3, (kappa - 1) // 3, (kappa - 1) // 3), "residual-1mod3", kappa)
    if r == 2:
        return determined(((kappa + 1) // 3, (kappa + 1) // 3, (kappa - 2) // 3), "residual-2mod3", kappa)
    q = kappa // 3
    if Ms is not None and any(la.minimal_poly_degree(M) <= 2 for M in Ms):
        return determined((q, q, q), "residual-0mod3-low-minpoly", kappa)
    balanced, extremal = (q, q, q), (q + 1, q, q - 1)
    req = None
    if Ms is not None and Es is not None:
        req = ResolverRequest(3, 3, [np.asarray(M) for M in Ms], exponent_payload(Es, kappa, 3),
                              _points(points, 3), kappa, balanced, extremal)
    return IndexResult("dichotomy", options=(balanced, extremal), request=req, kappa=kappa,
                       rule="residual-0mod3")


def compute_indices(report, data, points=None):
    """Dispatch on (n, m)."""
    n, m, kappa = data.n, data.m, data.kappa
    if n == 1:
        return determined((kappa,), "scalar", kappa)
    if n == 2:
        if m <= 2:
            if report.type == "C" or (report.type == "B" and report.integers["n1"] >= report.integers["n2"]):
                return indices_2xm(report, kappa, m)
            return constraints(2, m, kappa, "2x2, %d points" % m)
        return indices_2xm(report, kappa, m, data.Ms, data.Es, points)
    if n == 3:
        if m == 3:
            return indices_3x3(report, kappa, data.Ms, data.Es, points)
        return constraints(3, m, kappa, "3x3, %d points: no case table" % m)
    raise InputError("only n <= 3 is supported")

