"""Oracle and property checks for the whole pipeline.

Each check draws its own random instances from a seed, compares the engine
against an independent reference (a closed form, the indices a generator
was built with, or an algebraic identity) and returns a CheckResult.  The
acceptance tests run them at full size; ``pcindex selftest`` runs a small
subset.
"""
import time
from dataclasses import dataclass, field

import numpy as np

from . import fuchsian as fu
from . import linalg as la
from .errors import PCIndexError
from .indices import compute_indices, gap_bounded_vectors
from .integrate import IntegratorConfig
from .monodromy import factor_assembly, monodromy, symbol_from_system
from .reducibility import classify
from .resolver import ResolverRequest, family_monodromy, resolve
from .symbol import PiecewiseSymbol, branch_interval, extract_data, factorization_residual, scalar_factorize


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    count: int
    seconds: float = 0.0
    failures: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        worst = "-" if self.worst is None else "%.2e" % self.worst
        return "%s  %-34s n=%-4d worst=%s (limit %.0e)  %.1fs" % (
            tag, self.name, self.count, worst, self.threshold, self.seconds)

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "worst": self.worst, "threshold": self.threshold,
                "count": self.count, "seconds": round(self.seconds, 3), "failures": self.failures[:10],
                "extra": self.extra}


def _timed(fn):
    def run(*args, **kwargs):
        t = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def pipeline(A, p=2.0, cfg=None):
    """system -> symbol -> data -> report -> index result."""
    sym = symbol_from_system(A, p, cfg)
    data = extract_data(sym)
    rep = classify(data)
    return data, rep, compute_indices(rep, data, A.a)


def _circle_points(rng, m, gap=0.3):
    while True:
        th = np.sort(rng.uniform(0, 2 * np.pi, m))
        d = np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))
        if m == 1 or d.min() > gap:
            return np.exp(1j * th)


# --- monodromy ---------------------------------------------------------------------

@_timed
def scalar_oracle(count=100, seed=0, cfg=None, tol=1e-8):
    """chi_k = exp(-2 pi i eps_k) for a(z) = sum eps_k / (z - a_k)."""
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(count):
        m = int(rng.integers(1, 5))
        a = _circle_points(rng, m)
        eps = fu.random_disk(rng, m) * 0.9
        F = fu.MatrixFunction(fu.diagonal_numerator(a, eps)[None, None, :], np.polynomial.polynomial.polyfromroots(a), a)
        mono = monodromy(F, cfg=cfg)
        err = max(abs(c[0, 0] - np.exp(-2j * np.pi * e)) for c, e in zip(mono.chis, eps))
        worst = max(worst, err)
        if not err < tol:
            fails.append({"draw": i, "m": m, "error": err})
    return CheckResult("scalar monodromy oracle", not fails, worst, tol, count, failures=fails)


# index choices for which every shape below has exponents within reach (p = 2)
_EXTREMAL_KN = {(2, 3): (-1, 0), (2, 4): (-2, -1, 0), (3, 3): (-2, -1, 0), (3, 4): (-3, -2, -1)}


def _sorted_draw(rng, n, values=(-1, 0, 1)):
    return sorted((int(v) for v in rng.choice(values, n)), reverse=True)


def random_system(rng, seed):
    """A validated standard-form system with n <= 3, m <= 4 of a random shape."""
    kind = rng.choice(["scalar", "tri2", "ext2", "tri3", "block12", "block21", "ext3"])
    m = int(rng.choice([3, 4]))
    if kind == "scalar":
        m = int(rng.integers(2, 5))
        k = int(rng.integers(-((m - 1) // 2), (m - 1) // 2 + 1))
        eps = fu.random_exponent_table(rng, 1, m, row_sums=[k])
        a = fu.default_singularities(m)
        return fu.RationalSystem(a, [k], fu.diagonal_numerator(a, eps[0])[None, None, :], {"shape": "scalar"})
    if kind == "tri2":
        return fu.generate("triangular", _sorted_draw(rng, 2), seed, m)
    if kind == "tri3":
        return fu.generate("triangular", _sorted_draw(rng, 3), seed, m)
    if kind in ("block12", "block21"):
        while True:
            ks = _sorted_draw(rng, 3)
            if (kind == "block12" and ks[1] - ks[2] <= 1) or (kind == "block21" and ks[0] - ks[1] <= 1):
                return fu.generate(kind, ks, seed, 3)
    n = 2 if kind == "ext2" else 3
    kn = int(rng.choice(_EXTREMAL_KN[(n, m)]))
    return fu.generate("extremal", [kn] * n, seed, m)


def product_sensitivity(chis):
    """First-order bound on how much relative perturbations of the factors
    move the product: sum over k of |prefix| |chi_k| |suffix|.  Times eps
    it is the defect that rounding the matrices alone can cause."""
    n = chis[0].shape[0]
    total = 0.0
    for k in range(len(chis)):
        pre, suf = np.eye(n), np.eye(n)
        for c in chis[:k]:
            pre = pre @ c
        for c in chis[k + 1:]:
            suf = suf @ c
        total += np.linalg.norm(pre, 2) * np.linalg.norm(chis[k], 2) * np.linalg.norm(suf, 2)
    return float(total)


@_timed
def product_identity(count=200, seed=1, cfg=None, tol=1e-8):
    """||chi_1 ... chi_m - I|| in angular order, plus the trace identity on
    the same systems."""
    rng = np.random.default_rng(seed)
    worst, fails, shapes = 0.0, [], {}
    for i in range(count):
        A = random_system(rng, seed * 100000 + i)
        mono = monodromy(A, cfg=cfg)
        d = mono.product_defect
        sh = A.meta.get("shape")
        shapes[sh] = shapes.get(sh, 0) + 1
        worst = max(worst, d)
        if not d < tol:
            floor = np.finfo(float).eps * product_sensitivity(mono.chis)
            fails.append({"draw": i, "shape": sh, "n": A.n, "m": A.m, "defect": d,
                          "max_chi_norm": max(float(np.linalg.norm(c, 2)) for c in mono.chis),
                          "rounding_floor": float(floor)})
    return CheckResult("monodromy product identity", not fails, worst, tol, count, failures=fails,
                       extra={"shapes": shapes})


@_timed
def trace_identity(count=200, seed=2, tol=1e-8):
    """|sum kappa_j - sum tr E_k| for generated systems, and the total index
    recovered from the reconstructed symbol equals the declared one."""
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(count):
        A = random_system(rng, seed * 100000 + i)
        d = fu.trace_identity_defect(A)
        worst = max(worst, d)
        if not d < tol:
            fails.append({"draw": i, "defect": d})
        if i % 4 == 0:
            data = extract_data(symbol_from_system(A))
            if data.kappa != A.kappa:
                fails.append({"draw": i, "kappa": data.kappa, "declared": A.kappa})
    return CheckResult("trace identity", not fails, worst, tol, count, failures=fails)


# --- index round trips ---------------------------------------------------------------

@_timed
def triangular_2x2_roundtrip(count=200, seed=3):
    rng = np.random.default_rng(seed)
    fails = []
    for i in range(count):
        m = int(rng.choice([3, 4]))
        ks = _sorted_draw(rng, 2)
        A = fu.generate("triangular", ks, seed * 100000 + i, m)
        _, rep, res = pipeline(A)
        if res.kind != "determined" or res.indices != tuple(ks):
            fails.append({"draw": i, "m": m, "declared": ks, "got": res.to_json()})
    return CheckResult("reducible 2x2 round trip", not fails, float(len(fails)), 0.5, count, failures=fails)


@_timed
def extremal_2x3(count=50, seed=4):
    rng = np.random.default_rng(seed)
    fails = []
    for i in range(count):
        kn = int(rng.choice(_EXTREMAL_KN[(2, 3)]))
        A = fu.generate("extremal", [kn, kn], seed * 100000 + i, 3)
        _, rep, res = pipeline(A)
        k = A.kappa
        expect = ((k + 1) // 2, (k - 1) // 2)
        if rep.type != "A" or res.kind != "determined" or res.indices != expect or expect != tuple(A.indices):
            fails.append({"draw": i, "declared": A.indices, "type": rep.type, "got": res.to_json()})
    return CheckResult("irreducible 2x2, three points", not fails, float(len(fails)), 0.5, count,
                       failures=fails)


@_timed
def dichotomy_2x4(count=25, seed=5, cfg=None):
    """Engine returns the dichotomy and the resolver confirms the extremal
    option, which is the declared index vector."""
    rng = np.random.default_rng(seed)
    fails, params, defects = [], [], []
    for i in range(count):
        kn = int(rng.choice(_EXTREMAL_KN[(2, 4)]))
        A = fu.generate("extremal", [kn, kn], seed * 100000 + i, 4)
        _, rep, res = pipeline(A)
        if res.kind != "dichotomy":
            fails.append({"draw": i, "got": res.to_json()})
            continue
        v = resolve(res.request, cfg)
        defects.append(v.coverage["best_defect"])
        if v.kind != "extremal_confirmed" or tuple(v.indices) != tuple(A.indices):
            fails.append({"draw": i, "declared": A.indices, "verdict": v.to_json()})
        else:
            params.append(abs(v.parameter))
    extra = {"max_parameter_modulus": max(params) if params else None,
             "max_match_defect": max(defects) if defects else None}
    return CheckResult("2x2 four-point dichotomy", not fails, float(len(fails)), 0.5, count, failures=fails,
                       extra=extra)


def _random_exponents(rng, n, m, spread=0.45):
    """Exponents at m points for an order-n family with an ordinary point at
    infinity: the Fuchs sum is spread over all entries."""
    while True:
        E = rng.uniform(-spread, spread, (m, n)) + 1j * rng.uniform(-0.05, 0.05, (m, n))
        E += ((m - 2) * n * (n - 1) / 2 - E.sum()) / (n * m)
        ok = True
        for row in E:
            for x in range(n):
                for y in range(x + 1, n):
                    d = row[x] - row[y]
                    if abs(d - np.round(d.real)) < 0.05:
                        ok = False
        if ok:
            return [list(r) for r in E]


@_timed
def planted_parameter(count=5, seed=6, cfg=None, tol=1e-4):
    """Monodromy of a family member at a known t0 is handed to the resolver,
    which must find t0 again."""
    rng = np.random.default_rng(seed)
    fails, worst = [], 0.0
    for i in range(count):
        a = fu.default_singularities(4)
        ex = _random_exponents(rng, 2, 4)
        fam = fu.accessory_family(2, a, ex)
        t0 = complex(fu.random_disk(rng) * 2.0)
        chis = family_monodromy(fam, [t0], cfg)[0]
        req = ResolverRequest(2, 4, list(chis), ex, a, 0, (0, 0), (1, -1))
        v = resolve(req, cfg)
        err = abs(v.parameter - t0) if v.kind == "extremal_confirmed" else np.inf
        worst = max(worst, err)
        if not err < tol:
            fails.append({"draw": i, "t0": [t0.real, t0.imag], "verdict": v.to_json()})
    return CheckResult("planted accessory parameter", not fails, worst, tol, count, failures=fails)


# instance plan for the 3x3 three-point tables: rule -> (shape, row sums, couplings)
TABLE_PLAN = {
    "line-first": [("block12", r, None) for r in
                   [(1, 0, 0), (0, 0, -1), (1, 1, 0), (0, 0, 0), (1, 0, -1), (-1, -1, -1)]],
    "plane-first": [("block21", r, None) for r in
                    [(1, 1, -1), (1, 0, 0), (0, 0, -1), (0, 0, 0), (1, 1, 1), (1, 0, -1)]],
    "flag": [("triangular", r, None) for r in [(1, 0, -1), (1, 1, 0), (0, -1, -1), (1, 1, 1), (0, 0, 0)]]
    + [("pattern", (1, 0, -1), [(0, 2), (1, 2)]), ("pattern", (1, 0, -1), [(0, 1), (0, 2)]),
       ("pattern", (1, 0, -1), [])],
    "c3-flag": [("pattern", r, c) for r, c in
                [((1, 0, 0), [(0, 1)]), ((1, 0, -1), [(0, 1)]), ((1, -1, 0), [(0, 2)]),
                 ((0, 1, -1), [(1, 2)]), ((1, 1, 0), [(1, 2)])]],
    "line-over-block": [("pattern", r, [(0, 1), (0, 2), (2, 1)]) for r in [(1, 0, -1), (1, 1, 0), (0, 0, -1)]]
    + [("pattern", (1, 0, -1), [(0, 1), (2, 1)])],
    "block-over-quotient": [("pattern", r, [(1, 0), (0, 2), (1, 2)]) for r in [(1, 0, -1), (0, -1, -1), (1, 0, 0)]]
    + [("pattern", (1, 0, -1), [(1, 0), (1, 2)])],
    "c3-line-over-block": [("pattern", r, [(2, 1)]) for r in [(1, 0, -1), (0, 0, -1), (1, 1, 0)]],
    "c3-block-over-quotient": [("pattern", r, [(1, 0)]) for r in [(1, 0, -1), (0, -1, -1), (1, 0, 0)]],
}


@_timed
def three_by_three_tables(per_rule=20, seed=7):
    """Forward-generated instances for every block/triangular rule; the
    engine must pick that rule and return the declared indices."""
    fails, counts, types = [], {}, {}
    for r, (rule, plan) in enumerate(TABLE_PLAN.items()):
        counts[rule] = 0
        for i in range(per_rule):
            shape, rows, couplings = plan[i % len(plan)]
            s = seed * 100000 + r * 1000 + i
            A = fu.generate(shape, rows, s, 3, couplings=couplings)
            _, rep, res = pipeline(A)
            expect = tuple(sorted(rows, reverse=True))
            types.setdefault(rule, set()).add(rep.type)
            if res.kind == "determined" and res.indices == expect and res.rule == rule:
                counts[rule] += 1
            else:
                fails.append({"rule": rule, "seed": s, "rows": list(rows), "type": rep.type,
                              "integers": rep.integers, "got": res.to_json()})
    total = per_rule * len(TABLE_PLAN)
    return CheckResult("3x3 three-point tables", not fails, float(len(fails)), 0.5, total, failures=fails,
                       extra={"matched": counts, "types": {k: sorted(v) for k, v in types.items()}})


@_timed
def gap_bound(count=60, seed=8):
    """Every index vector emitted for irreducible data (determined, either
    dichotomy option or constraint candidate) has gaps <= m - 2."""
    rng = np.random.default_rng(seed)
    fails, seen = [], 0
    shapes = [(2, 3), (2, 4), (2, 5), (3, 3)]
    for i in range(count):
        n, m = shapes[i % len(shapes)]
        if (n, m) == (2, 5):
            kn = int(rng.choice([-2, -1]))
        else:
            kn = int(rng.choice(_EXTREMAL_KN[(n, m)]))
        A = fu.generate("extremal", [kn] * n, seed * 100000 + i, m)
        _, rep, res = pipeline(A)
        if rep.type != "A":
            continue
        if res.kind == "determined":
            vecs = [res.indices]
        elif res.kind == "dichotomy":
            vecs = list(res.options)
        else:
            vecs = list(res.candidates)
        for v in vecs:
            seen += 1
            if any(v[j] - v[j + 1] > m - 2 for j in range(n - 1)) or sum(v) != A.kappa:
                fails.append({"draw": i, "n": n, "m": m, "vector": list(v)})
    return CheckResult("gap bound on irreducible data", not fails, float(len(fails)), 0.5, seen, failures=fails)


# --- factorizations ------------------------------------------------------------------

def random_scalar_symbol(rng, p=2.0):
    while True:
        m = int(rng.integers(1, 5))
        th = np.sort(rng.uniform(0, 2 * np.pi, m))
        if m > 1 and np.min(np.diff(np.concatenate([th, [th[0] + 2 * np.pi]]))) < 0.2:
            continue
        vals = [np.array([[np.exp(rng.normal(0, 0.5) + 1j * rng.uniform(-np.pi, np.pi))]]) for _ in range(m)]
        sym = PiecewiseSymbol(1, p, th, vals)
        try:
            extract_data(sym)
        except PCIndexError:
            continue
        return sym


@_timed
def scalar_factorization(count=100, seed=9, tol=1e-9):
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(count):
        sym = random_scalar_symbol(rng)
        fac = scalar_factorize(sym)
        r = factorization_residual(sym, fac.product, 64)
        worst = max(worst, r)
        if not r < tol:
            fails.append({"draw": i, "residual": r})
    return CheckResult("scalar factorization", not fails, worst, tol, count, failures=fails)


@_timed
def factor_assembly_2x2(count=50, seed=10, cfg=None, tol=1e-7):
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for i in range(count):
        m = int(rng.choice([3, 4]))
        if i % 2:
            A = fu.generate("triangular", _sorted_draw(rng, 2), seed * 100000 + i, m)
        else:
            kn = int(rng.choice(_EXTREMAL_KN[(2, m)]))
            A = fu.generate("extremal", [kn, kn], seed * 100000 + i, m)
        fa = factor_assembly(A, 2.0, cfg)
        worst = max(worst, fa.residual)
        if not fa.residual < tol:
            fails.append({"draw": i, "residual": fa.residual})
    return CheckResult("2x2 factor assembly", not fails, worst, tol, count, failures=fails)


# --- scalar equations ------------------------------------------------------------------

@_timed
def fuchs_relation(count=100, seed=11, tol=1e-9):
    """Every member of the accessory family satisfies the Fuchs relation and
    has the prescribed exponents, for both one-parameter shapes."""
    rng = np.random.default_rng(seed)
    worst, fails = 0.0, []
    for n, m in ((2, 4), (3, 3)):
        for i in range(count):
            a = _circle_points(rng, m, 0.5) if i % 2 else fu.default_singularities(m)
            ex = _random_exponents(rng, n, m)
            fam = fu.accessory_family(n, a, ex)
            t = complex(fu.random_disk(rng) * 5)
            eq = fam.equation(t)
            r = fu.fuchs_relation_check(eq)
            got = [fu.indicial_exponents(eq, k) for k in range(m)]
            err = max(_match(g, e) for g, e in zip(got, ex))
            worst = max(worst, r)
            if not r < tol or not err < 1e-8:
                fails.append({"shape": [n, m], "draw": i, "residual": r, "exponent_error": err})
    return CheckResult("Fuchs relation on accessory families", not fails, worst, tol, 2 * count, failures=fails)


def _match(got, want):
    got, want = list(got), list(want)
    err = 0.0
    for w in want:
        j = int(np.argmin([abs(g - w) for g in got]))
        err = max(err, abs(got.pop(j) - w))
    return err


# --- classification ------------------------------------------------------------------

def classification_instances(seed=12):
    """Data of every reducibility type, from the generators."""
    out = []
    plan = [
        ("extremal", (0, 0), None, 3, "A"), ("triangular", (1, 0), None, 3, "B"),
        ("extremal", (0, 0, 0), None, 3, "A"), ("block12", (1, 0, 0), None, 3, "B1"),
        ("block21", (1, 1, -1), None, 3, "B2"), ("triangular", (1, 0, -1), None, 3, "C"),
        ("pattern", (1, 0, -1), [(0, 2), (1, 2)], 3, "C1"), ("pattern", (1, 0, -1), [(0, 1), (0, 2)], 3, "C2"),
        ("pattern", (1, 0, -1), [(0, 1)], 3, "C3"), ("pattern", (1, 0, -1), [], 3, "D"),
    ]
    for i, (shape, ks, cp, m, kind) in enumerate(plan):
        A = fu.generate(shape, ks, seed * 1000 + i, m, couplings=cp)
        out.append((kind, extract_data(symbol_from_system(A))))
    # 2x2 diagonal data (type C) and a block-diagonal 3x3 tuple (type B3)
    a = fu.default_singularities(3)
    rng = np.random.default_rng(seed)
    eps = fu.random_exponent_table(rng, 2, 3, row_sums=[1, 0], generic=True)
    A = fu.RationalSystem(a, [1, 0], np.stack([np.stack([fu.diagonal_numerator(a, eps[0]), np.zeros(3)]),
                                               np.stack([np.zeros(3), fu.diagonal_numerator(a, eps[1])])]))
    out.append(("C", extract_data(symbol_from_system(A))))
    A = fu.generate_block12_3([1, 0, 0], _block_table(rng), seed, zero=[(0, 1), (0, 2)])
    out.append(("B3", extract_data(symbol_from_system(A))))
    return out


def _block_table(rng):
    eps = np.zeros((3, 3), dtype=complex)
    while True:
        eps[0] = fu.random_exponent_table(rng, 1, 3, row_sums=[1])[0]
        eps[1:] = fu.random_exponent_table(rng, 2, 3, total=0, generic=True)
        if fu.exponents_generic(eps.real, mixed_only=True):
            return eps


def random_conjugator(rng, n, cond=20.0):
    while True:
        C = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if np.linalg.cond(C) < cond:
            return C


@_timed
def classification_invariance(per_instance=100, seed=13):
    rng = np.random.default_rng(seed)
    fails, total, types = [], 0, []
    for kind, data in classification_instances():
        ref = classify(data).signature()
        types.append(ref[0])
        if ref[0] != kind:
            fails.append({"expected_type": kind, "got": ref[0]})
        for _ in range(per_instance):
            total += 1
            C = random_conjugator(rng, data.n)
            sig = classify(data.conjugated(C)).signature()
            if sig != ref:
                fails.append({"type": kind, "reference": str(ref), "conjugated": str(sig)})
    return CheckResult("classification under conjugation", not fails, float(len(fails)), 0.5, total,
                       failures=fails, extra={"types": types})


FAST = [
    (scalar_oracle, dict(count=10), True),
    (product_identity, dict(count=10), True),
    (trace_identity, dict(count=10), False),
    (triangular_2x2_roundtrip, dict(count=10), False),
    (extremal_2x3, dict(count=5), False),
    (three_by_three_tables, dict(per_rule=2), False),
    (gap_bound, dict(count=8), False),
    (scalar_factorization, dict(count=10), False),
    (fuchs_relation, dict(count=5), False),
    (classification_invariance, dict(per_instance=5), False),
]


def fast_subset(cfg=None):
    """Small version of the acceptance checks, for ``pcindex selftest``."""
    out = []
    for fn, kw, takes_cfg in FAST:
        if takes_cfg and cfg is not None:
            kw = dict(kw, cfg=cfg)
        out.append(fn(**kw))
    return out
