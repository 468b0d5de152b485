"""Numerical resolution of the open index cases by a one-parameter scan.

The extremal option holds exactly when the target tuple is the monodromy
of a scalar Fuchsian equation with prescribed local exponents.  Those
equations form a one-parameter family (the accessory parameter t); the
resolver scans a disk of t values, compares monodromy fingerprints with the
target and polishes the best candidates: Gauss-Newton with finite
difference derivatives first, Nelder-Mead when that stalls.

A failed scan does not prove that no parameter exists: it is reported as
unresolved together with the scan coverage.
"""
import logging
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import linalg as la
from .errors import NumericalError

log = logging.getLogger(__name__)

SCAN_RADIUS = 5.0
GRID = 41
TOL_MATCH = 1e-7


def scan_config():
    """Integrator settings for the parameter scan: looser than the default,
    still far below the match tolerance."""
    from .integrate import IntegratorConfig
    return IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13)


def _cjson(z):
    return [float(np.real(z)), float(np.imag(z))]


@dataclass
class ResolverRequest:
    n: int
    m: int
    Ms: list
    exponents: list  # per point, n local exponents (already shifted)
    singularities: np.ndarray
    kappa: int
    balanced: tuple
    extremal: tuple
    radius: float = SCAN_RADIUS
    grid: int = GRID
    tol_match: float = TOL_MATCH

    def to_json(self):
        return {
            "n": self.n, "m": self.m, "kappa": self.kappa,
            "Ms": [[[_cjson(x) for x in row] for row in np.asarray(M)] for M in self.Ms],
            "exponents": [[_cjson(e) for e in ex] for ex in self.exponents],
            "singularities": [_cjson(a) for a in self.singularities],
            "balanced": list(self.balanced), "extremal": list(self.extremal),
            "radius": self.radius, "grid": self.grid, "tol_match": self.tol_match,
        }

    @classmethod
    def from_json(cls, obj):
        c = lambda v: complex(v[0], v[1])
        return cls(int(obj["n"]), int(obj["m"]),
                   [np.array([[c(x) for x in row] for row in M]) for M in obj["Ms"]],
                   [[c(e) for e in ex] for ex in obj["exponents"]],
                   np.array([c(a) for a in obj["singularities"]]),
                   int(obj["kappa"]), tuple(obj["balanced"]), tuple(obj["extremal"]),
                   float(obj.get("radius", SCAN_RADIUS)), int(obj.get("grid", GRID)),
                   float(obj.get("tol_match", TOL_MATCH)))


@dataclass
class ResolverVerdict:
    kind: str  # extremal_confirmed | unresolved
    parameter: complex = None
    defect: float = None
    indices: tuple = None
    conjugacy_confirmed: bool = None
    coverage: dict = field(default_factory=dict)

    def to_json(self):
        out = {"kind": self.kind, "coverage": self.coverage}
        if self.kind == "extremal_confirmed":
            out.update(parameter=_cjson(self.parameter), defect=self.defect, indices=list(self.indices))
            if self.conjugacy_confirmed is not None:
                out["conjugacy_confirmed"] = self.conjugacy_confirmed
        else:
            out["note"] = "no matching parameter found in the scanned disk; this is not a proof that the indices are balanced"
        return out


def fingerprint_defect(A, B):
    return float(np.linalg.norm(la.similarity_fingerprint(A) - la.similarity_fingerprint(B)))


def word_traces(Ms):
    """Traces of words of length up to six in each pair of matrices.

    For three 3x3 matrices with product I, singles, pairs and the triple
    are all fixed by the local exponents, so they cannot tell members of an
    accessory family apart; these words can.
    """
    out = []
    for i in range(len(Ms)):
        for j in range(i + 1, len(Ms)):
            X, Y = Ms[i], Ms[j]
            X2, Y2 = X @ X, Y @ Y
            out += [np.trace(X2 @ Y), np.trace(X @ Y2), np.trace(X2 @ Y2), np.trace(X2 @ Y2 @ X @ Y)]
    return np.array(out, dtype=complex)


def scan_fingerprint(Ms):
    """Fingerprint matched by the resolver: similarity fingerprint, plus the
    pair words for 3x3 tuples."""
    Ms = [la.as_matrix(M) for M in Ms]
    fp = la.similarity_fingerprint(Ms)
    if Ms[0].shape[0] == 3:
        fp = np.concatenate([fp, word_traces(Ms)])
    return fp


class AffineCompanion:
    """Companion systems of the equations fam.equation(t) for a batch of
    parameters: A(z; t) = A0(z) + t A1(z)."""

    def __init__(self, fam, ts):
        c0 = fam.equation(0.0).companion()
        c1 = fam.equation(1.0).companion()
        self.n = c0.n
        self.num0 = c0.num
        self.num1 = c1.num - c0.num
        self.den = c0.den
        self.poles = np.asarray(fam.a)
        self.ts = np.asarray(ts, dtype=complex)

    def evaluate(self, z):
        from .fuchsian import horner
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        d = horner(self.den, z)[:, None, None]
        t = self.ts if len(self.ts) == len(z) else np.resize(self.ts, len(z))
        return (horner(self.num0, z) + t[:, None, None] * horner(self.num1, z)) / d


def family_monodromy(fam, ts, cfg=None, chunk=None):
    """Monodromy tuples of fam.equation(t) for every t; shape (T, m, n, n)."""
    from .integrate import Arc, Line, transport
    from .monodromy import build_loops
    ts = np.atleast_1d(np.asarray(ts, dtype=complex))
    loops = build_loops(fam.a)
    m = len(loops)
    chunk = chunk or int(os.environ.get("PI_RESOLVER_CHUNK", "2048"))
    out = np.empty((len(ts), m, fam.n, fam.n), dtype=complex)
    per = max(1, chunk // m)
    for s in range(0, len(ts), per):
        tb = ts[s:s + per]
        B = len(tb)
        # batch index b * m + k: parameter b, loop k
        tt = np.repeat(tb, m)
        segs = []
        for i, seg in enumerate(loops[0].segments):
            parts = [lp.segments[i] for lp in loops] * B
            if isinstance(seg, Line):
                segs.append(Line(np.array([p.z0 for p in parts]), np.array([p.z1 for p in parts])))
            else:
                segs.append(Arc(np.array([p.center for p in parts]), np.array([p.radius for p in parts]),
                                np.array([p.th0 for p in parts]), np.array([p.th1 for p in parts])))
        F = AffineCompanion(fam, tt)
        T = transport(F, segs, None, cfg)
        out[s:s + B] = np.linalg.inv(T).reshape(B, m, fam.n, fam.n)
    return out


def secant_polish(fingerprints, target, t0, iters=30):
    """Gauss-Newton on the fingerprint residual, which depends analytically
    on t; the complex derivative comes from a forward difference evaluated in
    the same batch."""
    t = complex(t0)
    best_t, best_d = t, np.inf
    for _ in range(iters):
        dt = 1e-6 * (1 + abs(t))
        f0, f1 = fingerprints([t, t + dt])
        r = f0 - target
        d = float(np.linalg.norm(r))
        if d < best_d:
            best_t, best_d = t, d
        J = (f1 - f0) / dt
        jj = float(np.vdot(J, J).real)
        if jj == 0:
            break
        step = -np.vdot(J, r) / jj
        t = t + step
        if abs(step) < 1e-13 * (1 + abs(t)):
            break
    return best_t, best_d


def _disk_grid(radius, count):
    x = np.linspace(-radius, radius, count)
    X, Y = np.meshgrid(x, x)
    t = (X + 1j * Y).ravel()
    keep = np.abs(t) <= radius + 1e-12
    return t[keep], x[1] - x[0]


def resolve(req, cfg=None, polish=6):
    from .fuchsian import accessory_family
    fam = accessory_family(req.n, req.singularities, req.exponents)
    cfg = cfg or scan_config()
    target = scan_fingerprint(req.Ms)
    # defects are measured relative to the size of the target fingerprint
    scale = 1.0 + float(np.linalg.norm(target))
    ts, h = _disk_grid(req.radius, req.grid)

    def defects(tvals):
        chis = family_monodromy(fam, tvals, cfg)
        fp = np.array([scan_fingerprint(list(c)) for c in chis])
        return np.linalg.norm(fp - target[None, :], axis=1) / scale

    try:
        d = defects(ts)
    except NumericalError as exc:
        # fall back to point-by-point evaluation so one bad parameter does not sink the scan
        log.warning("batched scan failed (%s); evaluating grid points separately", exc)
        d = np.full(len(ts), np.inf)
        for i, t in enumerate(ts):
            try:
                d[i] = defects([t])[0]
            except NumericalError as e:
                log.warning("grid point %s skipped: %s", t, e)
    finite = np.isfinite(d)
    order = np.argsort(np.where(finite, d, np.inf))
    # local minima of the grid (8-neighbourhood), best first
    starts = []
    for i in order:
        if not finite[i]:
            break
        near = np.abs(ts - ts[i]) <= 1.5 * h
        if d[i] <= np.min(d[near]):
            starts.append(ts[i])
        if len(starts) >= polish:
            break

    def fingerprints(tvals):
        chis = family_monodromy(fam, tvals, cfg)
        return np.array([scan_fingerprint(list(c)) for c in chis])

    def objective(x):
        try:
            return float(defects([complex(x[0], x[1])])[0])
        except NumericalError:
            return np.inf

    best_t, best_d, method = None, np.inf, None
    for t0 in starts:
        try:
            t1, d1 = secant_polish(fingerprints, target, t0)
            d1 /= scale
            how = "gauss-newton"
        except NumericalError:
            t1, d1 = t0, np.inf
        if not d1 < req.tol_match:
            res = minimize(objective, [t0.real, t0.imag], method="Nelder-Mead",
                           options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400, "initial_simplex":
                                    [[t0.real, t0.imag], [t0.real + h / 2, t0.imag], [t0.real, t0.imag + h / 2]]})
            if res.fun < d1:
                t1, d1, how = complex(res.x[0], res.x[1]), float(res.fun), "nelder-mead"
        if d1 < best_d:
            best_t, best_d, method = t1, d1, how
        if best_d < req.tol_match:
            break
    coverage = {"radius": req.radius, "grid": req.grid, "grid_points": int(len(ts)),
                "failed_points": int(np.sum(~finite)), "grid_min_defect": float(np.min(d[finite])) if finite.any() else None,
                "polished_starts": len(starts), "best_defect": best_d,
                "defect_scale": scale,
                "best_parameter": _cjson(best_t) if best_t is not None else None,
                "polish_method": method}
    if best_d < req.tol_match:
        conj = None
        if req.n == 3:
            chis = family_monodromy(fam, [best_t], cfg)[0]
            conj = la.simultaneously_similar(list(chis), req.Ms, tol=1e-6)
            if not conj:
                return ResolverVerdict("unresolved", coverage=dict(coverage, conjugacy_failed=True))
        return ResolverVerdict("extremal_confirmed", best_t, best_d, tuple(req.extremal), conj, coverage)
    return ResolverVerdict("unresolved", coverage=coverage)
