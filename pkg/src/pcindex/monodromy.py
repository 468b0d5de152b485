"""Monodromy of Fuchsian systems by numerical transport, and the piecewise
constant symbol recovered from a system of standard form.

Loops start at the base point, run radially to a small circle around one
singularity, go once around it counterclockwise and come back.  With
T_k the transport of the identity around loop k, the monodromy matrix is
chi_k = inv(T_k); for a(z) = eps / (z - a) this gives chi = exp(-2 pi i eps).
For base point 0 and singularities taken in order of increasing angle the
product chi_1 ... chi_m is the identity.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import linalg as la
from .errors import GeometryFailure, InputError, NotConstant
from .integrate import Arc, IntegratorConfig, Line, transport, winding_number
from .symbol import PiecewiseSymbol, product_defect

TOL_CONST = 1e-6
ARC_SAMPLES = 8
EXTERIOR_BASE = -2.0


@dataclass
class LoopPath:
    segments: list
    target: complex
    base: complex
    radius: float


def default_clearance(a):
    a = np.asarray(a, dtype=complex)
    if len(a) < 2:
        return 0.25
    d = min(abs(a[i] - a[j]) for i in range(len(a)) for j in range(i))
    return 0.25 * d


def _segment_distance(z0, z1, w):
    d = z1 - z0
    s = np.clip(((w - z0) * np.conj(d)).real / max(abs(d) ** 2, 1e-300), 0, 1)
    return abs(z0 + s * d - w)


def build_loops(singularities, base=0.0, clearance=None):
    a = np.asarray(singularities, dtype=complex).reshape(-1)
    r = default_clearance(a) if clearance is None else float(clearance)
    if np.min(np.abs(a - base)) <= r:
        raise InputError("base point lies within the clearance of a singularity")
    loops = []
    for k, ak in enumerate(a):
        u = (ak - base) / abs(ak - base)
        entry = ak - r * u
        for l, al in enumerate(a):
            if l != k and _segment_distance(base, entry, al) <= r:
                raise GeometryFailure("corridor to singularity %d passes singularity %d" % (k, l))
        th = np.angle(-u)
        segs = [Line(base, entry), Arc(ak, r, th, th + 2 * np.pi), Line(entry, base)]
        loops.append(LoopPath(segs, complex(ak), complex(base), r))
    return loops


def check_winding(loops, singularities, tol=1e-3):
    a = np.asarray(singularities, dtype=complex)
    for k, loop in enumerate(loops):
        for l, al in enumerate(a):
            w = winding_number(loop.segments, al)
            if abs(w - (1.0 if l == k else 0.0)) > tol:
                raise GeometryFailure("loop %d winds %.3f times around singularity %d" % (k, w.real, l))
    return True


def _batched(loops):
    """Stack loops of identical shape into one batched path."""
    segs = []
    for i, seg in enumerate(loops[0].segments):
        parts = [lp.segments[i] for lp in loops]
        if isinstance(seg, Line):
            segs.append(Line(np.array([p.z0 for p in parts]), np.array([p.z1 for p in parts])))
        else:
            segs.append(Arc(np.array([p.center for p in parts]), np.array([p.radius for p in parts]),
                            np.array([p.th0 for p in parts]), np.array([p.th1 for p in parts])))
    return segs


def loop_transports(F, loops, cfg=None, stats=None):
    """Transport of the identity around every loop, as a (m, n, n) array."""
    return transport(F, _batched(loops), None, cfg, stats)


def angular_order(singularities, base=0.0):
    th = np.mod(np.angle(np.asarray(singularities) - base), 2 * np.pi)
    return np.argsort(th, kind="stable")


@dataclass
class MonodromyTuple:
    chis: list
    base: complex
    loops: list
    order: list
    stats: dict = field(default_factory=dict)

    @property
    def product_defect(self):
        return product_defect([self.chis[k] for k in self.order])

    def to_json(self):
        return {
            "base": [self.base.real, self.base.imag],
            "chis": [[[[float(x.real), float(x.imag)] for x in row] for row in C] for C in self.chis],
            "product_order": [int(k) for k in self.order],
            "product_defect": self.product_defect,
        }


def monodromy(F, singularities=None, loops=None, cfg=None, base=0.0):
    """Monodromy tuple of dY/dz = F(z) Y around each singularity.

    chis follow the order of the singularities; the product identity holds
    in order of increasing angle seen from the base point (``order``).
    """
    a = np.asarray(F.poles if singularities is None else singularities, dtype=complex)
    if loops is None:
        loops = build_loops(a, base, None if cfg is None else cfg.clearance)
    stats = {}
    T = loop_transports(F, loops, cfg, stats)
    chis = [np.linalg.inv(Tk) for Tk in T]
    return MonodromyTuple(chis, complex(loops[0].base), loops, list(angular_order(a, loops[0].base)), stats)


@lru_cache(maxsize=1)
def sign_convention_selftest(tol=1e-8):
    """Scalar oracle: a(z) = sum eps_k / (z - a_k) must give
    chi_k = exp(-2 pi i eps_k).  Raises if the convention is broken."""
    from .fuchsian import RationalSystem, default_singularities, diagonal_numerator
    a = default_singularities(3)
    eps = np.array([0.31 + 0.05j, -0.27, 0.96 - 0.05j]) - 1.0 / 3
    A = RationalSystem(a, [int(round(eps.sum().real))], diagonal_numerator(a, eps)[None, None, :])
    mono = monodromy(A)
    err = max(abs(c[0, 0] - np.exp(-2j * np.pi * e)) for c, e in zip(mono.chis, eps))
    if not err < tol:
        raise AssertionError("monodromy sign convention self-test failed (error %.2e)" % err)
    return float(err)


# --- symbol reconstruction ----------------------------------------------------------

def _unit_circle_angles(a):
    if np.max(np.abs(np.abs(a) - 1)) > 1e-10:
        raise InputError("singularities must lie on the unit circle")
    th = np.mod(np.angle(a), 2 * np.pi)
    if np.any(np.diff(th) <= 0):
        raise InputError("singularities must be listed in order of increasing angle in [0, 2 pi)")
    return th


def interior_solution(F, t, cfg=None):
    """Y1(t) with Y1(0) = I, continued radially from 0 (|t| <= 1)."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    return transport(F, [Line(np.zeros_like(t), t)], None, cfg)


def exterior_solution(F, t, cfg=None, radius=2.0):
    """Y2(t) with Y2(-2) = I, continued along |z| = 2 and then radially.
    Points with |t| > radius go radially outward from the circle."""
    t = np.atleast_1d(np.asarray(t, dtype=complex))
    th = np.angle(t)
    th = np.where(th < 0, th + 2 * np.pi, th)  # in [0, 2 pi), start at pi
    segs = [Arc(np.zeros_like(t), np.full(t.shape, radius), np.full(t.shape, np.pi), th),
            Line(radius * np.exp(1j * th), t)]
    return transport(F, segs, None, cfg)


def exterior_single_valuedness(F, cfg=None, radius=2.0):
    """Defect of the transport once around |z| = radius (should be I)."""
    T = transport(F, [Arc(0.0, radius, np.pi, 3 * np.pi)], None, cfg)
    return float(np.linalg.norm(T - np.eye(F.n)))


@dataclass
class SymbolReconstruction:
    symbol: PiecewiseSymbol
    spread: float
    samples: list
    values: list


def symbol_from_system(A, p=2.0, cfg=None, samples=ARC_SAMPLES, tol_const=TOL_CONST, details=False):
    """Piecewise constant symbol G(t) = inv(Y1(t)) Y2(t) of a system of
    standard form with singularities on the unit circle."""
    th = _unit_circle_angles(A.a)
    shell = PiecewiseSymbol(A.n, p, th, [np.eye(A.n)] * A.m)
    margin = 0.02 * np.min(np.diff(np.concatenate([th, [th[0] + 2 * np.pi]])))
    ts = np.concatenate([shell.arc_samples(k, samples, margin) for k in range(A.m)])
    Y1 = interior_solution(A, ts, cfg)
    Y2 = exterior_solution(A, ts, cfg)
    G = np.linalg.solve(Y1, Y2)
    arcs, spread = [], 0.0
    for k in range(A.m):
        Gk = G[k * samples:(k + 1) * samples]
        mean = Gk.mean(axis=0)
        dev = float(np.max(np.linalg.norm(Gk - mean, axis=(1, 2))) / max(np.linalg.norm(mean), 1e-300))
        spread = max(spread, dev)
        arcs.append(mean)
    if spread > tol_const:
        raise NotConstant("reconstructed symbol varies along an arc (relative spread %.2e)" % spread,
                          spread=spread)
    sym = PiecewiseSymbol(A.n, p, th, arcs)
    if details:
        return SymbolReconstruction(sym, spread, ts, G)
    return sym


# --- factor assembly ----------------------------------------------------------------

@dataclass
class FactorAssembly:
    system: object
    symbol: PiecewiseSymbol
    cfg: IntegratorConfig
    residual: float = None
    infinity_defect: float = None
    exterior_defect: float = None
    spread: float = None

    @property
    def indices(self):
        return list(self.system.indices)

    def g_plus(self, z):
        """G+(z) = inv(Y1(z)) for |z| <= 1."""
        return np.linalg.inv(interior_solution(self.system, z, self.cfg))

    def lam(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        k = np.asarray(self.system.indices, dtype=float)
        return np.einsum("bj,jk->bjk", z[:, None] ** k[None, :], np.eye(len(k)))

    def g_minus(self, z):
        """G-(z) = inv(Lambda(z)) Y2(z) for |z| >= 1."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.linalg.solve(self.lam(z), exterior_solution(self.system, z, self.cfg))

    def product(self, z):
        return self.g_plus(z) @ self.lam(z) @ self.g_minus(z)


def factor_assembly(A, p=2.0, cfg=None, samples=64):
    """Assemble G+ Lambda G- from the interior and exterior solutions and
    report how well the pieces fit.

    residual: max over samples on the arcs of |G+ Lambda G- - G| with G the
      (averaged) reconstructed symbol;
    infinity_defect: change of inv(Lambda) Y2 between |z| = 16 and |z| = 32
      (small when G- extends analytically to infinity; decays like 1/|z|);
    exterior_defect: single-valuedness of Y2 around |z| = 2.
    """
    cfg = cfg or IntegratorConfig()
    rec = symbol_from_system(A, p, cfg, details=True)
    sym = rec.symbol
    fa = FactorAssembly(A, sym, cfg, spread=rec.spread)
    th = sym.angles
    margin = 0.02 * np.min(np.diff(np.concatenate([th, [th[0] + 2 * np.pi]])))
    ts = np.concatenate([sym.arc_samples(k, samples, margin) for k in range(A.m)])
    prod = fa.product(ts)
    worst = 0.0
    for k in range(A.m):
        Gk = prod[k * samples:(k + 1) * samples]
        worst = max(worst, float(np.max(np.linalg.norm(Gk - sym.arcs[k], axis=(1, 2)))))
    fa.residual = worst
    dirs = np.exp(1j * np.linspace(0.1, 2 * np.pi + 0.1, 6, endpoint=False))
    far1 = fa.g_minus(16 * dirs)
    far2 = fa.g_minus(32 * dirs)
    fa.infinity_defect = float(np.max(np.linalg.norm(far2 - far1, axis=(1, 2))))
    fa.exterior_defect = exterior_single_valuedness(A, cfg)
    return fa


# --- invariant flags ----------------------------------------------------------------

def visible_flag(A, tol=0.0):
    """Sizes r (0 < r < n) for which span(e_1..e_r) is invariant under A(z),
    read off the zero pattern of the numerators."""
    out = []
    for r in range(1, A.n):
        if np.all(np.abs(A.num[r:, :r]) <= tol):
            out.append(r)
    return out


def invariant_subspace_propagation_check(A, mono=None, tol=1e-8):
    """True when every coordinate subspace left invariant by A(z) is left
    invariant by each monodromy matrix (to tol, relative)."""
    if mono is None:
        mono = monodromy(A)
    for r in visible_flag(A):
        for C in mono.chis:
            if np.linalg.norm(C[r:, :r]) > tol * (1 + np.linalg.norm(C)):
                return False
    return True
