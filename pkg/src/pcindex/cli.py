"""Command line front end: JSON in, JSON out.

    pcindex analyze symbol.json [--resolve]
    pcindex generate --shape extremal --indices 1,-1 --m 4 --seed 3
    pcindex monodromy system.json
    pcindex factor symbol.json
    pcindex resolve dichotomy.json
    pcindex selftest

Exit codes: 0 success, 2 malformed input, 3 mathematically inadmissible
input, 4 numerical failure.  Errors are printed as JSON on stderr.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import linalg as la
from .errors import InputError, NumericalError, PCIndexError
from .fuchsian import RationalSystem, generate, validate_standard_form
from .indices import IndexResult, compute_indices
from .integrate import IntegratorConfig
from .monodromy import monodromy, sign_convention_selftest
from .reducibility import TOL_INT, classify
from .resolver import SCAN_RADIUS, TOL_MATCH, ResolverRequest, resolve, scan_config
from .symbol import (PiecewiseSymbol, commuting_factorize_m2, extract_data, factorization_residual,
                     phi_criterion, scalar_factorize)

log = logging.getLogger("pcindex")

SHAPES = {"triangular2": ("triangular", 2), "triangular3": ("triangular", 3), "block12": ("block12", 3),
          "block21": ("block21", 3), "extremal": ("extremal", None), "pattern": ("pattern", None)}


def cpair(z):
    z = complex(z)
    return [z.real, z.imag]


def cmatrix(M):
    return [[cpair(x) for x in row] for row in np.asarray(M)]


def _number(x):
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise InputError("expected a number or an [re, im] pair, got %r" % (x,))


def _is_entry(x):
    real = (int, float)
    return isinstance(x, real) or (isinstance(x, list) and len(x) == 2 and all(isinstance(v, real) for v in x))


def _matrix(obj, n):
    """n x n matrix from nested rows or a flat row-major list of entries."""
    if not isinstance(obj, list):
        raise InputError("matrix must be a list")
    if obj and _is_entry(obj[0]) and len(obj) == n * n:
        flat = obj
    elif len(obj) == n and all(isinstance(r, list) and len(r) == n for r in obj):
        flat = [x for r in obj for x in r]
    else:
        raise InputError("matrix must have %d rows of %d entries" % (n, n))
    return np.array([_number(x) for x in flat], dtype=complex).reshape(n, n)


def load_symbol(obj, p=None):
    """Symbol from {"n", "p", "jumps": [{"angle"}], "arcs": [...]}; arcs[k]
    is the value on the arc ending at jump k."""
    try:
        n = int(obj["n"])
        angles = [float(j["angle"]) for j in obj["jumps"]]
        arcs = [_matrix(A, n) for A in obj["arcs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError("malformed symbol JSON: %s" % exc)
    p = float(obj.get("p", 2.0)) if p is None else float(p)
    return PiecewiseSymbol(n, p, angles, arcs)


def dump_symbol(sym):
    return {"n": sym.n, "p": sym.p, "jumps": [{"angle": float(t)} for t in sym.angles],
            "arcs": [cmatrix(A) for A in sym.arcs]}


@dataclass
class AnalysisReport:
    phi: dict
    data: dict = None
    reducibility: dict = None
    indices: dict = None
    verdict: dict = None
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        out = {"phi": self.phi, "diagnostics": self.diagnostics}
        for k in ("data", "reducibility", "indices", "verdict"):
            if getattr(self, k) is not None:
                out[k] = getattr(self, k)
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(obj["phi"], obj.get("data"), obj.get("reducibility"), obj.get("indices"),
                   obj.get("verdict"), obj.get("diagnostics", {}))

    @property
    def answer(self):
        """Final index vector, when one is known."""
        if self.verdict is not None and self.verdict.get("kind") == "extremal_confirmed":
            return self.verdict["indices"]
        if self.indices is not None and self.indices.get("kind") == "determined":
            return self.indices["indices"]
        return None


def _config(args):
    """Integrator settings from --rel-tol, or None for each command's default."""
    if getattr(args, "rel_tol", None):
        return IntegratorConfig(rel_tol=args.rel_tol, abs_tol=min(1e-13, args.rel_tol * 1e-2))
    return None


def _cfg_json(cfg):
    return {"method": cfg.method, "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol, "max_step": cfg.max_step}


def _data_json(data):
    return {"n": data.n, "m": data.m, "p": data.p, "kappa": data.kappa, "kappa_defect": data.kappa_defect,
            "jumps": [cmatrix(M) for M in data.Ms], "logs": [cmatrix(E) for E in data.Es],
            "exponents": [[float(x) for x in z] for z in data.zetas]}


def analyze(sym, do_resolve=False, cfg=None, scan_radius=None):
    phi = phi_criterion(sym)
    diag = {"p": sym.p, "tol_branch": la.TOL_BRANCH, "tol_int": TOL_INT, "tol_match": TOL_MATCH,
            "integrator": _cfg_json(cfg or scan_config())}
    rep = AnalysisReport({"ok": phi.ok, "reasons": phi.reasons}, diagnostics=diag)
    # raises a domain error carrying the reasons when the criterion fails
    data = extract_data(sym)
    rep.data = _data_json(data)
    diag["product_defect"] = float(np.linalg.norm(np.linalg.multi_dot(data.Ms + [np.eye(data.n)]) - np.eye(data.n)))
    red = classify(data)
    rep.reducibility = red.to_json()
    res = compute_indices(red, data, sym.points)
    rep.indices = res.to_json()
    if do_resolve and res.kind == "dichotomy":
        req = res.request
        if scan_radius is not None:
            req.radius = float(scan_radius)
        rep.verdict = resolve(req, cfg).to_json()
        rep.verdict["options"] = [list(o) for o in res.options]
    return rep


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("cannot read %s: %s" % (path, exc.strerror))
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc))


def _parse_ints(text):
    try:
        return [int(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise InputError("expected a comma separated list of integers, got %r" % text)


def _parse_couplings(text):
    """Parse one-based entries such as 1,2;3,2 into [(0, 1), (2, 1)]."""
    out = []
    for part in filter(None, text.replace(" ", "").split(";")):
        i, j = _parse_ints(part)
        out.append((i - 1, j - 1))
    return out


# --- commands ----------------------------------------------------------------------

def cmd_analyze(args):
    sym = load_symbol(_read_json(args.symbol), args.p)
    rep = analyze(sym, args.resolve, _config(args), args.scan_radius)
    return rep.to_json()


def cmd_generate(args):
    shape, n = SHAPES[args.shape]
    indices = _parse_ints(args.indices)
    if n is not None and len(indices) != n:
        raise InputError("%s needs %d indices" % (args.shape, n))
    if shape in ("triangular", "block12", "block21") and indices != sorted(indices, reverse=True):
        raise InputError("indices must be non-increasing")
    if shape == "extremal":
        n = len(indices)
        m = args.m
        expect = [indices[-1] + (n - 1 - i) * (m - 2) for i in range(n)]
        if indices != expect:
            raise InputError("extremal indices for n=%d, m=%d have gaps m-2: expected %r" % (n, m, expect))
    couplings = _parse_couplings(args.couplings) if args.couplings else None
    A = generate(shape, indices, args.seed, args.m, args.p or 2.0, couplings)
    out = A.to_json()
    out["meta"]["violations"] = [v.detail for v in validate_standard_form(A)]
    return out


def cmd_monodromy(args):
    A = RationalSystem.from_json(_read_json(args.system))
    cfg = _config(args) or IntegratorConfig()
    mono = monodromy(A, cfg=cfg)
    out = mono.to_json()
    out["violations"] = [v.detail for v in validate_standard_form(A)]
    out["config"] = _cfg_json(cfg)
    return out


def cmd_factor(args):
    sym = load_symbol(_read_json(args.symbol), args.p)
    if sym.n == 1:
        fac = scalar_factorize(sym)
        res = factorization_residual(sym, fac.product, 64)
        return {"method": "scalar", "indices": [fac.kappa], "residual": res,
                "exponents": [cpair(e) for e in fac.eps], "constant": cpair(fac.c)}
    if sym.m == 2:
        fac = commuting_factorize_m2(sym)
        res = factorization_residual(sym, fac.product, 64)
        return {"method": "commuting", "indices": fac.indices, "residual": res,
                "logs": [cmatrix(E) for E in fac.data.Es], "left_constant": cmatrix(fac.C),
                "eigenbasis": cmatrix(fac.S)}
    raise InputError("explicit factors are available for n = 1 or two jump points; use analyze for indices")


def cmd_resolve(args):
    obj = _read_json(args.dichotomy)
    # accept an analysis report, an index result or a bare request
    if "indices" in obj and isinstance(obj["indices"], dict):
        obj = obj["indices"]
    if "resolver_request" in obj:
        obj = obj["resolver_request"]
    if obj is None:
        raise InputError("no resolver request in the input")
    try:
        req = ResolverRequest.from_json(obj)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError("malformed resolver request: %s" % exc)
    if args.scan_radius is not None:
        req.radius = float(args.scan_radius)
    v = resolve(req, _config(args)).to_json()
    v["options"] = [list(req.balanced), list(req.extremal)]
    return v


def cmd_selftest(args):
    from . import checks
    err = sign_convention_selftest()
    results = [{"name": "sign convention", "passed": True, "worst": err, "threshold": 1e-8}]
    results += [r.to_json() for r in checks.fast_subset(_config(args))]
    ok = all(r["passed"] for r in results)
    if not ok:
        raise NumericalError("self test failed", results=results)
    return {"passed": ok, "checks": results}


def build_parser():
    ap = argparse.ArgumentParser(prog="pcindex", description="Partial indices of piecewise constant matrix functions")
    ap.add_argument("--version", action="version", version="%(prog)s " + __version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=None, help="L^p exponent (default: from the input, else 2)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--rel-tol", type=float, default=None, help="integrator relative tolerance")
    common.add_argument("--scan-radius", type=float, default=None,
                        help="accessory parameter scan radius (default %g)" % SCAN_RADIUS)
    common.add_argument("--json-out", metavar="PATH", default=None)
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="indices of a symbol")
    p.add_argument("symbol")
    p.add_argument("--resolve", action="store_true", help="run the resolver on dichotomies")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", parents=[common], help="random system of standard form")
    p.add_argument("--shape", choices=sorted(SHAPES), required=True)
    p.add_argument("--indices", required=True, help="comma separated, e.g. 1,-1")
    p.add_argument("--m", type=int, default=3, help="number of singularities")
    p.add_argument("--couplings", default=None, help="pattern shape: entries like '1,2;3,2'")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("monodromy", parents=[common], help="monodromy tuple of a system")
    p.add_argument("system")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("factor", parents=[common], help="explicit factors (n = 1 or m = 2)")
    p.add_argument("symbol")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("resolve", parents=[common], help="decide a dichotomy numerically")
    p.add_argument("dichotomy")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("selftest", parents=[common], help="fast oracle checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def _emit(obj, path, stream):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        stream.write(text + "\n")


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        out = args.func(args)
    except PCIndexError as exc:
        _emit(exc.to_dict(), None, sys.stderr)
        return exc.exit_code
    except np.linalg.LinAlgError as exc:
        _emit({"error": "LinAlgError", "message": str(exc)}, None, sys.stderr)
        return NumericalError.exit_code
    _emit(out, args.json_out, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
