"""Adaptive Runge-Kutta transport of matrix ODEs along complex paths.

The solver integrates dY/ds = A(z(s)) z'(s) Y for a batch of paths at once:
state arrays have shape (B, n, n) and the step size is shared by the batch,
controlled by the worst local error estimate.  Two explicit pairs are
available, Dormand-Prince 5(4) and Dormand-Prince 8(5,3) (DOP853), both with
a PI step size controller.  The eighth-order pair is the default: monodromy
matrices can be large, so tight tolerances are needed, and those are cheap
at high order.
"""
from dataclasses import dataclass

import numpy as np

from scipy.integrate._ivp import dop853_coefficients as _d853

from .errors import InputError, StepUnderflow

# Dormand-Prince 5(4) tableau
_C5 = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A5 = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E54 = _B5 - _B4

# DOP853: the twelve main stages of the published tableau
_S8 = _d853.N_STAGES
_A8 = [list(_d853.A[i, :i]) for i in range(_S8)]
_C8 = _d853.C[:_S8]
_B8 = _d853.B
_E8_5 = _d853.E5
_E8_3 = _d853.E3

METHODS = ("dop853", "dp5")


@dataclass
class IntegratorConfig:
    rel_tol: float = 1e-13
    abs_tol: float = 1e-15
    max_step: float = 0.25
    clearance: float = None
    max_steps: int = 200000
    method: str = "dop853"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method not in METHODS:
            raise InputError("unknown integration method %r" % (self.method,))


# --- path segments --------------------------------------------------------------
# Each segment maps s in [0, 1] to points z(s) with derivative dz(s); the
# endpoints may be arrays so one segment object describes a batch of paths.

class Line:
    def __init__(self, z0, z1):
        self.z0 = np.asarray(z0, dtype=complex)
        self.z1 = np.asarray(z1, dtype=complex)

    def z(self, s):
        return self.z0 + s * (self.z1 - self.z0)

    def dz(self, s):
        return self.z1 - self.z0 + 0 * s

    def reversed(self):
        return Line(self.z1, self.z0)


class Arc:
    def __init__(self, center, radius, th0, th1):
        self.center = np.asarray(center, dtype=complex)
        self.radius = np.asarray(radius, dtype=float)
        self.th0 = np.asarray(th0, dtype=float)
        self.th1 = np.asarray(th1, dtype=float)

    def z(self, s):
        return self.center + self.radius * np.exp(1j * (self.th0 + s * (self.th1 - self.th0)))

    def dz(self, s):
        th = self.th0 + s * (self.th1 - self.th0)
        return 1j * (self.th1 - self.th0) * self.radius * np.exp(1j * th)

    def reversed(self):
        return Arc(self.center, self.radius, self.th1, self.th0)


def reverse_path(path):
    return [seg.reversed() for seg in reversed(path)]


def path_points(path, per_segment=200):
    s = np.linspace(0, 1, per_segment)
    return np.concatenate([np.atleast_2d(np.array([seg.z(x) for x in s])).reshape(per_segment, -1) for seg in path])


def winding_number(path, a, per_segment=4000):
    """Numerical winding number of each path in the batch around a."""
    s = np.linspace(0, 1, per_segment)
    total = 0.0
    for seg in path:
        z = np.array([seg.z(x) for x in s])
        dz = np.array([seg.dz(x) for x in s])
        f = dz / (z - a)
        total = total + np.trapezoid(f, s, axis=0)
    return total / (2j * np.pi)


# --- integrator -----------------------------------------------------------------

def _rhs(F, seg, s, Y):
    z = np.atleast_1d(seg.z(s))
    dz = np.atleast_1d(seg.dz(s))
    A = F.evaluate(z)
    if A.shape[0] != Y.shape[0]:
        A = np.broadcast_to(A, (Y.shape[0],) + A.shape[1:])
    return (A * dz[:, None, None]) @ Y


def _combine(coefs, ks):
    return sum(c * k for c, k in zip(coefs, ks) if c != 0.0)


def _scale(Y, Yn, cfg):
    # errors are measured against the size of the whole fundamental matrix of
    # each batch member rather than entry by entry
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(Y), np.abs(Yn))
    big = np.max(np.abs(Yn), axis=(1, 2), keepdims=True)
    return np.maximum(scale, cfg.rel_tol * big)


def _step_dp5(F, seg, s, h, Y, k1, cfg):
    ks = [k1]
    for i in range(1, 7):
        ks.append(_rhs(F, seg, s + _C5[i] * h, Y + h * _combine(_A5[i], ks)))
    Yn = Y + h * _combine(_B5, ks)
    sc = _scale(Y, Yn, cfg)
    err = np.sqrt(np.mean(np.abs(h * _combine(_E54, ks) / sc) ** 2, axis=(1, 2)))
    return Yn, ks[6], err


def _step_dop853(F, seg, s, h, Y, k1, cfg):
    ks = [k1]
    for i in range(1, _S8):
        ks.append(_rhs(F, seg, s + _C8[i] * h, Y + h * _combine(_A8[i], ks)))
    Yn = Y + h * _combine(_B8, ks)
    ks.append(_rhs(F, seg, s + h, Yn))
    sc = _scale(Y, Yn, cfg)
    e5 = np.sum(np.abs(_combine(_E8_5, ks) / sc) ** 2, axis=(1, 2))
    e3 = np.sum(np.abs(_combine(_E8_3, ks) / sc) ** 2, axis=(1, 2))
    denom = e5 + 0.01 * e3
    size = Y.shape[1] * Y.shape[2]
    err = np.where(denom > 0, abs(h) * e5 / np.sqrt(np.where(denom > 0, denom, 1.0) * size), 0.0)
    return Yn, ks[-1], err


_STEPPERS = {"dp5": (_step_dp5, 5), "dop853": (_step_dop853, 8)}


def integrate_segment(F, seg, Y, cfg, h0=None, stats=None):
    """Integrate one segment from s = 0 to s = 1 starting at Y (B, n, n)."""
    stepper, order = _STEPPERS[cfg.method]
    s = 0.0
    h = h0 if h0 is not None else min(0.02, cfg.max_step)
    err_old = 1e-4
    k1 = _rhs(F, seg, s, Y)
    steps = 0
    safe, fac_min, fac_max, beta = 0.9, 0.2, 5.0, 0.04
    expo = 1.0 / order - 0.75 * beta
    while s < 1.0:
        if steps > cfg.max_steps:
            raise StepUnderflow("too many steps on a path segment")
        h = min(h, 1.0 - s, cfg.max_step)
        if h < 1e-14:
            raise StepUnderflow("step size underflow at s=%g" % s)
        Yn, kn, errs = stepper(F, seg, s, h, Y, k1, cfg)
        err = float(np.max(errs))
        steps += 1
        if not np.isfinite(err):
            h *= 0.25
            continue
        if err <= 1.0:
            s += h
            Y, k1 = Yn, kn
            fac = err ** expo / max(err_old, 1e-4) ** beta / safe
            fac = min(1.0 / fac_min, max(1.0 / fac_max, fac))
            err_old = max(err, 1e-4)
            h = h / fac
        else:
            h = h / min(1.0 / fac_min, err ** expo / safe)
    if stats is not None:
        stats["steps"] = stats.get("steps", 0) + steps
    return Y, h


def transport(F, path, Y0=None, cfg=None, stats=None):
    """Carry Y0 along a path (list of segments) under dY/dz = F(z) Y.

    Batch form: segments with array endpoints of length B and Y0 of shape
    (B, n, n) or (n, n) (broadcast).  Returns an array of the same leading
    shape as the batch (a single matrix when the path is not batched).
    """
    cfg = cfg or IntegratorConfig()
    n = F.n
    batch = max(np.size(seg.z(0.0)) for seg in path)
    single = all(np.ndim(seg.z(0.0)) == 0 for seg in path) and (Y0 is None or np.ndim(Y0) == 2)
    if Y0 is None:
        Y = np.broadcast_to(np.eye(n, dtype=complex), (batch, n, n)).copy()
    else:
        Y0 = np.asarray(Y0, dtype=complex)
        Y = np.broadcast_to(Y0, (batch, n, n)).copy() if Y0.ndim == 2 else Y0.copy()
    h = None
    for seg in path:
        Y, h = integrate_segment(F, seg, Y, cfg, h, stats)
    return Y[0] if single else Y
