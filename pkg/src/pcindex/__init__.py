"""Partial indices of piecewise constant matrix functions on the unit circle.

Pipeline: symbol -> data (jump matrices and logarithms) -> reducibility
type -> index rules, with a monodromy engine for Fuchsian systems that
checks the theory forward and settles the undecided cases numerically.
"""
import os

# cap BLAS threads before numpy is imported
_threads = os.environ.get("PI_ENGINE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .symbol import PiecewiseSymbol, extract_data, phi_criterion  # noqa: E402
from .reducibility import classify  # noqa: E402
from .indices import compute_indices  # noqa: E402
from .monodromy import monodromy, symbol_from_system  # noqa: E402


def indices_of(sym):
    """Index result for a symbol (no resolver run)."""
    data = extract_data(sym)
    return compute_indices(classify(data), data, sym.points)
