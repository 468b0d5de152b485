"""
Scalar symbols: exponents, total index and explicit factors
===========================================================

A scalar piecewise constant function on the unit circle factors in closed
form.  Each jump contributes one exponent from the branch interval, and the
exponents add up to the index.
"""

import numpy as np

from pcindex.symbol import PiecewiseSymbol, extract_data, factorization_residual, phi_criterion, scalar_factorize

# two arcs: value 1 up to angle 0, value exp(3 pi i / 2) up to angle pi
arcs = [[[1.0]], [[np.exp(1.5j * np.pi)]]]
angles = [0.0, np.pi]

# the interval for the exponents depends on p; a jump with an exponent on
# its boundary makes the factorization fail
for p in (2.0, 1.2):
    sym = PiecewiseSymbol(1, p, angles, arcs)
    print("p = %.1f, factorable: %s" % (p, bool(phi_criterion(sym))))
    data = extract_data(sym)
    print("  exponents", [round(float(E[0, 0].real), 4) for E in data.Es], "index", data.kappa)

# the factors themselves, for p = 1.2 where the index is one
sym = PiecewiseSymbol(1, 1.2, angles, arcs)
fac = scalar_factorize(sym)
t = np.exp(0.4j)
print("G+(t) t^k G-(t) =", np.round(complex(fac.product(t)), 12), " G(t) =", np.round(sym(t)[0, 0], 12))
print("max residual over 64 points per arc: %.1e" % factorization_residual(sym, fac.product))

# a jump of -1 sits on the boundary for p = 2 and is rejected
bad = PiecewiseSymbol(1, 2.0, angles, [[[1.0]], [[-1.0]]])
print("arcs (1, -1) at p = 2:", phi_criterion(bad).reasons)
