"""
The monodromy sign convention
=============================

For a(z) = sum eps_k / (z - a_k) the solution is prod (z - a_k)^eps_k, and
a positive loop around a_k multiplies it by exp(2 pi i eps_k).  The
monodromy matrices here are the inverses of those transports, so they
equal exp(-2 pi i eps_k), the same convention as the jump matrices.
"""

import numpy as np

from pcindex import fuchsian as fu
from pcindex.integrate import Arc, IntegratorConfig, transport
from pcindex.monodromy import monodromy

a = fu.default_singularities(3)
eps = np.array([0.3 + 0.1j, -0.45, 0.15 - 0.1j])
A = fu.RationalSystem(a, [0], fu.diagonal_numerator(a, eps)[None, None, :])

T = transport(A, [Arc(a[0], 0.3, 0.0, 2 * np.pi)])
print("transport around a_1:", np.round(T[0, 0], 10), " exp(2 pi i eps_1):", np.round(np.exp(2j * np.pi * eps[0]), 10))

mono = monodromy(A)
for k, chi in enumerate(mono.chis):
    print("chi_%d = %s, error %.1e" % (k + 1, np.round(chi[0, 0], 8), abs(chi[0, 0] - np.exp(-2j * np.pi * eps[k]))))

# both steppers share one controller; the product defect tracks the tolerance
for method in ("dp5", "dop853"):
    for rt in (1e-6, 1e-9, 1e-12):
        B = fu.generate("extremal", (0, 0), seed=1, m=4)
        d = monodromy(B, cfg=IntegratorConfig(rel_tol=rt, abs_tol=rt * 1e-2, method=method)).product_defect
        print("%-6s rel_tol %.0e  product defect %.1e" % (method, rt, d))
