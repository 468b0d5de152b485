"""
Settling an open case by scanning an accessory parameter
========================================================

For irreducible 2x2 data with four jumps and even total index the tables
leave two answers.  The larger gap occurs exactly when the monodromy comes
from a second order equation with prescribed exponents; those equations
form a one-parameter family, which the resolver scans.
"""

import numpy as np

from pcindex import fuchsian as fu
from pcindex.checks import pipeline
from pcindex.resolver import resolve

A = fu.generate("extremal", (1, -1), seed=2, m=4)
print("declared indices", A.indices)

data, rep, res = pipeline(A)
print("type", rep.type, "->", res.kind, res.options)

verdict = resolve(res.request)
print("verdict", verdict.kind, "indices", verdict.indices)
print("parameter %.6f%+.6fi, defect %.1e" % (verdict.parameter.real, verdict.parameter.imag, verdict.defect))
print("scan:", {k: verdict.coverage[k] for k in ("grid_points", "polished_starts", "polish_method")})

# a tuple that is not in the family: conjugating one factor keeps all local
# data but breaks the product relation with the others
C = np.array([[1.0, 0.7], [0.2, 1.1]])
res.request.Ms[0] = C @ res.request.Ms[0] @ np.linalg.inv(C)
res.request.radius, res.request.grid = 2.0, 15
print("perturbed target:", resolve(res.request).kind)
