"""
Three-by-three systems with three singular points
=================================================

Block and triangular shapes leave invariant subspaces in the monodromy.
The classifier finds them, computes the exponent sums along them, and the
index table picks the matching rule.
"""

from pcindex import fuchsian as fu
from pcindex.checks import pipeline

cases = [
    ("block12", (1, 0, 0), None),
    ("block21", (1, 1, -1), None),
    ("triangular", (1, 0, -1), None),
    # couplings (i, j) make entry (i, j) nonzero; indices per component
    ("pattern", (1, 0, -1), [(0, 1)]),
    ("pattern", (1, 0, -1), [(0, 1), (0, 2), (2, 1)]),
    ("extremal", (1, 0, -1), None),
]

for shape, ks, couplings in cases:
    A = fu.generate(shape, ks, seed=11, m=3, couplings=couplings)
    data, rep, res = pipeline(A)
    got = res.indices if res.kind == "determined" else res.options
    print("%-10s declared %-12s type %-3s %-42s -> %s %s" % (
        shape, tuple(sorted(A.indices, reverse=True)), rep.type, rep.integers, res.kind, got))

# the irreducible case with total index divisible by three stays open: both
# candidates satisfy every algebraic constraint, and only the resolver can
# tell them apart (see four_point_dichotomy.py)
