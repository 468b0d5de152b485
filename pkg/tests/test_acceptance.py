"""Acceptance criteria at full size.

Each test runs the matching checks from pcindex.checks and records a
PASS/FAIL line, printed together at the end of the pytest run.  Running
this file directly prints the same lines without pytest.
"""
import json

from pcindex import checks


def _run(record, number, text, results, extra_ok=True, note=None):
    lines = [(r.passed, r.line()) for r in results]
    if note is not None:
        lines.append((extra_ok, note))
    record(number, text, lines)
    for r in results:
        assert r.passed, "%s\n%s" % (r.line(), json.dumps(r.failures[:5], indent=1, default=str))
    assert extra_ok, note


def test_criterion_01_scalar_monodromy_oracle(record):
    _run(record, 1, "scalar systems: chi_k = exp(-2 pi i eps_k) within 1e-8", [checks.scalar_oracle()])


def test_criterion_02_product_identity(record):
    r = checks.product_identity()
    note = None
    if r.failures:
        # separate draws where rounding the chi_k alone already exceeds the limit
        floor = sum(1 for f in r.failures if f["rounding_floor"] > r.threshold)
        note = "%d of %d failing draws have a double precision rounding floor above the limit" % (
            floor, len(r.failures))
    _run(record, 2, "product identity |chi_1 ... chi_m - I| < 1e-8 on 200 systems", [r], note=note,
         extra_ok=not r.failures)


def test_criterion_03_trace_identity(record):
    _run(record, 3, "trace identity and recovered total index", [checks.trace_identity()])


def test_criterion_04_reducible_2x2_roundtrip(record):
    _run(record, 4, "reducible 2x2 round trip returns the declared indices", [checks.triangular_2x2_roundtrip()])


def test_criterion_05_irreducible_2x2_three_points(record):
    _run(record, 5, "irreducible 2x2, m = 3: ((k+1)/2, (k-1)/2)", [checks.extremal_2x3()])


def test_criterion_06_four_point_dichotomy(record):
    _run(record, 6, "2x2, m = 4: dichotomy resolved to the extremal indices; planted t0 recovered",
         [checks.dichotomy_2x4(), checks.planted_parameter()])


def test_criterion_07_three_by_three_tables(record):
    r = checks.three_by_three_tables()
    matched = r.extra["matched"]
    enough = len(matched) == 8 and all(v >= 20 for v in matched.values())
    note = "matched per rule: " + ", ".join("%s %d" % kv for kv in matched.items())
    _run(record, 7, "3x3, m = 3: each of the eight block/triangular rules on >= 20 instances", [r],
         extra_ok=enough, note=note)


def test_criterion_08_gap_bound(record):
    _run(record, 8, "gap bound k_j - k_(j+1) <= m - 2 on irreducible data", [checks.gap_bound()])


def test_criterion_09_factorizations(record):
    _run(record, 9, "scalar factorization < 1e-9; 2x2 factor assembly < 1e-7",
         [checks.scalar_factorization(), checks.factor_assembly_2x2()])


def test_criterion_10_fuchs_relation(record):
    _run(record, 10, "Fuchs relation on accessory families, (2,4) and (3,3)", [checks.fuchs_relation()])


def test_criterion_11_classification_invariance(record):
    _run(record, 11, "classification unchanged under 100 conjugations per instance",
         [checks.classification_invariance()])


if __name__ == "__main__":
    import sys
    store = {}

    def record(number, text, lines):
        store[number] = (text, lines)

    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn(record)
            except AssertionError:
                pass
    bad = 0
    for number in sorted(store):
        text, lines = store[number]
        ok = all(flag for flag, _ in lines)
        bad += not ok
        print("%s  criterion %2d: %s" % ("PASS" if ok else "FAIL", number, text))
        for _, line in lines:
            print("          " + line)
    sys.exit(1 if bad else 0)
