"""One test per acceptance criterion, full profile, with runtime budgets enforced."""

import pytest

from klfrob.acceptance import CRITERIA, mutation_check, run_criterion


def _check(number):
    res = run_criterion(number, "full")
    print("\n" + res.line())
    assert res.passed, res.counterexample
    assert res.within_budget, f"runtime {res.runtime:.1f} s exceeds the {res.budget} s budget"
    return res


def test_criterion_01_carlitz():
    _check(1)


def test_criterion_02_so3_both_branches():
    _check(2)


def test_criterion_03_quadric_and_so4():
    _check(3)


def test_criterion_04_so_chain_and_convolution():
    _check(4)


def test_criterion_05_frobenius_traces():
    res = _check(5)
    assert len(res.details["rows"]) == 12
    assert all(r["residual_zero"] for r in res.details["rows"])


def test_criterion_06_ordinarity():
    _check(6)


def test_criterion_07_lpoly_and_hypergeometric_slopes():
    res = _check(7)
    degrees = {(r["family"], r.get("d")): len(r["slopes"]) for r in res.details["rows"]}
    assert degrees[("f_d", 1)] == 3 and degrees[("f_d", 2)] == 6


def test_criterion_08_dwork_congruences():
    res = _check(8)
    assert all(res.details["checks"].values())


def test_criterion_09_unit_root_crosscheck():
    _check(9)


def test_criterion_10_property_suites():
    res = _check(10)
    assert res.details["random"]["cases_per_ring"] == 10_000
    assert res.details["weil"]["qmax"] == 16 and res.details["weil"]["nmax"] == 4


def test_mutation_is_detected():
    detected, cex = mutation_check()
    print(f"\nmutation check {'PASS' if detected else 'FAIL'}: shifted additive character is detected")
    assert detected and cex is not None


def test_all_criteria_present():
    assert sorted(CRITERIA) == list(range(1, 11))
