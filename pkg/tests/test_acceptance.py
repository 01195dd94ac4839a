"""Acceptance battery: one test per criterion, each printing a PASS/FAIL line.

Thresholds are re-asserted here from the reported metrics rather than trusted
from the criterion's own flag.
"""

import time

import numpy as np
import pytest

from oscmult import suite

RUNTIME_LIMITS = {1: 30.0, 2: 60.0, 4: 120.0, 6: 30.0}


@pytest.fixture
def report(capsys):
    def emit(crit, elapsed):
        with capsys.disabled():
            print(f"\n{crit.line()}  ({elapsed:.1f} s)")

    return emit


def run(number, report):
    start = time.perf_counter()
    crit = suite.CRITERIA[number]()
    elapsed = time.perf_counter() - start
    report(crit, elapsed)
    if number in RUNTIME_LIMITS:
        assert elapsed < RUNTIME_LIMITS[number]
    return crit


def test_criterion_1_class_condition_slopes(report):
    c = run(1, report)
    for key, row in c.metrics["slopes"].items():
        assert abs(row["linf"] - row["linf_expected"]) <= 0.05, key
        assert abs(row["sobolev"] - row["sobolev_expected"]) <= 0.05, key
    assert len(c.metrics["slopes"]) == 9 and c.passed


def test_criterion_2_key_estimate(report):
    c = run(2, report)
    assert c.metrics["violations"] == 0
    assert c.metrics["max_ratio_over_constant"] <= 1.0 and c.passed


def test_criterion_3_large_part_integrability(report):
    c = run(3, report)
    m = c.metrics
    assert m["bounds_hold"]
    assert m["expected_rate"] == pytest.approx(0.5 * (2.0 - 2 * 0.75) / 2)
    assert abs(m["rate"] - m["expected_rate"]) <= 0.25 * m["expected_rate"], (
        f"fitted rate {m['rate']:.4f} vs {m['expected_rate']:.4f}")
    assert m["tail_estimate"] < 1e-3
    assert c.passed


def test_criterion_4_heat_kernel_oracle(report):
    c = run(4, report)
    assert c.metrics["max_rel_error"] <= 1e-6
    assert abs(c.metrics["mass"] - 1.0) <= 1e-3 and c.passed


def test_criterion_5_plancherel(report):
    c = run(5, report)
    ratios = np.array(list(c.metrics["ratios"].values()))
    assert len(ratios) == 5
    assert np.max(np.abs(ratios / ratios.mean() - 1.0)) <= 0.02
    assert abs(c.metrics["piece_slope"] - 4.0) <= 0.05 and c.passed


def test_criterion_6_cz_suite(report):
    c = run(6, report)
    assert c.metrics["cases"] == 1000
    assert all(v == 0 for v in c.metrics["violations"].values()) and c.passed


def test_criterion_7_weak_type(report):
    c = run(7, report)
    consts = np.array(c.metrics["constants"])
    unbounded = np.array(c.metrics["constants_unbounded"])
    assert np.all(np.diff(unbounded) > 0)
    assert consts.max() / consts.min() < 1.3, f"spread {consts.max() / consts.min():.4f}"
    assert c.passed


def test_criterion_8_atoms(report):
    c = run(8, report)
    far = np.array(list(c.metrics["far"].values()))
    assert c.metrics["near_bound_holds"]
    assert c.metrics["ablation_factor"] >= 3.0
    assert far.max() / far.min() <= 1.5, f"spread {far.max() / far.min():.4g}"
    assert c.passed


def test_criterion_9_lp_sharpness(report):
    c = run(9, report)
    for p, row in c.metrics["scan"].items():
        if row["distance"] <= 0.25:
            assert row["verdict"] == "stable", p
        elif row["distance"] >= 0.35:
            assert row["verdict"] == "growing" and row["exponent"] > 0, p
    assert c.passed


def test_criterion_10_tail_sums(report):
    c = run(10, report)
    assert c.metrics["summands_under_bound"]
    assert abs(c.metrics["bound_slope"] - (-(0.75 - 0.5))) <= 0.1 and c.passed
