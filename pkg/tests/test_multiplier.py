import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from oscmult.multiplier import (
    DEFAULT_WINDOW,
    AnalyticFamily,
    Custom,
    Cutoff,
    HardyStrong,
    Modulated,
    Oscillating,
    boundedness_threshold,
    check_condition_neg,
    check_condition_pos,
    class_membership,
    cutoff_factor,
    dyadic_piece,
    evaluate,
    expected_slopes,
    hardy_parameters,
    log2_slope,
    modulate_and_fit,
    outer_half,
    piece_grid,
    spec_from_json,
    spec_to_json,
    split_small_large,
)

ONE = Custom(lambda lam: 1.0)


# -- evaluation ------------------------------------------------------------------------


def test_eval_cutoff_region_is_zero():
    assert evaluate(Oscillating(0.5, 1.0), 0.5) == 0


def test_eval_theta_two_has_no_decay():
    assert evaluate(Oscillating(2.0, 0.0), 2.0) == pytest.approx(np.exp(4j), abs=1e-15)


def test_eval_far_from_cutoff_matches_formula():
    lam = 37.0
    assert evaluate(Oscillating(0.5, 1.0), lam) == pytest.approx(np.exp(1j * lam**0.5) * lam**-0.25, rel=1e-14)


def test_wave_case_rejected_at_construction():
    with pytest.raises(ValueError):
        Oscillating(1.0, 1.0)
    spec = Oscillating(0.5, 1.0)
    with pytest.raises(ValueError):
        spec(np.array([0.0, 1.0]))


def test_hardy_parameter_map():
    assert hardy_parameters(1, 1, 1) == (0.5, 1.0)
    m = HardyStrong(1, 1, 1)
    assert (m.theta, m.beta) == (0.5, 1.0)


@pytest.mark.parametrize("a,n,expected", [(1, 1, 1.5), (2, 3, 6.0)])
def test_boundedness_threshold(a, n, expected):
    assert boundedness_threshold(a, n) == expected


@settings(max_examples=50)
@given(st.floats(0.05, 10.0), st.integers(1, 3), st.floats(-3.0, 3.0))
def test_threshold_separates_bounded_multipliers(a, n, shift):
    b_star = boundedness_threshold(a, n)
    _, beta = hardy_parameters(a, b_star + shift, n)
    if abs(shift) > 1e-9:
        assert (beta < 0) == (shift > 0)
    assert hardy_parameters(a, b_star, n)[1] == pytest.approx(0.0, abs=1e-12)


def test_bounded_at_threshold():
    a, n = 1.0, 1
    m = HardyStrong(a, boundedness_threshold(a, n), n)
    lam = np.geomspace(1.0, 1e8, 200)
    assert np.max(np.abs(m(lam))) <= 1.0 + 1e-12


def test_cutoffs_are_smooth_steps():
    lam = np.array([0.5, 1.0, 2.0, 3.0])
    assert cutoff_factor(Cutoff.PLUS, lam).tolist() == [0.0, 0.0, 1.0, 1.0]
    assert cutoff_factor(Cutoff.MINUS, lam)[0] == 1.0
    assert cutoff_factor(Cutoff.MINUS, lam)[1] == 0.0


@pytest.mark.parametrize("spec", [
    Oscillating(0.5, 1.0),
    Oscillating(-1.0, 2.0, "minus"),
    HardyStrong(2.0, 1.0, 3),
    Modulated(Oscillating(2.0, 0.0), 3.0),
    AnalyticFamily(Oscillating(0.5, 1.0), 0.1, 0.5 + 2j, 1.0),
])
def test_json_round_trip(spec):
    back = spec_from_json(spec_to_json(spec))
    lam = np.geomspace(0.3, 50.0, 40)
    assert np.allclose(back(lam), spec(lam), rtol=1e-14, atol=0)
    assert json.loads(spec_to_json(back)) == json.loads(spec_to_json(spec))


@settings(max_examples=40)
@given(st.floats(0.1, 0.9), st.floats(0.0, 4.0), st.floats(0.01, 2.0), st.floats(1.0, 3.0),
       st.floats(0.3, 30.0))
def test_analytic_family_at_zero(theta, beta, delta, dim, lam):
    base = Oscillating(theta, beta)
    fam = AnalyticFamily(base, delta, 0.0, dim)
    expected = lam ** (theta * beta / 2.0) * evaluate(base, lam)
    assert evaluate(fam, lam) == pytest.approx(expected, rel=1e-12, abs=1e-300)


# -- window and pieces -----------------------------------------------------------------


def test_window_support_and_sign():
    lam = np.linspace(0.0, 5.0, 20001)
    phi = DEFAULT_WINDOW(lam)
    assert np.all(phi >= 0)
    assert np.all(phi[(lam < 0.5) | (lam > 2.0)] == 0)


@settings(max_examples=200)
@given(st.integers(3, 20), st.floats(0.0, 1.0))
def test_partition_of_unity(J, u):
    lam = 2.0 ** ((-J + 1) + u * (2 * J - 2))
    assert abs(DEFAULT_WINDOW.partition_sum(lam, J) - 1.0) < 1e-8


@settings(max_examples=100)
@given(st.floats(0.0, 1.0))
def test_pieces_resum_to_multiplier(u):
    J = 12
    lam = 2.0 ** (-J + 1 + u * (2 * J - 2))
    spec = Oscillating(0.5, 1.0, "none")
    total = sum(evaluate(spec, lam) * DEFAULT_WINDOW(lam * 2.0**-j) for j in range(-J, J + 1))
    assert total == pytest.approx(evaluate(spec, lam), rel=1e-8, abs=1e-12)


def test_piece_of_identity_is_window():
    for j in (-5, 0, 7):
        p = dyadic_piece(ONE, j=j)
        assert p.sup() == pytest.approx(DEFAULT_WINDOW.max(), rel=1e-6)


def test_piece_of_pure_modulation():
    for y in (1.0, 5.0):
        spec = Custom(lambda lam, y=y: lam ** (1j * y))
        for j in (-3, 4):
            assert dyadic_piece(spec, j=j).sup() == pytest.approx(DEFAULT_WINDOW.max(), rel=1e-6)


def test_piece_sup_against_dense_oracle():
    lam = np.linspace(0.5, 2.0, 1_000_001)
    ref = 2.0**-2 * np.max(lam**-0.25 * DEFAULT_WINDOW(lam))
    assert dyadic_piece(Oscillating(0.5, 1.0), j=8).sup() == pytest.approx(ref, rel=1e-2)


def test_piece_support_and_l2_bound():
    p = dyadic_piece(Oscillating(0.5, 1.0), j=5)
    x = p.grid.axis()
    assert np.all(p.samples.values[(x < 0.5) | (x > 2.0)] == 0)
    assert p.l2() <= p.sup() * np.sqrt(1.5)


def test_piece_grid_requirements():
    with pytest.raises(ValueError):
        dyadic_piece(ONE, j=0, grid=piece_grid(1 << 6))
    with pytest.raises(ValueError):
        dyadic_piece(Custom(lambda lam: 1.0 / (lam - lam)), j=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(-20.0, 20.0), st.integers(-6, 10))
def test_unimodular_invariance(y, j):
    base = Oscillating(0.5, 1.0)
    # |lam^(iy)| = 1 up to rounding in the complex power
    assert dyadic_piece(Modulated(base, y), j=j).sup() == pytest.approx(dyadic_piece(base, j=j).sup(), rel=1e-14)


def test_scaling_consistency():
    theta, beta = 0.5, 1.0
    spec = Oscillating(theta, beta)
    vals = [2.0 ** (j * theta * beta / 2) * dyadic_piece(spec, j=j).sup() for j in range(1, 13)]
    assert max(vals) / min(vals) <= 4.0


# -- Sobolev oracle for pieces -------------------------------------------------------


def piece_sobolev_oracle(spec, j, eps=1e-6):
    """||m^j||_{L^2_1} from \\int |f|^2 + |f'|^2 with f' by symmetric differences."""

    def f(u):
        return evaluate(spec, u * 2.0**j) * float(DEFAULT_WINDOW(np.array([u]))[0])

    def df(u):
        return (f(u + eps) - f(u - eps)) / (2 * eps)

    opts = dict(epsabs=0.0, epsrel=1e-10, limit=4000)
    a, _ = integrate.quad(lambda u: abs(f(u)) ** 2, 0.5, 2.0, **opts)
    b, _ = integrate.quad(lambda u: abs(df(u)) ** 2, 0.5 + eps, 2.0 - eps, **opts)
    return np.sqrt(a + b)


@pytest.mark.parametrize("j", [0, 1, 3])
def test_neg_pieces_against_quadrature(j):
    spec = Oscillating(-1.0, 2.0)
    assert dyadic_piece(spec, j=j).sobolev(1.0) == pytest.approx(piece_sobolev_oracle(spec, j), rel=1e-5, abs=1e-12)


def test_condition_neg_examples():
    spec = Oscillating(0.5, 1.0)
    r = check_condition_neg(spec, s=1.0, j_range=range(1, 6))
    assert r.sup == 0 and r.js == []
    r = check_condition_neg(ONE, s=1.5, j_range=range(-4, 5))
    phi = dyadic_piece(ONE, j=0).sobolev(1.5)
    assert r.sup == pytest.approx(phi, rel=1e-12)
    assert r.slope == pytest.approx(0.0, abs=1e-9)


def test_condition_neg_theta_negative():
    # the range below is empty for theta < 0, so the sup is vacuously finite
    spec = Oscillating(-1.0, 2.0)
    r = check_condition_neg(spec, s=1.0, j_range=range(-12, 0))
    assert np.isfinite(r.sup) and r.slope <= 0
    # on the region j theta <= 0 the pieces vanish beyond the cutoff: finite sup, slope <= 0
    r = check_condition_neg(spec, s=1.0, j_range=range(0, 13))
    oracle = [piece_sobolev_oracle(spec, j) for j in range(0, 3)]
    assert r.sup == pytest.approx(max(oracle), rel=1e-5)
    assert r.slope <= 0 and r.verdict == "finite"


def test_condition_pos_vacuous_for_theta_zero():
    r = check_condition_pos(ONE, s=1.0, beta=0.0, j_range=range(-5, 6))
    assert r.sup_linf == 0 and r.sup_sobolev == 0


@pytest.mark.slow
def test_condition_pos_slopes_against_quadrature():
    spec = Oscillating(0.5, 1.0)
    js = list(range(1, 17))
    r = check_condition_pos(spec, s=1.0, j_range=js)
    idx = outer_half(js)
    oracle = [piece_sobolev_oracle(spec, js[i]) for i in idx]
    assert log2_slope([js[i] for i in idx], oracle) == pytest.approx(r.slope_sobolev, abs=0.01)
    assert r.slope_sobolev == pytest.approx(0.25, abs=0.05)
    assert r.slope_linf == pytest.approx(-0.25, abs=0.02)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 3.0))
def test_linf_slope_is_independent_of_s(s):
    spec = Oscillating(0.5, 1.0)
    r = check_condition_pos(spec, s=s, j_range=range(1, 13))
    assert r.slope_linf == pytest.approx(-0.25, abs=0.02)


def test_expected_slopes():
    assert expected_slopes(0.5, 1.0, 1.0) == (-0.25, 0.25)
    assert expected_slopes(-1.0, 2.0, 2.0) == (1.0, -1.0)


# -- class membership ---------------------------------------------------------------


def test_oscillating_multiplier_is_member():
    rep = class_membership(Oscillating(0.5, 1.0), s=1.0)
    assert rep.verdict == "member"
    assert all(v <= rep.s + 1e-12 for v in rep.s_grid) and rep.s in rep.s_grid


def test_identity_is_member():
    assert class_membership(ONE, s=2.0).verdict == "member"


def test_wrong_beta_is_rejected():
    rep = class_membership(Oscillating(0.5, 1.0), beta=2.0, s=1.0)
    assert rep.verdict == "not member"
    assert rep.pos[1.0].verdict_linf == "divergent"


def test_class_report_serialization():
    rep = class_membership(Oscillating(0.5, 1.0), s=1.0, s_grid=[0.5, 1.0], j_range=range(-3, 4))
    rows = rep.to_csv().strip().splitlines()
    assert rows[0].startswith("j,s_prime,region")
    assert len(rows) == 1 + 7 * 2
    doc = json.loads(rep.to_json())
    assert doc["verdict"] == rep.verdict and set(doc["pos"]) == {"0.5", "1.0"}


def test_s_grid_must_contain_s():
    with pytest.raises(ValueError):
        class_membership(Oscillating(0.5, 1.0), s=1.0, s_grid=[0.5])


def test_modulation_growth():
    spec = Oscillating(0.5, 1.0)
    base = class_membership(spec, s=1.0, s_grid=[1.0])
    out = modulate_and_fit(spec, s=1.0, y_list=[0, 1, 2, 4, 8, 16])
    assert out["components"][0] == [base.neg.sup, base.pos[1.0].sup_linf, base.pos[1.0].sup_sobolev]
    assert out["degree"] <= 2.0


def test_modulated_sobolev_against_quadrature():
    spec = Modulated(Oscillating(0.5, 1.0), 8.0)
    assert dyadic_piece(spec, j=2).sobolev(1.0) == pytest.approx(piece_sobolev_oracle(spec, 2), rel=1e-5)


@pytest.mark.parametrize("theta,small,large", [
    (0.0, list(range(-3, 4)), []),
    (0.5, [-3, -2, -1, 0], [1, 2, 3]),
    (-1.0, [0, 1, 2, 3], [-3, -2, -1]),
])
def test_split_small_large(theta, small, large):
    assert split_small_large(theta, range(-3, 4)) == (small, large)
