import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscmult.grid import SampledFunction, UniformGrid
from oscmult.heisenberg import (
    IDENTITY,
    Q,
    HeisenbergPoint,
    TruncationError,
    dilated_multiplier,
    gaussian,
    group_inv,
    group_mul,
    grid_for_scale,
    haar_scaling_ratio,
    heat_multiplier,
    heat_oracle_check,
    horizontal_fields,
    key_lie_probe,
    koranyi,
    mean_value_check,
    modulated_window,
    multiplier_sobolev,
    piece_multiplier,
    radial_energy,
    sublaplacian_apply,
    sublaplacian_kernel,
    weighted_l2_group,
    window_multiplier,
)
from oscmult.multiplier import Oscillating

coord = st.floats(-5.0, 5.0)
points = st.builds(HeisenbergPoint, coord, coord, coord)


@pytest.fixture(scope="module")
def heat_kernel():
    return sublaplacian_kernel(heat_multiplier, label="heat")


def close(p, q, tol=1e-12):
    return np.allclose(p.as_array(), q.as_array(), atol=tol, rtol=0)


# -- group -------------------------------------------------------------------------


@settings(max_examples=200)
@given(points, points, points)
def test_group_axioms(p, q, r):
    assert close((p * q) * r, p * (q * r), 1e-10)
    assert close(p * IDENTITY, p) and close(IDENTITY * p, p)
    assert close(p * p.inverse(), IDENTITY)
    assert np.allclose(group_mul(p.as_array(), q.as_array()), (p * q).as_array(), atol=1e-14)
    assert np.allclose(group_inv(p.as_array()), p.inverse().as_array())


def test_non_commutative_witness():
    a, b = HeisenbergPoint(1, 0, 0), HeisenbergPoint(0, 1, 0)
    assert a * b == HeisenbergPoint(1, 1, 0.5)
    assert b * a == HeisenbergPoint(1, 1, -0.5)


@settings(max_examples=100)
@given(points, st.floats(0.01, 100.0))
def test_norm_is_homogeneous_and_symmetric(p, r):
    assert p.dilate(r).norm() == pytest.approx(r * p.norm(), rel=1e-12, abs=1e-300)
    assert p.inverse().norm() == pytest.approx(p.norm(), rel=1e-14)


def test_norm_constant():
    assert koranyi(0.0, 0.0, 1.0) == pytest.approx(2.0)
    assert koranyi(1.0, 0.0, 0.0) == 1.0


def test_horizontal_field_on_polynomial():
    g = UniformGrid(3, 4.0, 32)
    _, _, t = g.mesh()
    f = SampledFunction(g, np.broadcast_to(t**2, g.shape).copy())
    Xf, Yf, _ = horizontal_fields(f)
    x, y = g.axis(0), g.axis(1)
    i, k = int(np.argmin(np.abs(x - 1))), int(np.argmin(np.abs(y - 2)))
    tt = g.axis(2)[4:-4]
    # X t^2 = -(y/2) 2t = -2t at y = 2, and Y t^2 = (x/2) 2t = t at x = 1
    assert np.allclose(Xf[i, k, 4:-4], -2 * tt, atol=1e-10)
    assert np.allclose(Yf[i, k, 4:-4], tt, atol=1e-10)


# -- kernels ---------------------------------------------------------------------


def test_zero_multiplier_gives_zero_kernel():
    K = sublaplacian_kernel(lambda mu: np.zeros_like(np.asarray(mu, dtype=float)))
    assert K.l1 == 0.0


def test_heat_kernel_against_oracle(heat_kernel):
    cmp = heat_oracle_check(heat_kernel, region=4.0)
    assert cmp.points > 1000
    assert cmp.max_rel_error < 1e-6


def test_heat_kernel_mass(heat_kernel):
    assert heat_kernel.mass() == pytest.approx(1.0, abs=1e-3)


def test_truncation_error_without_refinement():
    with pytest.raises(TruncationError) as info:
        sublaplacian_kernel(heat_multiplier, k_max=2, refine=False)
    assert info.value.suggested_k_max > 2


def test_plancherel_constant_is_stable_across_family(heat_kernel):
    phi = window_multiplier()
    ratios = []
    for h, grid in [(phi, None), (dilated_multiplier(phi, 2.0), grid_for_scale(0.5)), (window_multiplier(power=2), None)]:
        K = sublaplacian_kernel(h, grid=grid)
        ratios.append(K.l2**2 / radial_energy(h))
    ratios.append(heat_kernel.l2**2 / radial_energy(heat_multiplier))
    assert ratios[1] == pytest.approx(ratios[0], rel=5e-3)
    assert ratios[2] == pytest.approx(ratios[0], rel=2e-2)
    assert ratios[3] == pytest.approx(1 / 8, rel=1e-6)


def test_sublaplacian_of_heat_kernel(heat_kernel):
    # L K_h = K_{mu^2 h}: the heat kernel against the kernel of mu^2 exp(-mu^2)
    K2 = sublaplacian_kernel(lambda mu: np.asarray(mu, dtype=float) ** 2 * np.exp(-np.asarray(mu, dtype=float) ** 2))
    g = heat_kernel.grid
    inner = np.broadcast_to(koranyi(*g.mesh()) < 3.0, g.shape)
    resid = (sublaplacian_apply(heat_kernel.samples) + K2.values)[inner]
    assert np.max(np.abs(resid)) < 5e-3 * np.max(np.abs(K2.values))


@pytest.mark.parametrize("r", [0.5, 0.7, 1.5, 2.0])
def test_haar_measure_scaling(r):
    # contracting dilations spread the integrand, so the box must grow with 1/r (and 1/r^2 in t)
    grid = UniformGrid(3, (12.0, 12.0, 24.0), 128) if r < 0.6 else None
    assert haar_scaling_ratio(gaussian, r, grid) == pytest.approx(1.0, rel=1e-2)


def test_homogeneous_dimension():
    assert Q == 4


# -- mean value inequality -----------------------------------------------------------


def test_mean_value_identity_increment():
    x = np.random.default_rng(0).normal(size=(100, 3))
    assert np.all(gaussian(group_mul(x, np.zeros(3))) - gaussian(x) == 0)


def test_mean_value_constant_stable():
    base = mean_value_check(samples=20000)
    assert mean_value_check(samples=40000) == pytest.approx(base, rel=0.1)
    assert mean_value_check(samples=20000, ratio=0.05) == pytest.approx(base, rel=0.2)
    with pytest.raises(ValueError):
        mean_value_check(ratio=0.2)


# -- weighted norms and the key estimate below Q ---------------------------------------


def test_weighted_norm_at_zero_weight(heat_kernel):
    assert weighted_l2_group(heat_kernel, 0.0) == pytest.approx(2 * heat_kernel.l2, rel=1e-12)


def test_weighted_norm_bounded_by_multiplier_sobolev():
    spec = Oscillating(0.5, 4.0)
    ratios = []
    for j in range(4):
        h = piece_multiplier(spec, j)
        K = sublaplacian_kernel(h)
        assert weighted_l2_group(K, 2.1) >= K.l2
        ratios.append(weighted_l2_group(K, 2.1) / multiplier_sobolev(h, 2.1))
    assert max(ratios) < 1.0


def test_modulated_window_is_finite_at_origin():
    h = modulated_window(4.0)
    v = h(np.array([0.0, 0.5, 1.0, 3.0]))
    assert np.all(np.isfinite(v)) and v[0] == 0 and v[3] == 0
    assert abs(v[2]) == pytest.approx(float(window_multiplier()(np.array([1.0]))[0]))


def test_key_lie_sup_decreases_in_s():
    rep = key_lie_probe(Oscillating(0.5, 4.0), [1.0, 2.0, 3.0], range(0, 3), (2.0, 4.0))
    sups = [rep.sup_ratio[s] for s in rep.s_grid]
    assert all(a >= b for a, b in zip(sups, sups[1:]))
    assert rep.to_csv().splitlines()[0] == "member,s,l1,sobolev,ratio"


# -- outputs ----------------------------------------------------------------------


def test_sidecar_and_save(heat_kernel, tmp_path):
    meta = heat_kernel.sidecar()
    for key in ("group", "norm", "norm_constant", "homogeneous_dimension", "k_max", "lam_grid",
                "truncation_error", "grid"):
        assert key in meta
    assert meta["norm_constant"] == 16.0 and meta["homogeneous_dimension"] == 4
    stem = str(tmp_path / "heat")
    heat_kernel.save(stem)
    back = SampledFunction.from_bytes((tmp_path / "heat.bin").read_bytes())
    assert np.array_equal(back.values, heat_kernel.values)
    assert json.loads((tmp_path / "heat.json").read_text())["k_max"] == heat_kernel.k_max
