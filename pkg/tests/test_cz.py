import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oscmult.cz import (
    B_STAR,
    atom_test,
    cz_decompose,
    distribution_constant,
    make_atom,
    optimal_lambda,
    partition_pairs,
    spike,
    split_n1_n2,
    tail_sum_criterion,
    weak_type_probe,
)
from oscmult.grid import SampledFunction, UniformGrid
from oscmult.kernel_rn import RadialOperator
from oscmult.multiplier import Oscillating
from oscmult.suite import cz_suite, random_cz_input

ATOM_GRID = UniformGrid(1, 64.0, 1 << 14)


def line(values, R=4.0):
    return SampledFunction(UniformGrid(1, R, len(values)), np.asarray(values, dtype=float))


def stopping_time_oracle(a, h, alpha):
    """Top-down recursion over dyadic intervals of a 1-d sample array: (level, index) of maximal cubes."""
    out = set()

    def visit(start, length):
        if np.sum(a[start:start + length]) / length > alpha:
            out.add((int(np.log2(length)), start // length))
        elif length > 1:
            visit(start, length // 2)
            visit(start + length // 2, length // 2)

    half = len(a) // 2
    visit(0, half)
    visit(half, half)
    return out


# -- decomposition ---------------------------------------------------------------------


def test_small_function_has_no_cubes():
    f = line(np.full(64, 0.3))
    dec = cz_decompose(f, 0.5)
    assert dec.cubes == [] and np.array_equal(dec.g, f.values)


def test_indicator_of_unit_interval():
    g = UniformGrid(1, 4.0, 256)
    x = g.axis()
    alpha = 0.25
    f = SampledFunction(g, 2 * alpha * ((x >= 0) & (x < 1)))
    dec = cz_decompose(f, alpha)
    assert len(dec.cubes) == 1
    c = dec.cubes[0]
    sl = c.slices()[0]
    assert c.side == 1.0 and x[sl][0] == 0.0
    assert np.all(dec.bad_part(0) == 0)


def test_alpha_must_be_positive_and_admissible():
    f = line(np.ones(64))
    with pytest.raises(ValueError):
        cz_decompose(f, 0.0)
    with pytest.raises(ValueError):
        cz_decompose(f, 0.5)


def test_invariants_over_many_random_inputs():
    cases, fails = cz_suite(1000, seed=7)
    assert cases == 1000 and sum(fails.values()) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cubes_match_recursive_oracle(seed):
    rng = np.random.default_rng(seed)
    f, alpha = random_cz_input(rng, 1)
    dec = cz_decompose(f, alpha)
    got = {(c.level, c.index[0]) for c in dec.cubes}
    assert got == stopping_time_oracle(np.abs(f.values), f.grid.h, alpha)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_cubes_are_disjoint_and_labelled(seed):
    f, alpha = random_cz_input(np.random.default_rng(seed), 2)
    dec = cz_decompose(f, alpha)
    cover = np.zeros(f.grid.shape, dtype=int)
    for i, c in enumerate(dec.cubes):
        cover[c.slices()] += 1
        assert np.all(dec.labels[c.slices()] == i)
    assert cover.max(initial=0) <= 1
    assert np.all((dec.labels >= 0) == (cover == 1))


# -- pairs and Lambda ----------------------------------------------------------------


def test_partition_pairs_examples():
    N, P = partition_pairs([1, 2, 4], [-3, -1, 0], 0.5)
    assert (4, -3) in N and (2, -1) in N and (1, 0) in P and (4, -1) in P
    with pytest.raises(ValueError):
        partition_pairs([-1], [0], 0.5)
    with pytest.raises(ValueError):
        partition_pairs([1], [0], 1.0)


@settings(max_examples=100)
@given(st.lists(st.integers(1, 30), min_size=1, max_size=8, unique=True),
       st.lists(st.integers(-30, 30), min_size=1, max_size=8, unique=True),
       st.sampled_from([0.25, 0.5, 2.0, 3.0]))
def test_partition_pairs_exhaustive(js, Ls, theta):
    N, P = partition_pairs(js, Ls, theta)
    assert N.isdisjoint(P) and N | P == {(j, L) for j in js for L in Ls}
    assert all(j * (1 - theta) + L <= 0 for j, L in N)


def test_n1_n2_split():
    assert split_n1_n2(-4) == "N1" and split_n1_n2(-3) == "N2"


@pytest.mark.parametrize("j,L", [(4, -3), (2, -2)])
def test_lambda_examples_in_n1(j, L):
    ch = optimal_lambda(j, L, 0.5, "N1")
    assert ch.Lam == 1.0 and ch.imbalance == 1.0


@settings(max_examples=100)
@given(st.integers(1, 20), st.floats(2.1, 5.0), st.sampled_from([0.25, 0.5, 0.75]))
def test_n2_balance_point(j, s, theta):
    Q = 4.0
    L = -j
    ch = optimal_lambda(j, L, theta, "N2", s=s, Q=Q)
    u = j * (1 - theta) + L
    lam = ch.balanced_Lam
    small = lam * Q / 2 - j * theta * Q / 2
    large = -(s - Q / 2) * (u + lam)
    assert small == pytest.approx(large, abs=1e-9)
    # the stated choice sits j theta / 2 below the balance point
    assert ch.imbalance == pytest.approx(2 ** (j * theta * s / 2), rel=1e-12)


def test_lambda_rejects_pairs_outside_n():
    with pytest.raises(ValueError):
        optimal_lambda(4, 0, 0.5, "N1")
    with pytest.raises(ValueError):
        optimal_lambda(4, -3, 0.5, "N2", s=1.5)


# -- atoms -----------------------------------------------------------------------------


@pytest.mark.parametrize("kind", ["haar", "sine"])
@pytest.mark.parametrize("L", [-4, 0, 3])
def test_atom_normalization(kind, L):
    a = make_atom(ATOM_GRID, L, kind=kind)
    cell = ATOM_GRID.cell_volume
    assert abs(np.sum(a.values)) * cell < 1e-12
    assert np.max(np.abs(a.values)) <= (1 + 1e-12) / a.measure
    assert np.sqrt(np.sum(a.values**2) * cell) <= a.measure**-0.5 * (1 + 1e-12)


def test_atom_rejections():
    with pytest.raises(ValueError):
        make_atom(ATOM_GRID, -12)
    with pytest.raises(ValueError):
        make_atom(ATOM_GRID, 0, center=ATOM_GRID.h / 3)
    with pytest.raises(ValueError):
        make_atom(UniformGrid(2, 4.0, 32), 0)


def test_operator_commutes_with_translation():
    op = RadialOperator(Oscillating(0.5, 1.0), ATOM_GRID, 0.0, 2.0**6)
    a = make_atom(ATOM_GRID, -1)
    k = 137
    shifted = make_atom(ATOM_GRID, -1, center=k * ATOM_GRID.h)
    assert np.allclose(op(shifted.values), np.roll(op(a.values), k), atol=1e-12)


def test_atom_near_field_bound_and_ablation():
    res = atom_test(Oscillating(0.5, 1.0), range(-4, 3), ATOM_GRID, truncation=2.0**6, ablation_L=0)
    assert all(n <= b for n, b in zip(res.near, res.near_bound))
    assert all(f == pytest.approx(n + t) for f, n, t in zip(res.full, res.near, res.far))
    assert res.ablation_far is not None and res.ablation_factor > 0
    assert B_STAR == 8.0


# -- weak type -----------------------------------------------------------------------


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0))
def test_distribution_constant_scaling_and_chebyshev(seed, c):
    v = np.random.default_rng(seed).standard_cauchy(512)
    cell = 0.01
    base = distribution_constant(v, cell)
    assert distribution_constant(c * v, cell) == pytest.approx(c * base, rel=1e-12)
    assert base <= np.sum(np.abs(v)) * cell * (1 + 1e-12)
    alphas = np.geomspace(1e-3, 1e3, 50)
    assert distribution_constant(v, cell, alphas) <= base * (1 + 1e-12)


def test_spike_is_normalized():
    g = UniformGrid(1, 8.0, 256)
    v = spike(g)
    assert np.sum(v) * g.cell_volume == pytest.approx(1.0)
    assert distribution_constant(v, g.cell_volume) == pytest.approx(1.0)


def test_weak_probe_is_homogeneous_in_input():
    g = UniformGrid(1, 32.0, 1 << 14)
    spec = Oscillating(0.5, 1.0)
    a = weak_type_probe(spec, {"spike": spike(g)}, (2**4, 2**6), g)
    b = weak_type_probe(spec, {"spike": 5.0 * spike(g)}, (2**4, 2**6), g)
    assert np.allclose(a.constants, b.constants, rtol=1e-12)


# -- tail sums -----------------------------------------------------------------------


def test_tail_sum_bounds_and_decay():
    r = tail_sum_criterion(Oscillating(0.5, 1.0), s=0.75, L_grid=range(-8, 5), j_max=16)
    assert all(t <= b for t, b in zip(r.tails, r.bounds))
    large = [r.per_L[L] for L in range(0, 5)]
    assert all(a > b for a, b in zip(large, large[1:]))
    assert large[-1] < large[0] / 10
    with pytest.raises(ValueError):
        tail_sum_criterion(Oscillating(0.5, 1.0), s=0.5)
