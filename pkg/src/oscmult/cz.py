"""Calderon-Zygmund decomposition, atoms, and the experiments around weak type (1,1).

Dyadic cubes are blocks of grid samples: a cube of level ``k`` holds 2^k
samples per axis and starts at an index divisible by 2^k, so its side is
2^k h.  With h a power of two this makes [0, 1) a dyadic cube whenever it fits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import SampledFunction, UniformGrid, l1_tail
from .kernel_rn import RadialOperator, piece_kernel
from .multiplier import DEFAULT_WINDOW, DyadicWindow, MultiplierSpec, _check_theta, log2_slope

B_STAR = 8.0  # the dilate used for "far from the ball"


# -- decomposition -------------------------------------------------------------------


def block_reduce(a: np.ndarray, k: int) -> np.ndarray:
    """Sums over aligned blocks of 2^k samples per axis."""
    b = 1 << k
    shape = []
    for n in a.shape:
        shape += [n // b, b]
    return a.reshape(shape).sum(axis=tuple(range(1, 2 * a.ndim, 2)))


@dataclass
class Cube:
    level: int  # 2^level samples per side
    index: tuple  # block index per axis
    side: float

    @property
    def L(self) -> float:
        """log2 of the side length."""
        return math.log2(self.side)

    def slices(self) -> tuple:
        b = 1 << self.level
        return tuple(slice(i * b, (i + 1) * b) for i in self.index)

    def measure(self, d: int) -> float:
        return self.side**d

    def center(self, grid: UniformGrid) -> np.ndarray:
        return np.array([grid.axis(a)[s].mean() for a, s in enumerate(self.slices())])


@dataclass
class CZDecomposition:
    f: SampledFunction
    alpha: float
    cubes: list[Cube]
    g: np.ndarray
    labels: np.ndarray  # cube number per sample, -1 off the cubes

    @property
    def grid(self) -> UniformGrid:
        return self.f.grid

    def bad_part(self, i: int) -> np.ndarray:
        """b_B on its cube (array over the cube's samples)."""
        sl = self.cubes[i].slices()
        return self.f.values[sl] - self.g[sl]

    def bad_total(self) -> np.ndarray:
        out = np.zeros_like(self.f.values)
        on = self.labels >= 0
        out[on] = self.f.values[on] - self.g[on]
        return out

    def invariants(self, rel: float = 1e-12) -> dict[str, bool]:
        """The five defining properties, each with rounding slack ``rel``."""
        f, g, d, cell = self.f.values, self.g, self.grid.d, self.grid.cell_volume
        scale = float(np.max(np.abs(f))) if f.size else 0.0
        f_l1 = float(np.sum(np.abs(f)) * cell)
        b_l1 = [float(np.sum(np.abs(self.bad_part(i))) * cell) for i in range(len(self.cubes))]
        means = [abs(complex(np.sum(self.bad_part(i)) * cell)) for i in range(len(self.cubes))]
        measure = sum(c.measure(d) for c in self.cubes)
        return {
            "reconstruction": bool(np.max(np.abs(g + self.bad_total() - f), initial=0.0) <= rel * max(scale, 1e-300)),
            "good_bound": bool(np.max(np.abs(g), initial=0.0) <= 2**d * self.alpha * (1 + rel)),
            "mean_zero": all(m <= rel * max(scale, 1e-300) * c.measure(d) for m, c in zip(means, self.cubes)),
            "bad_l1": sum(b_l1) <= 2 * f_l1 * (1 + rel)
            and all(b <= 2 * 2**d * self.alpha * c.measure(d) * (1 + rel) for b, c in zip(b_l1, self.cubes)),
            "measure": measure <= f_l1 / self.alpha * (1 + rel),
        }


def cz_decompose(f: SampledFunction, alpha: float, n: Optional[int] = None) -> CZDecomposition:
    """Dyadic stopping-time decomposition of f at height alpha.

    A cube is selected when the average of |f| over it exceeds alpha while no
    larger dyadic cube containing it was selected.  The search starts from the
    2^d children of the whole grid, so alpha must dominate the average of |f|
    over those.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    grid = f.grid
    if n is not None and n != grid.d:
        raise ValueError("n must equal the grid dimension")
    if len(set(grid.N)) != 1 or len(set(grid.spacings)) != 1:
        raise ValueError("decomposition needs a cubic grid")
    d, N, h = grid.d, grid.N[0], grid.spacings[0]
    a = np.abs(f.values)
    top = int(math.log2(N)) - 1
    if float(block_reduce(a, top).max()) * grid.cell_volume / (2.0**top * h) ** d > alpha:
        raise ValueError("alpha is below the average of |f| over a top-level cube; enlarge the grid")

    labels = -np.ones(grid.shape, dtype=int)
    cubes: list[Cube] = []
    covered = np.zeros((1,) * d, dtype=bool)
    for k in range(top, -1, -1):
        b = 1 << k
        avg = block_reduce(a, k) * grid.cell_volume / (b * h) ** d
        up = covered
        for ax in range(d):
            up = np.repeat(up, avg.shape[ax] // up.shape[ax], axis=ax)
        pick = (avg > alpha) & ~up
        for idx in zip(*np.nonzero(pick)):
            cube = Cube(k, tuple(int(i) for i in idx), b * h)
            labels[cube.slices()] = len(cubes)
            cubes.append(cube)
        covered = up | pick

    g = np.array(f.values, dtype=complex if np.iscomplexobj(f.values) else float, copy=True)
    for i, c in enumerate(cubes):
        sl = c.slices()
        g[sl] = np.mean(f.values[sl])
    return CZDecomposition(f, float(alpha), cubes, g, labels)


# -- pairs and Lambda -------------------------------------------------------------


def partition_pairs(j_list: Sequence[int], levels: Sequence[float], theta: float) -> tuple[set, set]:
    """N = {(j, L) : j theta > 0, j(1 - theta) + L <= 0} and its complement P."""
    _check_theta(theta)
    N, P = set(), set()
    for j in j_list:
        if not j * theta > 0:
            raise ValueError(f"j = {j} does not satisfy j theta > 0")
        for L in levels:
            (N if j * (1.0 - theta) + L <= 0 else P).add((j, L))
    return N, P


def split_n1_n2(j: int, threshold: float = 4.0) -> str:
    """Which half of the atom argument a j in N belongs to: 'N1' iff j + threshold <= 0."""
    return "N1" if j + threshold <= 0 else "N2"


@dataclass
class LambdaChoice:
    regime: str
    Lam: float
    log2_small: float  # log2 of the S_Lambda estimate
    log2_large: float  # log2 of the L_Lambda estimate
    balanced_Lam: float  # Lambda at which the two estimates coincide

    @property
    def imbalance(self) -> float:
        return 2.0 ** abs(self.log2_small - self.log2_large)


def optimal_lambda(j: int, L: float, theta: float, regime: str, s: float = 2.5, Q: float = 4.0,
                   s_star: Optional[float] = None) -> LambdaChoice:
    """Lambda for the two splits of the atom argument, with both estimates evaluated there.

    N1-split: Lambda = -(j(1-theta) + L); the estimates are
    2^((Q/2 - s*)(u + Lambda)) and 2^(-(s - Q/2)(u + Lambda)), u = j(1-theta) + L.
    N2-split: Lambda solves s Lambda = -(s - Q/2)(j + L) + j theta s / 2; the
    estimates are 2^(Lambda Q/2 - j theta Q/2) and 2^(-(s - Q/2)(u + Lambda)).
    """
    _check_theta(theta)
    u = j * (1.0 - theta) + L
    if not (j * theta > 0 and u <= 0):
        raise ValueError(f"(j, L) = ({j}, {L}) is not in N (need j theta > 0 and j(1-theta) + L <= 0)")
    if regime in ("N1", "N1-split"):
        s_star = Q / 2.0 - 0.5 if s_star is None else s_star
        Lam = -u
        small = (Q / 2.0 - s_star) * (u + Lam)
        large = -(s - Q / 2.0) * (u + Lam)
        return LambdaChoice("N1", Lam, small, large, -u)
    if regime in ("N2", "N2-split"):
        if s <= Q / 2.0:
            raise ValueError("the N2 estimate needs s > Q/2")
        Lam = (-(s - Q / 2.0) * (j + L) + j * theta * s / 2.0) / s
        small = Lam * Q / 2.0 - j * theta * Q / 2.0
        large = -(s - Q / 2.0) * (u + Lam)
        balanced = (-(s - Q / 2.0) * (j + L) + j * theta * s) / s
        return LambdaChoice("N2", Lam, small, large, balanced)
    raise ValueError(f"unknown regime {regime!r}")


# -- atoms ------------------------------------------------------------------------


@dataclass
class Atom:
    grid: UniformGrid
    L: int
    values: np.ndarray
    center: tuple = (0.0,)

    @property
    def radius(self) -> float:
        return 2.0**self.L

    @property
    def measure(self) -> float:
        return (2.0 * self.radius) ** self.grid.d

    def check(self, rel: float = 1e-12) -> None:
        cell = self.grid.cell_volume
        v = self.values
        if abs(np.sum(v)) * cell > rel * np.sum(np.abs(v)) * cell:
            raise ValueError("atom does not have mean zero")
        if np.sqrt(np.sum(np.abs(v) ** 2) * cell) > self.measure**-0.5 * (1 + rel):
            raise ValueError("atom exceeds its L^2 normalization")
        if np.max(np.abs(v)) > (1 + rel) / self.measure:
            raise ValueError("atom exceeds its L^inf normalization")
        x = self.grid.axis() - self.center[0]
        r = self.radius
        outside = (x < -r * (1 + 1e-12)) | (x >= r * (1 - 1e-12))
        if np.any(v[outside] != 0):
            raise ValueError("atom is not supported in its ball")


def make_atom(grid: UniformGrid, L: int, center: float = 0.0, kind: str = "haar") -> Atom:
    """Mean-zero atom on [c - 2^L, c + 2^L) (one-dimensional).

    ``haar`` is -1/|B| on the left half and +1/|B| on the right half;
    ``sine`` is a scaled sine period.  The center must be a grid point.
    """
    if grid.d != 1:
        raise ValueError("atoms are built on line grids")
    x = grid.axis() - center
    r = 2.0**L
    h = grid.spacings[0]
    if r < 2 * h:
        raise ValueError(f"level {L} is below the grid resolution")
    if abs(center / h - round(center / h)) > 1e-9:
        raise ValueError("center must be a grid point")
    inside = (x >= -r - 1e-12 * r) & (x < r - 1e-12 * r)
    B = 2.0 * r
    if kind == "haar":
        v = np.where(x >= 0, 1.0, -1.0) / B
    elif kind == "sine":
        v = np.sin(np.pi * (x + h / 2) / r) / B
    else:
        raise ValueError(f"unknown atom kind {kind!r}")
    v = np.where(inside, v, 0.0)
    v[inside] -= v[inside].mean()
    v *= min(1.0, 1.0 / (B * np.max(np.abs(v))))
    atom = Atom(grid, L, v, (center,))
    atom.check()
    return atom


def atom_grid() -> UniformGrid:
    return UniformGrid(1, 1024.0, 1 << 20)


@dataclass
class AtomTestResult:
    Ls: list[int]
    full: list[float]
    far: list[float]
    near: list[float]
    near_bound: list[float]
    spread: float
    ablation_far: Optional[float]
    ablation_factor: Optional[float]


def atom_test(spec: MultiplierSpec, L_grid: Sequence[int] = range(-6, 7), grid: Optional[UniformGrid] = None,
              truncation: float = 2.0**9, dilate: float = B_STAR, kind: str = "haar",
              ablation_L: Optional[int] = None) -> AtomTestResult:
    """Per L: \\int |T a|, \\int_{|x| >= dilate 2^L} |T a| and the Cauchy-Schwarz near-field bound.

    The near field bound is |{|x| <= dilate 2^L}|^(1/2) sup|m| ||a||_2.
    ``spread`` is max/min of the far-field values over ``L_grid``.
    """
    grid = atom_grid() if grid is None else grid
    op = RadialOperator(spec, grid, 0.0, truncation)
    sup_m = float(np.max(np.abs(op.symbol)))
    cell = grid.cell_volume
    Ls, full, far, near, bound = [], [], [], [], []
    ablation = None
    for L in L_grid:
        a = make_atom(grid, L, kind=kind)
        Ta = SampledFunction(grid, op(a.values))
        R0 = dilate * a.radius
        fl, tl = Ta.l1(), l1_tail(Ta, R0)
        Ls.append(int(L))
        full.append(fl)
        far.append(tl)
        near.append(fl - tl)
        a_l2 = float(np.sqrt(np.sum(np.abs(a.values) ** 2) * cell))
        bound.append(np.sqrt(2.0 * R0) * sup_m * a_l2)
        if ablation_L is not None and L == ablation_L:
            ablation = l1_tail(SampledFunction(grid, op(np.abs(a.values))), R0)
    spread = max(far) / min(far) if min(far) > 0 else np.inf
    factor = None
    if ablation is not None:
        factor = ablation / far[Ls.index(ablation_L)]
    return AtomTestResult(Ls, full, far, near, bound, float(spread), ablation, factor)


# -- weak type -----------------------------------------------------------------------


def distribution_constant(v: np.ndarray, cell: float, alphas: Optional[Sequence[float]] = None) -> float:
    """sup over alpha of alpha |{|v| > alpha}|.

    Without an alpha grid the sup runs over every alpha > 0: it is approached
    just below each sample value, so it equals max_k a_(k) k cell for the
    values a_(1) >= a_(2) >= ... .
    """
    a = np.sort(np.abs(np.ravel(v)))[::-1]
    if alphas is None:
        k = np.arange(1, a.size + 1)
        return float(np.max(a * k * cell)) if a.size else 0.0
    asc = a[::-1]
    best = 0.0
    for al in alphas:
        count = asc.size - np.searchsorted(asc, al, side="right")
        best = max(best, al * count * cell)
    return float(best)


def spike(grid: UniformGrid, index: Optional[int] = None) -> np.ndarray:
    """L^1-normalized single-cell indicator (at the origin by default)."""
    v = np.zeros(grid.shape)
    idx = tuple(n // 2 for n in grid.N) if index is None else index
    v[idx] = 1.0 / grid.cell_volume
    return v


def spike_train(grid: UniformGrid, count: int, rng: np.random.Generator, spread: float = 1.0) -> np.ndarray:
    v = np.zeros(grid.shape)
    h = grid.spacings[0]
    k = int(spread / h)
    idx = grid.N[0] // 2 + rng.integers(-k, k, size=count)
    np.add.at(v, idx, 1.0 / (count * grid.cell_volume))
    return v


def weak_family(grid: UniformGrid, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Smooth bumps, near-atoms and spike trains, all with ||f||_1 = 1."""
    x = grid.axis()
    fam: dict[str, np.ndarray] = {"spike": spike(grid)}
    for w in (0.05, 0.5):
        b = np.exp(-(x / w) ** 2)
        fam[f"bump_{w:g}"] = b
    for L in (-4, -2):
        r = 2.0**L
        fam[f"near_atom_{L}"] = np.where((x >= -r) & (x < r), np.where(x >= 0, 1.0, -0.9), 0.0)
    for count in (2, 8):
        fam[f"train_{count}"] = spike_train(grid, count, rng)
    cell = grid.cell_volume
    return {k: v / (np.sum(np.abs(v)) * cell) for k, v in fam.items()}


@dataclass
class WeakTypeResult:
    ladder: list[float]
    constants: list[float]
    best_input: list[str]
    spread: float
    monotone_growth: bool


def weak_type_probe(spec: MultiplierSpec, family: Optional[dict[str, np.ndarray]] = None,
                    ladder: Sequence[float] = (2**4, 2**6, 2**8, 2**10), grid: Optional[UniformGrid] = None,
                    alphas: Optional[Sequence[float]] = None, seed: int = 0) -> WeakTypeResult:
    """Empirical weak (1,1) constant sup_f sup_alpha alpha |{|T_R f| > alpha}| / ||f||_1 per truncation R."""
    grid = UniformGrid(1, 32.0, 1 << 17) if grid is None else grid
    if family is None:
        family = weak_family(grid, np.random.default_rng(seed))
    cell = grid.cell_volume
    consts, names = [], []
    for R in ladder:
        op = RadialOperator(spec, grid, 0.0, float(R))
        best, arg = -1.0, ""
        for name, f in family.items():
            c = distribution_constant(op(f), cell, alphas) / (np.sum(np.abs(f)) * cell)
            if c > best:
                best, arg = c, name
        consts.append(best)
        names.append(arg)
    c = np.asarray(consts)
    return WeakTypeResult([float(r) for r in ladder], consts, names, float(c.max() / c.min()),
                          bool(np.all(np.diff(c) > 0)))


# -- tail sums ------------------------------------------------------------------------


@dataclass
class TailSumResult:
    s: float
    theta: float
    pairs: list[tuple[int, int]]
    tails: list[float]
    bounds: list[float]
    per_L: dict[int, float]
    sup: float
    bound_slope: float
    tail_slope: float
    envelope_constant: float
    expected_slope: float


def tail_sum_criterion(spec: MultiplierSpec, window: DyadicWindow = DEFAULT_WINDOW, theta: Optional[float] = None,
                       s: float = 0.75, L_grid: Sequence[int] = range(-8, 5), j_max: int = 20, n: int = 1) -> TailSumResult:
    """Per L, sum over {j theta > 0 : j(1-theta) + L >= 0} of \\int_{|x| >= 2^L} |K_{m_j}|.

    Each tail equals \\int_{|x| >= 2^(j+L)} |K_{m^j}|.  It is paired with the
    Cauchy-Schwarz bound

        sqrt(2 / (2s - n)) 2^(-(s - n/2)(j + L)) ||K_{m^j} |x|^s||_2,

    whose log2 decays like -(s - n/2)(j(1-theta) + L) for pieces of a class
    multiplier.  ``bound_slope`` is the fitted slope of log2(bound) against
    u = j(1-theta) + L; ``tail_slope`` the same for the tails themselves.
    """
    theta = spec.theta if theta is None else theta
    _check_theta(theta)
    if n != 1:
        raise ValueError("tail sums are implemented on the line")
    if s <= n / 2.0:
        raise ValueError("s must exceed n/2")
    sign = 1 if theta > 0 else -1
    js = [sign * k for k in range(1, j_max + 1)]
    kernels = {j: piece_kernel(spec, j, n, window) for j in js}
    weights = {}
    for j, K in kernels.items():
        x = K.grid.axis()
        weights[j] = float(np.sqrt(np.sum(np.abs(K.samples.values) ** 2 * np.abs(x) ** (2 * s)) * K.grid.cell_volume))
    c = np.sqrt(2.0 / (2 * s - n))
    pairs, tails, bounds, per_L = [], [], [], {}
    for L in L_grid:
        total = 0.0
        for j in js:
            if j * (1.0 - theta) + L < 0:
                continue
            R0 = 2.0 ** (j + L)
            t = l1_tail(kernels[j].samples, R0) if R0 < kernels[j].grid.R[0] else 0.0
            b = c * R0 ** -(s - n / 2.0) * weights[j]
            pairs.append((j, int(L)))
            tails.append(t)
            bounds.append(b)
            total += t
        per_L[int(L)] = total
    u = np.array([j * (1.0 - theta) + L for j, L in pairs])
    bl = np.log2(bounds)
    bound_slope = float(np.polyfit(u, bl, 1)[0])
    ta = np.asarray(tails)
    ok = ta > 0
    tail_slope = log2_slope(u[ok], ta[ok])
    env = float(np.max(np.log2(ta[ok]) + (s - n / 2.0) * u[ok])) if ok.any() else -np.inf
    return TailSumResult(s, theta, pairs, tails, bounds, per_L, max(per_L.values()), bound_slope, tail_slope,
                         env, -(s - n / 2.0))
