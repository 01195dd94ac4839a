"""Convolution kernels of radial multipliers on R^n (n <= 3) and the estimates built on them.

Conventions: the kernel of a symbol ``m(|xi|)`` is its unitary inverse
transform ``K``, and the operator is ``T f = inverse_fourier(m * fourier(f))``,
i.e. ``T f = (2 pi)^(-n/2) K * f``.  All operators are applied through FFTs on
a fixed grid, so inputs and outputs are periodic on the grid box; every
experiment sizes its grid so that the kernel and the inputs stay well inside.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import signal
from scipy.special import gamma

from .grid import (
    AliasingError,
    ResolutionError,
    SampledFunction,
    UniformGrid,
    fourier,
    inverse_fourier,
    l1_tail,
    sobolev_norm,
)
from .multiplier import (
    DEFAULT_WINDOW,
    Cutoff,
    DyadicWindow,
    MultiplierSpec,
    log2_slope,
    max_phase_rate,
    outer_half,
    step_down,
)

logger = logging.getLogger(__name__)

MAX_POINTS = 1 << 24


def _next_pow2(x: float) -> int:
    return 1 << max(4, int(np.ceil(np.log2(max(x, 1.0)))))


# -- symbols -----------------------------------------------------------------


def truncation_factor(lam, lam_min: float = 0.0, lam_max: float = np.inf) -> np.ndarray:
    """Smooth band: 1 on [lam_min, lam_max], 0 below lam_min/2 and above 2 lam_max."""
    lam = np.asarray(lam, dtype=float)
    out = np.ones_like(lam)
    if lam_min > 0:
        out = out * (1.0 - step_down(2.0 * lam / lam_min))
    if np.isfinite(lam_max):
        out = out * step_down(lam / lam_max)
    return out


def symbol_values(spec: MultiplierSpec, lam: np.ndarray, floor: float) -> np.ndarray:
    """m(lam) with the lam = 0 sample taken as m(floor) (or 0 under the high-pass cutoff)."""
    lam = np.asarray(lam, dtype=float)
    out = np.zeros(lam.shape, dtype=complex)
    pos = lam > 0
    out[pos] = spec(lam[pos])
    if np.any(~pos) and spec.cutoff is not Cutoff.PLUS:
        out[~pos] = spec(np.array([floor]))[0]
    return out


def radial_frequency(grid: UniformGrid) -> np.ndarray:
    """|xi| on the frequency grid dual to ``grid``."""
    return grid.dual().radius()


class RadialOperator:
    """f -> inverse_fourier(m(|xi|) * truncation * fourier(f)) on a fixed grid."""

    def __init__(self, spec: Optional[MultiplierSpec], grid: UniformGrid, lam_min: float = 0.0,
                 lam_max: float = np.inf, symbol: Optional[np.ndarray] = None):
        self.spec, self.grid = spec, grid
        self.lam_min, self.lam_max = lam_min, lam_max
        if symbol is None:
            dual = grid.dual()
            lam = dual.radius()
            if np.isfinite(lam_max) and 2.0 * lam_max > min(dual.R):
                raise ResolutionError(
                    f"truncation 2*lam_max = {2 * lam_max:g} exceeds the Nyquist frequency {min(dual.R):g}"
                )
            floor = min(dual.spacings) / 2.0
            symbol = symbol_values(spec, lam, floor) * truncation_factor(lam, lam_min, lam_max)
        self.symbol = np.asarray(symbol)

    def __call__(self, f) -> np.ndarray:
        values = f.values if isinstance(f, SampledFunction) else np.asarray(f)
        F = fourier(SampledFunction(self.grid, values))
        return inverse_fourier(SampledFunction(F.grid, F.values * self.symbol)).values

    def kernel(self) -> SampledFunction:
        return inverse_fourier(SampledFunction(self.grid.dual(), self.symbol))


# -- kernels -----------------------------------------------------------------


@dataclass
class RadialKernel:
    n: int
    samples: SampledFunction
    symbol: SampledFunction
    spec: Optional[MultiplierSpec] = None
    window: dict = field(default_factory=dict)

    @property
    def grid(self) -> UniformGrid:
        return self.samples.grid

    @cached_property
    def l1(self) -> float:
        return self.samples.l1()

    @cached_property
    def l2(self) -> float:
        return self.samples.l2()

    def tail(self, R0: float) -> float:
        return l1_tail(self.samples, R0)

    def boundary_fraction(self, rel: float = 0.9) -> float:
        """Share of |K| mass beyond ``rel`` of the grid extent."""
        a = np.abs(self.samples.values)
        tot = float(a.sum())
        return 0.0 if tot == 0 else float(a[self.grid.sup_radius(relative=True) > rel].sum() / tot)


def auto_grid(n: int, lam_max: float, rate: float, min_extent: float = 16.0) -> UniformGrid:
    """Spatial grid whose dual band holds 2 lam_max twice over and whose box holds the kernel.

    The kernel of a symbol with phase rate ``rate`` lives at |x| <= rate, plus
    a decay margin set by the smooth cutoffs.
    """
    R = max(min_extent, 3.0 * rate + 40.0)
    N = _next_pow2(8.0 * lam_max * R / np.pi)
    if N**n > MAX_POINTS:
        raise ResolutionError(f"a {n}-d grid with {N} points per axis is beyond desk scale")
    return UniformGrid(n, R, N)


def kernel_of_radial_multiplier(spec: MultiplierSpec, n: int = 1, truncation=(0.0, np.inf),
                                grid: Optional[UniformGrid] = None) -> RadialKernel:
    """Kernel of xi -> m(|xi|) restricted (smoothly) to the band ``truncation``."""
    if n not in (1, 2, 3):
        raise ValueError("n must be 1, 2 or 3")
    lam_min, lam_max = truncation
    if not np.isfinite(lam_max):
        raise ValueError("an upper truncation is required: m is not band-limited")
    probe = np.geomspace(max(lam_min / 2.0, 1e-3), 2.0 * lam_max, 512)
    rate_fn = spec.phase_rate(probe)
    rate = float(np.max(rate_fn)) if rate_fn is not None else 0.0
    if grid is None:
        grid = auto_grid(n, lam_max, rate)
    if grid.d != n:
        raise ValueError("grid dimension must equal n")
    if rate > 0.75 * min(grid.R):
        raise AliasingError(
            f"phase rate {rate:.4g} puts kernel mass beyond 3/4 of the box (R = {min(grid.R):g}); enlarge R"
        )
    op = RadialOperator(spec, grid, lam_min, lam_max)
    K = op.kernel()
    return RadialKernel(n, K, SampledFunction(grid.dual(), op.symbol), spec,
                        {"lam_min": lam_min, "lam_max": lam_max})


def piece_grid_for(spec: MultiplierSpec, j: int, n: int = 1, band: float = 4.0) -> UniformGrid:
    """Spatial grid for the kernel of m^j: frequency box [-band, band], box of size 3 rate + 40."""
    rate = max_phase_rate(spec, j) or 0.0
    N = max(1 << 10 if n == 1 else 1 << 6, _next_pow2(2.0 * band * (3.0 * rate + 40.0) / np.pi))
    if N**n > MAX_POINTS:
        raise ResolutionError(f"piece j={j} needs {N} points per axis in {n}-d")
    return UniformGrid(n, N * np.pi / (2.0 * band), N)


def piece_kernel(spec: MultiplierSpec, j: int, n: int = 1, window: DyadicWindow = DEFAULT_WINDOW,
                 grid: Optional[UniformGrid] = None) -> RadialKernel:
    """Kernel of xi -> m^j(|xi|) = m(2^j |xi|) phi(|xi|).

    The kernel of m_j(lam) = m^j(2^-j lam) is its L^1-preserving dilate,
    so every L^1 and tail quantity of m_j can be read off this one.
    """
    grid = piece_grid_for(spec, j, n) if grid is None else grid
    dual = grid.dual()
    lam = dual.radius()
    inside = (lam >= 0.5) & (lam <= 2.0)
    sym = np.zeros(dual.shape, dtype=complex)
    sym[inside] = spec(lam[inside] * 2.0**j) * window(lam[inside])
    symbol = SampledFunction(dual, sym)
    return RadialKernel(n, inverse_fourier(symbol), symbol, spec, {"piece": int(j)})


# -- Fefferman-Stein kernel condition -----------------------------------------


def translate(f: SampledFunction, y) -> np.ndarray:
    """f(x - y) by a Fourier phase shift (exact for band-limited f)."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    F = fourier(f)
    phase = sum(c * yi for c, yi in zip(F.grid.mesh(), y))
    return inverse_fourier(SampledFunction(F.grid, F.values * np.exp(-1j * phase))).values


@dataclass
class FSResult:
    sup: float
    ys: list
    profile: list[float]


def fefferman_stein_condition(K: RadialKernel, theta: float, y_samples) -> FSResult:
    """sup over y of \\int_{|x| > 2|y|^(1-theta)} |K(x - y) - K(x)| dx.

    A scalar sample y means the point (y, 0, ...).
    """
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    ys, profile = [], []
    for y in y_samples:
        vec = np.zeros(K.n)
        vec[: np.size(y)] = np.atleast_1d(y)
        r = float(np.linalg.norm(vec))
        if r == 0.0:
            raise ValueError("y = 0 is not an admissible sample")
        if r > 1.0:
            raise ValueError("samples must satisfy |y| <= 1")
        diff = SampledFunction(K.grid, translate(K.samples, vec) - K.samples.values)
        ys.append(y)
        profile.append(l1_tail(diff, 2.0 * r ** (1.0 - theta)))
    return FSResult(max(profile) if profile else 0.0, ys, profile)


# -- key estimate ------------------------------------------------------------


def cauchy_schwarz_constant(grid: UniformGrid, s: float) -> float:
    """||(1 + |x|^2)^(-s/2)||_2 over ``grid`` (the spatial side of the estimate)."""
    r2 = np.broadcast_to(sum(c**2 for c in grid.mesh()), grid.shape)
    return float(np.sqrt(np.sum((1.0 + r2) ** (-s)) * grid.cell_volume))


def continuum_constant(s: float, n: int) -> float:
    """||(1 + |x|^2)^(-s/2)||_{L^2(R^n)}, finite iff s > n/2."""
    if s <= n / 2.0:
        return np.inf
    return float(np.sqrt(np.pi ** (n / 2.0) * gamma(s - n / 2.0) / gamma(s)))


@dataclass
class KeyEstimate:
    ratio: float
    constant: float
    l1: float
    sobolev: float
    degenerate: bool = False

    @property
    def holds(self) -> bool:
        return self.ratio <= self.constant * (1.0 + 1e-12)


def key_estimate_ratio(F: SampledFunction, s: float, n: Optional[int] = None) -> KeyEstimate:
    """||K_F||_1 / ||F||_{L^2_s} for compactly supported frequency samples F.

    The weighted L^2 norm of K_F equals the spectral Sobolev norm of F on the
    grid, so the Cauchy-Schwarz bound holds in discrete form with the grid
    constant :func:`cauchy_schwarz_constant`.  ``F = 0`` gives ratio 0 with
    ``degenerate`` set.
    """
    if n is not None and n != F.grid.d:
        raise ValueError("n must match the dimension of F")
    K = inverse_fourier(F)
    C = cauchy_schwarz_constant(K.grid, s)
    sob = sobolev_norm(F, s)
    l1 = K.l1()
    if sob == 0.0:
        return KeyEstimate(0.0, C, l1, sob, degenerate=True)
    return KeyEstimate(l1 / sob, C, l1, sob)


def random_smooth_symbol(rng: np.random.Generator, grid: UniformGrid, lo: float = 0.5, hi: float = 2.0,
                         modes: int = 8) -> SampledFunction:
    """Random smooth F supported in [lo, hi]: a random trigonometric polynomial times a bump."""
    x = grid.axis()
    u = (x - lo) / (hi - lo)
    inside = (u > 0) & (u < 1)
    bump = np.zeros_like(x)
    bump[inside] = np.exp(-1.0 / (u[inside] * (1.0 - u[inside])))
    k = np.arange(modes)
    c = rng.normal(size=modes) + 1j * rng.normal(size=modes)
    c /= 1.0 + k
    poly = np.exp(1j * np.pi * np.outer(u, k)) @ c
    freq = rng.uniform(0.0, 20.0)
    return SampledFunction(grid, bump * poly * np.exp(1j * freq * x), support_radius=hi)


# -- integrability of the large part ------------------------------------------


@dataclass
class LargePartResult:
    js: list[int]
    l1: list[float]
    partial_sums: list[float]
    rate: float
    expected_rate: float
    bound_terms: list[float]
    bound_rate: float
    last_increment: float
    tail_estimate: float


def large_part_l1(spec: MultiplierSpec, window: DyadicWindow = DEFAULT_WINDOW, s_prime: float = 0.75,
                  j_max: int = 40, n: int = 1) -> LargePartResult:
    """Partial sums of sum_{j theta > 0} ||K_{m_j}||_1 and their geometric rate.

    ``rate`` is the fitted log2 decay of the terms over the outer half of the
    range.  ``bound_terms`` are the key-estimate bounds C ||m^j||_{L^2_s'},
    whose decay is the one forced by the class condition.
    """
    beta, theta = spec.beta, spec.theta
    if not n / 2.0 < s_prime < beta / 2.0:
        raise ValueError(f"no admissible s' in (n/2, beta/2) = ({n / 2}, {beta / 2})")
    sign = 1 if theta > 0 else -1
    js = [sign * k for k in range(1, j_max + 1)]
    l1, bounds = [], []
    for j in js:
        K = piece_kernel(spec, j, n, window)
        l1.append(K.l1)
        bounds.append(cauchy_schwarz_constant(K.grid, s_prime) * sobolev_norm(K.symbol, s_prime))
    l1a, ba = np.asarray(l1), np.asarray(bounds)
    ja = np.abs(np.asarray(js))
    idx = outer_half(js)
    rate = -log2_slope(ja[idx], l1a[idx])
    bound_rate = -log2_slope(ja[idx], ba[idx])
    q = 2.0 ** -max(rate, 1e-12)
    tail = float(l1a[-1] * q / (1.0 - q))
    return LargePartResult(
        js, l1, np.cumsum(l1a).tolist(), rate, abs(theta) * (beta - 2.0 * s_prime) / 2.0,
        bounds, bound_rate, float(l1a[-1]), tail,
    )


def uniform_piece_l1(spec: MultiplierSpec, J: int, n: int = 1, window: DyadicWindow = DEFAULT_WINDOW) -> dict:
    """||K_{m^j}||_1 for j = 1..J and the ratio max(second half) / max(first half)."""
    vals = [piece_kernel(spec, j, n, window).l1 for j in range(1, J + 1)]
    h = J // 2
    return {"js": list(range(1, J + 1)), "l1": vals, "ratio": max(vals[h:]) / max(vals[:h])}


# -- L^p scan ------------------------------------------------------------------

GROWTH_EXPONENT = 0.04  # fitted log-log exponent above which a ladder counts as growing

DEFAULT_LADDER = (2**4, 2**6, 2**8, 2**10)


def lp_norm(v: np.ndarray, p: float, cell: float) -> float:
    return float((np.sum(np.abs(v) ** p) * cell) ** (1.0 / p))


def lp_family(grid: UniformGrid, op: RadialOperator, rng: np.random.Generator, R_t: float) -> dict[str, np.ndarray]:
    """Test inputs: bumps at several scales, modulated bumps, random-sign dilates,
    and bumps focused by the adjoint (they concentrate after applying T)."""
    x = grid.mesh()
    r2 = sum(c**2 for c in x)
    fam = {}
    for name, sc in (("bump_1/R", 1.0 / R_t), ("bump_1/sqrtR", R_t**-0.5), ("bump_1", 1.0), ("bump_4/R", 4.0 / R_t)):
        fam[name] = np.broadcast_to(np.exp(-r2 / (2 * sc**2)), grid.shape).astype(complex)
    lam = radial_frequency(grid)
    peak = float(lam[np.unravel_index(np.argmax(np.abs(op.symbol)), lam.shape)])
    for w in (4.0, 16.0):
        env = np.broadcast_to(np.exp(-r2 / (2 * w**2)), grid.shape)
        fam[f"modulated_{w:g}"] = env * np.exp(1j * peak * x[0])
    for k in range(3):
        sc = 2.0 ** rng.uniform(-np.log2(R_t), 1.0)
        centers = rng.uniform(-4.0, 4.0, size=(6, grid.d))
        signs = rng.choice([-1.0, 1.0], size=6)
        v = np.zeros(grid.shape, dtype=complex)
        for c, sg in zip(centers, signs):
            d2 = sum((xi - ci) ** 2 for xi, ci in zip(x, c))
            v += sg * np.exp(-d2 / (2 * sc**2))
        fam[f"random_dilates_{k}"] = v
    for sc in (1.0 / R_t, R_t**-0.5):
        b = np.broadcast_to(np.exp(-r2 / (2 * sc**2)), grid.shape)
        F = fourier(SampledFunction(grid, b))
        fam[f"focused_{sc:.3g}"] = inverse_fourier(SampledFunction(F.grid, F.values * np.conj(op.symbol))).values
    return fam


@dataclass
class LpScanResult:
    p: float
    ladder: list[float]
    bounds: list[float]
    best_input: list[str]
    exponent: float
    verdict: str


def lp_scan(spec: MultiplierSpec, p_grid: Sequence[float], ladder=DEFAULT_LADDER, n: int = 1,
            grid: Optional[UniformGrid] = None, seed: int = 0) -> list[LpScanResult]:
    """Operator-norm lower bounds max_f ||T_R f||_p / ||f||_p along a truncation ladder.

    ``exponent`` is the slope of log(bound) against log(R); the ladder is
    "growing" when it exceeds :data:`GROWTH_EXPONENT`.
    """
    for p in p_grid:
        if not 1.0 < p < np.inf:
            raise ValueError("p must lie in (1, inf)")
    if grid is None:
        grid = UniformGrid(1, 32.0, 1 << 17) if n == 1 else UniformGrid(n, 16.0, 1 << 7)
    rng = np.random.default_rng(seed)
    table = {p: ([], []) for p in p_grid}
    for R_t in ladder:
        op = RadialOperator(spec, grid, 0.0, float(R_t))
        fam = lp_family(grid, op, rng, float(R_t))
        outs = {k: op(v) for k, v in fam.items()}
        for p in p_grid:
            ratios = {k: lp_norm(outs[k], p, grid.cell_volume) / lp_norm(v, p, grid.cell_volume)
                      for k, v in fam.items()}
            best = max(ratios, key=ratios.get)
            table[p][0].append(ratios[best])
            table[p][1].append(best)
    out = []
    for p in p_grid:
        vals, names = table[p]
        e = float(np.polyfit(np.log(ladder), np.log(vals), 1)[0])
        out.append(LpScanResult(float(p), [float(r) for r in ladder], vals, names, e,
                                "growing" if e > GROWTH_EXPONENT else "stable"))
    return out


# -- maximal function ------------------------------------------------------------


def _ball(grid: UniformGrid, r: float) -> np.ndarray:
    h = grid.spacings
    half = [int(np.floor(r / hi + 1e-9)) for hi in h]
    axes = [np.arange(-k, k + 1) * hi for k, hi in zip(half, h)]
    mesh = np.meshgrid(*axes, indexing="ij", sparse=True)
    return (sum(c**2 for c in mesh) <= r * r * (1 + 1e-12)).astype(float)


def hl_maximal(f: SampledFunction, radii: Optional[Sequence[float]] = None) -> SampledFunction:
    """Mf(x) = max over radii of r^-n \\int_{|y| <= r} |f(x - y)| dy (zero outside the grid).

    Radii default to the dyadic ladder 2^k h up to the grid extent.
    """
    g = f.grid
    a = np.abs(f.values)
    if radii is None:
        h = min(g.spacings)
        radii = [h * 2.0**k for k in range(int(np.log2(2 * max(g.R) / h)) + 1)]
    best = np.zeros(g.shape)
    for r in radii:
        if g.d == 1:
            k = int(np.floor(r / g.spacings[0] + 1e-9))
            c = np.concatenate([[0.0], np.cumsum(a)])
            idx = np.arange(g.N[0])
            hi = np.clip(idx + k + 1, 0, g.N[0])
            lo = np.clip(idx - k, 0, g.N[0])
            s = (c[hi] - c[lo]) * g.cell_volume
        else:
            s = signal.fftconvolve(a, _ball(g, r), mode="same") * g.cell_volume
        best = np.maximum(best, s / r**g.d)
    return SampledFunction(g, np.maximum(best, 0.0))


def ball_indicator(grid: UniformGrid, center, radius: float) -> SampledFunction:
    mesh = grid.mesh()
    c = np.atleast_1d(center)
    d2 = sum((x - ci) ** 2 for x, ci in zip(mesh, c))
    return SampledFunction(grid, np.broadcast_to((d2 <= radius**2).astype(float), grid.shape).copy())


def max_char_comparison(grid: UniformGrid, center, radius: float) -> tuple[float, float]:
    """Range [c, C] of M(chi_B)(x) (1 + |x - x_B| / r_B)^n over the grid."""
    chi = ball_indicator(grid, center, radius)
    M = hl_maximal(chi).values
    c = np.atleast_1d(center)
    dist = np.sqrt(np.broadcast_to(sum((x - ci) ** 2 for x, ci in zip(grid.mesh(), c)), grid.shape))
    v = M * (1.0 + dist / radius) ** grid.d
    return float(v.min()), float(v.max())


def vector_maximal_ratio(grid: UniformGrid, balls: Sequence[tuple]) -> float:
    """||(sum (M chi_Bi)^2)^(1/2)||_2 / ||(sum chi_Bi^2)^(1/2)||_2 for balls (center, radius)."""
    num = np.zeros(grid.shape)
    den = np.zeros(grid.shape)
    for center, r in balls:
        chi = ball_indicator(grid, center, r)
        num += hl_maximal(chi).values ** 2
        den += chi.values.real**2
    return float(np.sqrt(num.sum() / den.sum()))
