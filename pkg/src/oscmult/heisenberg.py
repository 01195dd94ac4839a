"""The Heisenberg group H^1 = R^3 and kernels of functions of its sublaplacian.

Group law (x, y, t)(x', y', t') = (x + x', y + y', t + t' + (x y' - y x') / 2),
dilations (x, y, t) -> (r x, r y, r^2 t), Koranyi norm
((x^2 + y^2)^2 + 16 t^2)^(1/4) and homogeneous dimension 4.  The horizontal
fields are X = d/dx - (y/2) d/dt and Y = d/dy + (x/2) d/dt, the sublaplacian
is L = -(X^2 + Y^2).

The kernel of h(sqrt L) is synthesized from the Laguerre expansion

    K_h(x, y, t) = (2 pi)^-2 \\int e^{i lam t} sum_k h(sqrt((2k+1)|lam|))
                   L_k(|lam| rho^2 / 2) exp(-|lam| rho^2 / 4) |lam| d lam,

with rho^2 = x^2 + y^2.  The lam integral uses composite Gauss-Legendre panels
on [0, Lambda] (the integrand is even in lam).
"""

from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .grid import GridError, SampledFunction, UniformGrid, sobolev_norm
from .multiplier import DEFAULT_WINDOW, MultiplierSpec, log2_slope

logger = logging.getLogger(__name__)

Q = 4
KORANYI_CONSTANT = 16.0
GROUP_CONVENTION = "(x,y,t)(x',y',t') = (x+x', y+y', t+t'+(xy'-yx')/2)"


class TruncationError(RuntimeError):
    """The Laguerre series was cut before h became negligible."""

    def __init__(self, message: str, suggested_k_max: int):
        super().__init__(message)
        self.suggested_k_max = suggested_k_max


# -- group arithmetic ----------------------------------------------------------


@dataclass(frozen=True)
class HeisenbergPoint:
    x: float
    y: float
    t: float

    def __mul__(self, other: "HeisenbergPoint") -> "HeisenbergPoint":
        return HeisenbergPoint(
            self.x + other.x,
            self.y + other.y,
            self.t + other.t + (self.x * other.y - self.y * other.x) / 2.0,
        )

    def inverse(self) -> "HeisenbergPoint":
        return HeisenbergPoint(-self.x, -self.y, -self.t)

    def dilate(self, r: float) -> "HeisenbergPoint":
        return HeisenbergPoint(r * self.x, r * self.y, r * r * self.t)

    def norm(self) -> float:
        return float(koranyi(self.x, self.y, self.t))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.t])


IDENTITY = HeisenbergPoint(0.0, 0.0, 0.0)


def group_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Product of point arrays with trailing axis (x, y, t)."""
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    out = p + q
    out[..., 2] += (p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0]) / 2.0
    return out


def group_inv(p: np.ndarray) -> np.ndarray:
    return -np.asarray(p, dtype=float)


def dilate(p: np.ndarray, r: float) -> np.ndarray:
    p = np.array(p, dtype=float)
    p[..., :2] *= r
    p[..., 2] *= r * r
    return p


def koranyi(x, y, t) -> np.ndarray:
    return ((np.asarray(x) ** 2 + np.asarray(y) ** 2) ** 2 + KORANYI_CONSTANT * np.asarray(t) ** 2) ** 0.25


def default_grid() -> UniformGrid:
    return UniformGrid(3, (8.0, 8.0, 16.0), (1 << 7, 1 << 7, 1 << 8))


def dilated_grid(grid: UniformGrid, r: float) -> UniformGrid:
    """The grid carried by the dilation with factor r (t-extent scales by r^2)."""
    return grid.dilate((r, r, r * r))


def koranyi_on(grid: UniformGrid) -> np.ndarray:
    x, y, t = grid.mesh()
    return np.broadcast_to(koranyi(x, y, t), grid.shape)


# -- spectral synthesis ----------------------------------------------------------


def spectral_extent(h: Callable, tol: float = 1e-16, mu_max: float = 1e3) -> float:
    """Smallest mu beyond which |h| stays below tol * sup|h| (scanned on a fine log grid)."""
    mu = np.concatenate([[0.0], np.geomspace(1e-4, mu_max, 20001)])
    v = np.abs(np.asarray(h(mu), dtype=complex))
    if not np.all(np.isfinite(v)):
        raise ValueError("h is not finite on [0, mu_max]")
    top = float(v.max())
    if top == 0.0:
        return 0.0
    above = np.nonzero(v > tol * top)[0]
    if above[-1] == len(mu) - 1:
        raise ValueError(f"h is not negligible below mu = {mu_max}")
    return float(mu[above[-1] + 1])


def gauss_panels(upper: float, width: float, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [0, upper]."""
    count = max(1, int(np.ceil(upper / width)))
    edges = np.linspace(0.0, upper, count + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    a, b = edges[:-1, None], edges[1:, None]
    nodes = (a + b) / 2 + (b - a) / 2 * x[None, :]
    weights = (b - a) / 2 * w[None, :]
    return nodes.ravel(), weights.ravel()


def _terms_needed(lam: np.ndarray, mu_max: float) -> np.ndarray:
    """Index of the last k with (2k + 1) lam <= mu_max^2."""
    return np.maximum(np.ceil((mu_max**2 / lam - 1.0) / 2.0), 0).astype(int)


def laguerre_profile(h: Callable, lam: np.ndarray, rho2: np.ndarray, k_max: int, mu_max: float) -> np.ndarray:
    """S[i, u] = lam_i sum_{k <= K_i} h(sqrt((2k+1) lam_i)) L_k(z) exp(-z/2), z = lam_i rho2_u / 2.

    K_i = min(k_max, terms needed for lam_i).  The normalized Laguerre
    functions come from the three-term recurrence, vectorized over nodes and
    radii; nodes are processed in increasing lam so the active set shrinks
    as k grows.
    """
    order = np.argsort(lam)
    lam_s = lam[order]
    K = np.minimum(_terms_needed(lam_s, mu_max), k_max)
    z = lam_s[:, None] * rho2[None, :] / 2.0
    prev = np.zeros_like(z)
    cur = np.exp(-z / 2.0)
    coef = np.asarray(h(np.sqrt(lam_s)), dtype=complex)
    acc = coef[:, None] * cur
    for k in range(int(K.max())):
        m = int(np.searchsorted(-K, -(k + 1), side="right"))  # nodes with K_i >= k + 1
        if m == 0:
            break
        nxt = ((2 * k + 1 - z[:m]) * cur[:m] - k * prev[:m]) / (k + 1)
        prev, cur = cur[:m], nxt
        coef = np.asarray(h(np.sqrt((2 * k + 3) * lam_s[:m])), dtype=complex)
        acc[:m] += coef[:, None] * cur
    out = np.empty_like(acc)
    out[order] = acc * lam_s[:, None]
    return out


def truncation_bound(h: Callable, lam: np.ndarray, weights: np.ndarray, k_max: int, mu_max: float) -> tuple[float, int]:
    """Pointwise bound on the discarded Laguerre terms, and the k_max that would remove them.

    Uses |L_k(z) exp(-z/2)| <= 1 for z >= 0.
    """
    need = _terms_needed(lam, mu_max)
    bound = 0.0
    for i in np.nonzero(need > k_max)[0]:
        k = np.arange(k_max + 1, need[i] + 1)
        bound += weights[i] * lam[i] * float(np.sum(np.abs(h(np.sqrt((2 * k + 1) * lam[i])))))
    return 2.0 * bound / (2 * np.pi) ** 2, int(need.max())


@dataclass
class HeisenbergKernel:
    samples: SampledFunction
    k_max: int
    lam_upper: float
    lam_nodes: int
    truncation_error: float
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def grid(self) -> UniformGrid:
        return self.samples.grid

    @property
    def values(self) -> np.ndarray:
        return self.samples.values

    @cached_property
    def l1(self) -> float:
        return self.samples.l1()

    @cached_property
    def l2(self) -> float:
        return self.samples.l2()

    def mass(self) -> float:
        return float(self.samples.integral().real)

    def sidecar(self) -> dict:
        return {
            "group": GROUP_CONVENTION,
            "norm": "((x^2+y^2)^2 + 16 t^2)^(1/4)",
            "norm_constant": KORANYI_CONSTANT,
            "homogeneous_dimension": Q,
            "k_max": self.k_max,
            "lam_grid": {"upper": self.lam_upper, "nodes": self.lam_nodes, "rule": "composite Gauss-Legendre"},
            "truncation_error": self.truncation_error,
            "grid": {"R": list(self.grid.R), "N": list(self.grid.N)},
            "label": self.label,
            **self.meta,
        }

    def save(self, stem: str) -> None:
        with open(stem + ".bin", "wb") as fh:
            fh.write(self.samples.to_bytes())
        with open(stem + ".json", "w") as fh:
            json.dump(self.sidecar(), fh, indent=2, sort_keys=True)


def sublaplacian_kernel(h: Callable, k_max: int = 256, grid: Optional[UniformGrid] = None, *,
                        lam_upper: Optional[float] = None, panel_width: Optional[float] = None,
                        order: int = 16, tol: float = 1e-10, refine: bool = True,
                        spectral_tol: float = 1e-16, label: str = "") -> HeisenbergKernel:
    """Kernel of h(sqrt L) on ``grid`` (default [-8,8]^2 x [-16,16] at 2^7 x 2^7 x 2^8).

    ``h`` is a vectorized callable on [0, inf).  The lam range defaults to
    [0, mu_max^2] where |h| < spectral_tol * sup|h| beyond mu_max.  If the
    Laguerre tail bound exceeds ``tol`` times |K(0)|, k_max is doubled
    (``refine``) or :class:`TruncationError` is raised with a suggestion.
    """
    grid = default_grid() if grid is None else grid
    if grid.d != 3:
        raise GridError("Heisenberg kernels live on three-dimensional grids")
    mu_max = spectral_extent(h, spectral_tol)
    if mu_max == 0.0:
        return HeisenbergKernel(SampledFunction(grid, np.zeros(grid.shape)), k_max, 0.0, 0, 0.0, label)
    upper = mu_max**2 if lam_upper is None else lam_upper
    t_max = grid.R[2]
    width = min(0.5, 6.0 / t_max) if panel_width is None else panel_width
    lam, w = gauss_panels(upper, width, order)

    while True:
        err, need = truncation_bound(h, lam, w, k_max, mu_max)
        scale = abs(2.0 * np.sum(w * lam * _partial_sums_at_origin(h, lam, k_max, mu_max)) / (2 * np.pi) ** 2)
        if err <= tol * max(scale, np.finfo(float).tiny):
            break
        if not refine:
            raise TruncationError(
                f"Laguerre truncation error {err:.3e} exceeds tolerance; try k_max >= {need}", need
            )
        k_max *= 2

    x, y, t = grid.axis(0), grid.axis(1), grid.axis(2)
    rho2_grid = x[:, None] ** 2 + y[None, :] ** 2
    rho2, inv = np.unique(rho2_grid, return_inverse=True)
    S = laguerre_profile(h, lam, rho2, k_max, mu_max)
    C = np.cos(np.outer(lam, t)) * w[:, None]
    K_rt = (S.T @ C) * (2.0 / (2 * np.pi) ** 2)
    if np.all(np.isreal(h(np.linspace(0.0, mu_max, 64)))):
        K_rt = K_rt.real
    values = K_rt[inv.reshape(rho2_grid.shape)]
    return HeisenbergKernel(SampledFunction(grid, values), k_max, float(upper), int(lam.size), float(err), label)


def _partial_sums_at_origin(h, lam, k_max, mu_max) -> np.ndarray:
    """sum_{k <= K_i} h(sqrt((2k+1) lam_i)), the rho = 0 value of the Laguerre sum."""
    K = np.minimum(_terms_needed(lam, mu_max), k_max)
    out = np.empty(lam.size, dtype=complex)
    for i, (l, kk) in enumerate(zip(lam, K)):
        out[i] = np.sum(np.asarray(h(np.sqrt((2 * np.arange(kk + 1) + 1) * l)), dtype=complex))
    return out


def heat_multiplier(mu) -> np.ndarray:
    """h(mu) = exp(-mu^2): h(sqrt L) = exp(-L), the heat semigroup at time 1."""
    return np.exp(-np.asarray(mu, dtype=float) ** 2)


def heat_kernel_oracle(rho2: float, t: float) -> float:
    """exp(-L) kernel by one-dimensional quadrature of its closed form:

        (2 pi)^-2 \\int lam / (2 sinh lam) exp(-lam coth(lam) rho^2 / 4) e^{i lam t} d lam.
    """

    def f(lam):
        if lam < 1e-8:
            return 0.5 * np.exp(-rho2 / 4.0)
        return lam / (2.0 * np.sinh(lam)) * np.exp(-lam / np.tanh(lam) * rho2 / 4.0)

    upper = 80.0
    with warnings.catch_warnings():
        # QAWO reports roundoff once it reaches ~1e-15 absolute; that is the point
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if t == 0:
            val, _ = integrate.quad(f, 0.0, upper, epsabs=1e-15, epsrel=1e-13, limit=400)
        else:
            val, _ = integrate.quad(f, 0.0, upper, weight="cos", wvar=abs(t), epsabs=1e-15, epsrel=1e-13, limit=400)
    return 2.0 * val / (2 * np.pi) ** 2


@dataclass
class OracleComparison:
    max_rel_error: float
    points: int
    mass: float


def heat_oracle_check(kernel: Optional[HeisenbergKernel] = None, region: float = 4.0) -> OracleComparison:
    """Compare the Laguerre heat kernel with the oracle at grid points with rho^2 + |t| <= region."""
    K = sublaplacian_kernel(heat_multiplier, label="heat") if kernel is None else kernel
    g = K.grid
    x, y, t = g.axis(0), g.axis(1), g.axis(2)
    rho2 = x[:, None] ** 2 + y[None, :] ** 2
    seen: dict[tuple, float] = {}
    worst = 0.0
    count = 0
    ix, iy = np.nonzero(rho2 <= region)
    for a, b in zip(ix, iy):
        r2 = float(rho2[a, b])
        for c in np.nonzero(np.abs(t) <= region - r2)[0]:
            key = (r2, abs(float(t[c])))
            if key not in seen:
                seen[key] = heat_kernel_oracle(*key)
            ref = seen[key]
            worst = max(worst, abs(float(np.real(K.values[a, b, c])) - ref) / abs(ref))
            count += 1
    return OracleComparison(worst, count, K.mass())


# -- Plancherel ------------------------------------------------------------------


def radial_energy(h: Callable, upper: Optional[float] = None) -> float:
    """\\int_0^inf |h(u)|^2 u^(Q-1) du."""
    hi = spectral_extent(h, 1e-12) if upper is None else upper
    val, _ = integrate.quad(lambda u: abs(complex(h(np.array([u]))[0])) ** 2 * u ** (Q - 1), 0.0, hi,
                            epsabs=0.0, epsrel=1e-11, limit=500)
    return float(val)


def window_multiplier(j: int = 0, power: int = 1) -> Callable:
    """mu -> phi(2^-j mu)^power with phi the dyadic window."""
    return lambda mu: DEFAULT_WINDOW(np.asarray(mu, dtype=float) * 2.0**-j) ** power


def dilated_multiplier(h: Callable, a: float) -> Callable:
    return lambda mu: h(a * np.asarray(mu, dtype=float))


def default_family() -> dict[str, Callable]:
    phi = window_multiplier()
    return {
        "phi": phi,
        "phi^2": window_multiplier(power=2),
        "phi(2u)": dilated_multiplier(phi, 2.0),
        "heat": heat_multiplier,
        "u^2 exp(-u^2)": lambda mu: np.asarray(mu, dtype=float) ** 2 * np.exp(-np.asarray(mu, dtype=float) ** 2),
    }


def grid_for_scale(scale: float) -> UniformGrid:
    """Default grid dilated so a multiplier living at mu ~ scale is resolved."""
    return dilated_grid(default_grid(), 1.0 / scale)


@dataclass
class PlancherelReport:
    names: list[str]
    kernel_energy: list[float]
    multiplier_energy: list[float]
    ratios: list[float]
    constant: float
    max_deviation: float
    js: list[int]
    piece_energy: list[float]
    piece_slope: float


def plancherel_check(family: Optional[dict[str, Callable]] = None, j_range: Sequence[int] = range(-2, 3),
                     scales: Optional[dict[str, float]] = None) -> PlancherelReport:
    """||K_h||_2^2 / \\int |h|^2 u^3 du over a family, and ||Phi_j||_2^2 against j.

    Phi_j is the kernel of phi(2^-j .), synthesized on the default grid
    dilated by 2^-j so each piece is resolved.
    """
    if family is None:
        family, scales = default_family(), {"phi(2u)": 0.5, **(scales or {})}
    scales = scales or {}
    names, ke, me = [], [], []
    for name, h in family.items():
        K = sublaplacian_kernel(h, grid=grid_for_scale(scales.get(name, 1.0)), label=name)
        names.append(name)
        ke.append(K.l2**2)
        me.append(radial_energy(h))
    ratios = np.asarray(ke) / np.asarray(me)
    c = float(np.mean(ratios))
    js = list(j_range)
    pe = [sublaplacian_kernel(window_multiplier(j), grid=grid_for_scale(2.0**j), label=f"Phi_{j}").l2 ** 2 for j in js]
    return PlancherelReport(names, ke, me, ratios.tolist(), c, float(np.max(np.abs(ratios / c - 1.0))),
                            js, pe, log2_slope(js, pe))


# -- horizontal derivatives and weighted norms ---------------------------------------


def _diff(v: np.ndarray, axis: int, step: float, stride: int) -> np.ndarray:
    return (np.roll(v, -stride, axis) - np.roll(v, stride, axis)) / (2 * stride * step)


def partial(v: np.ndarray, grid: UniformGrid, axis: int) -> tuple[np.ndarray, float]:
    """Centered difference with Richardson extrapolation; returns (derivative, relative correction)."""
    h = grid.spacings[axis]
    d1 = _diff(v, axis, h, 1)
    d2 = _diff(v, axis, h, 2)
    rich = (4.0 * d1 - d2) / 3.0
    scale = float(np.linalg.norm(rich)) or 1.0
    return rich, float(np.linalg.norm(rich - d1)) / scale


def horizontal_fields(f: SampledFunction) -> tuple[np.ndarray, np.ndarray, float]:
    """(X f, Y f, Richardson correction) with X = d_x - (y/2) d_t, Y = d_y + (x/2) d_t."""
    g = f.grid
    x, y, _ = g.mesh()
    fx, ex = partial(f.values, g, 0)
    fy, ey = partial(f.values, g, 1)
    ft, et = partial(f.values, g, 2)
    return fx - (y / 2.0) * ft, fy + (x / 2.0) * ft, max(ex, ey, et)


def sublaplacian_apply(f: SampledFunction) -> np.ndarray:
    """(X^2 + Y^2) f = -L f by repeated horizontal differences."""
    Xf, Yf, _ = horizontal_fields(f)
    XXf, _, _ = horizontal_fields(SampledFunction(f.grid, Xf))
    _, YYf, _ = horizontal_fields(SampledFunction(f.grid, Yf))
    return XXf + YYf


def _weighted(values: np.ndarray, grid: UniformGrid, s: float) -> float:
    p = np.abs(values) ** 2
    tot = float(p.sum())
    if tot > 0:
        far = float(p[grid.sup_radius(relative=True) > 0.9].sum()) / tot
        if far > 0.01:
            logger.warning("%.1f%% of |K|^2 lies near the grid boundary", 100 * far)
    w = 1.0 + koranyi_on(grid) ** s
    return float(np.sqrt(np.sum(p * w**2) * grid.cell_volume))


def weighted_l2_group(K: HeisenbergKernel, s: float, with_derivative: bool = False) -> float:
    """||K (1 + |.|^s)||_2 with the Koranyi norm, or the same for (X K, Y K) combined."""
    if not with_derivative:
        return _weighted(K.values, K.grid, s)
    Xk, Yk, _ = horizontal_fields(K.samples)
    return float(np.hypot(_weighted(Xk, K.grid, s), _weighted(Yk, K.grid, s)))


def piece_multiplier(spec: MultiplierSpec, j: int) -> Callable:
    """mu -> m(2^j mu) phi(mu), zero outside [1/2, 2]."""

    def h(mu):
        mu = np.asarray(mu, dtype=float)
        out = np.zeros(mu.shape, dtype=complex)
        inside = (mu >= 0.5) & (mu <= 2.0)
        out[inside] = spec(mu[inside] * 2.0**j) * DEFAULT_WINDOW(mu[inside])
        return out

    return h


def multiplier_sobolev(h: Callable, s: float, N: int = 1 << 14, R: float = 4.0) -> float:
    """||h||_{L^2_s} of h restricted to the positive axis, on a line grid."""
    g = UniformGrid(1, R, N)
    lam = g.axis()
    v = np.zeros(N, dtype=complex)
    pos = lam > 0
    v[pos] = h(lam[pos])
    return sobolev_norm(SampledFunction(g, v, support_radius=2.0), s)


# -- mean value estimate --------------------------------------------------------------


def gaussian(p: np.ndarray) -> np.ndarray:
    return np.exp(-np.sum(np.asarray(p) ** 2, axis=-1))


def mean_value_check(h: Callable = gaussian, N: float = 4.0, samples: int = 20000, seed: int = 0,
                     ratio: float = 0.1, radius: float = 8.0) -> float:
    """sup |h(x.y) - h(x)| (1 + |x|)^N / |y| over random pairs with |y| <= ratio |x|."""
    if ratio > 0.1:
        raise ValueError("samples must respect |y| <= |x| / 10")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=(samples, 3))
    x *= (rng.uniform(0.05, 1.0, size=(samples, 1)) * radius) / np.maximum(_norm(x)[:, None], 1e-300)
    y = rng.normal(size=(samples, 3))
    y_len = ratio * _norm(x) * rng.uniform(0.0, 1.0, size=samples) ** 2
    y = dilate_rows(y, y_len / np.maximum(_norm(y), 1e-300))
    ny = _norm(y)
    ok = ny > 0
    diff = np.abs(h(group_mul(x[ok], y[ok])) - h(x[ok]))
    return float(np.max(diff * (1.0 + _norm(x[ok])) ** N / ny[ok]))


def _norm(p: np.ndarray) -> np.ndarray:
    return koranyi(p[..., 0], p[..., 1], p[..., 2])


def dilate_rows(p: np.ndarray, r: np.ndarray) -> np.ndarray:
    out = np.array(p, dtype=float)
    out[:, :2] *= r[:, None]
    out[:, 2] *= r**2
    return out


def haar_scaling_ratio(f: Callable, r: float, grid: Optional[UniformGrid] = None) -> float:
    """(\\int f(delta_r p) dp) / (r^-Q \\int f dp) by midpoint quadrature."""
    g = UniformGrid(3, (6.0, 6.0, 6.0), 128) if grid is None else grid
    x, y, t = g.mesh()
    pts = np.stack(np.broadcast_arrays(x, y, t), axis=-1)
    a = float(np.sum(f(dilate(pts, r)))) * g.cell_volume
    b = float(np.sum(f(pts))) * g.cell_volume
    return a / (r ** -Q * b)


# -- key-estimate probe below the homogeneous dimension ---------------------------------


@dataclass
class KeyLieReport:
    s_grid: list[float]
    members: list[str]
    l1: list[float]
    sobolev: dict[float, list[float]]
    sup_ratio: dict[float, float]
    growth: dict[float, float]
    critical_s: Optional[float]

    def to_csv(self) -> str:
        lines = ["member,s,l1,sobolev,ratio"]
        for i, name in enumerate(self.members):
            for s in self.s_grid:
                sob = self.sobolev[s][i]
                lines.append(f"{name},{s:.6g},{self.l1[i]:.12g},{sob:.12g},{self.l1[i] / sob:.12g}")
        return "\n".join(lines) + "\n"


def key_lie_family(spec: MultiplierSpec, j_range: Sequence[int], y_list: Sequence[float] = (2.0, 4.0, 8.0)):
    """Members of increasing oscillation: pieces m^j and modulated windows lam^(iy) phi."""
    fam = [(f"piece_{j}", piece_multiplier(spec, j), 2.0 ** (j * spec.theta)) for j in j_range]
    for y in y_list:
        fam.append((f"modulated_{y:g}", modulated_window(y), float(y)))
    return fam


def modulated_window(y: float) -> Callable:
    """mu -> mu^(iy) phi(mu), zero off the window support (so mu = 0 is harmless)."""

    def h(mu):
        mu = np.asarray(mu, dtype=float)
        out = np.zeros(mu.shape, dtype=complex)
        inside = (mu >= 0.5) & (mu <= 2.0)
        out[inside] = mu[inside] ** (1j * y) * DEFAULT_WINDOW(mu[inside])
        return out

    return h


def key_lie_probe(spec: MultiplierSpec, s_grid: Sequence[float], j_range: Sequence[int] = range(0, 4),
                  y_list: Sequence[float] = (2.0, 4.0, 8.0), grid: Optional[UniformGrid] = None) -> KeyLieReport:
    """Per s, sup over the family of ||K_h||_1 / ||h||_{L^2_s}.

    ``growth`` is the fitted slope of log(ratio) against log(oscillation) per
    s; ``critical_s`` is the smallest probed s with growth <= 0.02.  The
    output is descriptive: nothing here is a verdict.
    """
    fam = key_lie_family(spec, j_range, y_list)
    s_grid = sorted(float(s) for s in s_grid)
    names, l1, osc = [], [], []
    sob = {s: [] for s in s_grid}
    for name, h, o in fam:
        K = sublaplacian_kernel(h, grid=grid, label=name)
        names.append(name)
        l1.append(K.l1)
        osc.append(o)
        for s in s_grid:
            sob[s].append(multiplier_sobolev(h, s))
    sup_ratio, growth = {}, {}
    for s in s_grid:
        r = np.asarray(l1) / np.asarray(sob[s])
        sup_ratio[s] = float(r.max())
        growth[s] = float(np.polyfit(np.log(osc), np.log(r), 1)[0]) if len(set(osc)) > 1 else 0.0
    crit = next((s for s in s_grid if growth[s] <= 0.02), None)
    return KeyLieReport(s_grid, names, l1, sob, sup_ratio, growth, crit)
