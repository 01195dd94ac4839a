"""Oscillating spectral multipliers, the dyadic window, and class diagnostics.

A multiplier is a function on (0, inf).  Its dyadic pieces are the rescaled
windowed slices ``m^j(lam) = m(2^j lam) phi(lam)``, all supported in [1/2, 2],
and every class condition is a statement about how their norms behave in j.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import SampledFunction, UniformGrid, check_resolved, fourier

logger = logging.getLogger(__name__)


class Cutoff(str, Enum):
    PLUS = "plus"  # vanishes for lam <= 1
    MINUS = "minus"  # vanishes for lam >= 1
    NONE = "none"


def _bump(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def smooth_step(u) -> np.ndarray:
    """C^inf step: 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    a, b = _bump(u), _bump(1.0 - u)
    return a / (a + b)


def step_down(lam) -> np.ndarray:
    """1 on [0, 1], 0 on [2, inf), smooth and non-increasing in between."""
    return 1.0 - smooth_step(np.asarray(lam, dtype=float) - 1.0)


def cutoff_factor(kind: Cutoff, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if kind is Cutoff.PLUS:
        return 1.0 - step_down(lam)
    if kind is Cutoff.MINUS:
        return step_down(2.0 * lam)
    return np.ones_like(lam)


def auto_cutoff(theta: float) -> Cutoff:
    if theta > 0:
        return Cutoff.PLUS
    if theta < 0:
        return Cutoff.MINUS
    return Cutoff.NONE


def _check_theta(theta: float) -> None:
    if theta == 1:
        raise ValueError("theta = 1 (the wave case) is not supported")


# -- multiplier families -----------------------------------------------------


class MultiplierSpec:
    """Base class.  Subclasses define ``theta``, ``beta``, ``cutoff`` and ``_eval``."""

    theta: float
    beta: float
    cutoff: Cutoff

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if np.any(lam <= 0):
            raise ValueError("multipliers are evaluated at lam > 0 only")
        return self._eval(lam)

    def _eval(self, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def phase_rate(self, lam: np.ndarray) -> Optional[np.ndarray]:
        """|d/dlam arg m(lam)| where known analytically, else None."""
        return None

    def to_dict(self) -> dict:
        raise TypeError(f"{type(self).__name__} is not serializable")


def _resolve_cutoff(cutoff, theta: float) -> Cutoff:
    if cutoff in (None, "auto"):
        return auto_cutoff(theta)
    return Cutoff(cutoff)


@dataclass(frozen=True)
class Oscillating(MultiplierSpec):
    """exp(i lam^theta) lam^(-theta beta / 2) times the cutoff."""

    theta: float
    beta: float
    cutoff_mode: str = "auto"

    def __post_init__(self):
        _check_theta(self.theta)

    @property
    def cutoff(self) -> Cutoff:
        return _resolve_cutoff(self.cutoff_mode, self.theta)

    def _eval(self, lam):
        th = self.theta
        return np.exp(1j * lam**th) * lam ** (-th * self.beta / 2.0) * cutoff_factor(self.cutoff, lam)

    def phase_rate(self, lam):
        return np.abs(self.theta) * lam ** (self.theta - 1.0)

    def to_dict(self):
        return {"kind": "oscillating", "theta": self.theta, "beta": self.beta, "cutoff": self.cutoff_mode}


def hardy_parameters(a: float, b: float, n: int) -> tuple[float, float]:
    """(theta, beta) of the multiplier of the strongly singular kernel exp(i|y|^-a)/|y|^b."""
    if not a > 0:
        raise ValueError("a must be positive")
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    return a / (1.0 + a), ((2.0 + a) * n - 2.0 * b) / a


def boundedness_threshold(a: float, n: int) -> float:
    """Largest b for which the multiplier stays bounded: n(2+a)/2."""
    if not a > 0:
        raise ValueError("a must be positive")
    return n * (2.0 + a) / 2.0


@dataclass(frozen=True)
class HardyStrong(MultiplierSpec):
    a: float
    b: float
    n: int

    def __post_init__(self):
        hardy_parameters(self.a, self.b, self.n)

    @property
    def theta(self) -> float:
        return hardy_parameters(self.a, self.b, self.n)[0]

    @property
    def beta(self) -> float:
        return hardy_parameters(self.a, self.b, self.n)[1]

    @property
    def cutoff(self) -> Cutoff:
        return Cutoff.PLUS

    def as_oscillating(self) -> Oscillating:
        return Oscillating(self.theta, self.beta)

    def _eval(self, lam):
        return self.as_oscillating()._eval(lam)

    def phase_rate(self, lam):
        return self.as_oscillating().phase_rate(lam)

    def to_dict(self):
        return {"kind": "hardy_strong", "a": self.a, "b": self.b, "n": self.n}


@dataclass(frozen=True)
class Modulated(MultiplierSpec):
    """lam^(iy) base(lam)."""

    base: MultiplierSpec
    y: float

    @property
    def theta(self):
        return self.base.theta

    @property
    def beta(self):
        return self.base.beta

    @property
    def cutoff(self):
        return self.base.cutoff

    def _eval(self, lam):
        return lam ** (1j * self.y) * self.base._eval(lam)

    def phase_rate(self, lam):
        inner = self.base.phase_rate(lam)
        return None if inner is None else inner + abs(self.y) / lam

    def to_dict(self):
        return {"kind": "modulated", "base": self.base.to_dict(), "y": self.y}


@dataclass(frozen=True)
class AnalyticFamily(MultiplierSpec):
    """lam^((theta/2)(beta - (dim + delta) z)) base(lam), Re z in [0, 1]."""

    base: MultiplierSpec
    delta: float
    z: complex
    dim: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if not 0.0 <= complex(self.z).real <= 1.0:
            raise ValueError("Re z must lie in [0, 1]")

    @property
    def theta(self):
        return self.base.theta

    @property
    def beta(self):
        return self.base.beta

    @property
    def cutoff(self):
        return self.base.cutoff

    def _eval(self, lam):
        expo = (self.theta / 2.0) * (self.beta - (self.dim + self.delta) * complex(self.z))
        return lam**expo * self.base._eval(lam)

    def phase_rate(self, lam):
        inner = self.base.phase_rate(lam)
        if inner is None:
            return None
        im = (self.theta / 2.0) * (self.dim + self.delta) * complex(self.z).imag
        return inner + abs(im) / lam

    def to_dict(self):
        z = complex(self.z)
        return {
            "kind": "analytic",
            "base": self.base.to_dict(),
            "delta": self.delta,
            "z": [z.real, z.imag],
            "dim": self.dim,
        }


@dataclass(frozen=True)
class Custom(MultiplierSpec):
    evaluator: Callable = field(compare=False)
    theta: float = 0.0
    beta: float = 0.0
    cutoff_mode: str = "auto"

    def __post_init__(self):
        _check_theta(self.theta)

    @property
    def cutoff(self):
        return _resolve_cutoff(self.cutoff_mode, self.theta)

    def _eval(self, lam):
        vals = np.asarray(self.evaluator(lam), dtype=complex) * np.ones_like(lam)
        return vals * cutoff_factor(self.cutoff, lam)


def evaluate(spec: MultiplierSpec, lam):
    """m(lam) for lam > 0 (scalar in, scalar out)."""
    out = spec(lam)
    return complex(out) if np.ndim(out) == 0 else out


def spec_from_dict(doc: dict) -> MultiplierSpec:
    kind = doc.get("kind")
    if kind == "oscillating":
        return Oscillating(float(doc["theta"]), float(doc["beta"]), doc.get("cutoff", "auto"))
    if kind == "hardy_strong":
        return HardyStrong(float(doc["a"]), float(doc["b"]), int(doc["n"]))
    if kind == "modulated":
        return Modulated(spec_from_dict(doc["base"]), float(doc["y"]))
    if kind == "analytic":
        z = doc["z"]
        z = complex(z[0], z[1]) if isinstance(z, (list, tuple)) else complex(z)
        return AnalyticFamily(spec_from_dict(doc["base"]), float(doc["delta"]), z, float(doc["dim"]))
    if kind == "constant":
        value = complex(doc.get("value", 1.0))
        return Custom(lambda lam: value, theta=0.0, beta=0.0)
    raise ValueError(f"unknown multiplier kind {kind!r}")


def spec_to_json(spec: MultiplierSpec) -> str:
    return json.dumps(spec.to_dict())


def spec_from_json(text: str) -> MultiplierSpec:
    return spec_from_dict(json.loads(text))


# -- dyadic window -------------------------------------------------------------


@dataclass(frozen=True)
class DyadicWindow:
    """phi(lam) = step_down(lam) - step_down(2 lam), supported in [1/2, 2].

    The sum over j of phi(2^-j lam) telescopes, so the partition of unity holds
    to rounding.  Any other callable with the same support can be injected.
    """

    fn: Optional[Callable] = field(default=None, compare=False)
    partition: bool = True

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        if self.fn is not None:
            out = np.asarray(self.fn(lam), dtype=float)
        else:
            out = step_down(lam) - step_down(2.0 * lam)
        return np.where((lam >= 0.5) & (lam <= 2.0), out, 0.0)

    def partition_sum(self, lam, J: int) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        return sum(self(lam * 2.0**-j) for j in range(-J, J + 1))

    def max(self) -> float:
        lam = np.linspace(0.5, 2.0, 4097)
        return float(np.max(self(lam)))


DEFAULT_WINDOW = DyadicWindow()


def piece_grid(N: int = 1 << 14, R: float = 4.0) -> UniformGrid:
    """Default line grid for dyadic pieces; [1/4, 4] holds 2^12+ points."""
    return UniformGrid(1, R, N)


DEFAULT_PIECE_GRID = piece_grid()


def max_phase_rate(spec: MultiplierSpec, j: int) -> Optional[float]:
    """sup over [1/2, 2] of |d/dlam arg m(2^j lam)|, if the multiplier knows its phase."""
    lam = np.linspace(0.5, 2.0, 257)
    rate = spec.phase_rate(lam * 2.0**j)
    if rate is None:
        return None
    return float(np.max(rate * 2.0**j))


def resolvable(spec: MultiplierSpec, j: int, grid: UniformGrid, margin: float = 0.5) -> bool:
    """Whether piece j oscillates slowly enough for ``grid`` (analytic estimate)."""
    rate = max_phase_rate(spec, j)
    if rate is None:
        return True
    return rate <= margin * grid.dual().R[0]


class DyadicPiece:
    """Samples of m(2^j lam) phi(lam) on a line grid with lazily cached norms."""

    def __init__(self, spec: MultiplierSpec, window: DyadicWindow, j: int, grid: UniformGrid = DEFAULT_PIECE_GRID):
        if grid.d != 1:
            raise ValueError("dyadic pieces live on one-dimensional grids")
        lo = np.count_nonzero((grid.axis() >= 0.25) & (grid.axis() <= 4.0))
        if lo < 256 or grid.R[0] < 4.0:
            raise ValueError("grid must cover [1/4, 4] with at least 2^8 points")
        self.spec, self.window, self.j, self.grid = spec, window, int(j), grid
        x = grid.axis()
        inside = (x >= 0.5) & (x <= 2.0)
        vals = np.zeros(grid.shape, dtype=complex)
        lam = x[inside]
        with np.errstate(all="ignore"):
            mv = spec(lam * 2.0**self.j)
        bad = ~np.isfinite(mv)
        if np.any(bad):
            raise ValueError(f"multiplier is not finite in piece j={self.j} at lam={lam[bad][0] * 2.0 ** self.j:.6g}")
        vals[inside] = mv * window(lam)
        self.samples = SampledFunction(grid, vals, support_radius=2.0)
        self._spectrum: Optional[tuple[np.ndarray, np.ndarray]] = None
        self._sobolev: dict[float, float] = {}

    @property
    def lam(self) -> np.ndarray:
        return self.grid.axis()

    def window_samples(self) -> tuple[np.ndarray, np.ndarray]:
        """(lam, m^j(lam)) restricted to [1/4, 4]."""
        x = self.grid.axis()
        keep = (x >= 0.25) & (x <= 4.0)
        return x[keep], self.samples.values[keep]

    def sup(self) -> float:
        return self.samples.sup()

    def l2(self) -> float:
        return self.samples.l2()

    def _power(self):
        if self._spectrum is None:
            if self.samples.sup() > 0:
                check_resolved(self.samples, label=f"dyadic piece j={self.j}")
            F = fourier(self.samples)
            self._spectrum = (np.abs(F.values) ** 2 * F.grid.h, F.grid.axis() ** 2)
        return self._spectrum

    def sobolev(self, s: float) -> float:
        s = float(s)
        if s not in self._sobolev:
            p, xi2 = self._power()
            self._sobolev[s] = float(np.sqrt(np.sum(p * (1.0 + xi2) ** s)))
        return self._sobolev[s]


def dyadic_piece(spec, window=DEFAULT_WINDOW, j: int = 0, grid: UniformGrid = DEFAULT_PIECE_GRID) -> DyadicPiece:
    return DyadicPiece(spec, window, j, grid)


# -- class conditions ------------------------------------------------------------

SLOPE_FINITE = 0.02  # fitted log2-slope at or below this counts as bounded
SLOPE_DIVERGENT = 0.05  # above this counts as divergent; in between is inconclusive
SPREAD_LIMIT = 10.0  # max / median over the outer half


def log2_slope(js: Sequence[float], values: Sequence[float]) -> float:
    js = np.asarray(js, dtype=float)
    v = np.asarray(values, dtype=float)
    ok = v > 0
    if np.count_nonzero(ok) < 2:
        return 0.0
    return float(np.polyfit(js[ok], np.log2(v[ok]), 1)[0])


def outer_half(js: Sequence[int]) -> np.ndarray:
    """Indices of the half of ``js`` with the largest |j| (at least two)."""
    js = np.asarray(js)
    order = np.argsort(np.abs(js), kind="stable")
    k = max(2, (len(js) + 1) // 2)
    return np.sort(order[-k:])


def sup_verdict(js: Sequence[int], values: Sequence[float]) -> tuple[str, float]:
    """Classify a sequence indexed by j as bounded / divergent / inconclusive.

    Both the slope fit and the spread test look only at the outer half of
    the range: early pieces may be large while the tail is settling down.
    Returns the verdict and the fitted log2-slope against |j|.
    """
    js, values = np.asarray(js), np.asarray(values, dtype=float)
    if len(js) < 2:
        return "finite", 0.0
    idx = outer_half(js)
    tail = values[idx]
    slope = log2_slope(np.abs(js[idx]), tail)
    med = float(np.median(tail))
    spread_ok = np.max(tail) <= SPREAD_LIMIT * med if med > 0 else np.max(tail) == 0
    if slope > SLOPE_DIVERGENT or not spread_ok:
        return "divergent", slope
    if slope > SLOPE_FINITE:
        return "inconclusive", slope
    return "finite", slope


def default_j_range(theta: float, lo: int = -16, hi: int = 16) -> list[int]:
    return list(range(lo, hi + 1))


def _pieces(spec, window, js, grid, clip: bool):
    out = []
    for j in js:
        if clip and not resolvable(spec, j, grid):
            continue
        out.append(DyadicPiece(spec, window, j, grid))
    return out


@dataclass
class NegResult:
    js: list[int]
    norms: list[float]
    sup: float
    slope: float
    verdict: str


@dataclass
class PosResult:
    js: list[int]
    sup_norms: list[float]
    sobolev_norms: list[float]
    sup_linf: float
    sup_sobolev: float
    slope_linf: float
    slope_sobolev: float
    verdict_linf: str
    verdict_sobolev: str


def check_condition_neg(spec, window=DEFAULT_WINDOW, s: float = 1.0, j_range=None,
                        grid: UniformGrid = DEFAULT_PIECE_GRID, clip: bool = False, pieces=None,
                        theta: Optional[float] = None) -> NegResult:
    """sup over {j : j theta <= 0} of ||m^j||_{L^2_s}, with the trend slope.

    ``theta`` defaults to the multiplier's own; ``pieces`` maps j to precomputed
    :class:`DyadicPiece` objects.
    """
    theta = spec.theta if theta is None else theta
    js = list(j_range) if j_range is not None else default_j_range(theta)
    js = [j for j in js if j * theta <= 0]
    if pieces is None:
        plist = _pieces(spec, window, js, grid, clip)
    else:
        plist = [pieces[j] for j in js if j in pieces]
    js = [p.j for p in plist]
    norms = [p.sobolev(s) for p in plist]
    if not norms:
        return NegResult([], [], 0.0, 0.0, "finite")
    verdict, slope = sup_verdict(js, norms)
    return NegResult(js, norms, float(max(norms)), slope, verdict)


def check_condition_pos(spec, window=DEFAULT_WINDOW, s: float = 1.0, beta: Optional[float] = None, j_range=None,
                        grid: UniformGrid = DEFAULT_PIECE_GRID, clip: bool = False, pieces=None,
                        theta: Optional[float] = None) -> PosResult:
    """The two growth-normalised sups over {j : j theta > 0} and raw log2-slopes vs j.

    For m_{theta,beta} the raw slopes approach -theta beta/2 (sup norm) and
    theta (2s - beta)/2 (Sobolev norm).  Slopes are fitted over the outer half
    of the j range, where the asymptotic regime is reached.
    """
    theta = spec.theta if theta is None else theta
    beta = spec.beta if beta is None else beta
    js = list(j_range) if j_range is not None else default_j_range(theta)
    js = [j for j in js if j * theta > 0]
    if pieces is None:
        plist = _pieces(spec, window, js, grid, clip)
    else:
        plist = [pieces[j] for j in js if j in pieces]
    js = [p.j for p in plist]
    if not js:
        return PosResult([], [], [], 0.0, 0.0, 0.0, 0.0, "finite", "finite")
    linf = np.array([p.sup() for p in plist])
    sob = np.array([p.sobolev(s) for p in plist])
    ja = np.asarray(js, dtype=float)
    a = 2.0 ** (ja * theta * beta / 2.0) * linf
    b = 2.0 ** (-ja * theta * (2 * s - beta) / 2.0) * sob
    va, _ = sup_verdict(js, a)
    vb, _ = sup_verdict(js, b)
    idx = outer_half(js) if len(js) > 1 else np.arange(len(js))
    return PosResult(
        js, linf.tolist(), sob.tolist(), float(a.max()), float(b.max()),
        log2_slope(ja[idx], linf[idx]), log2_slope(ja[idx], sob[idx]), va, vb,
    )


@dataclass
class ClassReport:
    theta: float
    beta: float
    s: float
    s_grid: list[float]
    js: list[int]
    rows: list[dict]
    neg: NegResult
    pos: dict[float, PosResult]
    verdict: str

    @property
    def sup_neg(self) -> float:
        return self.neg.sup

    def to_json(self) -> str:
        return json.dumps({
            "theta": self.theta, "beta": self.beta, "s": self.s, "s_grid": self.s_grid,
            "verdict": self.verdict,
            "neg": {"sup": self.neg.sup, "slope": self.neg.slope, "verdict": self.neg.verdict},
            "pos": {
                repr(sp): {
                    "sup_linf": r.sup_linf, "sup_sobolev": r.sup_sobolev,
                    "slope_linf": r.slope_linf, "slope_sobolev": r.slope_sobolev,
                    "verdict_linf": r.verdict_linf, "verdict_sobolev": r.verdict_sobolev,
                } for sp, r in self.pos.items()
            },
        }, indent=2)

    def to_csv(self) -> str:
        cols = ["j", "s_prime", "region", "linf", "sobolev", "normalized_linf", "normalized_sobolev"]
        lines = [",".join(cols)]
        for r in self.rows:
            lines.append(",".join(_fmt(r[c]) for c in cols))
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def default_s_grid(s: float, count: int = 8) -> list[float]:
    lo = max(0.1, s / 4.0)
    if lo >= s:
        return [float(s)]
    g = np.geomspace(lo, s, count)
    g[-1] = s
    return [float(v) for v in g]


def class_membership(spec, window=DEFAULT_WINDOW, theta: Optional[float] = None, beta: Optional[float] = None,
                     s: float = 1.0, s_grid=None, j_range=None, grid: UniformGrid = DEFAULT_PIECE_GRID) -> ClassReport:
    """Membership test for M_{theta,beta,s} on a finite j range.

    The (neg) condition is run at ``s`` and the (pos) condition at every value
    of ``s_grid`` (which must include ``s``).  Pieces outside the resolvable
    range of ``grid`` are dropped when ``j_range`` is defaulted.
    """
    theta = spec.theta if theta is None else theta
    beta = spec.beta if beta is None else beta
    _check_theta(theta)
    s_grid = default_s_grid(s) if s_grid is None else sorted(float(v) for v in s_grid)
    if any(v <= 0 or v > s + 1e-12 for v in s_grid) or not any(abs(v - s) < 1e-12 for v in s_grid):
        raise ValueError("s_grid must lie in (0, s] and contain s")
    clip = j_range is None
    js = list(j_range) if j_range is not None else default_j_range(theta)
    pieces = {p.j: p for p in _pieces(spec, window, js, grid, clip)}
    neg = check_condition_neg(spec, window, s, pieces.keys(), grid, pieces=pieces, theta=theta)
    pos = {
        sp: check_condition_pos(spec, window, sp, beta, pieces.keys(), grid, pieces=pieces, theta=theta)
        for sp in s_grid
    }

    rows = []
    for j in sorted(pieces):
        p = pieces[j]
        region = "pos" if j * theta > 0 else "neg"
        for sp in s_grid:
            sob = p.sobolev(sp)
            rows.append({
                "j": j, "s_prime": sp, "region": region, "linf": p.sup(), "sobolev": sob,
                "normalized_linf": 2.0 ** (j * theta * beta / 2.0) * p.sup() if region == "pos" else p.sup(),
                "normalized_sobolev": 2.0 ** (-j * theta * (2 * sp - beta) / 2.0) * sob if region == "pos" else sob,
            })

    verdicts = [neg.verdict] + [r.verdict_linf for r in pos.values()] + [r.verdict_sobolev for r in pos.values()]
    if "divergent" in verdicts:
        verdict = "not member"
    elif "inconclusive" in verdicts:
        verdict = "inconclusive"
    else:
        verdict = "member"
    return ClassReport(theta, beta, s, s_grid, sorted(pieces), rows, neg, pos, verdict)


def modulate_and_fit(spec, window=DEFAULT_WINDOW, theta=None, beta=None, s: float = 1.0,
                     y_list=(1, 2, 4, 8, 16), j_range=None, grid: UniformGrid = DEFAULT_PIECE_GRID) -> dict:
    """Class constants of lam^(iy) m(lam) versus |y| and their fitted polynomial degree.

    The constant for each y is the largest of the (neg) sup and both (pos)
    sups at ``s``.  The degree is the slope of log(constant) against
    log(1 + |y|).
    """
    theta = spec.theta if theta is None else theta
    beta = spec.beta if beta is None else beta
    y_list = [float(y) for y in y_list]
    if len(y_list) < 4:
        raise ValueError("need at least four y values")
    consts, sups = [], []
    for y in y_list:
        mod = spec if y == 0 else Modulated(spec, y)
        rep = class_membership(mod, window, theta, beta, s, [s], j_range, grid)
        c = max(rep.neg.sup, rep.pos[s].sup_linf, rep.pos[s].sup_sobolev)
        consts.append(c)
        sups.append([rep.neg.sup, rep.pos[s].sup_linf, rep.pos[s].sup_sobolev])
    ly = np.log1p(np.abs(y_list))
    degree = float(np.polyfit(ly, np.log(consts), 1)[0]) if np.ptp(ly) > 0 else 0.0
    return {"y": y_list, "constants": consts, "components": sups, "degree": degree}


def split_small_large(theta: float, j_range) -> tuple[list[int], list[int]]:
    """({j : j theta <= 0}, {j : j theta > 0})."""
    js = list(j_range)
    return [j for j in js if j * theta <= 0], [j for j in js if j * theta > 0]


def lp_sharp_range(beta: float, dim: float) -> float:
    """Half-width of the sharp L^p range |1/p - 1/2| <= beta / (2 dim)."""
    return beta / (2.0 * dim)


def expected_slopes(theta: float, beta: float, s: float) -> tuple[float, float]:
    """Asymptotic log2-slopes of ||m^j||_inf and ||m^j||_{L^2_s} for m_{theta,beta}."""
    return -theta * beta / 2.0, theta * (2.0 * s - beta) / 2.0

