"""Uniform grids, unitary Fourier transforms and the norms built on them.

Every integral in the package is a midpoint sum on a :class:`UniformGrid`.
Grid points are ``x_k = (k - N/2) h`` for ``k = 0..N-1`` along each axis, so
the cell around ``x_k`` is ``[x_k - h/2, x_k + h/2)``.

The Fourier transform is the unitary one,

    f^(xi) = (2 pi)^(-d/2) \\int f(x) exp(-i x.xi) dx,

sampled on the dual grid with spacing ``pi / R``.  The dual of the dual grid
is the original grid, so :func:`fourier` and :func:`inverse_fourier` are exact
inverses and Parseval holds to rounding.
"""

from __future__ import annotations

import io
import logging
import struct
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import fft as sfft

logger = logging.getLogger(__name__)


class GridError(ValueError):
    """Invalid grid parameters."""


class AliasingError(ValueError):
    """A function is not supported well inside its grid."""


class ResolutionError(ValueError):
    """A function oscillates faster than its grid can resolve."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, init=False)
class UniformGrid:
    """Tensor grid on the box prod_i [-R_i, R_i); ``R`` and ``N`` may be per-axis."""

    d: int
    R: tuple
    N: tuple

    def __init__(self, d: int, R, N):
        if d not in (1, 2, 3):
            raise GridError(f"dimension must be 1, 2 or 3, got {d}")
        Rs = tuple(float(r) for r in (R if np.ndim(R) else [R] * d))
        Ns = tuple(int(n) for n in (N if np.ndim(N) else [N] * d))
        if len(Rs) != d or len(Ns) != d:
            raise GridError("per-axis R and N need one entry per dimension")
        for n in Ns:
            if not _is_pow2(n) or n < 16:
                raise GridError(f"N must be a power of two >= 16, got {n}")
        for r in Rs:
            if not r > 0:
                raise GridError(f"extent R must be positive, got {r}")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "R", Rs)
        object.__setattr__(self, "N", Ns)

    @property
    def isotropic(self) -> bool:
        return len(set(self.R)) == 1 and len(set(self.N)) == 1

    @property
    def spacings(self) -> tuple:
        return tuple(2.0 * r / n for r, n in zip(self.R, self.N))

    @property
    def h(self) -> float:
        if not self.isotropic:
            raise GridError("grid is anisotropic; use .spacings")
        return self.spacings[0]

    @property
    def extent(self) -> float:
        if not self.isotropic:
            raise GridError("grid is anisotropic")
        return self.R[0]

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def shape(self) -> tuple:
        return self.N

    @property
    def size(self) -> int:
        return int(np.prod(self.N))

    def axis(self, i: int = 0) -> np.ndarray:
        return (np.arange(self.N[i]) - self.N[i] // 2) * self.spacings[i]

    def dual(self) -> "UniformGrid":
        """Frequency grid: spacing pi/R_i, extent N_i pi / (2 R_i)."""
        return UniformGrid(self.d, tuple(n * np.pi / (2.0 * r) for r, n in zip(self.R, self.N)), self.N)

    def dilate(self, factors) -> "UniformGrid":
        f = factors if np.ndim(factors) else [factors] * self.d
        return UniformGrid(self.d, tuple(r * a for r, a in zip(self.R, f)), self.N)

    def mesh(self) -> list:
        axes = [self.axis(i) for i in range(self.d)]
        return list(np.meshgrid(*axes, indexing="ij", sparse=True))

    def radius(self) -> np.ndarray:
        """Euclidean |x| at every grid point (dense array)."""
        r2 = sum(c**2 for c in self.mesh())
        return np.sqrt(np.broadcast_to(r2, self.shape))

    def sup_radius(self, relative: bool = False) -> np.ndarray:
        """max_i |x_i| (or max_i |x_i| / R_i) at every grid point."""
        m = np.zeros(self.shape)
        for c, r in zip(self.mesh(), self.R):
            m = np.maximum(m, np.abs(c) / r if relative else np.abs(c))
        return m


@dataclass
class SampledFunction:
    grid: UniformGrid
    values: np.ndarray
    support_radius: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise GridError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        self.values = v
        if self.support_radius is not None:
            outside = self.grid.sup_radius() > self.support_radius + 1e-12
            scale = max(float(np.max(np.abs(v))), 1.0)
            if np.any(np.abs(v[outside]) > 1e-12 * scale):
                raise AliasingError(
                    f"values do not vanish outside declared support radius {self.support_radius}"
                )

    @classmethod
    def from_callable(cls, grid: UniformGrid, fn: Callable, **kw) -> "SampledFunction":
        return cls(grid, np.asarray(fn(*grid.mesh()), dtype=complex) * np.ones(grid.shape), **kw)

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)) * self.grid.cell_volume)

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell_volume))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def integral(self) -> complex:
        return complex(np.sum(self.values) * self.grid.cell_volume)

    # serialization -----------------------------------------------------

    def to_bytes(self) -> bytes:
        """Little-endian header, then interleaved re/im float64 in C order.

        Isotropic grids use the header ``(d: int64, N: int64, R: float64)``.
        Anisotropic grids write ``-d`` followed by the ``d`` point counts and
        the ``d`` extents.
        """
        g = self.grid
        if g.isotropic:
            header = struct.pack("<qqd", g.d, g.N[0], g.R[0])
        else:
            header = struct.pack(f"<q{g.d}q{g.d}d", -g.d, *g.N, *g.R)
        payload = np.empty(self.values.size * 2, dtype="<f8")
        flat = np.asarray(self.values, dtype=complex).ravel()
        payload[0::2] = flat.real
        payload[1::2] = flat.imag
        return header + payload.tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SampledFunction":
        (d,) = struct.unpack("<q", data[:8])
        if d > 0:
            _, N, R = struct.unpack("<qqd", data[:24])
            grid, offset = UniformGrid(int(d), float(R), int(N)), 24
        else:
            d = -d
            fields = struct.unpack(f"<{d}q{d}d", data[8 : 8 + 16 * d])
            grid, offset = UniformGrid(int(d), fields[d:], fields[:d]), 8 + 16 * d
        payload = np.frombuffer(data[offset:], dtype="<f8")
        if payload.size != 2 * grid.size:
            raise GridError(f"payload holds {payload.size // 2} values, expected {grid.size}")
        values = (payload[0::2] + 1j * payload[1::2]).reshape(grid.shape)
        return cls(grid, values)

    def to_csv(self) -> str:
        if self.values.size > 1 << 16:
            raise GridError("CSV export is meant for small grids (<= 65536 points)")
        buf = io.StringIO()
        names = ["x", "y", "z"][: self.grid.d]
        buf.write(",".join(names + ["re", "im"]) + "\n")
        coords = np.meshgrid(*[self.grid.axis(i) for i in range(self.grid.d)], indexing="ij")
        for idx in np.ndindex(self.grid.shape):
            v = complex(self.values[idx])
            pts = [repr(float(c[idx])) for c in coords]
            buf.write(",".join(pts + [repr(v.real), repr(v.imag)]) + "\n")
        return buf.getvalue()


def _dft(values: np.ndarray, sign: int, workers: Optional[int] = None) -> np.ndarray:
    axes = tuple(range(values.ndim))
    shifted = sfft.ifftshift(values, axes=axes)
    if sign < 0:
        out = sfft.fftn(shifted, axes=axes, workers=workers)
    else:
        out = sfft.ifftn(shifted, axes=axes, workers=workers) * np.prod(values.shape)
    return sfft.fftshift(out, axes=axes)


def fourier(f: SampledFunction) -> SampledFunction:
    """Unitary Fourier transform onto ``f.grid.dual()``."""
    g = f.grid
    scale = g.cell_volume / (2.0 * np.pi) ** (g.d / 2)
    return SampledFunction(g.dual(), _dft(f.values, -1) * scale)


def inverse_fourier(F: SampledFunction) -> SampledFunction:
    """Inverse of :func:`fourier`; ``F`` lives on a frequency grid."""
    g = F.grid
    scale = g.cell_volume / (2.0 * np.pi) ** (g.d / 2)
    return SampledFunction(g.dual(), _dft(F.values, +1) * scale)


def sobolev_weight(grid: UniformGrid, s: float) -> np.ndarray:
    """(1 + |xi|^2)^(s/2) on the frequency grid ``grid``."""
    r2 = sum(c**2 for c in grid.mesh())
    return np.broadcast_to((1.0 + r2) ** (s / 2.0), grid.shape)


def check_support(f: SampledFunction) -> None:
    """Raise if ``f`` reaches into the outer half of its grid."""
    R = min(f.grid.R)
    if f.support_radius is not None:
        if f.support_radius > R / 2 + 1e-12:
            raise AliasingError(f"support radius {f.support_radius} exceeds R/2 = {R / 2}")
        return
    outer = f.grid.sup_radius(relative=True) > 0.5
    scale = float(np.max(np.abs(f.values))) or 1.0
    if np.any(np.abs(f.values[outer]) > 1e-12 * scale):
        raise AliasingError("function does not vanish on the outer half of the grid")


def sobolev_norm(f: SampledFunction, s: float) -> float:
    """||(1 + |xi|^2)^(s/2) f^||_2, computed spectrally."""
    if s < 0:
        raise ValueError("s must be >= 0")
    check_support(f)
    F = fourier(f)
    w = sobolev_weight(F.grid, s)
    return float(np.sqrt(np.sum(np.abs(F.values * w) ** 2) * F.grid.cell_volume))


def sobolev_norms(f: SampledFunction, s_values) -> np.ndarray:
    """Several Sobolev norms from a single transform."""
    check_support(f)
    F = fourier(f)
    power = np.abs(F.values) ** 2
    r2 = np.broadcast_to(sum(c**2 for c in F.grid.mesh()), F.grid.shape)
    out = [np.sqrt(np.sum(power * (1.0 + r2) ** s) * F.grid.cell_volume) for s in s_values]
    return np.asarray(out)


def spectral_tail_fraction(f: SampledFunction, fraction: float = 0.25) -> float:
    """Share of spectral energy in the top ``fraction`` of the frequency band."""
    F = fourier(f)
    p = np.abs(F.values) ** 2
    total = float(np.sum(p))
    if total == 0.0:
        return 0.0
    return float(np.sum(p[F.grid.sup_radius(relative=True) > 1.0 - fraction]) / total)


def check_resolved(f: SampledFunction, tol: float = 1e-10, label: str = "") -> None:
    frac = spectral_tail_fraction(f)
    if frac > tol:
        raise ResolutionError(
            f"{label or 'function'} is not resolved: {frac:.2e} of its spectral energy "
            f"sits in the top quarter of the band (Nyquist {max(f.grid.dual().R):.4g})"
        )


def _norm_array(grid: UniformGrid, norm) -> np.ndarray:
    if norm is None or norm == "euclidean":
        return grid.radius()
    if callable(norm):
        return np.broadcast_to(norm(*grid.mesh()), grid.shape)
    return np.broadcast_to(np.asarray(norm), grid.shape)


def weighted_l2(K: SampledFunction, s: float, norm=None) -> float:
    """(\\int |K|^2 (1 + |x|^s)^2 dx)^(1/2); ``norm`` gives |x| (default euclidean)."""
    r = _norm_array(K.grid, norm)
    p = np.abs(K.values) ** 2
    total = float(np.sum(p))
    if total > 0:
        far = float(np.sum(p[K.grid.sup_radius(relative=True) > 0.9])) / total
        if far > 0.01:
            logger.warning("%.1f%% of |K|^2 lies beyond 0.9R; weighted norm is truncated", 100 * far)
    w = 1.0 + r**s
    return float(np.sqrt(np.sum(p * w**2) * K.grid.cell_volume))


def l1_tail(K: SampledFunction, R0: float, norm=None) -> float:
    """\\int_{|x| >= R0} |K| dx by the midpoint rule.

    The cell straddling the sphere |x| = R0 is weighted by the fraction of its
    width lying outside (exact in one dimension, first order otherwise).
    """
    if R0 <= 0:
        return K.l1()
    r = _norm_array(K.grid, norm)
    w = np.clip((r - R0) / min(K.grid.spacings) + 0.5, 0.0, 1.0)
    return float(np.sum(np.abs(K.values) * w) * K.grid.cell_volume)
