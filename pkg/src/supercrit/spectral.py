"""Radial Fourier transform and the Sobolev / Besov / Lebesgue norms.

The transform uses the closed-form half-integer Bessel kernels (d = 3, 5)
and trapezoidal quadrature on a strided copy of the radial grid. The
wavenumber grid is built band by band, so the sharp dyadic bands [N, 2N)
begin and end on grid nodes and tile the span exactly.

Norms carry the surface area of the unit sphere, so they are norms on R^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .config import CriticalExponents, SimulationConfig, critical_exponent
from .grid import RadialField, RadialGrid, SolverState

SUPPORTED_DIMS = (3, 5)
TAIL_TOL = 1e-6
MAX_STRIDE = 8
K_MAX_CAP = 2.0**8
_SQRT_2_OVER_PI = math.sqrt(2 / math.pi)


class SpectralError(ValueError):
    pass


class ResolutionError(SpectralError):
    """Quadrature or wavenumber span too coarse for the field."""


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d (4 pi for d = 3)."""
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class WavenumberGrid:
    """Dyadic bands [N, 2N) between two powers of two, uniform nodes inside each.

    A band gets ``per_octave`` intervals (rounded up to even), or more if needed to keep the node
    spacing at or below ``dk_max``. Fields supported in [0, R] have |u^|^2
    oscillating on the scale pi/R in k, so ``dk_max`` should be about
    pi/(2R); :meth:`for_grid` sets it from the domain radius.
    """

    k_min: float = 2.0**-6
    k_max: float = 2.0**8
    per_octave: int = 64
    dk_max: float = math.inf

    def __post_init__(self) -> None:
        lo, hi = math.log2(self.k_min), math.log2(self.k_max)
        if lo != round(lo) or hi != round(hi):
            raise SpectralError("k_min and k_max must be powers of two so dyadic bands tile the span")
        if hi <= lo:
            raise SpectralError("k_max must exceed k_min")
        if self.per_octave < 2:
            raise SpectralError("need at least two points per band")
        if not self.dk_max > 0:
            raise SpectralError("dk_max must be positive")

    @classmethod
    def for_grid(cls, grid: RadialGrid, k_min: float = 2.0**-6, k_max: float | None = None,
                 per_octave: int = 64) -> "WavenumberGrid":
        """Spacing matched to the domain; k_max defaults to the largest power of
        two the grid resolves (k_max * dr <= pi/4), capped at 2^8."""
        if k_max is None:
            k_max = min(K_MAX_CAP, 2.0 ** math.floor(math.log2(math.pi / (4 * grid.dr))))
            if k_max <= k_min:
                raise ResolutionError(f"dr = {grid.dr:g} is too coarse for any band above k_min")
        return cls(k_min, k_max, per_octave, math.pi / (2 * grid.r_max))

    @property
    def n_bands(self) -> int:
        return round(math.log2(self.k_max / self.k_min))

    @cached_property
    def band_starts(self) -> np.ndarray:
        return 2.0 ** (round(math.log2(self.k_min)) + np.arange(self.n_bands))

    @cached_property
    def band_sizes(self) -> np.ndarray:
        """Number of intervals in each band."""
        need = np.ceil(self.band_starts / self.dk_max) if math.isfinite(self.dk_max) else 0 * self.band_starts
        m = np.maximum(self.per_octave, need).astype(int)
        return m + (m % 2)  # Simpson needs an even count

    @cached_property
    def _offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.band_sizes)])

    @cached_property
    def k(self) -> np.ndarray:
        parts = [N + N * np.arange(m) / m for N, m in zip(self.band_starts, self.band_sizes)]
        k = np.concatenate(parts + [[self.k_max]])
        k.flags.writeable = False
        return k

    def band_slice(self, b: int) -> slice:
        return slice(self._offsets[b], self._offsets[b + 1] + 1)

    def band_weights(self, b: int) -> np.ndarray:
        """Composite Simpson weights in k for band b (its nodes include both edges)."""
        m = self.band_sizes[b]
        h = self.band_starts[b] / m
        w = np.full(m + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return w * (h / 3)


@dataclass(frozen=True, eq=False)
class SpectralField:
    grid: WavenumberGrid
    amplitudes: np.ndarray
    d: int


@dataclass(frozen=True)
class NormBundle:
    s: float
    sobolev: float
    l2: float
    besov: float
    lp2: float
    linf: float
    centered: bool = True


def default_stride(grid: RadialGrid, kgrid: WavenumberGrid, cap: int = MAX_STRIDE) -> int:
    """Largest stride <= cap that divides the grid and keeps k_max * h <= pi/4."""
    for s in range(cap, 0, -1):
        if grid.n_cells % s == 0 and kgrid.k_max * s * grid.dr <= math.pi / 4:
            return s
    raise ResolutionError(
        f"k_max = {kgrid.k_max:g} is under-resolved even at stride 1 (dr = {grid.dr:g})"
    )


def _j32_kernel(x: np.ndarray) -> np.ndarray:
    """sin x - x cos x, with a series near 0 to avoid cancellation."""
    out = np.sin(x) - x * np.cos(x)
    small = np.abs(x) < 1e-2
    xs = x[small]
    x2 = xs * xs
    out[small] = xs * x2 * (1 / 3 - x2 / 30 + x2 * x2 / 840)
    return out


@lru_cache(maxsize=2)
def _transform_matrix(d: int, dr: float, n_cells: int, stride: int, kgrid: WavenumberGrid) -> np.ndarray:
    h = dr * stride
    r = np.arange(n_cells // stride + 1) * h
    w = np.full(r.size, h)
    w[0] = w[-1] = h / 2
    rw = r * w
    mat = np.empty((kgrid.k.size, r.size))
    # row blocks keep the temporaries small
    for lo in range(0, kgrid.k.size, 256):
        k = kgrid.k[lo:lo + 256, None]
        kr = k * r[None, :]
        if d == 3:
            blk = np.sin(kr, out=kr)
            blk *= _SQRT_2_OVER_PI / k
        else:
            blk = _j32_kernel(kr)
            blk *= _SQRT_2_OVER_PI / k**3
        blk *= rw[None, :]
        mat[lo:lo + 256] = blk
    mat.flags.writeable = False
    return mat


def radial_fourier(
    f: RadialField | np.ndarray,
    d: int,
    kgrid: WavenumberGrid | None = None,
    stride: int = 1,
    grid: RadialGrid | None = None,
) -> SpectralField:
    """Fourier amplitude of a radial function on R^d, sampled on ``kgrid``.

    With the unitary transform, a radial f has a radial, real transform
    ``k^{-(d-2)/2} int J_{(d-2)/2}(k r) f(r) r^{d/2} dr``; for odd d the Bessel
    function is elementary.
    """
    if d not in SUPPORTED_DIMS:
        raise SpectralError(f"spectral diagnostics support d in {SUPPORTED_DIMS}, got {d}")
    if isinstance(f, RadialField):
        grid, values = f.grid, f.values
    else:
        if grid is None:
            raise SpectralError("raw arrays need an explicit grid")
        values = np.asarray(f, dtype=float)
    kgrid = kgrid or WavenumberGrid.for_grid(grid)
    if stride < 1 or grid.n_cells % stride:
        raise SpectralError(f"stride {stride} does not divide {grid.n_cells} cells")
    if kgrid.k_max * stride * grid.dr > math.pi / 4:
        raise ResolutionError(
            f"k_max * h = {kgrid.k_max * stride * grid.dr:.3g} > pi/4; reduce the stride or k_max"
        )
    mat = _transform_matrix(d, grid.dr, grid.n_cells, stride, kgrid)
    return SpectralField(kgrid, mat @ values[::stride], d)


def _density(F: SpectralField) -> np.ndarray:
    return F.amplitudes**2 * F.grid.k ** (F.d - 1)


def band_masses(F: SpectralField, s: float = 0.0, at_band_start: bool = False) -> np.ndarray:
    """Per-band integrals of k^{2s} |u^|^2 over [N, 2N), without the sphere factor.

    ``at_band_start`` replaces k^{2s} by N^{2s} (the Besov weight).
    """
    kg = F.grid
    rho = _density(F)
    out = np.empty(kg.n_bands)
    for b in range(kg.n_bands):
        sl = kg.band_slice(b)
        w = kg.band_weights(b)
        if at_band_start:
            weight = np.full(w.size, kg.band_starts[b] ** (2 * s))
        else:
            weight = kg.k[sl] ** (2 * s)
        out[b] = np.sum(weight * w * rho[sl])
    return out


def tail_fraction(F: SpectralField, s: float) -> float:
    """k * (integrand at k_max) over the integral: the log-k density left at the cut."""
    total = band_masses(F, s).sum()
    if total == 0:
        return 0.0
    k = F.grid.k_max
    return float(F.amplitudes[-1] ** 2 * k ** (F.d + 2 * s) / total)


def _check_tail(F: SpectralField, s: float, tail_tol: float) -> None:
    frac = tail_fraction(F, s)
    if frac > tail_tol:
        raise ResolutionError(f"integrand at k_max is {frac:.2e} of the total (> {tail_tol:g}); raise k_max")


def sobolev_norm(F: SpectralField, s: float, d: int | None = None, tail_tol: float = TAIL_TOL) -> float:
    """Homogeneous H^s norm."""
    d = F.d if d is None else d
    if s < 0:
        raise SpectralError("negative Sobolev order not supported")
    _check_tail(F, s, tail_tol)
    return math.sqrt(sphere_area(d) * band_masses(F, s).sum())


def besov_norm(F: SpectralField, s: float, d: int | None = None, tail_tol: float = TAIL_TOL) -> float:
    """sup over dyadic N of N^s ||P_N u||_2 with sharp annuli."""
    d = F.d if d is None else d
    if s < 0:
        raise SpectralError("negative Besov order not supported")
    _check_tail(F, s, tail_tol)
    return math.sqrt(sphere_area(d) * band_masses(F, s, at_band_start=True).max())


def lebesgue_norms(f: RadialField | np.ndarray, d: int, p: float, grid: RadialGrid | None = None) -> tuple[float, float]:
    """(L^{p+2} norm on R^d, sup norm) by the trapezoidal rule in r."""
    if not p > 0:
        raise SpectralError("p must be positive")
    if isinstance(f, RadialField):
        grid, values = f.grid, f.values
    else:
        values = np.asarray(f, dtype=float)
    r = grid.r
    q = p + 2
    integrand = np.abs(values) ** q * r ** (d - 1)
    integral = grid.dr * (integrand.sum() - 0.5 * (integrand[0] + integrand[-1]))
    return (sphere_area(d) * integral) ** (1 / q), float(np.max(np.abs(values)))


def _bundle(values, grid, d, p, s, kgrid, stride, tail_tol, centered=True) -> NormBundle:
    F = radial_fourier(values, d, kgrid, stride, grid=grid)
    _check_tail(F, s, tail_tol)
    masses_s = band_masses(F, s)
    area = sphere_area(d)
    lp2, linf = lebesgue_norms(values, d, p, grid=grid)
    return NormBundle(
        s=s,
        sobolev=math.sqrt(area * masses_s.sum()),
        l2=math.sqrt(area * band_masses(F, 0.0).sum()),
        besov=math.sqrt(area * band_masses(F, s, at_band_start=True).max()),
        lp2=lp2,
        linf=linf,
        centered=centered,
    )


def norms_of_state(
    state: SolverState,
    cfg: SimulationConfig,
    exponents: CriticalExponents | None = None,
    kgrid: WavenumberGrid | None = None,
    stride: int | None = None,
    tail_tol: float = TAIL_TOL,
) -> tuple[NormBundle, NormBundle]:
    """Critical norms of u (order s_c) and of du/dt (order s_c - 1)."""
    if state.n < 1:
        raise SpectralError("norms need n >= 1")
    exponents = exponents or critical_exponent(cfg.d, cfg.p)
    grid = state.grid
    kgrid = kgrid or WavenumberGrid.for_grid(grid)
    if stride is None:
        stride = default_stride(grid, kgrid)
    if state.u_next is not None:
        vel, centered = state.velocity(), True
    else:
        vel, centered = (state.u_curr.values - state.u_prev.values) / state.dt, False
    ub = _bundle(state.u_curr.values, grid, cfg.d, cfg.p, exponents.s_c, kgrid, stride, tail_tol)
    vb = _bundle(vel, grid, cfg.d, cfg.p, exponents.s_c_minus_1, kgrid, stride, tail_tol, centered)
    return ub, vb
