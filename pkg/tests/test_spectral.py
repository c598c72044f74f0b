import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from supercrit.cases import make_case
from supercrit.config import CaseId
from supercrit.grid import RadialField, RadialGrid, sample
from supercrit.spectral import (
    ResolutionError,
    SpectralError,
    WavenumberGrid,
    band_masses,
    besov_norm,
    default_stride,
    lebesgue_norms,
    radial_fourier,
    sobolev_norm,
    sphere_area,
    tail_fraction,
)

GRID = RadialGrid(1e-3, 20000)
LIBRARY = [c for c in CaseId if c is not CaseId.CUSTOM]


def gaussian_sobolev(amp, s, d):
    """||amp e^{-r^2}||_{H^s(R^d)} via u^(k) = amp 2^{-d/2} e^{-k^2/4} and a Gamma integral."""
    return math.sqrt(sphere_area(d) * amp**2 * 2.0**-d * 2.0 ** (s + d / 2 - 1) * gamma(s + d / 2))


@pytest.fixture(scope="module")
def kgrid():
    return WavenumberGrid.for_grid(GRID)


def test_sphere_area():
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(5) == pytest.approx(8 * math.pi**2 / 3)
    assert sphere_area(2) == pytest.approx(2 * math.pi)


def test_wavenumber_grid_tiles_bands():
    kg = WavenumberGrid(2.0**-2, 2.0**3, per_octave=4, dk_max=0.5)
    assert kg.n_bands == 5
    np.testing.assert_array_equal(kg.band_starts, [0.25, 0.5, 1, 2, 4])
    for b in range(kg.n_bands):
        k = kg.k[kg.band_slice(b)]
        assert k[0] == kg.band_starts[b] and k[-1] == 2 * kg.band_starts[b]
        assert np.diff(k).max() <= 0.5 + 1e-15
        assert kg.band_weights(b).sum() == pytest.approx(kg.band_starts[b])
    assert kg.k[0] == 0.25 and kg.k[-1] == 8.0
    assert np.all(np.diff(kg.k) > 0)


def test_wavenumber_grid_rejects_bad_spans():
    with pytest.raises(SpectralError):
        WavenumberGrid(0.3, 8.0)
    with pytest.raises(SpectralError):
        WavenumberGrid(8.0, 8.0)


def test_default_k_max_follows_the_mesh():
    assert WavenumberGrid.for_grid(RadialGrid(2e-3, 10000)).k_max == 256
    assert WavenumberGrid.for_grid(RadialGrid(0.01, 2000)).k_max == 64
    assert WavenumberGrid.for_grid(RadialGrid(4e-4, 50000)).k_max == 256


@pytest.mark.parametrize("d", [3, 5])
def test_gaussian_transform_closed_form(d, kgrid):
    F = radial_fourier(sample(lambda r: np.exp(-r * r), GRID), d, kgrid)
    k = kgrid.k
    np.testing.assert_allclose(F.amplitudes, 2.0 ** (-d / 2) * np.exp(-k * k / 4), atol=1e-10)
    if d == 3:
        j = np.searchsorted(k, 2.0)
        assert F.amplitudes[j] == pytest.approx(0.130065, abs=1e-6)


def test_gamma_oracle_h76(kgrid):
    F = radial_fourier(sample(lambda r: 4 * np.exp(-r * r), GRID), 3, kgrid)
    want = gaussian_sobolev(4, 7 / 6, 3)
    assert want == pytest.approx(10.957, abs=1e-3)
    assert sobolev_norm(F, 7 / 6) == pytest.approx(want, rel=5e-3)
    assert sobolev_norm(F, 7 / 6) == pytest.approx(want, rel=1e-5)


@pytest.mark.parametrize("s", [0.0, 0.5, 1.5, 2.5])
def test_gamma_oracle_d5(s, kgrid):
    F = radial_fourier(sample(lambda r: 2 * np.exp(-r * r), GRID), 5, kgrid)
    assert sobolev_norm(F, s) == pytest.approx(gaussian_sobolev(2, s, 5), rel=1e-5)


@pytest.mark.parametrize("case_id", LIBRARY)
@pytest.mark.parametrize("d", [3, 5])
def test_plancherel_on_library_data(case_id, d, kgrid):
    c = make_case(case_id, d)
    for fn in (c.u0, c.u1):
        f = sample(fn, GRID)
        if not f.values.any():
            continue
        spatial = math.sqrt(sphere_area(d) * np.trapezoid(f.values**2 * GRID.r ** (d - 1), GRID.r))
        spectral = sobolev_norm(radial_fourier(f, d, kgrid), 0.0, tail_tol=math.inf)
        assert spectral == pytest.approx(spatial, rel=1e-4)


@pytest.mark.parametrize("case_id", LIBRARY)
def test_transform_resolution_stability(case_id, kgrid):
    d, s = 3, 7 / 6
    f = sample(make_case(case_id, d).u0, GRID)
    base = sobolev_norm(radial_fourier(f, d, kgrid), s, tail_tol=math.inf)
    wide = WavenumberGrid.for_grid(GRID, k_max=512)
    assert sobolev_norm(radial_fourier(f, d, wide), s, tail_tol=math.inf) == pytest.approx(base, rel=5e-3)
    assert sobolev_norm(radial_fourier(f, d, kgrid, stride=2), s, tail_tol=math.inf) == pytest.approx(base, rel=5e-3)


def test_one_band_sandwich():
    kg = WavenumberGrid(2.0**-4, 2.0**4, per_octave=32)
    N, s = 2.0, 1.5
    amp = np.where((kg.k >= N) & (kg.k <= 2 * N), 1.0, 0.0)
    from supercrit.spectral import SpectralField

    F = SpectralField(kg, amp, 3)
    b = band_masses(F, 0.0)
    # exact band integral of k^2 over [2, 4]; neighbours only see the shared edge node
    assert b[5] == pytest.approx((4**3 - 2**3) / 3, rel=1e-12)
    assert b[6] == pytest.approx(kg.band_weights(6)[0] * 4**2)
    bes, sob = besov_norm(F, s, tail_tol=math.inf), sobolev_norm(F, s, tail_tol=math.inf)
    assert bes <= sob <= 2**s * bes * 1.01


@settings(max_examples=30)
@given(
    coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=4),
    widths=st.lists(st.floats(0.3, 3), min_size=4, max_size=4),
    s=st.floats(0, 2.5),
    d=st.sampled_from([3, 5]),
)
def test_besov_never_exceeds_sobolev(coeffs, widths, s, d):
    g = RadialGrid(0.01, 2000)
    f = sample(lambda r: sum(c * np.exp(-((r - 2 * i) ** 2) / w) for i, (c, w) in enumerate(zip(coeffs, widths))), g)
    F = radial_fourier(f, d, WavenumberGrid.for_grid(g))
    assert besov_norm(F, s, tail_tol=math.inf) <= sobolev_norm(F, s, tail_tol=math.inf)


def test_resolution_guards():
    coarse = RadialGrid(0.01, 2000)
    f = sample(lambda r: np.exp(-r * r), coarse)
    with pytest.raises(ResolutionError):
        radial_fourier(f, 3, WavenumberGrid(k_max=2.0**8))
    with pytest.raises(ResolutionError):
        default_stride(coarse, WavenumberGrid(k_max=2.0**8))
    with pytest.raises(SpectralError):
        radial_fourier(f, 4)
    with pytest.raises(SpectralError):
        radial_fourier(f, 3, stride=3)  # 2000 cells not divisible by 3


def test_tail_guard_fires_on_a_kink():
    # e^{-r} has a cone at the origin; its spectrum decays like a power law
    g = RadialGrid(2e-3, 20000)
    F = radial_fourier(sample(lambda r: np.exp(-r) * (r < 39), g), 3)
    assert tail_fraction(F, 7 / 6) > 1e-6
    with pytest.raises(ResolutionError):
        sobolev_norm(F, 7 / 6)


def test_stride_selection():
    assert default_stride(RadialGrid(4e-4, 50000), WavenumberGrid(k_max=256)) == 5
    assert default_stride(RadialGrid(2e-3, 10000), WavenumberGrid(k_max=256)) == 1


@pytest.mark.parametrize("d", [3, 5])
def test_lebesgue_norms_of_gaussian(d):
    p = 6 if d == 3 else 2
    q = p + 2
    f = sample(lambda r: 2 * np.exp(-r * r), GRID)
    lp, linf = lebesgue_norms(f, d, p)
    # int 2^q e^{-q r^2} r^{d-1} dr = 2^q Gamma(d/2) / (2 q^{d/2})
    want = (sphere_area(d) * 2**q * gamma(d / 2) / (2 * q ** (d / 2))) ** (1 / q)
    assert lp == pytest.approx(want, rel=1e-8)
    assert linf == 2.0


def test_norms_are_homogeneous(kgrid):
    f = sample(lambda r: np.exp(-r * r) * np.cos(r), GRID)
    g = RadialField(GRID, -3 * f.values)
    for s in (0.0, 7 / 6):
        a = sobolev_norm(radial_fourier(f, 3, kgrid), s)
        b = sobolev_norm(radial_fourier(g, 3, kgrid), s)
        assert b == pytest.approx(3 * a, rel=1e-12)
