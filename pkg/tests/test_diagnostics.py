import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from supercrit.cases import make_case
from supercrit.config import CaseId, SimulationConfig
from supercrit.diagnostics import (
    COLUMNS,
    DiagnosticsRow,
    DiagnosticsSeries,
    besov_sobolev_ratio,
    boundedness_verdict,
    convergence_study,
    fitted_order,
    fluctuation,
    landing_dt,
    scaled_decay,
    simulate,
    truncation_study,
)


def row(t=1.0, **kw):
    vals = dict(sobolev_u=1.0, sobolev_ut=1.0, besov_u=0.5, besov_ut=0.5, lp2=1.0, linf=1.0, energy=1.0,
                relative_drift=0.0, scaled_lp2=0.0, scaled_linf=0.0, besov_ratio=0.5)
    vals.update(kw)
    return DiagnosticsRow(t=t, **vals)


def series_of(values, name="sobolev_u", t0=10.0, t1=15.0):
    ts = np.linspace(t0, t1, len(values))
    return DiagnosticsSeries(3, 6, [row(t, **{name: v, "sobolev_ut": v}) for t, v in zip(ts, values)])


def test_column_order():
    assert COLUMNS[0] == "t" and COLUMNS[-1] == "besov_ratio" and len(COLUMNS) == 12


@pytest.mark.parametrize("d, p, a, b", [(3, 6, 0.75, 1.0), (5, 2, 1.0, 2.0)])
def test_scaled_decay_exponents(d, p, a, b):
    r = row(t=3.0, lp2=2.0, linf=5.0)
    lp, li = scaled_decay(r, d, p)
    assert lp == pytest.approx(4.0**a * 2.0)
    assert li == pytest.approx(3.0**b * 5.0)


def test_scaled_linf_vanishes_at_t0():
    assert scaled_decay(row(t=0.0, linf=123.0), 3, 6)[1] == 0.0
    with pytest.raises(ValueError):
        scaled_decay(row(t=-1.0), 3, 6)


def test_ratio():
    assert besov_sobolev_ratio(row(besov_u=3, besov_ut=4, sobolev_u=6, sobolev_ut=8)) == pytest.approx(0.5)
    # zero velocity: plain u ratio
    assert besov_sobolev_ratio(row(besov_u=2, besov_ut=0, sobolev_u=5, sobolev_ut=0)) == pytest.approx(0.4)
    with pytest.raises(ZeroDivisionError):
        besov_sobolev_ratio(row(sobolev_u=0, sobolev_ut=0))


def test_boundedness_constant_and_growing():
    flat = boundedness_verdict(series_of([2.0] * 30), (10, 15))
    assert flat.bounded and flat.stats["sobolev_u"].relative == 0.0
    grow = boundedness_verdict(series_of(np.linspace(1, 2, 30)), (10, 15))
    assert not grow.bounded and grow.verdict == "unbounded"


def test_boundedness_needs_samples():
    with pytest.raises(ValueError):
        boundedness_verdict(series_of([1.0] * 5), (10, 15))
    with pytest.raises(ValueError):
        boundedness_verdict(series_of([1.0] * 30), (20, 25))
    with pytest.raises(ValueError):
        fluctuation([])


@given(st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=30))
def test_series_csv_round_trip_exact(values):
    s = DiagnosticsSeries(5, 2, [row(float(i), energy=v, linf=v, besov_ratio=math.nan) for i, v in enumerate(values)])
    back = DiagnosticsSeries.from_csv(s.to_csv(), 5, 2)
    assert back.to_csv() == s.to_csv()
    np.testing.assert_array_equal(back.column("energy"), s.column("energy"))


def test_fitted_order_on_synthetic_data():
    drs = [0.1, 0.05, 0.025]
    assert fitted_order(drs, [3 * h**2 for h in drs]) == pytest.approx(2.0)
    assert fitted_order(drs, [h for h in drs]) == pytest.approx(1.0)


def test_landing_dt():
    dt = landing_dt(20 / 2048, 2.0)
    assert abs(2.0 / dt - round(2.0 / dt)) < 1e-9
    assert dt == pytest.approx(20 / 2048 / 4, rel=1e-3)


def test_convergence_identical_level_and_reference_gives_zero():
    base = SimulationConfig(d=3, p=6, r_max=10, dr=0.02, dt=0.005, t_final=0.5)
    rep = convergence_study(base, make_case(1, 3), 0.5, [0.02], reference=(0.02, 0.005), workers=1)
    assert rep.levels[0].l2_error == 0.0


def test_convergence_argument_checks():
    base = SimulationConfig(d=3, p=6, r_max=10, dr=0.02, dt=0.005, t_final=0.5)
    with pytest.raises(ValueError):
        convergence_study(base, make_case(1, 3), 0.5, [0.02], reference=(0.04, 0.01))
    with pytest.raises(ValueError):
        convergence_study(base, make_case(1, 3), 0.5, [0.02], reference=(0.01, 0.003))


def test_convergence_parallel_matches_serial():
    base = SimulationConfig(d=5, p=2, r_max=10, dr=0.04, dt=0.01, t_final=1.0)
    a = convergence_study(base, make_case(1, 5), 1.0, [0.08, 0.04], workers=1)
    b = convergence_study(base, make_case(1, 5), 1.0, [0.08, 0.04], workers=2)
    assert a.to_csv() == b.to_csv()


def test_truncation_flags_reflections():
    cfg = SimulationConfig(d=3, p=6, r_max=20, dr=0.01, dt=0.0025, t_final=10)
    case = make_case(1, 3)
    clean = truncation_study(cfg, case, (20, 30), (5.0,), (0.0, 3.0, 19.0), workers=1)
    assert clean.columns_agree and clean.boundary_clean
    dirty = truncation_study(cfg, case, (8, 20), (10.0,), (0.0, 3.0, 7.0), workers=1)
    assert not dirty.columns_agree
    with pytest.raises(ValueError):
        truncation_study(cfg, case, (8, 20), (10.0,), (9.0,))
    with pytest.raises(ValueError):
        truncation_study(cfg, case, (20,), (11.0,), (1.0,))


def test_series_observer_records_every_interval():
    cfg = SimulationConfig(d=5, p=2, r_max=20, dr=0.01, dt=0.0025, t_final=1.0, diag_interval=0.1,
                           case_id=CaseId.RING)
    s, _ = simulate(cfg)
    assert len(s.rows) == 11
    assert s.rows[0].t == pytest.approx(0.0025)
    np.testing.assert_allclose(s.t[1:], np.arange(1, 11) * 0.1)
    assert np.all(np.diff(s.t) > 0)
    for r in s.rows:
        assert r.besov_u <= r.sobolev_u and r.besov_ut <= r.sobolev_ut
        assert r.besov_ratio == pytest.approx(besov_sobolev_ratio(r))
    assert s.unresolved == []


def test_unresolved_samples_are_counted_not_fatal():
    # the cone of the oscillating Gaussian at r = 0 leaves a power-law tail in d = 3
    cfg = SimulationConfig(d=3, p=6, r_max=20, dr=2e-3, dt=5e-4, t_final=0.05, diag_interval=0.05,
                           case_id=CaseId.OSC_GAUSSIAN)
    s, _ = simulate(cfg)
    assert s.unresolved and len(s.rows) == 2
