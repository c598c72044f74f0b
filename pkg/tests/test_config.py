import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from supercrit.config import (
    CaseId,
    ConfigError,
    SimulationConfig,
    StabilityError,
    critical_exponent,
    dump_config,
    load_config,
    stability_limit,
)


def base(**kw):
    args = dict(d=3, p=6, r_max=20, dr=2e-3, dt=5e-4, t_final=1.0, case_id=CaseId.GAUSSIAN)
    args.update(kw)
    return SimulationConfig(**args)


@pytest.mark.parametrize(
    "d, p, s_c, lp, linf",
    [
        (3, 6, Fraction(7, 6), Fraction(3, 4), 1),
        (5, 2, Fraction(3, 2), Fraction(1, 1), 2),
    ],
)
def test_exponents_for_the_library_powers(d, p, s_c, lp, linf):
    e = critical_exponent(d, p)
    assert e.s_c == pytest.approx(float(s_c), abs=1e-15)
    assert e.s_c_minus_1 == pytest.approx(float(s_c) - 1, abs=1e-15)
    assert e.lp_decay_exponent == pytest.approx(float(lp), abs=1e-15)
    assert e.linf_decay_exponent == linf


def test_supercritical_threshold():
    # p = 4/(d-2) is energy critical: s_c = 1 exactly
    assert critical_exponent(3, 4).s_c == pytest.approx(1.0)
    assert critical_exponent(5, 4 / 3).s_c == pytest.approx(1.0)


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_stability_limit_closed_form(d):
    dr = 0.01
    assert stability_limit(d, dr) == pytest.approx(dr * math.sqrt(2 ** (d - 1) / (1 + 3 ** (d - 1))))


def test_stability_limit_d3_value():
    # sqrt(4/10) = 0.632...
    assert stability_limit(3, 1.0) == pytest.approx(0.6324555320336759)


def test_dt_over_limit_is_rejected():
    lim = stability_limit(3, 2e-3)
    base(dt=lim)
    with pytest.raises(StabilityError):
        base(dt=lim * (1 + 1e-9))


def test_stability_error_is_a_config_error():
    assert issubclass(StabilityError, ConfigError)


@pytest.mark.parametrize(
    "kw",
    [
        {"d": 2},
        {"d": 4},  # library cases only in d = 3, 5
        {"p": 0},
        {"dr": 0.003},  # 20/0.003 not an integer
        {"dt": -1.0},
        {"t_final": math.inf},
        {"snapshot_times": (2.0,)},
        {"u0_expr": "r"},  # expressions only for Custom
        {"mu": math.nan},
    ],
)
def test_invalid_configs(kw):
    with pytest.raises(ConfigError):
        base(**kw)


def test_custom_needs_u0():
    with pytest.raises(ConfigError):
        base(case_id=CaseId.CUSTOM)
    cfg = base(case_id=CaseId.CUSTOM, d=4, u0_expr="exp(-r^2)")
    assert cfg.d == 4


def test_negative_mu_warns(caplog):
    base(mu=-1.0)
    assert "focusing" in caplog.text


def test_cell_count_and_steps():
    cfg = base()
    assert cfg.n_cells == 10000
    assert cfg.n_steps == 2000


def test_case_numbers():
    assert [CaseId.from_number(i).value for i in range(1, 6)] == [
        "Gaussian",
        "Ring",
        "IncomingRing",
        "OscGaussian",
        "IncomingOscGaussian",
    ]
    with pytest.raises(ValueError):
        CaseId.from_number(6)


def test_load_rejects_unknown_and_missing_keys():
    doc = base().to_dict()
    with pytest.raises(ConfigError, match="unknown"):
        load_config(json.dumps({**doc, "bogus": 1}))
    del doc["dt"]
    with pytest.raises(ConfigError, match="missing"):
        load_config(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_config("[1, 2]")
    with pytest.raises(ConfigError):
        load_config("{not json")


def test_load_custom_expressions():
    doc = {"d": 3, "p": 6, "r_max": 10, "dr": 0.01, "dt": 0.002, "t_final": 1, "case_id": "Custom",
           "u0": "exp(-r^2)"}
    cfg = load_config(json.dumps(doc))
    assert cfg.u0_expr == "exp(-r^2)" and cfg.u1_expr is None


@given(
    case=st.sampled_from([c for c in CaseId if c is not CaseId.CUSTOM]),
    d=st.sampled_from([3, 5]),
    cells=st.integers(10, 5000),
    frac=st.floats(0.05, 1.0),
    mu=st.floats(0, 10),
)
def test_dump_load_round_trip(case, d, cells, frac, mu):
    dr = 20 / cells
    cfg = SimulationConfig(d=d, p=2.5, r_max=20, dr=dr, dt=frac * stability_limit(d, dr), t_final=1,
                           case_id=case, mu=mu, snapshot_times=(0.5,))
    assert load_config(dump_config(cfg)) == cfg


def test_replace_revalidates():
    cfg = base()
    with pytest.raises(StabilityError):
        cfg.replace(dt=1.0)
    assert cfg.replace(t_final=2.0).n_steps == 4000
