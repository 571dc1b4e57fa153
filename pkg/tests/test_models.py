"""Tests for the three built-in models: transforms, flows, closed-form maps.

Flow oracle values were frozen from an adaptive high-accuracy ODE solve
(DOP853, rtol 1e-12) of dy/dt = H(y) with the anchor at 0.5.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from lamperti_sde import make_model, ls_one_step_closed_form, MODEL_IDS
from lamperti_sde.models import (
    AllenCahnParams,
    NagumoParams,
    SisParams,
    allen_cahn_exact_flow,
    nagumo_exact_flow,
    sis_exact_flow,
)

TABLE_MODELS = [("sis", 8.0), ("nagumo", 8.0), ("allen-cahn", 3.6)]

FLOW_ORACLES = [
    # (model id, noise scale, y0, dt, frozen DOP853 value)
    ("sis", 2.0, -1.0, 0.3, -0.6337038903282735),
    ("sis", 6.0, 0.5, 0.01, 0.7336314673649287),
    ("sis", 8.0, 2.0, 0.001, 2.056558123315156),
    ("sis", 1.0, -4.0, 1.0, -3.9818530696892362),
    ("nagumo", 2.0, -1.0, 0.3, -2.238715858775708),
    ("nagumo", 6.0, 0.5, 0.01, 0.35398601264188445),
    ("nagumo", 8.0, 2.0, 0.001, 1.9922252583262092),
    ("nagumo", 1.0, 3.0, 1.0, 2.9005939428986514),
    ("allen-cahn", 2.0, -1.0, 0.3, -2.3634793222901074),
    ("allen-cahn", 3.6, 0.5, 0.01, 0.568106670348098),
    ("allen-cahn", 3.0, 2.0, 0.001, 2.009643661050204),
    ("allen-cahn", 1.0, -0.2, 1.0, -1.187911507531001),
]

FLOWS = {
    "sis": (sis_exact_flow, SisParams),
    "nagumo": (nagumo_exact_flow, NagumoParams),
    "allen-cahn": (allen_cahn_exact_flow, AllenCahnParams),
}


def _params(model_id, lam):
    cls = FLOWS[model_id][1]
    return cls(noise_scale=lam)


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

def test_param_validation():
    with pytest.raises(ValueError):
        SisParams(noise_scale=0.0)
    with pytest.raises(ValueError):
        SisParams(noise_scale=4.0, anchor=1.0)
    with pytest.raises(ValueError):
        NagumoParams(noise_scale=-1.0)
    with pytest.raises(ValueError):
        AllenCahnParams(noise_scale=0.0)
    with pytest.raises(ValueError):
        make_model("heston", 1.0)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def test_transform_vanishes_at_anchor():
    for mid in ("sis", "nagumo"):
        m = make_model(mid, 4.0, anchor=0.3)
        assert abs(m.transform(0.3)) <= 1e-14
        assert abs(m.inverse_transform(0.0) - 0.3) <= 1e-14
    ac = make_model("allen-cahn", 3.0)
    assert ac.transform(0.0) == 0.0


def test_allen_cahn_inverse_is_tanh():
    m = make_model("allen-cahn", 3.0)
    for y in (-2.0, 0.5, 3.0):
        assert m.inverse_transform(y) == pytest.approx(np.tanh(y), abs=1e-15)


def test_nagumo_transform_is_decreasing():
    m = make_model("nagumo", 4.0)
    assert m.transform(0.99) < m.transform(0.5)
    # quadrature oracle: transform(x) = int_{0.5}^{x} dw / (-w(1-w))
    oracle, _ = quad(lambda w: 1.0 / (-w * (1.0 - w)), 0.5, 0.99)
    assert m.transform(0.99) == pytest.approx(oracle, rel=1e-9)


def test_round_trip_moderate_range():
    # beyond |y| ~ 7 the Allen-Cahn image is close enough to a boundary that
    # half-ulp round-off in x exceeds the 1e-10 budget; see the wide-range
    # conditioning-aware test below
    y = np.linspace(-7.0, 7.0, 4001)
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        back = m.transform(m.inverse_transform(y))
        assert np.all(np.abs(back - y) <= 1e-10 * (1.0 + np.abs(y))), mid


def test_round_trip_wide_range_conditioning_aware():
    # Beyond |y| ~ 11 the inverse lands within a few ulps of a boundary and
    # the transform's conditioning dominates; allow the resolution the double
    # grid can express at the image point.
    y = np.linspace(-20.0, 20.0, 2001)
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        x = m.inverse_transform(y)
        back = m.transform(x)
        with np.errstate(divide="ignore"):
            # the neighbor probe may land exactly on a boundary, where the
            # transform is infinite; that only loosens the bound
            up = m.transform(np.nextafter(x, np.inf))
            dn = m.transform(np.nextafter(x, -np.inf))
        resolution = np.abs(up - dn)
        assert np.all(np.abs(back - y) <= 1e-10 * (1.0 + np.abs(y)) + resolution), mid


def test_inverse_transform_strictly_interior_over_huge_range():
    y = np.concatenate([np.linspace(-700.0, 700.0, 20001), [-700.0, 700.0]])
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        x = m.inverse_transform(y)
        assert np.all(x > m.domain.lower), mid
        assert np.all(x < m.domain.upper), mid


def test_inverse_transform_monotone():
    y = np.linspace(-30.0, 30.0, 5001)
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        x = m.inverse_transform(y)
        d = np.diff(x)
        if mid == "nagumo":
            # negative diffusion: the transform pair is order-reversing
            assert np.all(d <= 0.0)
        else:
            assert np.all(d >= 0.0)


def test_derivative_consistency():
    # finite difference of the inverse matches the reciprocal of the finite
    # difference of the forward transform at the image point
    # h large enough that differences of the inverse near the boundary are
    # not dominated by round-off, small enough for the truncation budget; the
    # tanh-based model saturates sooner, so its probe range is narrower
    h = 1e-4
    for mid, lam in TABLE_MODELS:
        half_range = 7.0 if mid == "allen-cahn" else 10.0
        y = np.linspace(-half_range, half_range, 201)
        m = make_model(mid, lam)
        x = m.inverse_transform(y)
        d_inv = (m.inverse_transform(y + h) - m.inverse_transform(y - h)) / (2 * h)
        d_fwd = (m.transform(x + h * d_inv) - m.transform(x - h * d_inv)) / (2 * h * d_inv)
        assert np.all(np.abs(d_inv * d_fwd - 1.0) <= 1e-6), mid


# ---------------------------------------------------------------------------
# transformed drift
# ---------------------------------------------------------------------------

def test_sis_transformed_drift_range():
    lam = 6.0
    m = make_model("sis", lam)
    y = np.linspace(-40.0, 40.0, 801)
    H = m.transformed_drift(y)
    assert np.all(H > 0.0) and np.all(H < lam ** 2)


def test_nagumo_transformed_drift_range():
    lam = 6.0
    m = make_model("nagumo", lam)
    H = m.transformed_drift(np.linspace(-40.0, 40.0, 801))
    assert np.all(H < 0.0) and np.all(H > -(1.0 + lam ** 2))


def test_allen_cahn_drift_odd():
    m = make_model("allen-cahn", 3.0)
    assert m.transformed_drift(0.0) == 0.0
    assert m.transformed_drift(2.0) == pytest.approx(-m.transformed_drift(-2.0), rel=1e-12)


def test_drift_bound_holds_on_probe_grid():
    y = np.linspace(-50.0, 50.0, 10_000)
    for mid, lam in TABLE_MODELS + [("sis", 1.0), ("nagumo", 0.5), ("allen-cahn", 0.7)]:
        m = make_model(mid, lam)
        shifted = np.abs(m.transformed_drift(y) + m.split_constant)
        assert np.max(shifted) <= m.drift_bound + 1e-12, mid


# ---------------------------------------------------------------------------
# exact flows
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("mid,lam,y0,dt,expected", FLOW_ORACLES)
def test_flow_matches_frozen_ode_oracle(mid, lam, y0, dt, expected):
    flow = FLOWS[mid][0]
    got = float(flow(_params(mid, lam), np.float64(y0), dt))
    assert abs(got - expected) <= 1e-8 * (1.0 + abs(expected))


def test_flow_zero_dt_is_identity():
    for mid in MODEL_IDS:
        flow, cls = FLOWS[mid]
        p = cls(noise_scale=4.0) if mid != "allen-cahn" else cls(noise_scale=3.0)
        y = np.array([-3.0, 0.0, 0.7, 12.0])
        assert np.array_equal(flow(p, y, 0.0), y)


def test_flow_semigroup_property():
    for mid in MODEL_IDS:
        flow, cls = FLOWS[mid]
        p = cls(noise_scale=4.0) if mid != "allen-cahn" else cls(noise_scale=3.0)
        composed = flow(p, flow(p, 0.3, 0.02), 0.03)
        direct = flow(p, 0.3, 0.05)
        assert abs(composed - direct) <= 1e-9 * (1.0 + abs(direct)), mid


def test_nagumo_flow_decreases():
    p = NagumoParams(noise_scale=4.0)
    assert nagumo_exact_flow(p, 0.0, 0.01) < 0.0


def test_allen_cahn_origin_is_fixed_point():
    p = AllenCahnParams(noise_scale=3.0)
    for dt in (0.0, 1e-3, 0.5, 2.0):
        assert allen_cahn_exact_flow(p, 0.0, dt) == 0.0


def test_flow_ode_residual():
    h = 1e-6
    y_probes = np.array([-3.0, -0.4, 0.0, 0.9, 4.0])
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        H = m.transformed_drift(y_probes)
        rate = (m.exact_flow(y_probes, h) - y_probes) / h
        assert np.all(np.abs(rate - H) <= 1e-4 * (1.0 + np.abs(H))), mid


def test_flow_survives_extreme_states():
    # log-space evaluation keeps the flow finite far outside double overflow
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        out = m.exact_flow(np.array([-900.0, 900.0]), 0.5)
        assert np.all(np.isfinite(out)), mid


# ---------------------------------------------------------------------------
# closed-form one-step maps
# ---------------------------------------------------------------------------

def test_closed_form_requires_interior_state():
    with pytest.raises(ValueError):
        ls_one_step_closed_form("sis", SisParams(noise_scale=4.0), 1.0, 0.01, 0.0)
    with pytest.raises(ValueError):
        ls_one_step_closed_form("allen-cahn", AllenCahnParams(noise_scale=3.0), -1.2, 0.01, 0.0)


def test_allen_cahn_closed_form_stationary_origin():
    out = ls_one_step_closed_form("allen-cahn", AllenCahnParams(noise_scale=3.0), 0.0, 0.13, 0.0)
    assert out == 0.0


def _pipeline_step(model, x, dt, dB):
    y = model.transform(x)
    y = model.exact_flow(y, dt) + model.split_constant * dt + model.noise_scale * dB
    return model.inverse_transform(y)


def test_closed_form_matches_pipeline_spot_checks():
    cases = [
        ("sis", SisParams(noise_scale=4.0), 0.9, 0.008, 0.05),
        ("nagumo", NagumoParams(noise_scale=4.0), 0.3, 0.008, -0.1),
        ("allen-cahn", AllenCahnParams(noise_scale=3.0), 0.5, 0.008, 0.02),
    ]
    for mid, p, x, dt, dB in cases:
        m = make_model(mid, p.noise_scale)
        direct = ls_one_step_closed_form(mid, p, x, dt, dB)
        via = _pipeline_step(m, x, dt, dB)
        assert abs(direct - via) <= 1e-10 * (1.0 + abs(via)), mid


def test_closed_form_random_triples_match_pipeline():
    rng = np.random.default_rng(42)
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        p = _params(mid, lam)
        lo, hi = m.domain.lower, m.domain.upper
        x = lo + (hi - lo) * rng.uniform(0.01, 0.99, size=1000)
        dt = rng.uniform(1e-5, 0.05, size=1000)
        dB = rng.normal(0.0, 0.05, size=1000)
        direct = ls_one_step_closed_form(mid, p, x, dt, dB)
        via = _pipeline_step(m, x, dt, dB)
        assert np.all(np.abs(direct - via) <= 1e-10 * (1.0 + np.abs(via))), mid


def test_closed_form_stays_interior_for_large_shocks():
    rng = np.random.default_rng(7)
    for mid, lam in TABLE_MODELS:
        m = make_model(mid, lam)
        p = _params(mid, lam)
        lo, hi = m.domain.lower, m.domain.upper
        x = lo + (hi - lo) * rng.uniform(0.001, 0.999, size=500)
        dt = rng.uniform(0.0, 1.0, size=500)
        dB = rng.uniform(-10.0, 10.0, size=500)
        out = ls_one_step_closed_form(mid, p, x, dt, dB)
        assert np.all((out > lo) & (out < hi)), mid


# ---------------------------------------------------------------------------
# boundary behavior of the raw coefficients
# ---------------------------------------------------------------------------

def test_stationary_boundary_coefficients():
    sis = make_model("sis", 4.0)
    nag = make_model("nagumo", 4.0)
    ac = make_model("allen-cahn", 3.0)
    for x in (0.0, 1.0):
        assert sis.drift(x) == 0.0 and sis.diffusion(x) == 0.0
        assert nag.drift(x) == 0.0 and nag.diffusion(x) == 0.0
    for x in (-1.0, 1.0):
        assert ac.diffusion(x) == 0.0
