import math

import pytest
from hypothesis import given, strategies as st

from oracles import kww_t as oracle_t, ramp_params
from secfbl.params import (
    InterferenceLimitedError,
    LinearQParams,
    ParameterError,
    SystemParams,
    derive_constants,
    kww_t,
)

valid_params = st.builds(
    SystemParams,
    lambda_u=st.floats(1e-6, 1e-1),
    lambda_b=st.floats(1e-7, 1e-2),
    p=st.floats(1e-4, 1.0),
    m=st.integers(1, 8),
    D=st.floats(1.0, 500.0),
    G_b=st.floats(0.1, 1e4),
    G_e=st.floats(0.1, 1e4),
    n=st.integers(16, 4096),
    R=st.floats(0.05, 4.0),
)


def test_t_example():
    dc = derive_constants(SystemParams(p=0.01, lambda_u=1e-3, m=1, eta=4.0))
    assert dc.t == pytest.approx(math.pi**2 / 2 * 1e-5, rel=1e-14)


@pytest.mark.parametrize("m", [1, 2, 4, 8])
def test_t_matches_oracle(m):
    assert kww_t(0.02, 3e-3, m, 4.0) == pytest.approx(oracle_t(0.02, 3e-3, m), rel=1e-13)


def test_linq_example_ac2():
    dc = derive_constants(SystemParams(R=1.0, n=512))
    assert dc.linq.theta == 1.0
    assert dc.linq.mu == pytest.approx(3.6124, abs=2e-4)
    assert dc.linq.a == pytest.approx(0.34695, abs=2e-5)
    assert dc.closed_form_valid


def test_linq_example_invalid_regime():
    dc = derive_constants(SystemParams(R=0.25, n=128))
    assert dc.linq.theta == pytest.approx(0.18921, abs=1e-5)
    # direct evaluation gives 0.2578289; the quoted 0.25781 is rounded
    assert dc.linq.a == pytest.approx(0.25781, abs=5e-5)
    assert dc.linq.a == pytest.approx(math.sqrt(math.pi / 2) / dc.linq.mu, rel=1e-15)
    assert not dc.closed_form_valid
    assert "theta" in dc.closed_form_reason
    assert dc.bob.z2 < 0 and dc.eve.y2 < 0


def test_eta_other_than_four_invalidates_closed_form():
    dc = derive_constants(SystemParams(eta=3.5))
    assert not dc.closed_form_valid
    assert "eta" in dc.closed_form_reason


def test_linq_matches_oracle():
    lq = LinearQParams.from_code(300, 0.7)
    assert (lq.mu, lq.theta, lq.a) == pytest.approx(ramp_params(300, 0.7), rel=1e-14)


@pytest.mark.parametrize("field,value", [
    ("lambda_u", 0.0), ("lambda_b", -1.0), ("D", 0.0), ("G_b", 0.0), ("G_e", -2.0),
    ("R", 0.0), ("n", 0), ("p", 1.5), ("p", -0.1), ("eta", 2.0), ("m", 0), ("m", 1.5),
    ("n", 12.5), ("lambda_u", math.inf), ("R", math.nan),
])
def test_validation_names_field(field, value):
    with pytest.raises(ParameterError) as info:
        SystemParams(**{field: value})
    assert info.value.field == field
    assert field in str(info.value)


def test_integral_floats_accepted():
    p = SystemParams(m=2.0, n=128.0)
    assert p.m == 2 and isinstance(p.m, int)
    assert p.n == 128 and isinstance(p.n, int)


def test_p_zero_is_out_of_model():
    with pytest.raises(InterferenceLimitedError) as info:
        derive_constants(SystemParams(p=0.0))
    assert info.value.field == "p"


def test_frozen():
    p = SystemParams()
    with pytest.raises(Exception):
        p.m = 3  # type: ignore[misc]


@given(valid_params)
def test_derived_invariants(params):
    dc = derive_constants(params)
    lq = dc.linq
    assert dc.t > 0
    assert lq.mu > 0 and lq.theta > 0 and lq.a > 0
    assert lq.a * lq.mu == pytest.approx(math.sqrt(math.pi / 2), rel=1e-14)
    assert dc.bob.a1 + dc.bob.a2 == pytest.approx(1.0, abs=1e-12)
    assert dc.bob.z1 > dc.bob.z2
    assert dc.eve.y1 > dc.eve.y2
    assert dc.closed_form_valid == (lq.theta > lq.a and params.eta == 4.0)
    assert dc.eve.A == dc.bob.a2


@given(valid_params, st.floats(1.01, 10.0))
def test_t_linear_in_p_and_lambda_u(params, k):
    a = params.replace(p=min(1.0, params.p * k))
    k_eff = a.p / params.p
    b = params.replace(lambda_u=params.lambda_u * k_eff)
    ta, tb = derive_constants(a).t, derive_constants(b).t
    assert ta == pytest.approx(tb, rel=1e-12)
    assert ta == pytest.approx(k_eff * derive_constants(params).t, rel=1e-12)


@given(st.floats(0.05, 4.0), st.floats(1e-3, 1.0), st.integers(1, 4000), st.integers(1, 100))
def test_monotone_theta_in_R_mu_in_n(R, dR, n, dn):
    a, b = LinearQParams.from_code(n, R), LinearQParams.from_code(n, R + dR)
    assert b.theta > a.theta
    assert LinearQParams.from_code(n + dn, R).mu > a.mu
