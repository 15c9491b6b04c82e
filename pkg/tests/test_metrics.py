import math

import pytest
from hypothesis import given, strategies as st

from secfbl.analytic import METHODS, evaluate, secrecy_metrics
from secfbl.params import SystemParams

probs = st.floats(0.0, 1.0)
AC2 = SystemParams(D=50.0, G_e=1.0)


def test_perfect_link_and_dead_link():
    b = secrecy_metrics(0.0, 1.0, AC2)
    assert b.p_sec == 1.0 and b.p_out == 0.0
    b = secrecy_metrics(1.0, 0.37, AC2)
    assert b.p_sec == 0.0 and b.t_sec == 0.0


def test_throughput_example():
    b = secrecy_metrics(0.1, 0.8, SystemParams(p=0.001, R=0.25))
    assert b.p_sec == pytest.approx(0.72, rel=1e-15)
    assert b.t_sec == pytest.approx(1.8e-4, rel=1e-12)


@given(probs, probs, st.floats(1e-4, 1.0), st.floats(0.05, 4.0))
def test_identities_exact(eb, ee, p, R):
    params = SystemParams(p=p, R=R)
    b = secrecy_metrics(eb, ee, params)
    assert b.p_out == 1.0 - b.p_sec
    assert b.t_sec == p * R * b.p_sec
    assert 0.0 <= b.p_sec <= 1.0 and 0.0 <= b.p_out <= 1.0


@pytest.mark.parametrize("eb,ee", [(-0.1, 0.5), (0.5, 1.2), (math.nan, 0.5)])
def test_non_probabilities_rejected(eb, ee):
    with pytest.raises(ValueError):
        secrecy_metrics(eb, ee, AC2)


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        secrecy_metrics(0.1, 0.1, AC2, method="guess")
    with pytest.raises(ValueError):
        evaluate(AC2, "monte_carlo")
    assert "monte_carlo" in METHODS


def test_evaluate_methods_agree_at_ac2():
    cf = evaluate(AC2, "closed_form")
    lin = evaluate(AC2, "quadrature_linearized")
    nor = evaluate(AC2, "quadrature_normal")
    assert cf.method == "closed_form" and not cf.fallback_reason
    assert cf.p_sec == pytest.approx(lin.p_sec, rel=1e-7)
    assert abs(cf.p_sec - nor.p_sec) < 0.06
    assert cf.p_sec == pytest.approx((1 - 0.027040465972045) * 0.058909106647930, rel=1e-10)


def test_closed_form_falls_back_outside_regime():
    params = AC2.replace(R=0.25, n=128)
    b = evaluate(params, "closed_form")
    assert b.method == "quadrature_linearized"
    assert "theta" in b.fallback_reason
    assert b.p_sec == evaluate(params, "quadrature_linearized").p_sec
