import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import LOG2E, q_series
from secfbl.fbl import (
    FblCode,
    capacity,
    dispersion,
    error_prob_linearized,
    error_prob_normal,
    normal_argument,
    sir_at_normal_quantile,
)
from secfbl.params import LinearQParams

codes = st.builds(FblCode, n=st.integers(1, 5000), R=st.floats(0.01, 6.0))


def test_capacity_values():
    assert capacity(1.0) == 1.0
    assert capacity(0.0) == 0.0
    assert capacity(3.0) == pytest.approx(2.0, rel=1e-15)


def test_dispersion_values():
    assert dispersion(0.0) == 0.0
    assert dispersion(1.0) == pytest.approx(0.75 * LOG2E**2, rel=1e-15)
    assert dispersion(1.0) == pytest.approx(1.56103, abs=1e-5)
    assert dispersion(1e12) == pytest.approx(LOG2E**2, rel=1e-10)
    assert np.isfinite(dispersion(1e300))


def test_normal_error_anchors():
    for n, R in [(128, 0.25), (512, 1.0), (7, 3.3)]:
        code = FblCode(n, R)
        assert error_prob_normal(2.0**R - 1.0, code) == pytest.approx(0.5, abs=1e-12)
        assert error_prob_normal(0.0, code) == 1.0
    code = FblCode(128, 0.25)
    arg = math.sqrt(128 / dispersion(1.0)) * 0.75
    assert arg == pytest.approx(6.7905, abs=1e-3)
    assert error_prob_normal(1.0, code) < 1e-10
    assert error_prob_normal(1.0, code) == pytest.approx(0.5 * math.erfc(arg / math.sqrt(2)), rel=1e-12)


def test_normal_error_matches_series_oracle():
    code = FblCode(64, 1.0)
    for g in (0.6, 0.9, 1.2, 1.5):
        assert error_prob_normal(g, code) == pytest.approx(q_series(normal_argument(g, code)),
                                                           rel=1e-11)


def test_linearized_examples():
    lq = LinearQParams.from_code(512, 1.0)
    assert error_prob_linearized(lq.theta, lq) == pytest.approx(0.5, abs=1e-15)
    assert error_prob_linearized(lq.theta + lq.a, lq) == pytest.approx(0.0, abs=1e-14)
    assert error_prob_linearized(lq.theta - lq.a, lq) == pytest.approx(1.0, abs=1e-14)
    assert error_prob_linearized(0.5, lq) == 1.0
    assert error_prob_linearized(5.0, lq) == 0.0


def test_linearized_clamped_regime():
    lq = LinearQParams.from_code(128, 0.25)  # theta < a
    e0 = error_prob_linearized(0.0, lq)
    assert 0.5 < e0 < 1.0
    assert e0 == pytest.approx(0.5 + lq.mu * lq.theta / math.sqrt(2 * math.pi))


@given(codes)
def test_monotone_on_dense_grid(code):
    g = np.logspace(-6, 4, 1000)
    e = error_prob_normal(g, code)
    assert np.all(np.diff(e) <= 0)
    assert np.all((0 <= e) & (e <= 1))


def _ramp_gap(n, R, points=20000):
    lq = LinearQParams.from_code(n, R)
    g = np.linspace(0, 3 * (lq.theta + lq.a), points)
    return np.abs(error_prob_normal(g, FblCode(n, R)) - error_prob_linearized(g, lq)).max()


@given(st.integers(8, 4096), st.floats(0.05, 4.0))
def test_linearization_gap_measured_bound(n, R):
    # measured sup-gap is 0.27-0.30 over this range; the ramp is flatter than the
    # tangent of the normal approximation by a factor log2(e)
    lq = LinearQParams.from_code(n, R)
    assume(lq.theta > lq.a)
    assert _ramp_gap(n, R, 4000) <= 0.31


def test_tangent_ramp_gap_floor():
    # even a true tangent ramp misses Q at its endpoints by Q(sqrt(pi/2))
    assert q_series(math.sqrt(math.pi / 2)) == pytest.approx(0.1050, abs=1e-4)


@pytest.mark.xfail(strict=True, reason="pointwise 0.06 bound is unattainable for a tangent ramp")
@pytest.mark.parametrize("n,R", [(128, 1.0), (512, 1.0), (2048, 0.25)])
def test_linearization_pointwise_bound_claim(n, R):
    assert _ramp_gap(n, R) <= 0.06


@given(st.floats(-1e3, 1e3), st.floats(0, 50))
def test_ranges(gamma_like, x):
    lq = LinearQParams.from_code(100, 0.5)
    e = error_prob_linearized(abs(gamma_like), lq)
    assert 0.0 <= e <= 1.0
    assert 0.0 <= error_prob_normal(x, FblCode(100, 0.5)) <= 1.0


@given(codes, st.floats(-30, 30))
def test_normal_quantile_inverse(code, u):
    g = sir_at_normal_quantile(u, code)[0]
    assert normal_argument(g, code) == pytest.approx(u, abs=1e-8 * max(1.0, abs(u)))


def test_code_validation():
    with pytest.raises(ValueError):
        FblCode(0, 1.0)
    with pytest.raises(ValueError):
        FblCode(10, 0.0)
