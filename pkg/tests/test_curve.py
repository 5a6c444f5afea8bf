import numpy as np
import pytest
from hypothesis import given, strategies as st

from fwdsv.curve import NelsonSiegelCurve


def test_short_end_limit():
    c = NelsonSiegelCurve(beta0=0.05, beta1=-0.02, beta2=0.01, tau=2.0)
    assert c.log_forward(0.0) == pytest.approx(0.03, abs=1e-15)


def test_long_end_limit():
    c = NelsonSiegelCurve(beta0=0.05, beta1=-0.02, beta2=0.01, tau=2.0)
    assert c.log_forward(1e12) == pytest.approx(0.05, abs=1e-12)


def test_closed_form_value():
    b0, b1, b2, tau, x = 0.05, -0.02, 0.01, 2.0, 2.0
    u = x / tau
    loading = (1.0 - np.exp(-u)) / u
    expected = b0 + b1 * loading + b2 * (loading - np.exp(-u))
    c = NelsonSiegelCurve(b0, b1, b2, tau)
    assert c.log_forward(x) == pytest.approx(expected, abs=1e-14)


def test_forward_price_is_exp_of_log_forward():
    c = NelsonSiegelCurve()
    assert c.forward_price(3.0) == pytest.approx(np.exp(c.log_forward(3.0)), rel=1e-15)
    flat = NelsonSiegelCurve(beta0=0.0, beta1=0.0, beta2=0.0)
    assert np.all(flat.forward_price(np.linspace(0, 50, 11)) == 1.0)
    level = NelsonSiegelCurve(beta0=0.05, beta1=0.0, beta2=0.0)
    assert level.forward_price(7.0) == pytest.approx(np.exp(0.05), rel=1e-15)


def test_positive_on_long_horizon_grid():
    c = NelsonSiegelCurve()
    assert np.all(c.forward_price(np.linspace(0.0, 50.0, 501)) > 0.0)


def test_continuity_at_origin():
    c = NelsonSiegelCurve()
    assert abs(c.log_forward(1e-8) - c.log_forward(0.0)) < 1e-8


def test_tau_validation():
    with pytest.raises(ValueError):
        NelsonSiegelCurve(tau=0.0)


@given(
    b0=st.floats(-0.1, 0.2), b1=st.floats(-0.1, 0.1), b2=st.floats(-0.1, 0.1),
    tau=st.floats(0.1, 10.0), x=st.floats(0.0, 50.0),
)
def test_curve_is_finite_and_positive_forward(b0, b1, b2, tau, x):
    c = NelsonSiegelCurve(b0, b1, b2, tau)
    val = c.log_forward(x)
    assert np.isfinite(val)
    assert c.forward_price(x) > 0.0
