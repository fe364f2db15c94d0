import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from cosmicrng.special import erfc, igam, igamc, normal_cdf

IDENTITY_GRID = [0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 50.0, 200.0]


def test_igamc_exponential_identity():
    # Q(1, x) = exp(-x)
    for x in IDENTITY_GRID:
        assert igamc(1.0, x) == pytest.approx(math.exp(-x), abs=1e-10)


def test_igamc_erfc_identity():
    # Q(1/2, x) = erfc(sqrt(x))
    for x in IDENTITY_GRID:
        assert igamc(0.5, x) == pytest.approx(erfc(math.sqrt(x)), abs=1e-10)


def test_igamc_at_zero_is_one():
    for a in (0.25, 0.5, 1.0, 4.5, 64.0, 2048.0):
        assert igamc(a, 0.0) == 1.0
        assert igam(a, 0.0) == 0.0


def test_domain_errors():
    with pytest.raises(ValueError):
        igamc(0.0, 1.0)
    with pytest.raises(ValueError):
        igamc(-2.0, 1.0)
    with pytest.raises(ValueError):
        igamc(1.0, -0.5)
    with pytest.raises(ValueError):
        igam(0.0, 1.0)


def test_against_mpmath_reference():
    # spans the (a, x) ranges the test battery produces, including the
    # thousands-of-degrees-of-freedom chi-squares of the serial test
    mpmath.mp.dps = 30
    cases = []
    for a in (0.25, 0.5, 1.0, 1.5, 4.5, 8.0, 64.0, 390.5, 2048.0):
        for scale in (0.2, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0):
            cases.append((a, a * scale))
    for a, x in cases:
        expected = float(mpmath.gammainc(a, x, mpmath.inf, regularized=True))
        assert igamc(a, x) == pytest.approx(expected, abs=1e-10), (a, x)
        assert igam(a, x) == pytest.approx(1.0 - expected, abs=1e-10), (a, x)


def test_igam_igamc_sum_to_one():
    for a in (0.5, 3.0, 100.0):
        for x in (0.1, 1.0, 10.0, 300.0):
            assert igam(a, x) + igamc(a, x) == pytest.approx(1.0, abs=1e-12)


def test_normal_cdf_values():
    assert normal_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-12)
    assert normal_cdf(-1.0) == pytest.approx(1.0 - normal_cdf(1.0), abs=1e-12)
    assert normal_cdf(10.0) == pytest.approx(1.0, abs=1e-15)


def test_erfc_reference_points():
    assert erfc(0.0) == 1.0
    assert erfc(0.4472135954999579) == pytest.approx(0.527089, abs=1e-6)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=1e-3, max_value=1.0))
def test_erfc_monotone_decreasing(x, step):
    assert erfc(x + step) < erfc(x)


@given(st.floats(min_value=0.1, max_value=100), st.floats(min_value=0, max_value=200), st.floats(min_value=1e-3, max_value=10))
def test_igamc_monotone_decreasing_in_x(a, x, step):
    assert igamc(a, x + step) <= igamc(a, x) + 1e-13
