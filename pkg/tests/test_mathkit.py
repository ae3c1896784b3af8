import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from censorsense.mathkit import (
    clamp_probability,
    gaussian_q,
    log_multinomial,
    log_multinomial_table,
    reg_lower_gamma,
    reg_upper_gamma,
)

# Frozen from mpmath quadrature of the standard normal density at 40 digits.
Q_196 = 0.024997895148220436
# Frozen from a 40-digit mpmath summation of the lower-gamma power series.
P_5_515 = 0.58542073166340567


def test_gaussian_q_known_values():
    assert gaussian_q(0) == 0.5
    assert gaussian_q(8) < 1e-15
    assert gaussian_q(8) > 0
    assert gaussian_q(1.96) == pytest.approx(Q_196, abs=1e-15)


def test_gaussian_q_vectorized_matches_scalar():
    xs = np.linspace(-10, 10, 41)
    np.testing.assert_allclose(gaussian_q(xs), [gaussian_q(float(x)) for x in xs], rtol=1e-15, atol=1e-17)


@given(st.floats(min_value=-40, max_value=40))
def test_gaussian_q_symmetry(x):
    assert abs(gaussian_q(x) + gaussian_q(-x) - 1) <= 1e-12


def test_gaussian_q_strictly_decreasing():
    # below about -5 neighbouring values round to the same double next to 1
    q = gaussian_q(np.linspace(-5, 8, 2001))
    assert np.all(np.diff(q) < 0)


@pytest.mark.parametrize("x", [0.0, 0.3, 1.0, 2.5, 7.0, 30.0])
def test_reg_lower_gamma_exponential_identity(x):
    assert reg_lower_gamma(1, x) == pytest.approx(-math.expm1(-x), abs=1e-14)


def test_reg_lower_gamma_edges():
    assert reg_lower_gamma(3.5, 0) == 0.0
    assert reg_lower_gamma(2, math.inf) == 1.0
    assert reg_lower_gamma(5, 5.15) == pytest.approx(P_5_515, abs=1e-12)


def test_reg_lower_gamma_domain():
    with pytest.raises(ValueError):
        reg_lower_gamma(0, 1.0)
    with pytest.raises(ValueError):
        reg_lower_gamma(-1, 1.0)
    with pytest.raises(ValueError):
        reg_lower_gamma(2, -0.1)


@pytest.mark.parametrize("a", [0.5, 1, 2, 5, 12.5, 40])
def test_reg_lower_gamma_against_scipy(a):
    from scipy.special import gammainc, gammaincc

    xs = np.concatenate([np.linspace(0.01, 3 * a + 20, 80), [a + 1 - 1e-9, a + 1 + 1e-9]])
    for x in xs:
        assert reg_lower_gamma(a, x) == pytest.approx(gammainc(a, x), abs=1e-13)
        assert reg_upper_gamma(a, x) == pytest.approx(gammaincc(a, x), abs=1e-13)


@given(st.floats(min_value=0.1, max_value=60))
def test_reg_lower_gamma_monotone(a):
    grid = np.linspace(0, 4 * a + 30, 60)
    vals = [reg_lower_gamma(a, x) for x in grid]
    assert all(b >= c - 1e-15 for c, b in zip(vals, vals[1:]))
    assert vals[-1] > 0.99


def test_small_argument_relative_accuracy():
    # the detection formula divides P(u, x) by x^u for tiny x
    x = 1e-8
    assert reg_lower_gamma(4, x) == pytest.approx(x**4 / 24 * (1 - 4 * x / 5), rel=1e-12)


def test_log_multinomial_small():
    assert log_multinomial(3, 1, 1) == pytest.approx(math.log(6), abs=1e-15)
    assert log_multinomial(7, 7, 0) == 0.0
    assert log_multinomial(7, 0, 7) == 0.0


def test_log_multinomial_big_integer_oracle():
    exact = math.factorial(51) // (math.factorial(10) * math.factorial(20) * math.factorial(21))
    assert log_multinomial(51, 10, 20) == pytest.approx(math.log(exact), rel=1e-9)
    assert log_multinomial(51, 10, 20) == pytest.approx(49.58942465219145, rel=1e-12)


def test_log_multinomial_large_m_uses_lgamma():
    m, n, c = 2000, 600, 700
    exact = math.lgamma(m + 1) - math.lgamma(n + 1) - math.lgamma(c + 1) - math.lgamma(m - n - c + 1)
    assert log_multinomial(m, n, c) == pytest.approx(exact, rel=1e-12)


def test_log_multinomial_domain():
    with pytest.raises(ValueError):
        log_multinomial(5, 3, 3)
    with pytest.raises(ValueError):
        log_multinomial(5, -1, 0)


def test_log_multinomial_full_enumeration():
    # count arrangements of an explicit 3-letter alphabet
    for m in range(0, 9):
        counts = {}
        for word in itertools.product("abc", repeat=m):
            key = (word.count("a"), word.count("b"))
            counts[key] = counts.get(key, 0) + 1
        for (n, c), count in counts.items():
            assert round(math.exp(log_multinomial(m, n, c))) == count
    for m in range(9, 13):
        for n in range(m + 1):
            for c in range(m - n + 1):
                exact = math.factorial(m) // (math.factorial(n) * math.factorial(c) * math.factorial(m - n - c))
                assert math.exp(log_multinomial(m, n, c)) == pytest.approx(exact, rel=1e-12)


def test_log_multinomial_table_sums_to_trinomial_total():
    m = 12
    table = log_multinomial_table(m)
    assert np.isneginf(table[m, 1])
    assert np.exp(table[np.isfinite(table)]).sum() == pytest.approx(3**m, rel=1e-12)


def test_clamp_probability():
    assert clamp_probability(1 + 1e-13) == 1.0
    assert clamp_probability(-1e-13) == 0.0
    with pytest.raises(ValueError):
        clamp_probability(1.01)
    with pytest.raises(ValueError):
        clamp_probability(float("nan"))
