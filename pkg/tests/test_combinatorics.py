from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urnlab.combinatorics import (
    falling_factorial,
    p_coeff,
    power_moment_binomial,
    power_moment_hypergeometric,
    stirling_first_unsigned,
    stirling_second,
)
from urnlab.errors import DomainError


def _s2_oracle(n, k):
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    return k * _s2_oracle(n - 1, k) + _s2_oracle(n - 1, k - 1)


def _c1_oracle(n, k):
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0:
        return 0
    return (n - 1) * _c1_oracle(n - 1, k) + _c1_oracle(n - 1, k - 1)


def test_stirling_examples():
    assert stirling_second(4, 2) == 7
    assert stirling_second(3, 0) == 0
    assert all(stirling_second(n, n) == 1 for n in range(12))
    assert stirling_first_unsigned(4, 2) == 11
    assert stirling_first_unsigned(0, 0) == 1
    assert all(stirling_first_unsigned(n, n) == 1 for n in range(12))


def test_stirling_tables_match_triangle_recurrence():
    for n in range(11):
        for k in range(n + 2):
            assert stirling_second(n, k) == _s2_oracle(n, k)
            assert stirling_first_unsigned(n, k) == _c1_oracle(n, k)


@given(st.fractions(min_value=-20, max_value=20, max_denominator=50))
def test_stirling_expansions_are_polynomial_identities(x):
    for s in range(11):
        assert sum(stirling_second(s, k) * falling_factorial(x, k) for k in range(s + 1)) == x**s
        assert falling_factorial(x, s) == sum(
            (-1) ** (s - k) * stirling_first_unsigned(s, k) * x**k for k in range(s + 1)
        )


def test_falling_factorial_examples():
    assert falling_factorial(5, 3) == 60
    assert falling_factorial(Fraction(7, 3), 0) == 1
    assert falling_factorial(Fraction(1, 2), 2) == Fraction(-1, 4)


def _hyper_direct(ell, m, tau, w):
    return sum(
        (Fraction(k**ell * comb(w, k) * comb(tau - w, m - k), comb(tau, m)) for k in range(m + 1)),
        Fraction(0),
    )


def _binom_direct(ell, m, tau, w):
    p = Fraction(w, tau)
    return sum((k**ell * comb(m, k) * p**k * (1 - p) ** (m - k) for k in range(m + 1)), Fraction(0))


def test_power_moment_examples():
    assert power_moment_hypergeometric(2, 2, 7, 4) == Fraction(12, 7)
    assert power_moment_binomial(2, 2, 7, 4) == Fraction(88, 49)
    assert power_moment_hypergeometric(1, 3, 10, 4) == Fraction(3 * 4, 10)
    assert power_moment_binomial(1, 3, 10, 4) == Fraction(3 * 4, 10)
    assert power_moment_hypergeometric(3, 2, 7, 0) == 0
    assert power_moment_binomial(0, 2, 7, 3) == 1


def test_power_moment_domain():
    with pytest.raises(DomainError):
        power_moment_hypergeometric(1, 2, 5, 6)
    with pytest.raises(DomainError):
        power_moment_hypergeometric(1, 6, 5, 2)
    with pytest.raises(DomainError):
        power_moment_binomial(1, 2, 5, 6)


params = st.integers(1, 30).flatmap(
    lambda tau: st.tuples(st.integers(0, 6), st.integers(1, min(tau, 6)), st.just(tau), st.integers(0, tau))
)


@settings(max_examples=150)
@given(params)
def test_power_moments_equal_direct_sums(args):
    ell, m, tau, w = args
    assert power_moment_hypergeometric(ell, m, tau, w) == _hyper_direct(ell, m, tau, w)
    assert power_moment_binomial(ell, m, tau, w) == _binom_direct(ell, m, tau, w)


@settings(max_examples=150)
@given(params)
def test_p_coefficients_reconstruct_power_moments(args):
    i, m, tau, w = args
    for model, direct in (("M", _hyper_direct), ("R", _binom_direct)):
        poly = sum((p_coeff(tau, i, ell, m, model) * w**ell for ell in range(i + 1)), Fraction(0))
        assert poly == direct(i, m, tau, w)


@given(st.integers(1, 20).flatmap(lambda t: st.tuples(st.integers(1, t), st.just(t), st.integers(0, t))))
def test_sampling_probabilities_sum_to_one(args):
    m, tau, w = args
    assert _hyper_direct(0, m, tau, w) == 1
    assert _binom_direct(0, m, tau, w) == 1


def test_p_coeff_examples():
    assert p_coeff(7, 2, 1, 2, "R") == Fraction(2, 7)
    for model in ("M", "R"):
        assert p_coeff(7, 0, 0, 2, model) == 1
        assert all(p_coeff(7, i, 0, 2, model) == 0 for i in range(1, 5))
    with pytest.raises(DomainError):
        p_coeff(1, 1, 1, 2, "M")
