from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from urnlab.errors import SizeLimit, UnsupportedIndex
from urnlab.model import build_spec
from urnlab.moments import (
    distribution_float,
    distribution_oracle,
    f_coeff,
    f_coeff_array,
    float_normalized_moments,
    g_factor,
    g_factor_float,
    martingale_residuals,
    mean_white,
    mean_white_general,
    oracle_moment,
    raw_moment,
    shifted_moment_table,
)


def test_g_factor_examples(large_r, polya):
    assert g_factor(0, large_r) == 1
    assert g_factor(1, large_r) == Fraction(7, 11)
    for n in range(30):
        assert g_factor(n, polya) == Fraction(2, n + 2)


def test_g_factor_float_matches_exact(large_m):
    assert g_factor_float(40, large_m) == pytest.approx(float(g_factor(40, large_m)), rel=1e-13)


def test_mean_examples(large_r, large_m):
    assert mean_white(0, large_r) == large_r.w0
    assert mean_white(1, large_r) == Fraction(51, 7)
    assert mean_white(1, large_m) == Fraction(51, 7)


def test_triangular_mean_closed_form_example(triangular):
    # w0 = 1, T0 = 4, sigma = 4
    assert [mean_white(n, triangular) for n in range(6)] == [n + 1 for n in range(6)]


def test_triangular_mean_against_oracle(triangular):
    for n in range(7):
        assert mean_white(n, triangular) == distribution_oracle(triangular, n).moment(1)
    assert mean_white(1, triangular) == Fraction(3, 2)


def test_mean_is_model_independent(grid):
    for label, spec in grid.items():
        other = build_spec(spec.m, spec.sigma, spec.a[spec.m - 1], spec.a_m, spec.w0, spec.b0,
                           "R" if spec.sampling.value == "M" else "M", validate=False)
        for n in range(7):
            assert distribution_oracle(spec, n).moment(1) == distribution_oracle(other, n).moment(1), label


def test_mean_closed_form_equals_summation(grid):
    for spec in grid.values():
        for n in range(60):
            assert mean_white(n, spec) == mean_white_general(n, spec)


def test_unsupported_index():
    spec = build_spec(1, 3, 4, 1, 2, 2, "M", validate=False)  # a_m != 0 with index 1
    assert spec.lam == 1
    with pytest.raises(UnsupportedIndex):
        mean_white(3, spec)
    with pytest.raises(UnsupportedIndex):
        f_coeff(1, 1, 1, spec)


def test_f_examples(large_r, triangular):
    assert f_coeff(1, 1, 1, large_r) == Fraction(11, 7)
    assert f_coeff(1, 1, 0, large_r) == Fraction(-4, 3)
    for n in range(1, 8):
        for s in range(1, 5):
            assert f_coeff(n, s, 0, triangular) == 0


def test_f_array_matches_exact(grid):
    n = np.arange(1, 40)
    for spec in grid.values():
        if spec.a_m and spec.lam >= 1:
            continue
        for s in range(1, 4):
            for r in range(s + 1):
                exact = [float(f_coeff(int(j), s, r, spec)) for j in n]
                np.testing.assert_allclose(f_coeff_array(n, s, r, spec), exact, rtol=1e-12, atol=1e-12)


def test_table_examples(large_r, triangular):
    table = shifted_moment_table(large_r, 4, 3)
    assert table.shifted(1, 1) == Fraction(104, 21)
    assert table.raw(1, 1) == Fraction(51, 7)
    assert raw_moment(1, 1, large_r, table) == Fraction(51, 7)
    assert all(table.shifted(0, s) == 4**s for s in range(4))
    assert all(table.shifted(n, 0) == 1 for n in range(5))
    tri = shifted_moment_table(triangular, 5, 3)
    assert all(tri.raw(n, s) == tri.shifted(n, s) for n in range(6) for s in range(4))


def test_oracle_examples(large_r, polya):
    assert distribution_oracle(large_r, 1).as_dict() == {9: Fraction(16, 49), 7: Fraction(24, 49), 5: Fraction(9, 49)}
    assert distribution_oracle(large_r, 0).as_dict() == {4: 1}
    for n in range(8):
        assert distribution_oracle(polya, n).as_dict() == {w: Fraction(1, n + 1) for w in range(1, n + 2)}


def test_oracle_equality_on_grid(grid):
    for label, spec in grid.items():
        table = shifted_moment_table(spec, 6, 4)
        for n in range(7):
            pmf = distribution_oracle(spec, n)
            assert sum(p for _, p in pmf.support) == 1
            assert all(p > 0 for _, p in pmf.support)
            for s in range(5):
                assert table.raw(n, s) == oracle_moment(pmf, s), (label, n, s)


def test_martingale_state_by_state(grid):
    for label, spec in grid.items():
        for n in range(1, 6):
            assert all(d == 0 for _, d in martingale_residuals(spec, n)), label


def test_oracle_size_limit(polya):
    with pytest.raises(SizeLimit):
        distribution_oracle(polya, 51)


def test_float_dp_matches_exact(large_m, small_m3):
    for spec in (large_m, small_m3):
        exact = distribution_oracle(spec, 12)
        law = distribution_float(spec, 12)
        got = dict(zip(law.values.tolist(), law.probs.tolist()))
        for w, p in exact.support:
            assert got[w] == pytest.approx(float(p), rel=1e-12, abs=1e-15)
        assert law.max_drift < 1e-12


def test_float_normalized_moments(large_r):
    table = shifted_moment_table(large_r, 20, 3)
    lam = float(large_r.lam)
    out = float_normalized_moments(large_r, [10, 20], 3)
    for n in (10, 20):
        for s in range(4):
            assert out[n][s] == pytest.approx(float(table.shifted(n, s)) / n ** (s * lam), rel=1e-11)
