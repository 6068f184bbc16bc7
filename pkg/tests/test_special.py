from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy import special as sp

from urnlab.special import gamma, gamma_ratio, loggamma


@pytest.mark.parametrize("x", np.linspace(0.05, 30, 97))
def test_real_gamma_against_scipy(x):
    assert gamma(x).real == pytest.approx(sp.gamma(x), rel=1e-12)


@pytest.mark.parametrize("x", [-0.5, -1.5, -2.25, -3.7, 0.3])
def test_reflection_keeps_sign(x):
    assert gamma(x).real == pytest.approx(sp.gamma(x), rel=1e-12)
    assert gamma(x).imag == 0


def test_complex_gamma_against_mpmath():
    rng = np.random.default_rng(5)
    for _ in range(200):
        z = complex(rng.uniform(-4, 12), rng.uniform(-6, 6))
        want = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
        assert abs(gamma(z) - want) <= 1e-12 * abs(want)


def test_loggamma_real_part():
    for z in (0.5 + 2j, 3.25 - 1j, 10 + 0.1j):
        assert loggamma(z).real == pytest.approx(sp.loggamma(z).real, rel=1e-13)


def test_poles_raise():
    for z in (0, -1, -7):
        with pytest.raises(ZeroDivisionError):
            loggamma(z)


def test_gamma_ratio_of_conjugates_is_real():
    z = 2.3 + 0.7j
    r = gamma_ratio([1.5, 2.0], [z, z.conjugate()])
    assert abs(r.imag) < 1e-14 * abs(r)
    assert r.real == pytest.approx(math.gamma(1.5) * math.gamma(2.0) / abs(complex(mpmath.gamma(z))) ** 2, rel=1e-12)


def test_gamma_ratio_large_arguments():
    # direct products would overflow
    assert gamma_ratio([300.5], [300.0]).real == pytest.approx(cmath.exp(sp.loggamma(300.5) - sp.loggamma(300.0)).real, rel=1e-11)
