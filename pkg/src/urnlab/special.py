"""Complex Gamma function via the Lanczos approximation (g = 7, 9 terms)."""

from __future__ import annotations

import cmath
import math

_G = 7
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == int(z.real)


def loggamma(z: complex) -> complex:
    """A logarithm of ``Gamma(z)``.

    The imaginary part is only defined modulo ``2 pi``; callers that need the
    principal branch should not rely on it.  Raises ``ZeroDivisionError`` at
    the poles.
    """
    z = complex(z)
    if _is_pole(z):
        raise ZeroDivisionError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z)
        return math.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - loggamma(1 - z)
    z -= 1
    x = _COEF[0]
    for i in range(1, _G + 2):
        x += _COEF[i] / (z + i)
    t = z + _G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma(z: complex) -> complex:
    """``Gamma(z)`` for complex ``z``; real input gives a complex with zero imaginary part."""
    z = complex(z)
    if z.imag == 0 and z.real > 0:
        return complex(math.exp(loggamma(z).real), 0.0)
    if z.imag == 0 and z.real < 0.5:
        # keep the sign that the log form loses for negative real arguments
        s = math.sin(math.pi * z.real)
        return complex(math.pi / (s * gamma(1 - z).real), 0.0)
    return cmath.exp(loggamma(z))


def gamma_ratio(num, den) -> complex:
    """``prod Gamma(num) / prod Gamma(den)`` computed in log space."""
    total = sum((loggamma(z) for z in num), 0j) - sum((loggamma(z) for z in den), 0j)
    return cmath.exp(total)
