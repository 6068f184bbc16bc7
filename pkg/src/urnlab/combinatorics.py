"""Exact combinatorial coefficients used by the moment recurrences.

All results are :class:`fractions.Fraction` or ``int``; nothing here touches
floating point.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb

from urnlab.errors import DomainError
from urnlab.model import Sampling

__all__ = [
    "StirlingCache",
    "stirling_second",
    "stirling_first_unsigned",
    "falling_factorial",
    "power_moment_hypergeometric",
    "power_moment_binomial",
    "p_coeff",
]


class StirlingCache:
    """Triangular tables of Stirling numbers, grown on demand.

    Readers never block once a row exists; growth is serialized by a lock.
    """

    def __init__(self, size: int = 16):
        self._lock = threading.Lock()
        self._second = [[1]]
        self._first = [[1]]
        self.grow(size)

    @property
    def size(self) -> int:
        return len(self._second) - 1

    def grow(self, size: int) -> None:
        if size <= self.size:
            return
        with self._lock:
            second, first = list(self._second), list(self._first)
            for n in range(len(second), size + 1):
                prev2, prev1 = second[n - 1], first[n - 1]
                row2 = [0] * (n + 1)
                row1 = [0] * (n + 1)
                for k in range(1, n + 1):
                    up2 = prev2[k] if k < n else 0
                    up1 = prev1[k] if k < n else 0
                    row2[k] = k * up2 + prev2[k - 1]
                    row1[k] = (n - 1) * up1 + prev1[k - 1]
                second.append(row2)
                first.append(row1)
            # publish whole tables at once so readers see consistent rows
            self._second, self._first = second, first

    def second(self, s: int, k: int) -> int:
        if s < 0 or k < 0 or k > s:
            return 0
        if s > self.size:
            self.grow(max(s, 2 * self.size))
        return self._second[s][k]

    def first(self, s: int, k: int) -> int:
        if s < 0 or k < 0 or k > s:
            return 0
        if s > self.size:
            self.grow(max(s, 2 * self.size))
        return self._first[s][k]


_CACHE = StirlingCache()


def stirling_second(s: int, k: int) -> int:
    """Stirling number of the second kind, zero outside the triangle."""
    return _CACHE.second(s, k)


def stirling_first_unsigned(s: int, k: int) -> int:
    """Unsigned Stirling number of the first kind, zero outside the triangle."""
    return _CACHE.first(s, k)


def falling_factorial(x, k: int):
    """``x (x-1) ... (x-k+1)``; works for ints, Fractions and numpy arrays."""
    if k < 0:
        raise DomainError("falling factorial order must be nonnegative")
    result = 1
    for i in range(k):
        result = result * (x - i)
    return result


def _check_urn(m: int, tau: int, w: int, need_m_le_tau: bool) -> None:
    if m < 1 or tau < 1:
        raise DomainError(f"need m >= 1 and tau >= 1 (m={m}, tau={tau})")
    if not 0 <= w <= tau:
        raise DomainError(f"white count w={w} outside [0, tau={tau}]")
    if need_m_le_tau and m > tau:
        raise DomainError(f"sample size m={m} exceeds urn size tau={tau}")


def power_moment_hypergeometric(ell: int, m: int, tau: int, w: int) -> Fraction:
    """``E[X**ell]`` for ``X`` hypergeometric (urn ``tau``, ``w`` white, sample ``m``).

    Evaluated through the polynomial-in-``w`` form, which is exact and agrees
    with the direct probability-weighted sum.
    """
    _check_urn(m, tau, w, True)
    return sum((p_coeff(tau, ell, i, m, Sampling.M) * w**i for i in range(min(ell, m) + 1)), Fraction(0))


def power_moment_binomial(ell: int, m: int, tau: int, w: int) -> Fraction:
    """``E[Y**ell]`` for ``Y`` binomial(``m``, ``w / tau``)."""
    _check_urn(m, tau, w, False)
    return sum(
        (stirling_second(ell, j) * falling_factorial(m, j) * Fraction(w, tau) ** j for j in range(ell + 1)),
        Fraction(0),
    )


def p_coeff(t_prev: int, i: int, ell: int, m: int, sampling: Sampling | str) -> Fraction:
    """Coefficient of ``w**ell`` in ``E[k**i]`` for a draw from an urn of size ``t_prev``.

    ``k`` is the number of white balls among the ``m`` drawn and ``w`` the
    number of white balls in the urn.
    """
    sampling = Sampling.parse(sampling)
    if t_prev < m:
        raise DomainError(f"urn size {t_prev} smaller than sample size {m}")
    if ell < 0 or ell > i:
        return Fraction(0)
    if sampling is Sampling.R:
        return Fraction(stirling_second(i, ell) * falling_factorial(m, ell), t_prev**ell)
    total = Fraction(0)
    for h in range(ell, min(i, m) + 1):
        term = Fraction(stirling_first_unsigned(h, ell) * stirling_second(i, h) * comb(m, h), comb(t_prev, h))
        total += -term if (h - ell) % 2 else term
    return total
