"""Monic polynomials whose negated roots enter the limit-moment prefactors.

``f_{j,s,s}`` is a ratio of two polynomials in ``j - 1``.  The numerator, made
monic, is ``P_s`` for sampling without replacement and ``Q_s`` for sampling
with replacement; its negated roots become Gamma arguments.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from urnlab.errors import ConvergenceFailure, DomainError, NearIntegerPole
from urnlab.model import Sampling, UrnSpec

log = logging.getLogger(__name__)

POLE_GUARD = 1e-9
RESIDUAL_TOL = 1e-12


def _mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _add(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _power(p: list[Fraction], k: int) -> list[Fraction]:
    out = [Fraction(1)]
    for _ in range(k):
        out = _mul(out, p)
    return out


def _binomial_poly(linear: list[Fraction], k: int) -> list[Fraction]:
    """``C(y, k)`` as a polynomial in ``x`` for ``y = linear[0] + linear[1] x``."""
    out = [Fraction(1)]
    for i in range(k):
        out = _mul(out, [linear[0] - i, linear[1]])
    return [c / factorial(k) for c in out]


@dataclass(frozen=True)
class MonicPolynomial:
    """Monic polynomial with exact coefficients, lowest degree first."""

    coeffs: tuple[Fraction, ...]
    name: str = ""

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1] != 1:
            raise DomainError(f"polynomial {self.name!r} is not monic: {self.coeffs}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def build_P(s: int, spec: UrnSpec) -> MonicPolynomial:
    """Degree ``min(s, m)`` numerator polynomial for sampling without replacement."""
    if s < 1:
        raise DomainError("s must be >= 1")
    m, sigma, t0 = spec.m, spec.sigma, spec.t0
    star = min(s, m)
    C = spec.lam * sigma / m
    poly: list[Fraction] = [Fraction(0)]
    for ell in range(star + 1):
        weight = Fraction(comb(s, ell), comb(star, ell)) * C**ell * comb(m, ell)
        if weight:
            term = _binomial_poly([Fraction(t0 - ell), Fraction(sigma)], star - ell)
            poly = _add(poly, [weight * c for c in term])
    scale = Fraction(factorial(star), sigma**star)
    return MonicPolynomial(tuple(scale * c for c in poly), name=f"P_{s}")


def build_Q(s: int, spec: UrnSpec) -> MonicPolynomial:
    """Degree ``s`` numerator polynomial for sampling with replacement."""
    if s < 1:
        raise DomainError("s must be >= 1")
    m, sigma, t0 = spec.m, spec.sigma, spec.t0
    C = spec.lam * sigma / m
    poly: list[Fraction] = [Fraction(0)]
    base = [Fraction(t0), Fraction(sigma)]
    for ell in range(min(s, m) + 1):
        weight = comb(s, ell) * C**ell * comb(m, ell) * factorial(ell)
        if weight:
            poly = _add(poly, [weight * c for c in _power(base, s - ell)])
    return MonicPolynomial(tuple(c / sigma**s for c in poly), name=f"Q_{s}")


def build_poly(s: int, spec: UrnSpec) -> MonicPolynomial:
    return build_P(s, spec) if spec.sampling is Sampling.M else build_Q(s, spec)


def denominator_shifts(s: int, spec: UrnSpec) -> tuple[Fraction, ...]:
    """Constants ``d`` such that ``f_{j,s,s} = poly(j-1) / prod (j - 1 + d)``."""
    if spec.sampling is Sampling.M:
        return tuple(Fraction(spec.t0 + 1 - ell, spec.sigma) for ell in range(1, min(s, spec.m) + 1))
    return (Fraction(spec.t0, spec.sigma),) * s


@dataclass(frozen=True)
class RootSet:
    """Negated roots ``lam_l`` with ``poly(x) = prod (x + lam_l)``."""

    values: tuple[complex, ...]
    poly: MonicPolynomial

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0 for v in self.values)

    def multiplicities(self, tol: float = 1e-7) -> list[tuple[complex, int]]:
        groups: list[list] = []
        for v in self.values:
            for g in groups:
                if abs(g[0] - v) <= tol * max(1.0, abs(v)):
                    g[1] += 1
                    break
            else:
                groups.append([v, 1])
        return [(v, k) for v, k in groups]

    def reconstruct(self) -> np.ndarray:
        """Coefficients (lowest first) of ``prod (x + lam_l)``."""
        coeffs = np.array([1.0 + 0j])
        for v in self.values:
            coeffs = np.convolve(coeffs, np.array([v, 1.0]))
        return coeffs

    def reconstruction_error(self) -> float:
        target = self.poly.float_coeffs
        got = self.reconstruct()
        scale = np.maximum(np.abs(target), 1.0)
        return float(np.max(np.abs(got - target) / scale))


def _residual_ok(coeffs: np.ndarray, z: complex) -> bool:
    val = np.polyval(coeffs[::-1], z)
    scale = np.polyval(np.abs(coeffs[::-1]), abs(z))
    return abs(val) <= RESIDUAL_TOL * max(scale, 1.0)


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _divmod(p: list[Fraction], q: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    p, q = _trim(list(p)), _trim(list(q))
    if len(p) < len(q):
        return [Fraction(0)], p
    quot = [Fraction(0)] * (len(p) - len(q) + 1)
    rem = list(p)
    for i in range(len(quot) - 1, -1, -1):
        coef = rem[i + len(q) - 1] / q[-1]
        quot[i] = coef
        for j, b in enumerate(q):
            rem[i + j] -= coef * b
    return quot, _trim(rem[: len(q) - 1] or [Fraction(0)])


def _monic(p: list[Fraction]) -> list[Fraction]:
    p = _trim(p)
    return [c / p[-1] for c in p]


def _gcd(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    p, q = _trim(p), _trim(q)
    while len(q) > 1 or q[0] != 0:
        p, q = q, _divmod(p, q)[1]
    return _monic(p)


def _deriv(p: list[Fraction]) -> list[Fraction]:
    return [i * p[i] for i in range(1, len(p))] or [Fraction(0)]


def _sub(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    return _trim(_add(p, [-c for c in q]))


def squarefree_factors(poly: MonicPolynomial) -> list[tuple[list[Fraction], int]]:
    """Exact squarefree decomposition (Yun); returns ``(factor, multiplicity)`` pairs."""
    f = list(poly.coeffs)
    a = _gcd(f, _deriv(f))
    b = _divmod(f, a)[0]
    d = _sub(_divmod(_deriv(f), a)[0], _deriv(b))
    out = []
    k = 1
    while len(b) > 1:
        a = _gcd(b, d)
        if len(a) > 1:
            out.append((a, k))
        b = _divmod(b, a)[0]
        d = _sub(_divmod(d, a)[0], _deriv(b))
        k += 1
    return out


def _simple_roots(factor: list[Fraction], name: str, max_newton: int) -> list[complex]:
    d = len(factor) - 1
    c = np.array([float(x) for x in factor])
    if d == 1:
        return [complex(-factor[0] / factor[1])]
    companion = np.zeros((d, d))
    companion[1:, :-1] = np.eye(d - 1)
    companion[:, -1] = -c[:-1] / c[-1]
    roots = np.linalg.eigvals(companion).astype(complex)
    deriv = np.array([i * c[i] for i in range(1, d + 1)])
    refined = []
    for z in roots:
        for _ in range(max_newton):
            if _residual_ok(c, z):
                break
            dp = np.polyval(deriv[::-1], z)
            if dp == 0:
                break
            z = z - np.polyval(c[::-1], z) / dp
        if not _residual_ok(c, z):
            raise ConvergenceFailure(f"root of {name} did not converge (z={z})")
        refined.append(complex(z))
    return refined


def find_negated_roots(poly: MonicPolynomial, max_newton: int = 8, check_poles: bool = True) -> RootSet:
    """Negated roots via exact squarefree splitting, companion eigenvalues and Newton.

    Repeated roots are separated exactly before any floating point is used, so
    multiplicities are recovered without the usual ``eps**(1/k)`` loss.
    Conjugate pairs are symmetrized.  With ``check_poles`` a negated root
    within ``1e-9`` of a nonpositive integer raises :class:`NearIntegerPole`.
    """
    if poly.degree < 1:
        raise DomainError("degree must be >= 1")
    values: list[complex] = []
    for factor, mult in squarefree_factors(poly):
        for z in _symmetrize(_simple_roots(factor, poly.name, max_newton)):
            values.extend([z] * mult)
    if len(values) != poly.degree:
        raise ConvergenceFailure(f"{poly.name}: recovered {len(values)} roots for degree {poly.degree}")
    if any(v.imag != 0 for v in values):
        log.info("%s has complex roots: %s", poly.name, values)
    if len(set(values)) < len(values):
        log.info("%s has repeated roots: %s", poly.name, values)
    negated = tuple(sorted((-v for v in values), key=lambda z: (-z.real, z.imag)))
    if check_poles:
        for v in negated:
            if v.real <= POLE_GUARD and abs(v.imag) < POLE_GUARD and abs(v.real - round(v.real)) < POLE_GUARD:
                raise NearIntegerPole(f"negated root {v} of {poly.name} is at a Gamma pole")
    return RootSet(negated, poly)


def _symmetrize(roots: list[complex]) -> list[complex]:
    out: list[complex] = []
    pending = sorted(roots, key=lambda z: (z.real, z.imag))
    used = [False] * len(pending)
    for i, z in enumerate(pending):
        if used[i]:
            continue
        used[i] = True
        if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
            out.append(complex(z.real, 0.0))
            continue
        # pair with the nearest unused conjugate
        best, best_j = None, -1
        for j in range(len(pending)):
            if not used[j]:
                dist = abs(pending[j] - z.conjugate())
                if best is None or dist < best:
                    best, best_j = dist, j
        if best_j < 0:
            out.append(complex(z.real, 0.0))
            continue
        used[best_j] = True
        mid = (z + pending[best_j].conjugate()) / 2
        out.extend([mid, mid.conjugate()])
    return out
