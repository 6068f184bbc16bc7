"""Exact finite-step moments of the white-ball count.

Two independent routes are provided:

* the linear recurrence for the shifted moments ``E[(W_n - c n)^s]`` with
  ``c = a_m / (1 - lam)``, driven by the coefficients :func:`f_coeff`;
* a forward dynamic program over the exact law of ``W_n``
  (:func:`distribution_oracle`), which uses only the one-step transition law.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from urnlab.combinatorics import falling_factorial, stirling_first_unsigned, stirling_second
from urnlab.errors import DomainError, PoleError, SizeLimit, UnsupportedIndex
from urnlab.model import Sampling, UrnSpec

MAX_EXACT_STEPS = 50


# ---------------------------------------------------------------------------
# normalizer and mean


def g_factor(n: int, spec: UrnSpec) -> Fraction:
    """Martingale normalizer ``prod_{j<n} T_j / (T_j + m * delta)``."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    md = spec.m * spec.delta
    g = Fraction(1)
    for j in range(n):
        t = spec.total(j)
        if t + md == 0:
            raise PoleError(f"g_n has a pole at step {j}")
        g *= Fraction(t, t + md)
    return g


def g_factor_float(n: int, spec: UrnSpec) -> float:
    """Floating-point ``g_n`` for large ``n`` (compensated log-sum of the factors)."""
    md = spec.m * spec.delta
    t = spec.t0 + spec.sigma * np.arange(n, dtype=np.float64)
    if np.any(t + md <= 0):
        raise PoleError("g_n factor is nonpositive")
    return math.exp(math.fsum(np.log(t) - np.log(t + md)))


def _require_shift(spec: UrnSpec) -> None:
    if spec.a_m != 0 and spec.lam >= 1:
        raise UnsupportedIndex(f"a_m = {spec.a_m} != 0 with index {spec.lam} >= 1 is not covered")


def mean_white(n: int, spec: UrnSpec) -> Fraction:
    """Closed-form ``E[W_n]``, identical for both sampling models.

    For ``a_m != 0`` this is ``c (n + T0/sigma) + (W0 - c T0/sigma) / g_n``.
    With ``a_m == 0`` every ``c`` term vanishes before ``lam`` is looked at,
    leaving ``W0 / g_n``.
    """
    _require_shift(spec)
    if n < 0:
        raise DomainError("n must be nonnegative")
    ginv = 1 / g_factor(n, spec)
    if spec.a_m == 0:
        return spec.w0 * ginv
    c = spec.shift
    rho = Fraction(spec.t0, spec.sigma)
    return c * (n + rho) + (spec.w0 - c * rho) * ginv


def mean_white_general(n: int, spec: UrnSpec) -> Fraction:
    """``(a_m sum_{j=1}^n g_j + W0) / g_n``, valid for every index."""
    total = Fraction(0)
    g = Fraction(1)
    md = spec.m * spec.delta
    for j in range(1, n + 1):
        t = spec.total(j - 1)
        g *= Fraction(t, t + md)
        total += g
    return (spec.a_m * total + spec.w0) / g


def triangular_mean_closed_form(n: int, spec: UrnSpec) -> Fraction:
    """``W0 (n sigma + T0) / T0``, the generalized Polya mean."""
    return Fraction(spec.w0 * (n * spec.sigma + spec.t0), spec.t0)


# ---------------------------------------------------------------------------
# f coefficients


@lru_cache(maxsize=None)
def f_terms(spec: UrnSpec, s: int, r: int) -> tuple[tuple[Fraction, int, int], ...]:
    """Expansion of ``f_{n,s,r}`` as ``sum K * (n-1)**p * G_h(T_{n-1})``.

    ``G_h(T) = 1 / T**h`` for model R and ``1 / C(T, h)`` for model M.  Returns
    ``(K, p, h)`` triples with exact ``K``; out-of-range binomials are zero.
    """
    _require_shift(spec)
    if not 0 <= r <= s:
        return ()
    m = spec.m
    c = spec.shift
    d = spec.a_m - c  # constant part of the shifted increment
    slope = spec.lam * spec.sigma / m  # shifted increment per white ball drawn
    acc: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for j in range(s - r, s + 1):
        q = j - (s - r)
        for ell in range(q, j + 1):
            base = comb(s, j) * comb(ell, q) * c ** (ell - q)
            if base == 0:
                continue
            for i in range(ell, j + 1):
                coef = base * comb(j, i) * slope**i * d ** (j - i)
                if coef == 0:
                    continue
                if spec.sampling is Sampling.R:
                    acc[(ell - q, ell)] += coef * stirling_second(i, ell) * falling_factorial(m, ell)
                else:
                    for h in range(ell, min(i, m) + 1):
                        pi = stirling_first_unsigned(h, ell) * stirling_second(i, h) * comb(m, h)
                        acc[(ell - q, h)] += coef * (-pi if (h - ell) % 2 else pi)
    return tuple((k, p, h) for (p, h), k in sorted(acc.items()) if k != 0)


def _g_exact(t: int, h: int, sampling: Sampling) -> Fraction:
    if sampling is Sampling.R:
        return Fraction(1, t**h)
    return Fraction(1, comb(t, h))


def f_coeff(n: int, s: int, r: int, spec: UrnSpec) -> Fraction:
    """Exact coefficient of ``E[W~_{n-1}^r]`` in ``E[W~_n^s]``."""
    if n < 1:
        raise DomainError("f coefficients are defined for n >= 1")
    t = spec.total(n - 1)
    return sum(
        (k * (n - 1) ** p * _g_exact(t, h, spec.sampling) for k, p, h in f_terms(spec, s, r)),
        Fraction(0),
    )


def f_coeff_array(n: np.ndarray, s: int, r: int, spec: UrnSpec) -> np.ndarray:
    """Vectorized float64 evaluation of ``f_{n,s,r}`` over an integer array ``n``."""
    nm1 = np.asarray(n, dtype=np.float64) - 1.0
    t = spec.t0 + spec.sigma * nm1
    out = np.zeros_like(nm1)
    for k, p, h in f_terms(spec, s, r):
        if spec.sampling is Sampling.R:
            g = t ** (-h)
        else:
            g = math.factorial(h) / falling_factorial(t, h)
        out += float(k) * nm1**p * g
    return out


# ---------------------------------------------------------------------------
# exact moment table


@dataclass(frozen=True)
class MomentTable:
    """Exact shifted moments ``E[W~_n^s]`` for ``0 <= n <= N``, ``0 <= s <= S``."""

    spec: UrnSpec
    N: int
    S: int
    entries: tuple[tuple[Fraction, ...], ...]
    shift: Fraction

    def shifted(self, n: int, s: int) -> Fraction:
        return self.entries[n][s]

    def raw(self, n: int, s: int) -> Fraction:
        return raw_moment(n, s, self.spec, self)

    def rows(self):
        """Yield ``(n, s, shifted, raw)`` for every entry."""
        for n in range(self.N + 1):
            for s in range(self.S + 1):
                yield n, s, self.entries[n][s], self.raw(n, s)


def shifted_moment_table(spec: UrnSpec, N: int, S: int, f=None) -> MomentTable:
    """Run the shifted-moment recurrence up to step ``N`` and order ``S``.

    ``f`` optionally replaces :func:`f_coeff` (same signature); used by the
    verification suite to inject faults.
    """
    _require_shift(spec)
    if N < 0 or S < 0:
        raise DomainError("N and S must be nonnegative")
    f = f or f_coeff
    row = tuple(Fraction(spec.w0) ** s for s in range(S + 1))
    rows = [row]
    for n in range(1, N + 1):
        prev = rows[-1]
        row = [Fraction(1)] + [
            sum((f(n, s, r, spec) * prev[r] for r in range(s + 1)), Fraction(0)) for s in range(1, S + 1)
        ]
        rows.append(tuple(row))
    return MomentTable(spec, N, S, tuple(rows), spec.shift)


def raw_moment(n: int, s: int, spec: UrnSpec, table: MomentTable) -> Fraction:
    """Undo the shift: ``E[W_n^s] = sum_k C(s,k) E[W~_n^k] (c n)^(s-k)``."""
    if n > table.N or s > table.S:
        raise DomainError(f"table does not cover (n={n}, s={s})")
    cn = table.shift * n
    return sum((comb(s, k) * table.entries[n][k] * cn ** (s - k) for k in range(s + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# distribution oracle


def transition_probs(w: int, total: int, spec: UrnSpec) -> list[Fraction]:
    """Exact ``P(k white drawn)`` for ``k = 0..m`` from an urn with ``w`` of ``total`` white."""
    m = spec.m
    if spec.sampling is Sampling.M:
        denom = comb(total, m)
        return [Fraction(comb(w, k) * comb(total - w, m - k), denom) for k in range(m + 1)]
    denom = total**m
    return [Fraction(comb(m, k) * w**k * (total - w) ** (m - k), denom) for k in range(m + 1)]


@dataclass(frozen=True)
class ExactPmf:
    n: int
    support: tuple[tuple[int, Fraction], ...]

    def moment(self, s: int, shift: Fraction | int = 0) -> Fraction:
        return sum(((w - shift) ** s * p for w, p in self.support), Fraction(0))

    def as_dict(self) -> dict[int, Fraction]:
        return dict(self.support)


def _step(law: dict[int, Fraction], total: int, spec: UrnSpec) -> dict[int, Fraction]:
    nxt: dict[int, Fraction] = defaultdict(Fraction)
    m = spec.m
    for w, p in law.items():
        for k, q in enumerate(transition_probs(w, total, spec)):
            if q:
                nxt[w + spec.a[m - k]] += p * q
    return nxt


def distribution_oracle(spec: UrnSpec, n: int, max_steps: int = MAX_EXACT_STEPS) -> ExactPmf:
    """Exact law of ``W_n`` by forward dynamic programming over the white count."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if n > max_steps:
        raise SizeLimit(f"exact oracle limited to n <= {max_steps}, requested {n}")
    law: dict[int, Fraction] = {spec.w0: Fraction(1)}
    for j in range(n):
        law = _step(law, spec.total(j), spec)
    return ExactPmf(n, tuple(sorted(law.items())))


def oracle_moment(pmf: ExactPmf, s: int) -> Fraction:
    return pmf.moment(s)


def martingale_residuals(spec: UrnSpec, n: int) -> list[tuple[int, Fraction]]:
    """State-by-state defect of the one-step martingale identity at step ``n``.

    For every support point ``w`` of ``W_{n-1}`` returns
    ``E[g_n (W_n - E W_n) | W_{n-1} = w] - g_{n-1} (w - E W_{n-1})``.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    prev = distribution_oracle(spec, n - 1)
    g_prev, g_now = g_factor(n - 1, spec), g_factor(n, spec)
    mean_prev, mean_now = mean_white_general(n - 1, spec), mean_white_general(n, spec)
    out = []
    total = spec.total(n - 1)
    for w, _ in prev.support:
        lhs = sum(
            (q * g_now * (w + spec.a[spec.m - k] - mean_now) for k, q in enumerate(transition_probs(w, total, spec))),
            Fraction(0),
        )
        out.append((w, lhs - g_prev * (w - mean_prev)))
    return out


# ---------------------------------------------------------------------------
# floating-point oracle


def _transition_matrix_float(w: np.ndarray, total: int, spec: UrnSpec) -> np.ndarray:
    """Rows ``k = 0..m`` of one-step probabilities for an array of white counts."""
    m = spec.m
    w = w.astype(np.float64)
    b = total - w
    probs = np.empty((m + 1, w.size))
    if spec.sampling is Sampling.M:
        denom = float(falling_factorial(total, m))
        for k in range(m + 1):
            probs[k] = comb(m, k) * falling_factorial(w, k) * falling_factorial(b, m - k) / denom
    else:
        p = w / total
        for k in range(m + 1):
            probs[k] = comb(m, k) * p**k * (1.0 - p) ** (m - k)
    return np.clip(probs, 0.0, None)


@dataclass
class FloatLaw:
    """Law of ``W_n`` in float64 on the lattice ``w0 + n a_m + delta * K``."""

    n: int
    values: np.ndarray
    probs: np.ndarray
    max_drift: float


def distribution_float(spec: UrnSpec, n: int, record=None) -> FloatLaw:
    """Float64 forward DP; renormalizes each step and tracks the mass drift.

    ``record`` may be a callable invoked with every intermediate law.
    """
    m, delta = spec.m, spec.delta
    probs = np.ones(1)
    drift = 0.0
    law = FloatLaw(0, np.array([float(spec.w0)]), probs, 0.0)
    if record is not None:
        record(law)
    for j in range(n):
        # state index K = white balls drawn so far; W = w0 + j*a_m + delta*K
        kk = np.arange(probs.size)
        w = spec.w0 + j * spec.a_m + delta * kk
        trans = _transition_matrix_float(w, spec.total(j), spec)
        nxt = np.zeros(probs.size + m)
        for k in range(m + 1):
            nxt[k:k + probs.size] += probs * trans[k]
        mass = nxt.sum()
        drift = max(drift, abs(mass - 1.0))
        if drift > 1e-12:
            raise ArithmeticError(f"probability drift {drift:.3e} at step {j + 1}")
        probs = nxt / mass
        if delta == 0:
            probs = np.array([probs.sum()])
        law = FloatLaw(j + 1, spec.w0 + (j + 1) * spec.a_m + delta * np.arange(probs.size), probs, drift)
        if record is not None:
            record(law)
    return law


def float_normalized_moments(spec: UrnSpec, steps, s_max: int) -> dict[int, np.ndarray]:
    """``E[(W~_n / n^lam)^s]`` for ``s = 0..s_max`` at each requested step, from the float DP."""
    wanted = sorted(set(int(n) for n in steps))
    lam, c = float(spec.lam), float(spec.shift)
    out = {}

    def grab(law: FloatLaw):
        if law.n in wanted:
            x = (law.values - c * law.n) / law.n**lam
            out[law.n] = np.array([np.dot(law.probs, x**s) for s in range(s_max + 1)])

    distribution_float(spec, wanted[-1], record=grab)
    return out
