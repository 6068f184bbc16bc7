"""Coefficients ``phi_{n,s,k}`` of ``E[W~_n^s]`` as a polynomial in ``W_0``.

Three independent evaluations are provided: the row recurrence, the explicit
jump decomposition of weighted lattice paths, and the sum over discrete
simplexes.  ``phi_tilde`` gives the limits ``phi_{n,s,k} / phi_{n,s,s}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from urnlab.errors import SizeLimit, SlowConvergence
from urnlab.extrapolation import correction_exponents, extrapolate_doubling
from urnlab.limits import _require_limit_class, propagate
from urnlab.model import UrnSpec
from urnlab.moments import f_coeff

MAX_EXPLICIT_N = 12


@dataclass
class PhiTable:
    """Exact ``phi[n][s][k]`` for ``n <= N``, ``s <= S``; limits in ``tilde``."""

    spec: UrnSpec
    N: int
    S: int
    phi: list[list[list[Fraction]]]
    tilde: dict[tuple[int, int], float] = field(default_factory=dict)

    def __call__(self, n: int, s: int, k: int) -> Fraction:
        return self.phi[n][s][k] if k <= s else Fraction(0)

    def moment(self, n: int, s: int, w0: int | Fraction | None = None) -> Fraction:
        x = self.spec.w0 if w0 is None else w0
        return sum((self.phi[n][s][k] * Fraction(x) ** k for k in range(s + 1)), Fraction(0))


class _F:
    """Memoized exact ``f_{n,s,r}``, with ``f_{n,0,0} = 1`` and an optional override."""

    def __init__(self, spec: UrnSpec, f=None):
        self.spec = spec
        self.override = f
        self.cache: dict[tuple[int, int, int], Fraction] = {}

    def __call__(self, n: int, s: int, r: int) -> Fraction:
        key = (n, s, r)
        if key not in self.cache:
            if s == 0:
                val = Fraction(1) if r == 0 else Fraction(0)
            elif self.override is not None:
                val = self.override(n, s, r, self.spec)
            else:
                val = f_coeff(n, s, r, self.spec)
            self.cache[key] = val
        return self.cache[key]

    def diag(self, level: int, lo: int, hi: int) -> Fraction:
        """``prod_{lo <= j <= hi} f_{j,level,level}`` (empty product = 1)."""
        out = Fraction(1)
        for j in range(lo, hi + 1):
            out *= self(j, level, level)
        return out


def phi_recursive(spec: UrnSpec, N: int, S: int, f=None) -> PhiTable:
    """``phi_{n,s,k} = sum_{l>=k} f_{n,s,l} phi_{n-1,l,k}`` with ``phi_{0,s,k} = [s = k]``."""
    F = _F(spec, f)
    eye = [[Fraction(int(s == k)) for k in range(s + 1)] for s in range(S + 1)]
    phi = [eye]
    for n in range(1, N + 1):
        prev = phi[-1]
        row = [[Fraction(1)]]
        for s in range(1, S + 1):
            row.append([
                sum((F(n, s, ell) * prev[ell][k] for ell in range(k, s + 1)), Fraction(0))
                for k in range(s + 1)
            ])
        phi.append(row)
    return PhiTable(spec, N, S, phi)


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for cut in combinations(range(1, total), parts - 1):
        bounds = (0, *cut, total)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _jump_paths(F: _F, n: int, s: int, target: int, floor: int) -> Fraction:
    """Total weight of paths from ``(n, s)`` down to level ``target`` at step ``floor``.

    Jumps happen at steps ``floor < i_r < ... < i_1 <= n``; after the last jump
    the path stays on level ``target`` through step ``floor + 1``.
    """
    drop = s - target
    total = Fraction(0)
    for r in range(0, drop + 1):
        if r == 0 and drop > 0:
            continue
        for heights in _compositions(drop, r):
            for steps in combinations(range(n, floor, -1), r):
                w = Fraction(1)
                level, upper = s, n + 1
                for i_g, h in zip(steps, heights):
                    w *= F.diag(level, i_g + 1, upper - 1) * F(i_g, level, level - h)
                    level, upper = level - h, i_g
                    if w == 0:
                        break
                if w:
                    w *= F.diag(level, floor + 1, upper - 1)
                total += w
    return total


def phi_explicit(n: int, s: int, k: int, spec: UrnSpec, f=None, max_n: int = MAX_EXPLICIT_N) -> Fraction:
    """Explicit lattice-path evaluation of ``phi_{n,s,k}``.

    For ``k >= 1`` paths run from ``(n, s)`` to ``(0, k)``.  The constant term
    sums over the step ``q`` and level ``l`` where the path leaves to level 0
    through ``f_{q,l,0}``; this includes the path that stays on level ``s``
    until it leaves.
    """
    if n > max_n:
        raise SizeLimit(f"explicit phi evaluation is limited to n <= {max_n} (requested {n})")
    if k > s:
        return Fraction(0)
    F = _F(spec, f)
    if s == 0:
        return Fraction(1)
    if k >= 1:
        return _jump_paths(F, n, s, k, 0)
    total = Fraction(0)
    for q in range(1, n + 1):
        for ell in range(1, s + 1):
            exit_w = F(q, ell, 0)
            if exit_w:
                total += exit_w * _jump_paths(F, n, s, ell, q)
    return total


def _simplex(total: int, n: int):
    """All ``(c_1, ..., c_n)`` with nonnegative entries summing to ``total``."""
    for cut in combinations(range(total + n - 1), n - 1):
        bounds = (-1, *cut, total + n - 1)
        yield tuple(bounds[i + 1] - bounds[i] - 1 for i in range(n))


def phi_simplex(n: int, s: int, k: int, spec: UrnSpec, f=None, max_n: int = MAX_EXPLICIT_N) -> Fraction:
    """``phi_{n,s,k} = sum over c in simplex(s-k, n) of prod_j f_{j, s-C_{j+1}, s-C_j}``.

    ``C_j = c_j + ... + c_n``.  With ``f_{j,0,0} = 1`` the same sum covers ``k = 0``.
    """
    if n > max_n:
        raise SizeLimit(f"simplex phi evaluation is limited to n <= {max_n} (requested {n})")
    if k > s:
        return Fraction(0)
    if n == 0:
        return Fraction(int(s == k))
    F = _F(spec, f)
    total = Fraction(0)
    for c in _simplex(s - k, n):
        w = Fraction(1)
        tail = 0  # C_{j+1}
        for j in range(n, 0, -1):
            w *= F(j, s - tail, s - tail - c[j - 1])
            tail += c[j - 1]
            if w == 0:
                break
        total += w
    return total


@dataclass(frozen=True)
class PhiTilde:
    s: int
    k: int
    value: float
    error: float
    truncation_n: int
    converged: bool


def phi_tilde(
    s: int, k: int, spec: UrnSpec, tol: float = 1e-8, n_max: int = 2**20, n_start: int = 2**10, strict: bool = True
) -> PhiTilde:
    """``lim_n phi_{n,s,k} / phi_{n,s,s}`` by float propagation from ``W_0 = e_k`` and extrapolation."""
    if k == s:
        return PhiTilde(s, k, 1.0, 0.0, 0, True)
    _require_limit_class(spec)
    initial = [float(r == k) for r in range(s + 1)]
    exps = correction_exponents(spec, s)
    n = min(n_start, n_max)
    while True:
        state = propagate(spec, n, s, initial)
        est = extrapolate_doubling(state.partial[s], n, exps)
        converged = est.error <= tol * max(1.0, abs(est.value))
        if converged or n >= n_max:
            break
        n = min(2 * n, n_max)
    out = PhiTilde(s, k, est.value, est.error, n, converged)
    if strict and not converged:
        raise SlowConvergence(f"phi~_{s},{k}: error {est.error:.3e} at n = {n}", out)
    return out


def limit_from_phi_tilde(s: int, spec: UrnSpec, prefactor: float, tol: float = 1e-8) -> tuple[float, float]:
    """``prefactor * sum_k phi~_{s,k} W_0^k`` and its propagated error."""
    terms = [phi_tilde(s, k, spec, tol=tol, strict=False) for k in range(s + 1)]
    powers = np.array([float(spec.w0) ** k for k in range(s + 1)])
    value = prefactor * float(np.dot([t.value for t in terms], powers))
    error = abs(prefactor) * float(np.dot([t.error for t in terms], np.abs(powers)))
    return value, error
