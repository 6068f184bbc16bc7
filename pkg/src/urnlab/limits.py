"""Limits ``E_s = lim E[W~_n^s] / n^(s lam)`` for large-index and triangular urns.

``E_s`` factors as a Gamma-function prefactor (from the negated roots of the
numerator polynomial of ``f_{j,s,s}``) times a convergent series whose partial
sums are ``E[W~_n^s] / prod_{j<=n} f_{j,s,s}``.  Partial sums are produced
in float64 from the exact recurrence coefficients and extrapolated in ``n``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from urnlab.errors import PoleError, PrecisionLoss, SlowConvergence, UnsupportedIndex
from urnlab.extrapolation import Extrapolated, correction_exponents, extrapolate_doubling
from urnlab.model import UrnClass, UrnSpec
from urnlab.moments import f_coeff_array
from urnlab.polynomials import RootSet, build_poly, denominator_shifts, find_negated_roots
from urnlab.special import gamma_ratio

SUPPORTED = (UrnClass.LARGE, UrnClass.TRIANGULAR, UrnClass.POLYA)


def _require_limit_class(spec: UrnSpec) -> None:
    if spec.urn_class not in SUPPORTED:
        hint = " (swap colors first)" if spec.urn_class is UrnClass.TRIANGULAR_BLACK else ""
        raise UnsupportedIndex(f"limit moments need a large-index or triangular urn, got {spec.urn_class.value}{hint}")


@dataclass
class SeriesState:
    """Float solution of the moment recurrence for ``n = 0..N`` and orders ``0..S``.

    ``products[s][n] = prod_{j<=n} f_{j,s,s}``, ``partial[s][n]`` is the series
    partial sum and ``values[s][n] = products[s][n] * partial[s][n]``.
    """

    N: int
    products: list[np.ndarray]
    partial: list[np.ndarray]
    values: list[np.ndarray]


def propagate(spec: UrnSpec, N: int, S: int, initial: Sequence[float]) -> SeriesState:
    """Solve ``x_n^(s) = sum_r f_{n,s,r} x_{n-1}^(r)`` with ``x_0 = initial``.

    Order zero is constant.  Orders ``s >= 1`` are solved in closed
    summation form, which is exact algebra and fully vectorized over ``n``.
    """
    n = np.arange(1, N + 1)
    products, partial, values = [], [], []
    const = np.full(N + 1, float(initial[0]))
    products.append(np.ones(N + 1))
    partial.append(const)
    values.append(const)
    for s in range(1, S + 1):
        diag = f_coeff_array(n, s, s, spec)
        if np.any(diag <= 0):
            bad = int(n[np.argmax(diag <= 0)])
            raise PoleError(f"f_{{{bad},{s},{s}}} is not positive")
        prod = np.concatenate(([1.0], np.cumprod(diag)))
        drive = np.zeros(N)
        for r in range(s):
            drive += f_coeff_array(n, s, r, spec) * values[r][:-1]
        part = float(initial[s]) + np.concatenate(([0.0], np.cumsum(drive / prod[1:])))
        products.append(prod)
        partial.append(part)
        values.append(prod * part)
    return SeriesState(N, products, partial, values)


def gamma_prefactor(s: int, spec: UrnSpec, roots: RootSet | None = None) -> float:
    """``lim_n prod_{j<=n} f_{j,s,s} / n^(s lam)`` as a ratio of Gamma products."""
    if s == 0:
        return 1.0
    if roots is None:
        roots = find_negated_roots(build_poly(s, spec))
    num = [float(d) for d in denominator_shifts(s, spec)]
    value = gamma_ratio(num, roots.values)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise PrecisionLoss(f"Gamma prefactor has imaginary residue {value.imag:.3e}")
    return value.real


@dataclass
class LimitEstimate:
    s: int
    value: float
    error: float
    prefactor: float
    series_sum: float
    series_error: float
    truncation_n: int
    tail_estimate: float
    cross_value: float
    cross_error: float
    converged: bool
    cross_check_ok: bool
    roots: list = field(default_factory=list)

    def as_record(self) -> dict:
        d = asdict(self)
        d["roots"] = [[z.real, z.imag] for z in self.roots]
        return d


def _series_estimate(state: SeriesState, s: int, n_top: int, exps) -> Extrapolated:
    return extrapolate_doubling(state.partial[s], n_top, exps)


def limit_E(
    s: int,
    spec: UrnSpec,
    tol: float = 1e-8,
    n_max: int = 2**20,
    n_start: int = 2**10,
    strict: bool = True,
) -> LimitEstimate:
    """Limit of the normalized shifted moment of order ``s``.

    The series route gives ``prefactor * lim partial_n``; the cross-check
    extrapolates ``E[W~_n^s] / n^(s lam)`` directly.  Stops once the error is
    below ``tol * max(1, |E_s|)`` or ``n`` reaches ``n_max``.  Without
    convergence :class:`SlowConvergence` is raised when ``strict`` (carrying
    the estimate), otherwise the estimate is returned with ``converged=False``.
    """
    if s == 0:
        return LimitEstimate(0, 1.0, 0.0, 1.0, 1.0, 0.0, 0, 0.0, 1.0, 0.0, True, True)
    _require_limit_class(spec)
    roots = find_negated_roots(build_poly(s, spec))
    pref = gamma_prefactor(s, spec, roots)
    exps = correction_exponents(spec, s)
    lam = float(spec.lam)
    initial = [float(spec.w0) ** r for r in range(s + 1)]
    n = min(n_start, n_max)
    while True:
        state = propagate(spec, n, s, initial)
        series = _series_estimate(state, s, n, exps)
        grid = np.arange(n + 1, dtype=np.float64)
        grid[0] = 1.0
        normalized = state.values[s] / grid ** (s * lam)
        cross = extrapolate_doubling(normalized, n, exps)
        value = pref * series.value
        error = abs(pref) * series.error
        converged = error <= tol * max(1.0, abs(value))
        if converged or n >= n_max:
            break
        n = min(2 * n, n_max)
    slack = 1e-12 * max(1.0, abs(value))
    agree = abs(value - cross.value) <= 3 * (error + cross.error) + slack
    est = LimitEstimate(
        s=s,
        value=value,
        error=error,
        prefactor=pref,
        series_sum=series.value,
        series_error=series.error,
        truncation_n=n,
        tail_estimate=series.value - float(state.partial[s][n]),
        cross_value=cross.value,
        cross_error=cross.error,
        converged=converged,
        cross_check_ok=agree,
        roots=list(roots.values),
    )
    if strict and not converged:
        raise SlowConvergence(f"E_{s}: error {error:.3e} above tolerance at n = {n}", est)
    return est


def limit_E1_closed_form(spec: UrnSpec) -> float:
    """``(W0 - a_m T0 / (sigma (1 - lam))) Gamma(T0/sigma) / Gamma(T0/sigma + lam)``."""
    rho = spec.t0 / spec.sigma
    lam = float(spec.lam)
    return (spec.w0 - float(spec.shift) * rho) * gamma_ratio([rho], [rho + lam]).real


def growth_constant(spec: UrnSpec) -> float:
    """``lim g_n n^lam = Gamma(T0/sigma + lam) / Gamma(T0/sigma)``."""
    rho = spec.t0 / spec.sigma
    return gamma_ratio([rho + float(spec.lam)], [rho]).real


def limit_W_infinity_moments(s: int, spec: UrnSpec, E: Sequence[float]) -> float:
    """Moment of the martingale limit from ``E_0..E_s``.

    Large-index urns: binomial transform with the centering constant.
    Triangular urns: ``growth_constant**s * E_s``.
    """
    if s == 0:
        return 1.0
    _require_limit_class(spec)
    k_growth = growth_constant(spec)
    if spec.a_m == 0:
        return k_growth**s * E[s]
    offset = float(spec.shift) * spec.t0 / spec.sigma - spec.w0
    return math.fsum(comb(s, k) * k_growth**k * E[k] * offset ** (s - k) for k in range(s + 1))


@dataclass
class LimitMomentReport:
    spec: UrnSpec
    estimates: list[LimitEstimate]
    w_infinity: list[float]

    @property
    def variance(self) -> float | None:
        if len(self.estimates) < 3:
            return None
        return self.estimates[2].value - self.estimates[1].value ** 2

    @property
    def converged(self) -> bool:
        return all(e.converged for e in self.estimates)

    def records(self) -> list[dict]:
        return [
            {
                "s": e.s,
                "prefactor": e.prefactor,
                "series_sum": e.series_sum,
                "truncation_n": e.truncation_n,
                "tail_estimate": e.tail_estimate,
                "E_s": e.value,
                "error_estimate": e.error,
                "cross_check": e.cross_value,
                "cross_check_ok": e.cross_check_ok,
                "converged": e.converged,
                "W_infty_moment": w,
            }
            for e, w in zip(self.estimates, self.w_infinity)
        ]


def limit_report(spec: UrnSpec, s_max: int, tol: float = 1e-8, n_max: int = 2**20) -> LimitMomentReport:
    """Evaluate ``E_0..E_{s_max}`` and the martingale-limit moments, never raising on slow convergence."""
    _require_limit_class(spec)
    estimates = [limit_E(s, spec, tol=tol, n_max=n_max, strict=False) for s in range(s_max + 1)]
    values = [e.value for e in estimates]
    w_inf = [limit_W_infinity_moments(s, spec, values) for s in range(s_max + 1)]
    return LimitMomentReport(spec, estimates, w_inf)
