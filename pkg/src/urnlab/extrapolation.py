"""Richardson extrapolation with a known set of correction exponents.

Normalized moments of the urn behave like ``L + sum_k c_k n**e_k`` where the
exponents ``e_k`` are fixed by the urn index.  Corrections such as
``n**(1 - 2 lam)`` can decay very slowly, so a single fitted power law is not
enough; instead all leading exponents are eliminated on a doubling grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from urnlab.model import UrnSpec


def correction_exponents(spec: UrnSpec, s: int, depth: int = 4, limit: int = 12) -> list[float]:
    """Leading negative exponents in the expansion of ``E[W~_n^s] / n^(s lam)``.

    Solutions of the moment recurrence combine ``n**(j lam + i)`` times power
    series in ``1/n``.  Integer powers ``i`` (from fluctuations of order
    ``sqrt(n)`` per pair of factors) appear only when ``a_m != 0``.
    """
    lam = spec.lam
    seen: set[Fraction] = set()
    pairs = s // 2 if spec.a_m != 0 else 0
    for j in range(s + 1):
        for i in range(pairs + 1):
            if j + 2 * i > s:
                continue
            for k in range(depth + 1):
                e = (j - s) * lam + i - k
                if e < 0:
                    seen.add(e)
    return [float(e) for e in sorted(seen, reverse=True)[:limit]]


def richardson(ns: Sequence[float], values: Sequence[float], exponents: Sequence[float]) -> float:
    """Limit ``L`` from ``values[i] = L + sum_k c_k ns[i]**exponents[k]`` (least squares if overdetermined)."""
    ns = np.asarray(ns, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(ns) < len(exponents) + 1:
        raise ValueError("need at least one more point than exponents")
    scale = ns.max()
    cols = [np.ones_like(ns)] + [(ns / scale) ** e for e in exponents]
    A = np.column_stack(cols)
    sol, *_ = np.linalg.lstsq(A, values, rcond=None)
    return float(sol[0])


@dataclass(frozen=True)
class Extrapolated:
    value: float
    error: float
    order: int  # number of eliminated exponents
    raw: float  # last unextrapolated value


def extrapolate_doubling(
    sequence: np.ndarray, n_top: int, exponents: Sequence[float], min_n: int = 16, max_order: int = 8
) -> Extrapolated:
    """Extrapolate ``sequence[n]`` from the grid ``n_top, n_top/2, n_top/4, ...``.

    Every order ``K`` uses the ``K + 1`` largest grid points.  The error of
    order ``K`` is the larger of its distance to order ``K - 1`` and to order
    ``K`` computed one grid step lower; the order with the smallest error wins.
    """
    grid = []
    n = n_top
    while n >= min_n and len(grid) < max_order + 2:
        grid.append(n)
        n //= 2
    vals = np.array([sequence[g] for g in grid])
    raw = float(vals[0])
    if len(grid) < 3 or not exponents:
        err = abs(vals[0] - vals[1]) if len(grid) > 1 else float("inf")
        return Extrapolated(raw, float(err), 0, raw)
    kmax = min(len(exponents), len(grid) - 2, max_order)
    est = [raw] + [richardson(grid[: K + 1], vals[: K + 1], exponents[:K]) for K in range(1, kmax + 1)]
    best = None
    for K in range(1, kmax + 1):
        lower = richardson(grid[1: K + 2], vals[1: K + 2], exponents[:K])
        err = max(abs(est[K] - est[K - 1]), abs(est[K] - lower))
        if best is None or err < best.error:
            best = Extrapolated(est[K], err, K, raw)
    return best
