"""Verification suites: exact identities checked against independent oracles.

Each check returns a :class:`CheckResult`; :func:`run_suites` bundles them
into a :class:`VerificationReport`.  An ``f`` override can be passed to
inject a corrupted recurrence coefficient as a negative control.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Iterable

from urnlab.errors import SizeLimit, UrnError
from urnlab.model import Sampling, UrnSpec, build_spec
from urnlab.moments import (
    MAX_EXACT_STEPS,
    distribution_oracle,
    f_coeff,
    martingale_residuals,
    mean_white,
    mean_white_general,
    shifted_moment_table,
)
from urnlab.phi import phi_explicit, phi_recursive
from urnlab.polynomials import build_poly, find_negated_roots

# (label, m, sigma, a_{m-1}, a_m, w0, b0, model)
GRID_PARAMS = (
    ("polya-m1", 1, 1, 1, 0, 1, 1, "M"),
    ("triangular-m2", 2, 4, 1, 0, 1, 3, "M"),
    ("large-m2-R", 2, 7, 3, 1, 4, 3, "R"),
    ("large-m2-M", 2, 7, 3, 1, 4, 3, "M"),
    ("critical-m2", 2, 4, 2, 1, 2, 2, "M"),
    ("small-m3-M", 3, 3, 0, 1, 3, 3, "M"),
    ("small-m3-R", 3, 12, 3, 2, 2, 3, "R"),
    ("gen-polya-m2", 2, 4, 2, 0, 1, 2, "R"),
    ("large-m3-M", 3, 8, 3, 1, 2, 3, "M"),
)


def default_grid() -> dict[str, UrnSpec]:
    return {p[0]: build_spec(*p[1:]) for p in GRID_PARAMS}


@dataclass(frozen=True)
class CheckResult:
    name: str
    spec: str
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": r.name, "spec": r.spec, "passed": r.passed, "detail": r.detail} for r in self.results],
        }


def _guard(name: str, label: str, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    try:
        ok, detail = fn()
    except SizeLimit as exc:
        return CheckResult(name, label, False, f"SizeLimit: {exc}")
    except UrnError as exc:
        return CheckResult(name, label, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, label, ok, detail)


def check_oracle_equality(spec: UrnSpec, N: int = 6, S: int = 4, f=None) -> tuple[bool, str]:
    """Raw moments from the recurrence equal the exact-law moments."""
    if N > MAX_EXACT_STEPS:
        raise SizeLimit(f"oracle equality requested at n = {N} beyond exact bound {MAX_EXACT_STEPS}")
    table = shifted_moment_table(spec, N, S, f=f)
    for n in range(N + 1):
        pmf = distribution_oracle(spec, n)
        for s in range(S + 1):
            got, want = table.raw(n, s), pmf.moment(s)
            if got != want:
                return False, f"n={n} s={s}: recurrence {got} != oracle {want}"
    return True, f"n<={N}, s<={S}"


def check_mean(spec: UrnSpec, N: int = 200, N_oracle: int = 6, f=None) -> tuple[bool, str]:
    """Closed-form mean against the summation form, the recurrence and the oracle."""
    table = shifted_moment_table(spec, N, 1, f=f)
    for n in range(N + 1):
        closed = mean_white(n, spec)
        if closed != mean_white_general(n, spec) or closed != table.raw(n, 1):
            return False, f"n={n}: closed form {closed} disagrees"
    for n in range(N_oracle + 1):
        if mean_white(n, spec) != distribution_oracle(spec, n).moment(1):
            return False, f"n={n}: closed form disagrees with oracle"
    return True, f"n<={N}"


def check_triangular_mean(spec: UrnSpec, N: int = 200) -> tuple[bool, str]:
    """``E[W_n] = W0 (n sigma + T0) / T0`` for ``a_m = 0``."""
    for n in range(N + 1):
        got = mean_white(n, spec)
        want = Fraction(spec.w0 * (n * spec.sigma + spec.t0), spec.t0)
        if got != want:
            return False, f"n={n}: E[W_n] = {got} but W0(n sigma + T0)/T0 = {want} (lambda = {spec.lam})"
    return True, f"n<={N}"


def check_martingale(spec: UrnSpec, N: int = 5) -> tuple[bool, str]:
    for n in range(1, N + 1):
        for w, defect in martingale_residuals(spec, n):
            if defect != 0:
                return False, f"n={n}, w={w}: defect {defect}"
    return True, f"n<={N}"


def check_f_spot(spec: UrnSpec, N: int = 100, S: int = 4, f=None) -> tuple[bool, str]:
    """Closed forms of ``f_{n,1,1}``, ``f_{n,1,0}`` and vanishing ``f_{n,s,0}`` for ``a_m = 0``."""
    f = f or f_coeff
    lam, sigma = spec.lam, spec.sigma
    for n in range(1, N + 1):
        t = spec.total(n - 1)
        if f(n, 1, 1, spec) != 1 + sigma * lam / t:
            return False, f"f_({n},1,1) mismatch"
        if spec.a_m != 0:
            want = -spec.a_m * lam * spec.t0 / ((1 - lam) * t)
            if f(n, 1, 0, spec) != want:
                return False, f"f_({n},1,0) = {f(n, 1, 0, spec)} != {want}"
        else:
            for s in range(1, S + 1):
                if f(n, s, 0, spec) != 0:
                    return False, f"f_({n},{s},0) != 0 for a_m = 0"
    return True, f"n<={N}"


def check_roots(spec: UrnSpec, S: int = 6, tol_sum: float = 1e-9, tol_rec: float = 1e-10) -> tuple[bool, str]:
    """Root-sum identity and reconstruction of the monic polynomials."""
    lam, sigma, t0 = spec.lam, spec.sigma, spec.t0
    worst = 0.0
    for s in range(1, S + 1):
        roots = find_negated_roots(build_poly(s, spec), check_poles=False)
        if spec.sampling is Sampling.M:
            star = min(s, spec.m)
            want = Fraction(star * t0 - comb(star, 2), sigma) + lam * s
        else:
            want = Fraction(s * t0, sigma) + lam * s
        got = sum(roots.values)
        err = abs(got - float(want))
        if err > tol_sum or abs(got.imag) > tol_sum:
            return False, f"s={s}: root sum {got} != {want}"
        rec = roots.reconstruction_error()
        if rec > tol_rec:
            return False, f"s={s}: reconstruction error {rec:.2e}"
        worst = max(worst, err, rec)
    return True, f"s<={S}, worst deviation {worst:.1e}"


def check_phi(spec: UrnSpec, N: int = 6, S: int = 4, f=None) -> tuple[bool, str]:
    """Explicit lattice-path coefficients against the recurrence, and moment reconstruction."""
    table = phi_recursive(spec, N, S, f=f)
    moments = shifted_moment_table(spec, N, S, f=f)
    F = f or f_coeff
    for n in range(N + 1):
        for s in range(S + 1):
            if s and table(n, s, s) != _prod(F(j, s, s, spec) for j in range(1, n + 1)):
                return False, f"phi_({n},{s},{s}) is not the diagonal product"
            if table.moment(n, s) != moments.shifted(n, s):
                return False, f"n={n}, s={s}: sum phi w0^k != table entry"
            for k in range(s + 1):
                if phi_explicit(n, s, k, spec, f=f) != table(n, s, k):
                    return False, f"phi_({n},{s},{k}): explicit != recursive"
    if spec.a_m == 0 and any(table(n, s, 0) for n in range(1, N + 1) for s in range(1, S + 1)):
        return False, "nonzero constant term for a_m = 0"
    return True, f"n<={N}, s<={S}"


def _prod(values: Iterable[Fraction]) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


SUITES = ("oracle", "mean", "martingale", "f-spot", "roots", "phi")


def run_suites(
    specs: dict[str, UrnSpec] | None = None,
    suites: Iterable[str] = SUITES,
    n: int = 6,
    s_max: int = 4,
    f=None,
) -> VerificationReport:
    """Run the selected suites on ``specs`` (default grid).  ``f`` overrides the recurrence coefficients."""
    specs = default_grid() if specs is None else specs
    suites = tuple(suites)
    report = VerificationReport()
    for label, spec in specs.items():
        shiftable = not (spec.a_m != 0 and spec.lam >= 1)
        if "oracle" in suites and shiftable:
            report.results.append(_guard("oracle", label, lambda: check_oracle_equality(spec, n, s_max, f)))
        if "mean" in suites and shiftable:
            report.results.append(_guard("mean", label, lambda: check_mean(spec, f=f)))
            # the W0 (n sigma + T0) / T0 form is exact only at lam = 1
            if spec.a_m == 0 and spec.lam == 1:
                report.results.append(_guard("triangular-mean", label, lambda: check_triangular_mean(spec)))
        if "martingale" in suites:
            report.results.append(_guard("martingale", label, lambda: check_martingale(spec, min(n, 5))))
        if "f-spot" in suites and shiftable:
            report.results.append(_guard("f-spot", label, lambda: check_f_spot(spec, f=f)))
        if "roots" in suites:
            report.results.append(_guard("roots", label, lambda: check_roots(spec)))
        if "phi" in suites and shiftable:
            report.results.append(_guard("phi", label, lambda: check_phi(spec, min(n, 6), s_max, f)))
    return report


def corrupt(target: tuple[int, int, int], delta: Fraction = Fraction(1, 10**6)):
    """An ``f`` override that perturbs one coefficient ``f_{n,s,r}`` (negative control)."""

    def f(n, s, r, spec):
        base = f_coeff(n, s, r, spec)
        return base + delta if (n, s, r) == target else base

    return f
