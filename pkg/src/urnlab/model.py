"""Affine balanced two-color urn specifications.

An urn draws ``m`` balls per step.  When the sample holds ``m - k`` white
balls, ``a[k]`` white and ``b[k] = sigma - a[k]`` black balls are added.
Only the last two entries of the white column are free; the rest of the
column is forced by the affine condition ``a[k] = (m - k) * delta + a[m]``
with ``delta = a[m-1] - a[m]``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

from urnlab.errors import BalanceViolation, InitialCountTooSmall, SpecError, TenabilityViolation


class Sampling(enum.Enum):
    """Sampling model for the ``m`` balls of one draw."""

    M = "M"  # without replacement
    R = "R"  # with replacement

    @classmethod
    def parse(cls, value: "Sampling | str") -> "Sampling":
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper()
        aliases = {"M": cls.M, "MODELM": cls.M, "R": cls.R, "MODELR": cls.R}
        try:
            return aliases[key]
        except KeyError:
            raise SpecError(f"unknown sampling model {value!r} (expected 'M' or 'R')") from None


class UrnClass(enum.Enum):
    SMALL = "Small"
    CRITICAL = "Critical"
    LARGE = "Large"
    TRIANGULAR = "Triangular"
    POLYA = "Polya"
    TRIANGULAR_BLACK = "TriangularBlack"


@dataclass(frozen=True)
class TenabilityReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class UrnSpec:
    """Immutable description of an affine balanced urn.

    Construct through :func:`build_spec` or :func:`spec_from_column`; the raw
    constructor performs no validation so that :func:`validate_tenability`
    can report on arbitrary columns.
    """

    m: int
    sigma: int
    a: tuple[int, ...]
    w0: int
    b0: int
    sampling: Sampling
    b: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "b", tuple(self.sigma - x for x in self.a))
        object.__setattr__(self, "sampling", Sampling.parse(self.sampling))

    @property
    def t0(self) -> int:
        return self.w0 + self.b0

    @property
    def a_m(self) -> int:
        return self.a[self.m]

    @property
    def delta(self) -> int:
        """Common difference ``a[m-1] - a[m]`` of the white column."""
        return self.a[self.m - 1] - self.a[self.m]

    @cached_property
    def lam(self) -> Fraction:
        """Urn index, kept exact so that the critical boundary is decided exactly."""
        return Fraction(self.m * self.delta, self.sigma)

    @cached_property
    def shift(self) -> Fraction:
        """Per-step centering ``a_m / (1 - lam)``; zero whenever ``a_m == 0``."""
        if self.a_m == 0:
            return Fraction(0)
        if self.lam == 1:
            raise ZeroDivisionError("shift undefined for a_m != 0 and index 1")
        return Fraction(self.a_m) / (1 - self.lam)

    @cached_property
    def urn_class(self) -> UrnClass:
        return classify(self)

    def total(self, n: int) -> int:
        """Deterministic ball count after ``n`` draws."""
        return self.t0 + self.sigma * n

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "sigma": self.sigma,
            "a_m_minus_1": self.a[self.m - 1],
            "a_m": self.a_m,
            "w0": self.w0,
            "b0": self.b0,
            "model": self.sampling.value,
        }

    def describe(self) -> dict:
        lam = self.lam
        return {
            **self.to_dict(),
            "a": list(self.a),
            "b": list(self.b),
            "lambda": f"{lam.numerator}/{lam.denominator}" if lam.denominator != 1 else str(lam.numerator),
            "lambda_decimal": float(lam),
            "class": self.urn_class.value,
        }


def affine_column(m: int, a_m_minus_1: int, a_m: int) -> tuple[int, ...]:
    delta = a_m_minus_1 - a_m
    return tuple((m - k) * delta + a_m for k in range(m + 1))


def validate_tenability(spec: UrnSpec) -> TenabilityReport:
    """List every tenability inequality violated by ``spec``.

    Model M may remove at most the drawn balls of each color; model R can only
    rely on one drawn ball of a color being present, and on none when the
    sample shows no ball of that color.
    """
    m, a, b = spec.m, spec.a, spec.b
    bad = []
    if spec.sampling is Sampling.M:
        for k in range(m + 1):
            if a[k] < -(m - k):
                bad.append(f"a_{k} >= {-(m - k)} (a_{k} = {a[k]})")
        for k in range(m + 1):
            if b[k] < -k:
                bad.append(f"b_{k} >= {-k} (b_{k} = {b[k]})")
    else:
        for k in range(m):
            if a[k] < -1:
                bad.append(f"a_{k} >= -1 (a_{k} = {a[k]})")
        if a[m] < 0:
            bad.append(f"a_m >= 0 (a_{m} = {a[m]})")
        if b[0] < 0:
            bad.append(f"b_0 >= 0 (b_0 = {b[0]})")
        for k in range(1, m + 1):
            if b[k] < -1:
                bad.append(f"b_{k} >= -1 (b_{k} = {b[k]})")
    return TenabilityReport(tuple(bad))


def classify(spec: UrnSpec) -> UrnClass:
    if spec.a_m == 0:
        return UrnClass.TRIANGULAR if spec.b[0] > 0 else UrnClass.POLYA
    if spec.b[0] == 0:
        return UrnClass.TRIANGULAR_BLACK
    half = Fraction(1, 2)
    if spec.lam < half:
        return UrnClass.SMALL
    if spec.lam == half:
        return UrnClass.CRITICAL
    return UrnClass.LARGE


def _check(spec: UrnSpec, validate: bool) -> UrnSpec:
    if spec.m < 1:
        raise SpecError(f"sample size m must be >= 1, got {spec.m}")
    if spec.sigma < 1:
        raise SpecError(f"balance sigma must be >= 1, got {spec.sigma}")
    if spec.w0 < 0 or spec.b0 < 0:
        raise SpecError("initial counts must be nonnegative")
    if spec.t0 < spec.m:
        raise InitialCountTooSmall(f"t0 = {spec.t0} < m = {spec.m}")
    if any(x + y != spec.sigma for x, y in zip(spec.a, spec.b)):
        raise BalanceViolation("a_k + b_k != sigma")
    if validate:
        report = validate_tenability(spec)
        if not report.ok:
            raise TenabilityViolation(report.violations)
    return spec


def build_spec(
    m: int,
    sigma: int,
    a_m_minus_1: int,
    a_m: int,
    w0: int,
    b0: int,
    sampling: Sampling | str,
    *,
    validate: bool = True,
) -> UrnSpec:
    """Build a spec from the two free entries of the white column.

    >>> build_spec(2, 7, 3, 1, 4, 3, "R").a
    (5, 3, 1)
    """
    for name, value in (("m", m), ("sigma", sigma), ("a_m_minus_1", a_m_minus_1),
                        ("a_m", a_m), ("w0", w0), ("b0", b0)):
        if isinstance(value, bool) or int(value) != value:
            raise SpecError(f"{name} must be an integer, got {value!r}")
    m = int(m)
    if m < 1:
        raise SpecError(f"sample size m must be >= 1, got {m}")
    spec = UrnSpec(m, int(sigma), affine_column(m, int(a_m_minus_1), int(a_m)), int(w0), int(b0), sampling)
    return _check(spec, validate)


def spec_from_column(
    a: Sequence[int], sigma: int, w0: int, b0: int, sampling: Sampling | str, *, validate: bool = True
) -> UrnSpec:
    """Accept a full white column, rejecting anything that is not affine."""
    a = tuple(int(x) for x in a)
    if len(a) < 2:
        raise SpecError("column must have at least two entries")
    m = len(a) - 1
    if a != affine_column(m, a[m - 1], a[m]):
        raise SpecError(f"column {list(a)} violates the affine condition")
    return _check(UrnSpec(m, int(sigma), a, int(w0), int(b0), sampling), validate)


def swap_colors(spec: UrnSpec) -> UrnSpec:
    """Relabel black as white; index and balance are preserved."""
    return _check(UrnSpec(spec.m, spec.sigma, tuple(reversed(spec.b)), spec.b0, spec.w0, spec.sampling), True)


SPEC_KEYS = ("m", "sigma", "a_m_minus_1", "a_m", "w0", "b0", "model")


def spec_from_mapping(data: dict) -> UrnSpec:
    if not isinstance(data, dict):
        raise SpecError("spec must be a JSON object")
    unknown = sorted(set(data) - set(SPEC_KEYS))
    if unknown:
        raise SpecError(f"unknown spec keys: {', '.join(unknown)}")
    missing = [k for k in SPEC_KEYS if k not in data]
    if missing:
        raise SpecError(f"missing spec keys: {', '.join(missing)}")
    if data["model"] not in ("M", "R"):
        raise SpecError(f"model must be 'M' or 'R', got {data['model']!r}")
    return build_spec(data["m"], data["sigma"], data["a_m_minus_1"], data["a_m"],
                      data["w0"], data["b0"], data["model"])


def load_spec(path: str | Path) -> UrnSpec:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise SpecError(f"{path}: {exc.strerror or exc}") from exc
    return spec_from_mapping(data)
