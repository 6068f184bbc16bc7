"""Exact and asymptotic moments of affine balanced two-color urns with multiple drawings."""

from __future__ import annotations

from urnlab.errors import (
    BalanceViolation,
    ConvergenceFailure,
    DomainError,
    InitialCountTooSmall,
    NearIntegerPole,
    PoleError,
    PrecisionLoss,
    SizeLimit,
    SlowConvergence,
    SpecError,
    TenabilityViolation,
    UnsupportedIndex,
    UrnError,
)
from urnlab.limits import LimitEstimate, LimitMomentReport, gamma_prefactor, limit_E, limit_report, limit_W_infinity_moments
from urnlab.model import Sampling, UrnClass, UrnSpec, build_spec, classify, load_spec, swap_colors, validate_tenability
from urnlab.moments import (
    ExactPmf,
    MomentTable,
    distribution_oracle,
    f_coeff,
    g_factor,
    mean_white,
    oracle_moment,
    raw_moment,
    shifted_moment_table,
)
from urnlab.montecarlo import SimulationSummary, Trajectory, draw_sample, estimate_moments, simulate_one
from urnlab.phi import PhiTable, phi_explicit, phi_recursive, phi_simplex, phi_tilde
from urnlab.polynomials import MonicPolynomial, RootSet, build_P, build_Q, find_negated_roots

__version__ = "0.1.0"

__all__ = [
    "BalanceViolation",
    "ConvergenceFailure",
    "DomainError",
    "InitialCountTooSmall",
    "NearIntegerPole",
    "PoleError",
    "PrecisionLoss",
    "SizeLimit",
    "SlowConvergence",
    "SpecError",
    "TenabilityViolation",
    "UnsupportedIndex",
    "UrnError",
    "LimitEstimate",
    "LimitMomentReport",
    "gamma_prefactor",
    "limit_E",
    "limit_report",
    "limit_W_infinity_moments",
    "Sampling",
    "UrnClass",
    "UrnSpec",
    "build_spec",
    "classify",
    "load_spec",
    "swap_colors",
    "validate_tenability",
    "ExactPmf",
    "MomentTable",
    "distribution_oracle",
    "f_coeff",
    "g_factor",
    "mean_white",
    "oracle_moment",
    "raw_moment",
    "shifted_moment_table",
    "SimulationSummary",
    "Trajectory",
    "draw_sample",
    "estimate_moments",
    "simulate_one",
    "PhiTable",
    "phi_explicit",
    "phi_recursive",
    "phi_simplex",
    "phi_tilde",
    "MonicPolynomial",
    "RootSet",
    "build_P",
    "build_Q",
    "find_negated_roots",
]
