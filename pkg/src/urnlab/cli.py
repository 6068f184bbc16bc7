"""Command-line front end: ``urnlab <command> --spec FILE [options]``.

Exit codes: 0 ok, 1 other numerical failure, 2 invalid spec or arguments,
3 unsupported index, 4 slow convergence (report still written, flagged),
5 verification failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from urnlab.errors import SlowConvergence, SpecError, UnsupportedIndex, UrnError
from urnlab.limits import limit_report
from urnlab.model import UrnSpec, load_spec, swap_colors
from urnlab.moments import shifted_moment_table
from urnlab.montecarlo import default_workers, estimate_moments
from urnlab.serialize import (
    classify_record,
    dumps,
    limits_csv,
    limits_record,
    moments_csv,
    moments_record,
)
from urnlab.verify import corrupt, run_suites

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SPEC = 2
EXIT_UNSUPPORTED = 3
EXIT_SLOW = 4
EXIT_VERIFY = 5

COMMANDS = ("classify", "moments", "limits", "simulate", "verify", "report")


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec_path: Path | None
    n: int
    s_max: int
    reps: int
    seed: int
    tol: float
    n_max: int
    fmt: str
    out: Path | None
    swap_colors: bool
    workers: int
    trajectories: Path | None = None
    inject_fault: tuple[int, int, int] | None = None

    def __post_init__(self):
        if self.tol <= 0:
            raise SpecError("--tol must be positive")
        if self.s_max < 1:
            raise SpecError("--smax must be >= 1")
        if self.fmt not in ("json", "csv"):
            raise SpecError("--format must be json or csv")
        if self.n < 0 or self.reps < 2 or self.n_max < 16 or self.workers < 1:
            raise SpecError("--n must be >= 0, --reps >= 2, --nmax >= 16, --workers >= 1")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="urnlab", description="Moments of affine balanced urns with multiple drawings.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--spec", type=Path, help="spec JSON file (verify defaults to the built-in grid)")
    p.add_argument("--n", type=int, default=None, help="number of steps")
    p.add_argument("--smax", type=int, default=None, help="largest moment order (default 3, verify 4)")
    p.add_argument("--reps", type=int, default=10_000, help="Monte Carlo replications")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--tol", type=float, default=1e-8, help="relative tolerance for limit moments")
    p.add_argument("--nmax", type=int, default=2**20, help="largest series truncation index")
    p.add_argument("--format", dest="fmt", default="json", help="json or csv")
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default $URNLAB_WORKERS or 1)")
    p.add_argument("--swap-colors", action="store_true", help="relabel black as white before computing")
    p.add_argument("--trajectories", type=Path, help="simulate: also dump the first trajectories as CSV")
    p.add_argument("--inject-fault", default=None, help=argparse.SUPPRESS)
    return p


def _default_n(command: str) -> int:
    return {"simulate": 2000, "verify": 6}.get(command, 10)


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    fault = None
    if ns.inject_fault:
        try:
            fault = tuple(int(x) for x in ns.inject_fault.split(","))
            assert len(fault) == 3
        except (ValueError, AssertionError):
            raise SpecError("--inject-fault expects n,s,r") from None
    return RunConfig(
        command=ns.command,
        spec_path=ns.spec,
        n=_default_n(ns.command) if ns.n is None else ns.n,
        s_max=(4 if ns.command == "verify" else 3) if ns.smax is None else ns.smax,
        reps=ns.reps,
        seed=ns.seed,
        tol=ns.tol,
        n_max=ns.nmax,
        fmt=ns.fmt,
        out=ns.out,
        swap_colors=ns.swap_colors,
        workers=default_workers() if ns.workers is None else ns.workers,
        trajectories=ns.trajectories,
        inject_fault=fault,
    )


def _spec(config: RunConfig) -> UrnSpec:
    if config.spec_path is None:
        raise SpecError(f"{config.command} requires --spec")
    spec = load_spec(config.spec_path)
    return swap_colors(spec) if config.swap_colors else spec


def cmd_classify(config: RunConfig) -> tuple[str, int]:
    return dumps(classify_record(_spec(config))), EXIT_OK


def cmd_moments(config: RunConfig) -> tuple[str, int]:
    table = shifted_moment_table(_spec(config), config.n, config.s_max)
    text = moments_csv(table) if config.fmt == "csv" else dumps(moments_record(table))
    return text, EXIT_OK


def cmd_limits(config: RunConfig) -> tuple[str, int]:
    report = limit_report(_spec(config), config.s_max, tol=config.tol, n_max=config.n_max)
    text = limits_csv(report) if config.fmt == "csv" else dumps(limits_record(report))
    return text, EXIT_OK if report.converged else EXIT_SLOW


def cmd_simulate(config: RunConfig) -> tuple[str, int]:
    summary = estimate_moments(
        _spec(config), config.n, config.reps, config.s_max, config.seed,
        workers=config.workers, trajectory_csv=config.trajectories,
    )
    return dumps(summary.to_dict()), EXIT_OK


def cmd_verify(config: RunConfig) -> tuple[str, int]:
    specs = None
    if config.spec_path is not None:
        spec = _spec(config)
        specs = {config.spec_path.stem: spec}
    f = corrupt(config.inject_fault) if config.inject_fault else None
    report = run_suites(specs, n=config.n, s_max=config.s_max, f=f)
    for r in report.failures:
        print(f"FAIL {r.name} [{r.spec}]: {r.detail}", file=sys.stderr)
    return dumps(report.to_dict()), EXIT_OK if report.passed else EXIT_VERIFY


def cmd_report(config: RunConfig) -> tuple[str, int]:
    """Classification, exact moments, limits (when defined) and a simulation in one JSON document."""
    spec = _spec(config)
    code = EXIT_OK
    out: dict = {"classification": classify_record(spec)}
    try:
        out["moments"] = moments_record(shifted_moment_table(spec, config.n, config.s_max))
    except UnsupportedIndex as exc:
        out["moments"] = {"unsupported": str(exc)}
    try:
        report = limit_report(spec, config.s_max, tol=config.tol, n_max=config.n_max)
        out["limits"] = limits_record(report)
        if not report.converged:
            code = EXIT_SLOW
    except UnsupportedIndex as exc:
        out["limits"] = {"unsupported": str(exc)}
    sim_n = max(config.n, 1)
    out["simulation"] = estimate_moments(spec, sim_n, config.reps, config.s_max, config.seed,
                                         workers=config.workers).to_dict()
    return dumps(out), code


HANDLERS = {
    "classify": cmd_classify,
    "moments": cmd_moments,
    "limits": cmd_limits,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "report": cmd_report,
}


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = config_from_args(ns)
        text, code = HANDLERS[config.command](config)
    except SpecError as exc:
        print(f"urnlab: invalid spec: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except UnsupportedIndex as exc:
        print(f"urnlab: unsupported index: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except SlowConvergence as exc:
        print(f"urnlab: slow convergence: {exc}", file=sys.stderr)
        return EXIT_SLOW
    except UrnError as exc:
        print(f"urnlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    _emit(text, config.out)
    if code == EXIT_SLOW:
        print("urnlab: limit series did not reach the tolerance; see the converged flags", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
