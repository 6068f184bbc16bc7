"""Reproducible simulation of the urn process and empirical moment estimates.

Every replication owns an independent PCG64 stream derived from
``(master_seed, rep)`` through :class:`numpy.random.SeedSequence`, so results
do not depend on how replications are split across worker processes.
Replications are advanced in vectorized chunks; each draw of ``m`` balls
consumes exactly ``m`` uniforms from the replication's own stream.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from urnlab.errors import DomainError
from urnlab.model import Sampling, UrnSpec

RNG_NAME = "numpy.PCG64 seeded by SeedSequence(master_seed, spawn_key=(rep,))"
CHUNK = 2048
BLOCK = 256  # steps of uniforms pre-generated per replication at a time


def rep_generator(master_seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(rep,))))


def draw_sample(white: int, total: int, m: int, sampling: Sampling | str, rng: np.random.Generator) -> int:
    """Number of white balls in a sample of ``m`` balls (sequential removals for model M)."""
    sampling = Sampling.parse(sampling)
    if not 0 <= white <= total or total < 1:
        raise DomainError(f"invalid urn state white={white}, total={total}")
    if sampling is Sampling.M and m > total:
        raise DomainError(f"cannot draw {m} balls without replacement from {total}")
    u = rng.random(m)
    return int(_count_white(np.array([white]), total, u[:, None], sampling)[0])


def _count_white(w: np.ndarray, total: int, u: np.ndarray, sampling: Sampling) -> np.ndarray:
    """Vectorized sample: ``u`` has shape ``(m, reps)``, one uniform per ball drawn."""
    k = np.zeros_like(w)
    if sampling is Sampling.R:
        for row in u:
            k += row * total < w
        return k
    left = w.copy()
    for i, row in enumerate(u):
        hit = row * (total - i) < left
        k += hit
        left -= hit
    return k


def _run_chunk(spec: UrnSpec, n: int, master_seed: int, reps: range, keep_path: bool = False) -> np.ndarray:
    """Terminal white counts (or full paths) for a contiguous block of replications."""
    gens = [rep_generator(master_seed, r) for r in reps]
    a = np.asarray(spec.a, dtype=np.int64)
    m = spec.m
    w = np.full(len(gens), spec.w0, dtype=np.int64)
    path = np.empty((len(gens), n + 1), dtype=np.int64) if keep_path else None
    if keep_path:
        path[:, 0] = w
    step = 0
    while step < n:
        block = min(BLOCK, n - step)
        buf = np.empty((len(gens), block * m))
        for row, g in zip(buf, gens):
            g.random(out=row)
        # layout (block, m, reps) so every per-ball row is contiguous
        u = np.ascontiguousarray(buf.T).reshape(block, m, len(gens))
        for j in range(block):
            total = spec.t0 + spec.sigma * step
            k = _count_white(w, total, u[j], spec.sampling)
            w = w + a[m - k]
            step += 1
            if keep_path:
                path[:, step] = w
    return path if keep_path else w


@dataclass(frozen=True)
class Trajectory:
    spec: UrnSpec
    seed: int
    rep: int
    white: tuple[int, ...]

    def check_balance(self) -> bool:
        increments = np.diff(self.white)
        allowed = set(self.spec.a)
        return all(int(x) in allowed for x in increments) and all(w >= 0 for w in self.white)


def simulate_one(spec: UrnSpec, n: int, seed: int, rep: int = 0) -> Trajectory:
    """Trajectory ``W_0..W_n`` of replication ``rep`` under ``seed``; identical to that rep in :func:`estimate_moments`."""
    path = _run_chunk(spec, n, seed, range(rep, rep + 1), keep_path=True)[0]
    return Trajectory(spec, seed, rep, tuple(int(x) for x in path))


def write_trajectories(spec: UrnSpec, n: int, seed: int, count: int, path: str | Path) -> Path:
    """CSV dump with columns ``rep, step, white, black`` for the first ``count`` replications."""
    paths = _run_chunk(spec, n, seed, range(count), keep_path=True)
    path = Path(path)
    with path.open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["rep", "step", "white", "black"])
        for r, row in enumerate(paths):
            for j, w in enumerate(row):
                out.writerow([r, j, int(w), spec.total(j) - int(w)])
    return path


@dataclass
class SimulationSummary:
    spec: UrnSpec
    n: int
    reps: int
    master_seed: int
    s_max: int
    rng: str
    normalized_means: list[float]  # E[(W~_n / n^lam)^s], s = 0..s_max
    standard_errors: list[float]
    mean_white: float
    var_white: float
    skewness: float
    excess_kurtosis: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "n": self.n,
            "reps": self.reps,
            "master_seed": self.master_seed,
            "seed_policy": "per-replication stream from hash(master_seed, rep)",
            "rng": self.rng,
            "moments": [
                {"s": s, "mean": mu, "standard_error": se}
                for s, (mu, se) in enumerate(zip(self.normalized_means, self.standard_errors))
            ],
            "mean_white": self.mean_white,
            "var_white": self.var_white,
            "skewness": self.skewness,
            "excess_kurtosis": self.excess_kurtosis,
        }


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("URNLAB_WORKERS", "1")))
    except ValueError:
        return 1


def terminal_counts(spec: UrnSpec, n: int, reps: int, master_seed: int, workers: int | None = None) -> np.ndarray:
    """``W_n`` for replications ``0..reps-1`` in replication order."""
    workers = default_workers() if workers is None else max(1, workers)
    chunks = [range(lo, min(lo + CHUNK, reps)) for lo in range(0, reps, CHUNK)]
    if workers == 1 or len(chunks) == 1:
        parts = [_run_chunk(spec, n, master_seed, c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [spec] * len(chunks), [n] * len(chunks),
                                  [master_seed] * len(chunks), chunks))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def summarize(spec: UrnSpec, n: int, white: np.ndarray, s_max: int, master_seed: int) -> SimulationSummary:
    reps = len(white)
    if reps < 2:
        raise DomainError("need at least two replications")
    lam, c = float(spec.lam), float(spec.shift)
    x = (white - c * n) / (n**lam if n > 0 else 1.0)
    means, ses = [], []
    for s in range(s_max + 1):
        y = x**s
        mu = float(np.sum(y) / reps)
        means.append(mu)
        ses.append(float(math.sqrt(np.sum((y - mu) ** 2) / (reps - 1) / reps)))
    wf = white.astype(np.float64)
    mean_w = float(np.sum(wf) / reps)
    dev = wf - mean_w
    var_w = float(np.sum(dev**2) / (reps - 1))
    m2 = float(np.sum(dev**2) / reps)
    if m2 > 0:
        skew = float(np.sum(dev**3) / reps) / m2**1.5
        kurt = float(np.sum(dev**4) / reps) / m2**2 - 3.0
    else:
        skew = kurt = 0.0
    return SimulationSummary(spec, n, reps, master_seed, s_max, RNG_NAME, means, ses, mean_w, var_w, skew, kurt)


def estimate_moments(
    spec: UrnSpec,
    n: int,
    reps: int,
    s_max: int,
    master_seed: int,
    workers: int | None = None,
    trajectory_csv: str | Path | None = None,
    trajectory_count: int = 10,
) -> SimulationSummary:
    """Empirical moments of ``W~_n / n^lam`` with standard errors.

    Terminal counts are integers gathered in replication order and reduced
    in one place, so the summary is bit-identical for any ``workers``.
    """
    if reps < 2:
        raise DomainError("need at least two replications")
    white = terminal_counts(spec, n, reps, master_seed, workers)
    summary = summarize(spec, n, white, s_max, master_seed)
    if trajectory_csv is not None:
        write_trajectories(spec, n, master_seed, min(trajectory_count, reps), trajectory_csv)
        summary.extra["trajectory_csv"] = str(trajectory_csv)
    return summary
