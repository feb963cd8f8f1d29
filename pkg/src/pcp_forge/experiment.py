"""Seeded Monte Carlo estimation with deterministic block partitioning.

Trials are cut into fixed-size blocks and block ``b`` always draws from the
stream ``(seed, b)``. Workers only decide who runs which block, so the counts
do not depend on the worker count.
"""

from __future__ import annotations

import csv
import io
import json
import math
import multiprocessing as mp
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Hashable

from .rng import make_rng

BLOCK_SIZE = 1000
Z99 = 2.5758293035489004

_TASK: Callable | None = None


def _run_block(args) -> Counter:
    trial, seed, b, n = args
    if trial is None:
        trial = _TASK
    rng = make_rng(seed, b)
    out: Counter = Counter()
    for _ in range(n):
        out[trial(rng)] += 1
    return out


def _blocks(trials: int):
    b = 0
    start = 0
    while start < trials:
        n = min(BLOCK_SIZE, trials - start)
        yield b, n
        b += 1
        start += n


def run_trials(trial: Callable[[Any], Hashable], trials: int, seed: int, workers: int = 1) -> Counter:
    """Run ``trial(rng)`` ``trials`` times and tally the returned outcomes."""
    global _TASK
    if trials < 1:
        raise ValueError("trials must be >= 1")
    blocks = list(_blocks(trials))
    total: Counter = Counter()
    if workers <= 1 or len(blocks) == 1:
        for b, n in blocks:
            total.update(_run_block((trial, seed, b, n)))
        return total
    # the trial closure reaches the children through fork, not pickling
    _TASK = trial
    try:
        ctx = mp.get_context("fork")
        with ctx.Pool(workers) as pool:
            parts = pool.map(_run_block, [(None, seed, b, n) for b, n in blocks], chunksize=1)
    finally:
        _TASK = None
    for p in parts:
        total.update(p)
    return total


def wilson_interval(successes: int, n: int, z: float = Z99) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass
class ExperimentReport:
    """A Monte Carlo frequency with its standard error and 99% interval.

    ``stderr`` is the plug-in binomial error sqrt(p(1-p)/n). The interval is
    the Wilson score interval, which stays honest when p is near 0 or 1.
    """

    test: str
    params: dict
    trials: int
    seed: int
    successes: int
    estimate: float
    stderr: float
    ci_lo: float
    ci_hi: float
    bound: float | None = None
    exact: float | None = None
    passed: bool | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, test: str, params: dict, successes: int, trials: int, seed: int, **kw) -> "ExperimentReport":
        p = successes / trials
        se = math.sqrt(p * (1 - p) / trials)
        lo, hi = wilson_interval(successes, trials)
        return cls(test, dict(params), trials, seed, successes, p, se, lo, hi, **kw)

    def ci_contains(self, value: float) -> bool:
        return self.ci_lo - 1e-12 <= value <= self.ci_hi + 1e-12

    def within_sigma(self, value: float, k: float = 3.0) -> bool:
        se = self.stderr
        if se == 0:
            # a degenerate sample: fall back to the one-observation resolution
            se = 1.0 / self.trials
        return abs(self.estimate - value) <= k * se + 1e-12

    def row(self) -> dict:
        return {
            "test": self.test,
            "params": json.dumps(self.params, sort_keys=True),
            "trials": self.trials,
            "seed": self.seed,
            "estimate": f"{self.estimate:.10g}",
            "stderr": f"{self.stderr:.10g}",
            "ci_lo": f"{self.ci_lo:.10g}",
            "ci_hi": f"{self.ci_hi:.10g}",
            "bound": "" if self.bound is None else f"{self.bound:.10g}",
            "exact": "" if self.exact is None else f"{self.exact:.10g}",
            "passed": "" if self.passed is None else str(bool(self.passed)).lower(),
        }

    def to_dict(self) -> dict:
        return asdict(self)


CSV_COLUMNS = ["test", "params", "trials", "seed", "estimate", "stderr", "ci_lo", "ci_hi", "bound", "exact", "passed"]


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


def estimate(
    test: str,
    trial: Callable[[Any], bool],
    trials: int,
    seed: int,
    params: dict | None = None,
    workers: int = 1,
    **kw,
) -> ExperimentReport:
    counts = run_trials(trial, trials, seed, workers)
    return ExperimentReport.from_counts(test, params or {}, counts[True], trials, seed, **kw)


def joint_within_sigma(a: ExperimentReport, b: ExperimentReport, k: float = 3.0) -> bool:
    """|p_a - p_b| <= k * sqrt(se_a^2 + se_b^2), with a one-count floor."""
    se = math.sqrt(a.stderr**2 + b.stderr**2)
    floor = 1.0 / min(a.trials, b.trials)
    return abs(a.estimate - b.estimate) <= k * max(se, floor) + 1e-12
