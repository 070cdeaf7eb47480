"""Synthetic POS-tagging-like data and the runtime sweep.

The generator draws sentence lengths and per-sentence accuracies from
normal distributions whose moments match Stanza's English UD POS tagging
results (accuracy 0.9543 +/- 0.1116, length 12.08 +/- 10.60).
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO

import numpy as np

from .convolution import ConvolutionEngine
from .errors import InvalidInputError, PermTestError
from .runner import exact_perm_test, monte_carlo
from .statistics import TWO_TAILED, PairedDataset, accuracy_diff_statistic

log = logging.getLogger(__name__)

CSV_FIELDS = ("method", "n", "k", "trial", "elapsed_ms", "p_value")


@dataclass(frozen=True)
class BenchConfig:
    n_values: Sequence[int] = tuple(range(1000, 10001, 1000))
    mc_sample_counts: Sequence[int] = (5000, 10000, 20000, 40000)
    trials: int = 1
    seed: int = 0
    acc_mean: float = 0.9543
    acc_std: float = 0.1116
    len_mean: float = 12.08
    len_std: float = 10.60
    correlation: float = 0.0
    tails: str = TWO_TAILED
    fft_base_case_threshold: int = 32
    output_path: Optional[str] = None

    def __post_init__(self):
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise InvalidInputError("n_values must be positive")
        if any(k < 1 for k in self.mc_sample_counts):
            raise InvalidInputError("mc_sample_counts must be positive")
        if self.trials < 1:
            raise InvalidInputError("trials must be >= 1")
        if not -1.0 <= self.correlation <= 1.0:
            raise InvalidInputError("correlation must lie in [-1, 1]")
        if self.acc_std < 0 or self.len_std < 0:
            raise InvalidInputError("standard deviations must be non-negative")


def generate_synthetic(n: int, config: BenchConfig = BenchConfig(), seed: int = 0) -> PairedDataset:
    """Two independent (by default) system outputs over ``n`` shared sentences.

    Lengths are rounded to the nearest integer and clamped to at least 1;
    accuracies are clamped to [0, 1] before scaling by the length.
    ``config.correlation`` couples the two systems' accuracy draws.
    """
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    lengths = np.maximum(np.rint(rng.normal(config.len_mean, config.len_std, n)), 1).astype(np.int64)
    z_u, z_v = rng.standard_normal((2, n))
    rho = config.correlation
    z_v = rho * z_u + math.sqrt(1.0 - rho * rho) * z_v
    acc_u = np.clip(config.acc_mean + config.acc_std * z_u, 0.0, 1.0)
    acc_v = np.clip(config.acc_mean + config.acc_std * z_v, 0.0, 1.0)
    correct_u = np.rint(acc_u * lengths).astype(np.int64)
    correct_v = np.rint(acc_v * lengths).astype(np.int64)
    return PairedDataset.from_counts(correct_u, correct_v, lengths)


@dataclass(frozen=True)
class BenchRow:
    method: str
    n: int
    k: Optional[int]
    trial: int
    elapsed_ms: float
    p_value: float

    def as_csv(self) -> List[str]:
        return [
            self.method,
            str(self.n),
            "" if self.k is None else str(self.k),
            str(self.trial),
            "" if math.isnan(self.elapsed_ms) else f"{self.elapsed_ms:.3f}",
            repr(self.p_value),
        ]


def _cell(method, n, k, trial, run) -> BenchRow:
    try:
        report = run()
    except PermTestError as exc:
        log.warning("%s n=%d k=%s trial=%d failed: %s", method, n, k, trial, exc)
        return BenchRow(method, n, k, trial, math.nan, math.nan)
    return BenchRow(method, n, k, trial, report.elapsed * 1000.0, report.p_value)


def warm_up(engines=(), stat=None) -> None:
    """Run every code path once on a tiny input so JIT loading is not timed."""
    stat = stat or accuracy_diff_statistic()
    data = PairedDataset.from_counts([1, 0, 2] * 20, [0, 1, 1] * 20, [2] * 60)
    for engine in engines or (ConvolutionEngine("dp"), ConvolutionEngine("fft")):
        exact_perm_test(data, stat, engine)
    monte_carlo(data, stat, 10, 0)


def run_benchmark(config: BenchConfig) -> List[BenchRow]:
    """Time exact-dp, exact-fft and Monte Carlo on the same data per size.

    Timings come from the runners themselves, so data generation is never
    included. Failures are recorded as NaN cells instead of stopping the sweep.
    """
    stat = accuracy_diff_statistic(config.tails)
    dp = ConvolutionEngine("dp")
    fft = ConvolutionEngine("fft", fft_base_case_threshold=config.fft_base_case_threshold)
    warm_up((dp, fft), stat)
    rows = []
    for n in config.n_values:
        data = generate_synthetic(n, config, seed=config.seed + n)
        for trial in range(config.trials):
            rows.append(_cell("exact-dp", n, None, trial, lambda: exact_perm_test(data, stat, dp)))
            rows.append(_cell("exact-fft", n, None, trial, lambda: exact_perm_test(data, stat, fft)))
            for k in config.mc_sample_counts:
                seed = config.seed + trial
                rows.append(
                    _cell("monte-carlo", n, k, trial, lambda: monte_carlo(data, stat, k, seed))
                )
            log.info("n=%d trial=%d done", n, trial)
    return rows


def write_csv(rows: Sequence[BenchRow], fh: TextIO) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(row.as_csv())


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()
