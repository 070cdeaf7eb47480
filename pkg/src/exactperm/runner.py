"""Paired-permutation test procedures.

Every procedure returns a ``TestReport``. ``exact_perm_test`` convolves the
local PMFs and sums the mass at or above the observed effect;
``monte_carlo`` samples stay/swap assignments; ``brute_force`` enumerates
all ``2**N`` assignments and is meant as a reference for small N.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .convolution import ConvolutionEngine
from .errors import InvalidInputError, OversizeError
from .statistics import DecomposableStatistic, PairedDataset, effect_batch, local_effects, observed_effect

EXACT_DP = "exact-dp"
EXACT_FFT = "exact-fft"
MONTE_CARLO = "monte-carlo"
BRUTE_FORCE = "brute-force"

REAL_REL_TOL = 1e-12
BRUTE_FORCE_MAX_N = 25


@dataclass(frozen=True)
class TestReport:
    p_value: float
    observed_effect: float
    method: str
    n_entries: int
    mc_samples: Optional[int] = None
    rng_seed: Optional[int] = None
    elapsed: float = 0.0  # seconds

    __test__ = False  # not a pytest class

    def to_dict(self) -> dict:
        return {
            "p_value": self.p_value,
            "observed_effect": self.observed_effect,
            "method": self.method,
            "n": self.n_entries,
            "mc_samples": self.mc_samples,
            "seed": self.rng_seed,
            "elapsed_ms": self.elapsed * 1000.0,
        }


def meets_threshold(values, t_bar: float, integer_valued: bool) -> np.ndarray:
    """Elementwise ``h(xi) >= t_bar``.

    Integer aggregators compare exactly. Real ones get a relative slack of
    1e-12 (floored at an absolute 1e-12) so that the same rational value
    computed along two float paths still counts as a tie.
    """
    values = np.asarray(values)
    if integer_valued:
        return values >= t_bar
    return values >= t_bar - REAL_REL_TOL * max(1.0, abs(t_bar))


def exact_perm_test(
    dataset: PairedDataset,
    stat: DecomposableStatistic,
    engine: Optional[ConvolutionEngine] = None,
) -> TestReport:
    """Exact p-value from the distribution of the summed effect.

    Works for any dimensionality m; for m > 1 the support is an m-dimensional
    grid and ``stat.h`` is evaluated on all of it at once.
    """
    engine = engine or ConvolutionEngine()
    start = time.perf_counter()
    effects = effect_batch(stat, dataset)
    t_bar = observed_effect(stat, effects)
    dist = engine.convolve(effects)

    grid = np.meshgrid(*dist.coordinates(), indexing="ij", sparse=True)
    mask = meets_threshold(stat.h(*grid), t_bar, stat.integer_valued)
    mask = np.broadcast_to(mask, dist.dims)
    p = float(dist.probs[mask].sum())

    # the unswapped assignment always qualifies, so p >= 2**-(random entries)
    n_random = int(np.count_nonzero(effects.two_point()))
    p = min(1.0, max(p, 2.0**-n_random))
    elapsed = time.perf_counter() - start
    return TestReport(p, t_bar, engine.method, len(dataset), elapsed=elapsed)


exact_perm_test_m = exact_perm_test


def _philox_key(seed: int) -> np.ndarray:
    if seed < 0:
        raise InvalidInputError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(seed).generate_state(2, dtype=np.uint64)


def sample_swaps(n: int, seed: int, first: int, count: int) -> np.ndarray:
    """Swap indicators for samples ``first .. first + count - 1``.

    Sample ``k`` reads its own Philox counter range, so the bits for a given
    ``k`` do not depend on how the samples are chunked or scheduled.
    Returns a ``(count, n)`` uint8 array; 1 means swap.
    """
    blocks = -(-n // 256)  # each Philox block yields 4 x 64 = 256 bits
    gen = np.random.Philox(key=_philox_key(seed), counter=first * blocks)
    raw = gen.random_raw(count * 4 * blocks).astype("<u8").reshape(count, 4 * blocks)
    bits = np.unpackbits(raw.view(np.uint8), axis=1, bitorder="little")
    return bits[:, :n]


def monte_carlo(
    dataset: PairedDataset,
    stat: DecomposableStatistic,
    k: int,
    seed: int,
    chunk_cells: int = 1 << 22,
) -> TestReport:
    """Fraction of ``k`` random stay/swap assignments reaching the observed effect."""
    if k < 1:
        raise InvalidInputError(f"number of samples must be positive, got {k}")
    start = time.perf_counter()
    effects = effect_batch(stat, dataset)
    t_bar = observed_effect(stat, effects)
    base = effects.forward.sum(axis=0)
    n = len(effects)

    delta = (effects.backward - effects.forward).astype(np.float64)
    active = np.any(delta != 0, axis=1)
    delta = delta[active]

    chunk = max(1, chunk_cells // n)
    hits = 0
    for first in range(0, k, chunk):
        count = min(chunk, k - first)
        swaps = sample_swaps(n, seed, first, count)[:, active]
        sums = swaps.astype(np.float64) @ delta + base
        values = stat.h(*(sums[:, i] for i in range(sums.shape[1])))
        hits += int(np.count_nonzero(meets_threshold(values, t_bar, stat.integer_valued)))

    elapsed = time.perf_counter() - start
    return TestReport(hits / k, t_bar, MONTE_CARLO, n, mc_samples=k, rng_seed=seed, elapsed=elapsed)


def brute_force(
    dataset: PairedDataset,
    stat: DecomposableStatistic,
    max_n: int = BRUTE_FORCE_MAX_N,
) -> TestReport:
    """Count qualifying assignments among all ``2**N``.

    Effects come from the per-entry ``local_effects`` path rather than the
    vectorized one, so this also cross-checks ``batch_effects``.
    """
    n = len(dataset)
    if n > max_n:
        raise OversizeError(f"brute force over 2**{n} assignments refused (limit N <= {max_n})")
    start = time.perf_counter()
    effects = local_effects(stat, dataset)
    t_bar = observed_effect(stat, effects)
    fwd = np.array([e.forward for e in effects], dtype=np.int64)
    bwd = np.array([e.backward for e in effects], dtype=np.int64)
    base = fwd.sum(axis=0)
    delta = bwd - fwd

    total = 1 << n
    step = 1 << 16
    shifts = np.arange(n, dtype=np.int64)
    hits = 0
    for lo in range(0, total, step):
        idx = np.arange(lo, min(lo + step, total), dtype=np.int64)
        swaps = (idx[:, None] >> shifts) & 1
        sums = swaps @ delta + base
        values = stat.h(*(sums[:, i] for i in range(sums.shape[1])))
        hits += int(np.count_nonzero(meets_threshold(values, t_bar, stat.integer_valued)))

    elapsed = time.perf_counter() - start
    return TestReport(hits / total, t_bar, BRUTE_FORCE, n, elapsed=elapsed)
