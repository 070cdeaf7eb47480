"""N-fold convolution of local PMFs.

Two engines compute the distribution of the summed effect:

* ``convolve_dp`` folds the local PMFs in one at a time. Each step only
  touches the two support points of the incoming PMF, so a step costs the
  current support size and the whole pass is quadratic in N.
* ``convolve_fft`` splits the list in half, recurses, and merges the halves
  with an FFT-based linear convolution. Short sublists are handed to the DP.

Single-point PMFs (forward == backward) carry no randomness; both engines
fold them into the offset instead of convolving. Both accept either a
sequence of ``LocalPMF`` or a ``LocalPMFBatch``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError, NumericalError
from .pmf import (
    DEFAULT_MEMORY_CAP,
    DensePMF,
    LocalPMF,
    LocalPMFBatch,
    check_cells,
    support_bounds,
)

ROUNDOFF_TOL = 1e-9

DP = "dp"
FFT = "fft"


def _dp_loop_1d(to_fwd, to_bwd, widths, extent):
    cur = np.zeros(extent)
    nxt = np.zeros(extent)
    cur[0] = 1.0
    live = 1
    for n in range(to_fwd.shape[0]):
        new_live = live + widths[n]
        for j in range(new_live):
            nxt[j] = 0.0
        a = to_fwd[n]
        b = to_bwd[n]
        for j in range(live):
            half = 0.5 * cur[j]
            nxt[j + a] += half
            nxt[j + b] += half
        cur, nxt = nxt, cur
        live = new_live
    return cur


@functools.lru_cache(maxsize=None)
def _compiled_dp_1d():
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        return None
    return numba.njit(cache=True, nogil=True)(_dp_loop_1d)


def _dp_numpy(to_fwd, to_bwd, extents):
    """Same recurrence as the 1-d loop, vectorized over the live region."""
    m = len(extents)
    cur = np.zeros(extents)
    nxt = np.zeros(extents)
    cur[(0,) * m] = 1.0
    live = np.ones(m, dtype=np.int64)
    for a, b in zip(to_fwd, to_bwd):
        src = tuple(slice(0, w) for w in live)
        new_live = live + np.abs(a - b)
        np.multiply(cur[src], 0.5, out=cur[src])
        nxt[tuple(slice(0, w) for w in new_live)] = 0.0
        for shift in (a, b):
            nxt[tuple(slice(s, s + w) for s, w in zip(shift, live))] += cur[src]
        cur, nxt = nxt, cur
        live = new_live
    return cur


def _dp_batch(batch: LocalPMFBatch, memory_cap: int, compiled: bool = True) -> DensePMF:
    offset, extents = support_bounds(batch, memory_cap)
    batch = batch.subset(batch.two_point())
    lo = np.minimum(batch.forward, batch.backward)
    # positions of the two support points relative to the running minimum
    to_fwd = batch.forward - lo
    to_bwd = batch.backward - lo
    kernel = _compiled_dp_1d() if compiled and batch.m == 1 else None
    if kernel is not None:
        widths = np.abs(to_fwd - to_bwd)[:, 0]
        probs = kernel(to_fwd[:, 0].copy(), to_bwd[:, 0].copy(), widths.copy(), extents[0])
    else:
        probs = _dp_numpy(to_fwd, to_bwd, extents)
    return DensePMF(offset, probs)


def convolve_dp(
    pmfs: "Sequence[LocalPMF] | LocalPMFBatch", memory_cap: int = DEFAULT_MEMORY_CAP
) -> DensePMF:
    """Distribution of the sum of independent local PMFs, by dynamic programming.

    Two buffers the size of the final support box are allocated up front and
    used alternately as the previous and current table. Coordinates are kept
    relative to the running minimum, so the live region grows by
    ``|forward - backward|`` per step and no index goes negative.
    """
    return _dp_batch(LocalPMFBatch.from_pmfs(pmfs), memory_cap)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def clamp_roundoff(values: np.ndarray, tol: float = ROUNDOFF_TOL) -> np.ndarray:
    """Zero out small negative round-off in place.

    Anything below ``-tol`` cannot come from a valid convolution of
    probabilities and raises ``NumericalError``.
    """
    if values.size:
        low = values.min()
        if low < -tol:
            raise NumericalError(f"convolution produced {low!r}, below the round-off floor -{tol}")
        np.maximum(values, 0.0, out=values)
    return values


def fft_linear_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Raw (unclamped) m-dimensional linear convolution through a real FFT.

    Each axis is zero-padded to the next power of two that holds the full
    linear result, so the circular wrap-around never overlaps it.
    """
    out_shape = tuple(x + y - 1 for x, y in zip(a.shape, b.shape))
    fft_shape = tuple(_next_pow2(n) for n in out_shape)
    axes = tuple(range(a.ndim))
    freq = np.fft.rfftn(a, fft_shape, axes=axes)
    freq *= np.fft.rfftn(b, fft_shape, axes=axes)
    full = np.fft.irfftn(freq, fft_shape, axes=axes)
    return full[tuple(slice(0, n) for n in out_shape)]


def fft_pairwise_convolve(
    a: DensePMF, b: DensePMF, memory_cap: int = DEFAULT_MEMORY_CAP
) -> DensePMF:
    if a.m != b.m:
        raise InvalidInputError(f"cannot convolve {a.m}-d with {b.m}-d pmf")
    out_shape = tuple(x + y - 1 for x, y in zip(a.dims, b.dims))
    check_cells(out_shape, memory_cap)
    offset = tuple(x + y for x, y in zip(a.offset, b.offset))

    # a point mass is a pure shift; skip the transform so the result stays exact
    if a.probs.size == 1:
        return DensePMF(offset, b.probs * a.probs.flat[0])
    if b.probs.size == 1:
        return DensePMF(offset, a.probs * b.probs.flat[0])

    values = np.array(fft_linear_convolve(a.probs, b.probs))
    return DensePMF(offset, clamp_roundoff(values))


def convolve_fft(
    pmfs: "Sequence[LocalPMF] | LocalPMFBatch",
    engine: "ConvolutionEngine | None" = None,
) -> DensePMF:
    """Distribution of the sum by balanced divide and conquer.

    The list is split at ``len // 2``, both halves are solved recursively and
    merged with ``fft_pairwise_convolve``. Sublists no longer than
    ``engine.fft_base_case_threshold`` go to the DP.
    """
    engine = engine or ConvolutionEngine(FFT)
    batch = LocalPMFBatch.from_pmfs(pmfs)
    # checks the cap for the final box before any work is done
    support_bounds(batch, engine.memory_cap)
    random_rows = batch.two_point()
    shift = tuple(int(x) for x in batch.forward[~random_rows].sum(axis=0))
    batch = batch.subset(random_rows)
    if len(batch) == 0:
        return DensePMF.point(shift)

    threshold = engine.fft_base_case_threshold
    cap = engine.memory_cap

    def solve(lo: int, hi: int) -> DensePMF:
        if hi - lo <= threshold:
            return _dp_batch(batch.subset(slice(lo, hi)), cap)
        mid = lo + (hi - lo) // 2
        return fft_pairwise_convolve(solve(lo, mid), solve(mid, hi), cap)

    result = solve(0, len(batch))
    return DensePMF(tuple(o + s for o, s in zip(result.offset, shift)), result.probs)


@dataclass(frozen=True)
class ConvolutionEngine:
    kind: str = FFT
    fft_base_case_threshold: int = 32
    memory_cap: int = DEFAULT_MEMORY_CAP

    def __post_init__(self):
        if self.kind not in (DP, FFT):
            raise InvalidInputError(f"unknown engine kind {self.kind!r}")
        if self.fft_base_case_threshold < 1:
            raise InvalidInputError("fft_base_case_threshold must be >= 1")
        if self.memory_cap < 1:
            raise InvalidInputError("memory_cap must be positive")

    @property
    def method(self) -> str:
        return f"exact-{self.kind}"

    def convolve(self, pmfs) -> DensePMF:
        if self.kind == DP:
            return convolve_dp(pmfs, self.memory_cap)
        return convolve_fft(pmfs, self)
