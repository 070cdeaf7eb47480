"""Integer-support probability mass functions.

Two representations live here. ``LocalPMF`` is the per-entry distribution of
a single summand: either two equally likely points (stay/swap) or a single
certain point when both effects coincide. ``DensePMF`` holds an accumulated
distribution as a dense array over an integer box anchored at ``offset``.
Effects are m-tuples of ints throughout; m = 1 is the scalar case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Integral
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

EffectTuple = Tuple[int, ...]

DEFAULT_MEMORY_CAP = 2**31
NORM_TOL = 1e-9


def as_effect(value) -> EffectTuple:
    """Coerce an int or a sequence of ints into an ``EffectTuple``.

    Real-valued components are rejected rather than rounded.
    """
    if isinstance(value, (Integral, np.integer)):
        return (int(value),)
    try:
        items = tuple(value)
    except TypeError:
        raise InvalidInputError(f"effect must be an int or a tuple of ints, got {value!r}")
    if not items:
        raise InvalidInputError("effect tuple must have at least one component")
    for x in items:
        if not isinstance(x, (Integral, np.integer)):
            raise InvalidInputError(f"effect components must be integers, got {x!r}")
    return tuple(int(x) for x in items)


@dataclass(frozen=True)
class LocalEffectPair:
    """Effect of one entry when kept in place (``forward``) or swapped (``backward``)."""

    forward: EffectTuple
    backward: EffectTuple

    def __post_init__(self):
        object.__setattr__(self, "forward", as_effect(self.forward))
        object.__setattr__(self, "backward", as_effect(self.backward))
        if len(self.forward) != len(self.backward):
            raise InvalidInputError(
                f"forward has {len(self.forward)} components but backward has {len(self.backward)}"
            )

    @property
    def m(self) -> int:
        return len(self.forward)


@dataclass(frozen=True)
class LocalPMF:
    pair: LocalEffectPair
    points: Tuple[EffectTuple, ...]
    masses: Tuple[float, ...]

    @property
    def m(self) -> int:
        return self.pair.m

    @property
    def is_two_point(self) -> bool:
        return len(self.points) == 2

    def as_dict(self) -> Dict[EffectTuple, float]:
        return dict(zip(self.points, self.masses))


def make_local_pmf(pair: LocalEffectPair) -> LocalPMF:
    """Uniform distribution over ``{pair.forward, pair.backward}``."""
    if not isinstance(pair, LocalEffectPair):
        pair = LocalEffectPair(*pair)
    if pair.forward != pair.backward:
        return LocalPMF(pair, (pair.forward, pair.backward), (0.5, 0.5))
    return LocalPMF(pair, (pair.forward,), (1.0,))


def check_cells(extents: Sequence[int], memory_cap: int = DEFAULT_MEMORY_CAP) -> int:
    cells = math.prod(extents)
    if cells > memory_cap:
        raise ResourceLimitError(
            f"support box {tuple(extents)} needs {cells} cells, above the cap of {memory_cap}"
        )
    return cells


@dataclass(frozen=True)
class LocalPMFBatch:
    """``N`` local PMFs stored as two ``(N, m)`` integer arrays.

    Row ``n`` is the pair ``(forward[n], backward[n])``; it is a two-point
    PMF when the rows differ and a point mass otherwise. This is the form the
    engines and runners work on, since building one Python object per entry
    costs more than the convolution itself at realistic sizes.
    """

    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)

    def __post_init__(self):
        fwd = np.asarray(self.forward)
        bwd = np.asarray(self.backward)
        if fwd.ndim == 1:
            fwd = fwd[:, None]
        if bwd.ndim == 1:
            bwd = bwd[:, None]
        if fwd.shape != bwd.shape or fwd.ndim != 2 or fwd.shape[1] < 1:
            raise InvalidInputError(
                f"forward {fwd.shape} and backward {bwd.shape} must both be (N, m) with m >= 1"
            )
        for arr in (fwd, bwd):
            if arr.size and not np.issubdtype(arr.dtype, np.integer):
                raise InvalidInputError(f"effects must be integers, got dtype {arr.dtype}")
        fwd = fwd.astype(np.int64)
        bwd = bwd.astype(np.int64)
        fwd.flags.writeable = False
        bwd.flags.writeable = False
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "backward", bwd)

    @classmethod
    def from_pmfs(cls, pmfs: Sequence["LocalPMF | LocalEffectPair"]) -> "LocalPMFBatch":
        if isinstance(pmfs, LocalPMFBatch):
            return pmfs
        pairs = [f.pair if isinstance(f, LocalPMF) else f for f in pmfs]
        if not pairs:
            raise InvalidInputError("need at least one pmf")
        m = pairs[0].m
        for p in pairs:
            if p.m != m:
                raise InvalidInputError(f"mixed dimensionality: {p.m} vs {m}")
        return cls(
            np.array([p.forward for p in pairs], dtype=np.int64),
            np.array([p.backward for p in pairs], dtype=np.int64),
        )

    def __len__(self) -> int:
        return self.forward.shape[0]

    @property
    def m(self) -> int:
        return self.forward.shape[1]

    def two_point(self) -> np.ndarray:
        """Boolean mask of rows whose PMF has two support points."""
        return np.any(self.forward != self.backward, axis=1)

    def subset(self, rows) -> "LocalPMFBatch":
        return LocalPMFBatch(self.forward[rows], self.backward[rows])

    def pmfs(self) -> list:
        return [
            make_local_pmf(LocalEffectPair(tuple(f), tuple(b)))
            for f, b in zip(self.forward.tolist(), self.backward.tolist())
        ]


def support_bounds(
    pmfs: "Sequence[LocalPMF] | LocalPMFBatch", memory_cap: int = DEFAULT_MEMORY_CAP
) -> Tuple[EffectTuple, EffectTuple]:
    """Smallest box containing every reachable sum of the given local PMFs.

    Returns ``(offset, extents)``; per dimension the box spans
    ``offset[i] .. offset[i] + extents[i] - 1``.
    """
    if len(pmfs) == 0:
        raise InvalidInputError("support_bounds needs at least one pmf")
    batch = LocalPMFBatch.from_pmfs(pmfs)
    lo = np.minimum(batch.forward, batch.backward).sum(axis=0)
    span = np.abs(batch.forward - batch.backward).sum(axis=0)
    extents = tuple(int(s) + 1 for s in span)
    check_cells(extents, memory_cap)
    return tuple(int(x) for x in lo), extents


@dataclass(frozen=True)
class DensePMF:
    """A PMF over the integer box ``offset + [0, probs.shape)``."""

    offset: EffectTuple
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.ndim == 0:
            probs = probs.reshape(1)
        offset = as_effect(self.offset)
        if len(offset) != probs.ndim:
            raise InvalidInputError(
                f"offset has {len(offset)} components but probs has {probs.ndim} dimensions"
            )
        if probs.size and probs.min() < 0:
            raise InvalidInputError("probabilities must be non-negative")
        mass = float(probs.sum())
        if abs(mass - 1.0) > NORM_TOL:
            raise InvalidInputError(f"total mass {mass!r} is not 1 within {NORM_TOL}")
        probs.flags.writeable = False
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point(cls, at) -> "DensePMF":
        at = as_effect(at)
        return cls(at, np.ones((1,) * len(at)))

    @classmethod
    def from_local(cls, pmf: LocalPMF) -> "DensePMF":
        m = pmf.m
        lo = tuple(min(p[i] for p in pmf.points) for i in range(m))
        hi = tuple(max(p[i] for p in pmf.points) for i in range(m))
        probs = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)))
        for p, w in zip(pmf.points, pmf.masses):
            probs[tuple(c - l for c, l in zip(p, lo))] += w
        return cls(lo, probs)

    @property
    def m(self) -> int:
        return self.probs.ndim

    @property
    def dims(self) -> Tuple[int, ...]:
        return self.probs.shape

    def prob(self, at) -> float:
        at = as_effect(at)
        idx = tuple(a - o for a, o in zip(at, self.offset))
        if any(i < 0 or i >= d for i, d in zip(idx, self.dims)):
            return 0.0
        return float(self.probs[idx])

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Integer coordinate vector for each axis."""
        return tuple(
            np.arange(o, o + d, dtype=np.int64) for o, d in zip(self.offset, self.dims)
        )

    def as_dict(self, atol: float = 0.0) -> Dict[EffectTuple, float]:
        """Sparse view keyed by support point (scalars for m = 1 are 1-tuples)."""
        out = {}
        for idx in zip(*np.nonzero(self.probs > atol)):
            key = tuple(int(i) + o for i, o in zip(idx, self.offset))
            out[key] = float(self.probs[idx])
        return out


def total_mass(pmf: DensePMF) -> float:
    return float(np.sum(pmf.probs))


def local_pmfs(pairs: Iterable[LocalEffectPair]) -> list:
    return [make_local_pmf(p) for p in pairs]
