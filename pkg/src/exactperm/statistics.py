"""Structured test statistics ``t(u, v) = h(sum_n g(u_n, v_n))``.

A statistic pairs a per-entry integer effect function (the ``g`` values,
one per dimension) with an aggregator ``h`` applied to the summed effects.
Aggregators are written against numpy so the exact test can evaluate them
on a whole support grid in one call: ``aggregate`` receives ``m`` arrays (or
scalars) that broadcast together and returns an array of the same shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import EmptyDatasetError, InvalidInputError, InvalidStatisticError
from .pmf import EffectTuple, LocalEffectPair, LocalPMFBatch, as_effect

ONE_TAILED = "one"
TWO_TAILED = "two"


@dataclass(frozen=True)
class EntryRecord:
    """Evaluation counts for one system on one dataset entry.

    ``correct`` feeds the accuracy statistic and ``true_positive`` /
    ``incorrect`` feed F1. Counts a dataset does not carry stay ``None``.
    """

    correct: Optional[int]
    length: int
    true_positive: Optional[int] = None
    incorrect: Optional[int] = None

    def __post_init__(self):
        for name in ("correct", "length", "true_positive", "incorrect"):
            value = getattr(self, name)
            if value is None and name != "length":
                continue
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise InvalidInputError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise InvalidInputError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))
        if self.length < 1:
            raise InvalidInputError(f"length must be positive, got {self.length}")
        if self.correct is not None and self.correct > self.length:
            raise InvalidInputError(f"correct={self.correct} exceeds length={self.length}")
        if self.true_positive is not None and self.true_positive > self.length:
            raise InvalidInputError(
                f"true_positive={self.true_positive} exceeds length={self.length}"
            )


@dataclass(frozen=True, eq=False)
class PairedDataset:
    u_entries: Tuple[EntryRecord, ...]
    v_entries: Tuple[EntryRecord, ...]

    def __post_init__(self):
        u, v = tuple(self.u_entries), tuple(self.v_entries)
        if len(u) != len(v):
            raise InvalidInputError(f"u has {len(u)} entries but v has {len(v)}")
        for n, (a, b) in enumerate(zip(u, v)):
            if a.length != b.length:
                raise InvalidInputError(
                    f"entry {n}: length {a.length} in u but {b.length} in v"
                )
        object.__setattr__(self, "u_entries", u)
        object.__setattr__(self, "v_entries", v)
        object.__setattr__(self, "_columns", {})

    def column(self, side: str, name: str) -> np.ndarray:
        """One count field of system ``side`` ("u" or "v") as an int64 array.

        Raises ``InvalidInputError`` if any entry lacks the field.
        """
        key = (side, name)
        if key not in self._columns:
            entries = self.u_entries if side == "u" else self.v_entries
            values = [getattr(e, name) for e in entries]
            if any(x is None for x in values):
                raise InvalidInputError(f"field {name!r} is missing for system {side}")
            col = np.array(values, dtype=np.int64)
            col.flags.writeable = False
            self._columns[key] = col
        return self._columns[key]

    def __len__(self) -> int:
        return len(self.u_entries)

    def __eq__(self, other):
        if not isinstance(other, PairedDataset):
            return NotImplemented
        return self.u_entries == other.u_entries and self.v_entries == other.v_entries

    @classmethod
    def from_counts(cls, u_correct, v_correct, lengths=None) -> "PairedDataset":
        """Accuracy data from per-entry correct counts.

        Lengths default to the larger of the two counts (at least 1).
        """
        if lengths is None:
            lengths = [max(1, int(a), int(b)) for a, b in zip(u_correct, v_correct)]
        return cls(
            tuple(EntryRecord(int(c), int(n)) for c, n in zip(u_correct, lengths)),
            tuple(EntryRecord(int(c), int(n)) for c, n in zip(v_correct, lengths)),
        )

    def swapped(self) -> "PairedDataset":
        return PairedDataset(self.v_entries, self.u_entries)

    def reordered(self, order) -> "PairedDataset":
        return PairedDataset(
            tuple(self.u_entries[i] for i in order), tuple(self.v_entries[i] for i in order)
        )


@dataclass(frozen=True)
class DecomposableStatistic:
    """``h(sum_n g(u_n, v_n))`` with integer m-dimensional ``g``.

    ``declared_range`` bounds ``|g_i|`` per dimension. ``None`` means the bound
    is the entry's length, which is how the built-in count statistics behave.
    ``integer_valued`` marks aggregators that return exact integers, which
    lets the p-value threshold use exact comparison. ``batch_effects``, if
    given, computes the forward and backward ``(N, m)`` effect arrays for a
    whole dataset at once and must agree with ``per_entry_effects``.
    """

    name: str
    m: int
    per_entry_effects: Callable[[EntryRecord, EntryRecord], EffectTuple]
    aggregate: Callable[..., np.ndarray]
    declared_range: Optional[Tuple[int, ...]] = None
    tails: str = TWO_TAILED
    integer_valued: bool = False
    batch_effects: Optional[Callable[["PairedDataset"], Tuple[np.ndarray, np.ndarray]]] = None

    def __post_init__(self):
        if self.m < 1:
            raise InvalidInputError("a statistic needs m >= 1")
        if self.tails not in (ONE_TAILED, TWO_TAILED):
            raise InvalidInputError(f"tails must be 'one' or 'two', got {self.tails!r}")
        if self.declared_range is not None:
            rng = tuple(int(g) for g in self.declared_range)
            if len(rng) != self.m:
                raise InvalidInputError(f"declared_range has {len(rng)} entries, m={self.m}")
            object.__setattr__(self, "declared_range", rng)

    def h(self, *components):
        """The aggregator, including the absolute value for two-tailed tests."""
        value = self.aggregate(*components)
        return np.abs(value) if self.tails == TWO_TAILED else value

    def effect(self, u: EntryRecord, v: EntryRecord) -> EffectTuple:
        try:
            value = as_effect(self.per_entry_effects(u, v))
        except InvalidInputError as exc:
            raise InvalidStatisticError(f"{self.name}: {exc}") from None
        if len(value) != self.m:
            raise InvalidStatisticError(
                f"{self.name}: effect {value} has {len(value)} components, expected {self.m}"
            )
        bound = self.declared_range or (u.length,) * self.m
        for x, g in zip(value, bound):
            if abs(x) > g:
                raise InvalidStatisticError(f"{self.name}: effect {value} exceeds range {bound}")
        return value


def _accuracy_effect(u: EntryRecord, v: EntryRecord):
    if u.correct is None or v.correct is None:
        raise InvalidInputError("acc-diff needs correct counts")
    return (u.correct - v.correct,)


def _accuracy_batch(data: PairedDataset):
    diff = data.column("u", "correct") - data.column("v", "correct")
    return diff[:, None], -diff[:, None]


def _identity(x):
    return x


def accuracy_diff_statistic(tails: str = TWO_TAILED) -> DecomposableStatistic:
    """Difference in number of correct predictions (``h`` = identity or ``abs``)."""
    return DecomposableStatistic(
        name="acc-diff",
        m=1,
        per_entry_effects=_accuracy_effect,
        aggregate=_identity,
        tails=tails,
        integer_valued=True,
        batch_effects=_accuracy_batch,
    )


def _f1_effect(u: EntryRecord, v: EntryRecord):
    for side, rec in (("u", u), ("v", v)):
        if rec.true_positive is None or rec.incorrect is None:
            raise InvalidInputError(f"f1-diff needs true_positive and incorrect counts for {side}")
    return (u.true_positive, u.incorrect, v.true_positive, v.incorrect)


def _f1_batch(data: PairedDataset):
    try:
        cols = [data.column(side, name) for side in "uv" for name in ("true_positive", "incorrect")]
    except InvalidInputError as exc:
        raise InvalidInputError(f"f1-diff: {exc}") from None
    fwd = np.stack(cols, axis=1)
    return fwd, fwd[:, [2, 3, 0, 1]]


def f1_term(tp, incorrect):
    """``tp / (tp + incorrect / 2)`` with the 0/0 case defined as 0."""
    tp = np.asarray(tp, dtype=np.float64)
    denom = tp + 0.5 * np.asarray(incorrect, dtype=np.float64)
    safe = np.where(denom == 0, 1.0, denom)
    return np.where(denom == 0, 0.0, tp / safe)


def f1_difference(x1, x2, x3, x4):
    return f1_term(x1, x2) - f1_term(x3, x4)


def f1_diff_statistic(tails: str = TWO_TAILED) -> DecomposableStatistic:
    """Difference in F1, from four summed counts (TP and incorrect for each system).

    Swapping an entry exchanges dimensions (1, 2) with (3, 4).
    """
    return DecomposableStatistic(
        name="f1-diff",
        m=4,
        per_entry_effects=_f1_effect,
        aggregate=f1_difference,
        tails=tails,
        integer_valued=False,
        batch_effects=_f1_batch,
    )


STATISTICS = {
    "acc-diff": accuracy_diff_statistic,
    "f1-diff": f1_diff_statistic,
}


def local_effects(stat: DecomposableStatistic, dataset: PairedDataset) -> list:
    """Per-entry ``(g(u_n, v_n), g(v_n, u_n))`` pairs."""
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset has no entries")
    return [
        LocalEffectPair(stat.effect(u, v), stat.effect(v, u))
        for u, v in zip(dataset.u_entries, dataset.v_entries)
    ]


def effect_batch(stat: DecomposableStatistic, dataset: PairedDataset) -> LocalPMFBatch:
    """All local effects as a ``LocalPMFBatch``, vectorized when the statistic allows."""
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset has no entries")
    if stat.batch_effects is None:
        return LocalPMFBatch.from_pmfs(local_effects(stat, dataset))
    try:
        fwd, bwd = stat.batch_effects(dataset)
        batch = LocalPMFBatch(fwd, bwd)
    except InvalidInputError as exc:
        raise InvalidStatisticError(f"{stat.name}: {exc}") from None
    if batch.m != stat.m or len(batch) != len(dataset):
        raise InvalidStatisticError(
            f"{stat.name}: batch effects have shape {batch.forward.shape}, "
            f"expected ({len(dataset)}, {stat.m})"
        )
    if stat.declared_range is None:
        bound = dataset.column("u", "length")[:, None]
    else:
        bound = np.array(stat.declared_range)[None, :]
    for arr in (batch.forward, batch.backward):
        bad = np.nonzero(np.any(np.abs(arr) > bound, axis=1))[0]
        if bad.size:
            n = int(bad[0])
            raise InvalidStatisticError(
                f"{stat.name}: entry {n} effect {tuple(arr[n].tolist())} exceeds its declared range"
            )
    return batch


def forward_sum(effects: "Sequence[LocalEffectPair] | LocalPMFBatch") -> Tuple[int, ...]:
    if len(effects) == 0:
        raise EmptyDatasetError("no local effects")
    if isinstance(effects, LocalPMFBatch):
        return tuple(int(x) for x in effects.forward.sum(axis=0))
    if len(effects) == 0:
        raise EmptyDatasetError("no local effects")
    m = effects[0].m
    total = [0] * m
    for pair in effects:
        for i, x in enumerate(pair.forward):
            total[i] += x
    return tuple(total)


def observed_effect(stat: DecomposableStatistic, effects) -> float:
    """``h`` of the summed forward effects (the statistic on the unswapped data)."""
    return float(stat.h(*forward_sum(effects)))
