"""Reference oracles and hypothesis strategies shared by the test modules.

Everything here is plain Python over dicts and itertools so that it shares
no code path with the numpy engines it is used to check.
"""

import itertools
from collections import defaultdict

from hypothesis import strategies as st

from exactperm.statistics import EntryRecord, PairedDataset


def enumerate_sum_pmf(pairs):
    """PMF of the summed effect by listing all 2**N stay/swap assignments.

    ``pairs`` is a list of ``(forward, backward)`` tuples. Returns
    ``{sum_tuple: probability}`` with probability ``count / 2**N``.
    """
    counts = defaultdict(int)
    n = len(pairs)
    for choice in itertools.product((0, 1), repeat=n):
        total = None
        for (fwd, bwd), c in zip(pairs, choice):
            z = bwd if c else fwd
            total = z if total is None else tuple(a + b for a, b in zip(total, z))
        counts[total] += 1
    return {k: v / 2**n for k, v in counts.items()}


def direct_convolve(a, b):
    """Double sum over two ``{point: prob}`` dicts."""
    out = defaultdict(float)
    for x, p in a.items():
        for y, q in b.items():
            out[tuple(i + j for i, j in zip(x, y))] += p * q
    return dict(out)


def enumerate_p_value(pairs, h, t_bar, slack=0.0):
    """Fraction of assignments with ``h(sum) >= t_bar - slack``."""
    pmf = enumerate_sum_pmf(pairs)
    return sum(p for xi, p in pmf.items() if h(*xi) >= t_bar - slack)


def assert_pmf_matches(dense, expected, tol):
    got = dense.as_dict()
    for key in set(got) | set(expected):
        assert abs(got.get(key, 0.0) - expected.get(key, 0.0)) <= tol, (key, got.get(key), expected.get(key))


@st.composite
def effect_pairs(draw, max_n=12, m=1, bound=4):
    n = draw(st.integers(1, max_n))
    comp = st.integers(-bound, bound)
    tup = st.tuples(*([comp] * m))
    return [(draw(tup), draw(tup)) for _ in range(n)]


@st.composite
def accuracy_datasets(draw, min_n=1, max_n=12, max_len=10):
    n = draw(st.integers(min_n, max_n))
    u, v = [], []
    for _ in range(n):
        length = draw(st.integers(1, max_len))
        u.append(EntryRecord(draw(st.integers(0, length)), length))
        v.append(EntryRecord(draw(st.integers(0, length)), length))
    return PairedDataset(tuple(u), tuple(v))


@st.composite
def f1_datasets(draw, min_n=1, max_n=8, max_count=3):
    n = draw(st.integers(min_n, max_n))
    u, v = [], []
    for _ in range(n):
        tp_u, inc_u, tp_v, inc_v = (draw(st.integers(0, max_count)) for _ in range(4))
        length = max(tp_u + inc_u, tp_v + inc_v, 1)
        u.append(EntryRecord(None, length, tp_u, inc_u))
        v.append(EntryRecord(None, length, tp_v, inc_v))
    return PairedDataset(tuple(u), tuple(v))


def random_accuracy_dataset(rng, n, max_len=10):
    lengths = rng.integers(1, max_len + 1, n)
    u = [int(rng.integers(0, L + 1)) for L in lengths]
    v = [int(rng.integers(0, L + 1)) for L in lengths]
    return PairedDataset.from_counts(u, v, lengths)


def random_f1_dataset(rng, n, max_count=3):
    u, v = [], []
    for _ in range(n):
        tp_u, inc_u, tp_v, inc_v = (int(x) for x in rng.integers(0, max_count + 1, 4))
        length = max(tp_u + inc_u, tp_v + inc_v, 1)
        u.append(EntryRecord(None, length, tp_u, inc_u))
        v.append(EntryRecord(None, length, tp_v, inc_v))
    return PairedDataset(tuple(u), tuple(v))
