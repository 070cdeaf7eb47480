
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactperm.errors import InvalidInputError, ResourceLimitError
from exactperm.pmf import (
    DensePMF,
    LocalEffectPair,
    LocalPMFBatch,
    make_local_pmf,
    support_bounds,
    total_mass,
)

from helpers import effect_pairs, enumerate_sum_pmf


def pmf(fwd, bwd):
    return make_local_pmf(LocalEffectPair(fwd, bwd))


class TestMakeLocalPMF:
    def test_two_point(self):
        assert pmf(1, -1).as_dict() == {(1,): 0.5, (-1,): 0.5}

    def test_one_point(self):
        f = pmf(0, 0)
        assert f.as_dict() == {(0,): 1.0}
        assert not f.is_two_point

    def test_four_dimensional(self):
        f = pmf((1, 0, 0, 1), (0, 1, 1, 0))
        assert f.as_dict() == {(1, 0, 0, 1): 0.5, (0, 1, 1, 0): 0.5}

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInputError):
            LocalEffectPair((1, 2), (1,))

    def test_rejects_real_effects(self):
        with pytest.raises(InvalidInputError):
            LocalEffectPair(0.5, 1)

    @given(st.integers(-50, 50), st.integers(-50, 50))
    def test_masses_are_exact(self, a, b):
        masses = pmf(a, b).masses
        assert masses in ((0.5, 0.5), (1.0,))
        assert sum(masses) == 1.0


class TestSupportBounds:
    def test_two_symmetric(self):
        assert support_bounds([pmf(1, -1), pmf(1, -1)]) == ((-2,), (5,))

    def test_single_point(self):
        assert support_bounds([pmf(3, 3)]) == ((3,), (1,))

    def test_three_mixed(self):
        pmfs = [pmf(0, 2), pmf(-1, 1), pmf(5, 5)]
        offset, extents = support_bounds(pmfs)
        assert (offset, extents) == ((4,), (5,))
        sums = enumerate_sum_pmf([(f.pair.forward, f.pair.backward) for f in pmfs])
        assert set(sums) == {(4,), (6,), (8,)}
        assert all(offset[0] <= s[0] < offset[0] + extents[0] for s in sums)

    def test_empty(self):
        with pytest.raises(InvalidInputError):
            support_bounds([])

    def test_mixed_dimensions(self):
        with pytest.raises(InvalidInputError):
            support_bounds([pmf(1, 0), pmf((1, 1), (0, 0))])

    def test_memory_cap(self):
        with pytest.raises(ResourceLimitError):
            support_bounds([pmf((5, 5), (-5, -5))] * 10, memory_cap=100)

    @settings(max_examples=150, deadline=None)
    @given(st.integers(1, 2).flatmap(lambda m: effect_pairs(max_n=12, m=m)))
    def test_tight(self, pairs):
        offset, extents = support_bounds([pmf(a, b) for a, b in pairs])
        sums = enumerate_sum_pmf(pairs)
        for s in sums:
            for i, x in enumerate(s):
                assert offset[i] <= x < offset[i] + extents[i]
        for i in range(len(offset)):
            coords = {s[i] for s in sums}
            assert offset[i] in coords
            assert offset[i] + extents[i] - 1 in coords

    def test_batch_and_sequence_agree(self):
        pairs = [((1, 2), (0, -1)), ((3, 3), (3, 3)), ((0, 4), (2, 0))]
        seq = [pmf(a, b) for a, b in pairs]
        assert support_bounds(seq) == support_bounds(LocalPMFBatch.from_pmfs(seq))


class TestDensePMF:
    def test_total_mass_point(self):
        assert total_mass(DensePMF.point(0)) == 1.0

    def test_total_mass_two_point(self):
        assert total_mass(DensePMF.from_local(pmf(1, -1))) == 1.0

    def test_from_local_layout(self):
        d = DensePMF.from_local(pmf(1, -1))
        assert d.offset == (-1,)
        assert d.probs.tolist() == [0.5, 0.0, 0.5]

    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidInputError):
            DensePMF((0,), np.array([0.5, 0.4]))

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            DensePMF((0,), np.array([1.1, -0.1]))

    def test_immutable(self):
        d = DensePMF((0,), np.array([0.25, 0.75]))
        with pytest.raises(ValueError):
            d.probs[0] = 1.0

    def test_prob_lookup(self):
        d = DensePMF((2, -1), np.array([[0.25, 0.25], [0.0, 0.5]]))
        assert d.prob((3, 0)) == 0.5
        assert d.prob((2, 5)) == 0.0
        assert d.as_dict() == {(2, -1): 0.25, (2, 0): 0.25, (3, 0): 0.5}


class TestBatch:
    def test_round_trip(self):
        seq = [pmf(1, -1), pmf(0, 0), pmf(2, 5)]
        batch = LocalPMFBatch.from_pmfs(seq)
        assert [f.as_dict() for f in batch.pmfs()] == [f.as_dict() for f in seq]
        assert batch.two_point().tolist() == [True, False, True]

    def test_rejects_floats(self):
        with pytest.raises(InvalidInputError):
            LocalPMFBatch(np.array([0.5]), np.array([1.0]))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(InvalidInputError):
            LocalPMFBatch(np.zeros((3, 2), dtype=int), np.zeros((3, 1), dtype=int))
