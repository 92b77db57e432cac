import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sumnorm.nseq import (NSeq, diagonal, fix_index, inverse_permutation, outer_scalars, pad, permute,
                          scale_axis, truncate, unit_nseq, zero_trailing)
from sumnorm.spaces import FiniteSpace, InputError, scalar_field

K = scalar_field()


def S(a):
    return NSeq.scalars(np.asarray(a, dtype=float))


def test_unit_nseq_examples():
    e = unit_nseq((2, 2), K, (0, 0), [1.0])
    assert np.array_equal(e.values(), [[1, 0], [0, 0]])
    x = unit_nseq((3,), FiniteSpace(2), (1,), [1.0, 0.0])
    assert np.array_equal(x.entries, [[0, 0], [1, 0], [0, 0]])
    z = unit_nseq((1, 1, 1), K, (0, 0, 0), [0.0])
    assert z.is_zero()
    with pytest.raises(InputError):
        unit_nseq((2,), K, (2,), [1.0])


def test_permute_examples():
    x = S([[1, 2], [3, 4]])
    assert np.array_equal(permute(x, (1, 0)).values(), [[1, 3], [2, 4]])
    assert permute(x, (0, 1)) == x
    with pytest.raises(InputError):
        permute(x, (0, 0))


def test_diagonal_and_fix_index_examples():
    x = S([[1, 2], [3, 4]])
    assert np.array_equal(diagonal(x).values(), [1, 4])
    assert diagonal(S([5, 6])) == S([5, 6])
    assert diagonal(unit_nseq((2, 2), K, (0, 1), [1.0])).is_zero()
    assert np.array_equal(fix_index(x, 0, 0).values(), [1, 2])
    assert np.array_equal(fix_index(x, 1, 1).values(), [2, 4])
    assert fix_index(unit_nseq((2, 2), K, (0, 0), [1.0]), 0, 1).is_zero()


def test_scale_axis_and_outer_scalars():
    v = NSeq([[1.0, 2.0]], FiniteSpace(2))
    y = scale_axis(v, [1, 1], 0)
    assert y.bounds == (2, 1)
    assert np.array_equal(y.entries[0, 0], [1, 2]) and np.array_equal(y.entries[1, 0], [1, 2])
    assert scale_axis(v, [0, 0], 1).is_zero()
    assert np.array_equal(outer_scalars([1, 0], [1, 0]).values(), [[1, 0], [0, 0]])
    assert outer_scalars([1], [1], [1]).values().shape == (1, 1, 1)
    assert np.array_equal(outer_scalars([1, 1], [1, -1]).values(), [[1, -1], [1, -1]])


def test_truncate_pad_zero_trailing():
    x = S([[1, 2, 3], [4, 5, 6]])
    t = truncate(x, (1, 2))
    assert np.array_equal(t.values(), [[1, 2]])
    assert np.array_equal(pad(t, x.bounds).values(), zero_trailing(x, (1, 2)).values())
    with pytest.raises(InputError):
        truncate(x, (3, 1))


def test_json_roundtrip_and_immutability():
    x = NSeq(np.arange(12.0).reshape(2, 2, 3), FiniteSpace(3, 1.0))
    assert NSeq.from_json(x.to_json()) == x
    with pytest.raises(AttributeError):
        x.entries = None
    with pytest.raises(InputError):
        NSeq.from_json({"entries": [[1.0]]})


arrays = st.integers(1, 3).flatmap(lambda n: st.lists(st.integers(1, 3), min_size=n, max_size=n)).map(
    lambda b: np.random.default_rng(sum(b)).standard_normal(tuple(b)))


@given(arrays, st.randoms(use_true_random=False))
def test_permutation_group_law(a, rnd):
    x = S(a)
    sigma = list(range(x.order))
    rnd.shuffle(sigma)
    assert permute(permute(x, sigma), inverse_permutation(sigma)) == x


@given(arrays, st.data())
def test_fix_index_inverts_scale_axis(a, data):
    x = S(a)
    lam = np.array(data.draw(st.lists(st.floats(-3, 3), min_size=1, max_size=3)))
    axis = data.draw(st.integers(0, x.order))
    k = data.draw(st.integers(0, len(lam) - 1))
    assert np.allclose(fix_index(scale_axis(x, lam, axis), axis, k).entries, lam[k] * x.entries)
