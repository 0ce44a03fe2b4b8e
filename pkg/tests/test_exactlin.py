from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kzknot.exactlin import in_span, reduce_mod, row_reduce


def bareiss_rank(m):
    """Fraction-free elimination over the integers (after clearing denominators)."""
    rows = []
    for r in m:
        den = 1
        for x in r:
            den = den * Fraction(x).denominator // np.gcd(den, Fraction(x).denominator)
        rows.append([int(Fraction(x) * den) for x in r])
    if not rows:
        return 0
    ncols = len(rows[0])
    rank, prev = 0, 1
    for c in range(ncols):
        k = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[rank], rows[k] = rows[k], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, len(rows)):
            rows[i] = [(p * rows[i][j] - rows[i][c] * rows[rank][j]) // prev for j in range(ncols)]
        prev = p
        rank += 1
    return rank


small_q = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_dim=8):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    # sparse-ish entries so that rank deficiency actually shows up
    entry = st.one_of(st.just(Fraction(0)), small_q)
    return [draw(st.lists(entry, min_size=c, max_size=c)) for _ in range(r)]


def test_dependent_rows():
    s = row_reduce([[1, 2], [2, 4]])
    assert s.rank == 1
    assert s.rows == ((1, 2),)


def test_zero_matrix():
    assert row_reduce([[0, 0], [0, 0]]).rank == 0


def test_full_rank():
    s = row_reduce([[0, 1], [1, 0]])
    assert s.rank == 2 and s.pivots == (0, 1)


def test_empty_needs_ncols():
    assert row_reduce([], ncols=3).rank == 0
    with pytest.raises(ValueError):
        row_reduce([])


def test_reduce_mod_examples():
    s = row_reduce([[1, 0, 2], [0, 1, -1]])
    assert reduce_mod([3, 4, 2], s) == [0, 0, 0]
    assert reduce_mod([1, 0, 2], s) == [0, 0, 0]
    v = np.array([0, 0, 1.5 + 2j])
    assert np.array_equal(reduce_mod(v, s), v)


def test_reduce_mod_dimension_mismatch():
    s = row_reduce([[1, 0]])
    with pytest.raises(ValueError):
        reduce_mod([1, 2, 3], s)
    with pytest.raises(ValueError):
        in_span([1], s)


def test_in_span():
    s = row_reduce([[1, 1, 0]])
    assert in_span([1, 1, 0], s)
    assert in_span([0, 0, 0], s)
    assert not in_span([0, 0, 1], s)


def test_float_amplification_bounds_error():
    s = row_reduce([[1, Fraction(1, 3), 5], [0, 0, 1]], ncols=3)
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.normal(size=3)
        e = rng.uniform(-1, 1, size=3) * 1e-6
        diff = reduce_mod(v + e, s) - reduce_mod(v, s)
        assert np.max(np.abs(diff)) <= s.amplification * 1e-6 + 1e-15


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_matches_bareiss(m):
    s = row_reduce(m)
    assert s.rank == bareiss_rank(m)
    assert s.rank <= min(len(m), len(m[0]))


@settings(max_examples=60, deadline=None)
@given(matrices(), st.data())
def test_reduce_mod_properties(m, data):
    s = row_reduce(m)
    v = data.draw(st.lists(small_q, min_size=s.dim, max_size=s.dim))
    r = reduce_mod(v, s)
    assert all(r[p] == 0 for p in s.pivots)
    assert reduce_mod(r, s) == r
    assert in_span([a - b for a, b in zip(v, r)], s)
    # float route agrees with the exact one
    fr = reduce_mod(np.array([float(x) for x in v]), s)
    assert np.allclose(fr, [float(x) for x in r], atol=1e-9 * s.amplification)


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_rereduce_is_stable(m):
    s = row_reduce(m)
    if s.rank:
        assert row_reduce(s.rows) == s


def test_quotient_matrix_matches_reduce_mod():
    s = row_reduce([[1, 2, 0, 1], [0, 0, 1, 3]])
    Q = s.quotient_matrix()
    v = [Fraction(3), Fraction(-1), Fraction(2), Fraction(7)]
    r = reduce_mod(v, s)
    assert [sum(q * x for q, x in zip(row, v)) for row in Q] == [r[j] for j in s.free_columns]
