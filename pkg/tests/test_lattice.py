import itertools

import pytest
from hypothesis import given, settings, strategies as st

from drtwist.exact_circle import angle
from drtwist.lattice import (Sublattice, det, diagonal, hermite_normal_form, identity, integer_kernel, matmul,
                             matvec, rational_kernel_mod1, smith_normal_form, unimodular_inverse)
from gen import BETA

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=300)
@given(matrices)
def test_hnf_invariants(m):
    h, u = hermite_normal_form(m)
    assert matmul(u, m) == h
    assert abs(det(u)) == 1
    # row echelon with positive pivots and reduced entries above them
    last = -1
    for i, row in enumerate(h):
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            assert all(not any(r) for r in h[i:])
            break
        j = nz[0]
        assert j > last and row[j] > 0
        for k in range(i):
            assert 0 <= h[k][j] < row[j]
        last = j


@settings(max_examples=300)
@given(matrices)
def test_snf_invariants(m):
    s, u, v = smith_normal_form(m)
    assert matmul(matmul(u, m), v) == s
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    d = diagonal(s)
    for i, row in enumerate(s):
        for j, x in enumerate(row):
            assert i == j or x == 0
    assert all(x >= 0 for x in d)
    nonzero = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


def test_snf_known_examples():
    assert diagonal(smith_normal_form([[2, 4], [6, 8]])[0]) == [2, 4]
    assert diagonal(smith_normal_form([[0, 4], [8, -4]])[0]) == [4, 8]
    assert diagonal(smith_normal_form([[2, 0], [0, 3]])[0]) == [1, 6]


@settings(max_examples=200)
@given(matrices)
def test_integer_kernel_is_saturated_and_exact(m):
    cols = len(m[0])
    k = integer_kernel(m, cols)
    for v in k.basis:
        assert not any(matvec(m, v))
    # brute force: every small kernel vector lies in the computed lattice
    for v in itertools.product(range(-3, 4), repeat=cols):
        if not any(matvec(m, v)):
            assert v in k


def test_sublattice_membership_and_coordinates():
    lat = Sublattice.span(2, [[2, 0], [0, 2], [4, 6]])
    assert lat == Sublattice.span(2, [[2, 0], [0, 2]])
    assert [4, -2] in lat and [1, 0] not in lat
    c = lat.coordinates([4, -2])
    assert lat.vector(c) == [4, -2]
    assert lat.index_data() == [2, 2]
    assert Sublattice.full(3).is_full() and Sublattice.zero(3).is_zero()
    with pytest.raises(ValueError):
        Sublattice.span(2, [[1, 2, 3]])


def test_rational_kernel_mod1_brute_force():
    rows = [[angle("1/2"), angle("1/3")], [BETA, angle("0")]]
    lat = rational_kernel_mod1(rows, 2)
    assert lat == Sublattice.span(2, [[0, 3]])
    rows = [[angle("1/2"), angle("1/2")]]
    lat = rational_kernel_mod1(rows, 2)
    for a in itertools.product(range(-6, 7), repeat=2):
        assert (a in lat) == ((a[0] + a[1]) % 2 == 0)


@settings(max_examples=100)
@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=3, max_size=3))
def test_unimodular_inverse(m):
    _, u = hermite_normal_form(m)
    assert matmul(u, unimodular_inverse(u)) == identity(3)


def test_unimodular_inverse_rejects():
    with pytest.raises(ValueError):
        unimodular_inverse([[2, 0], [0, 1]])
