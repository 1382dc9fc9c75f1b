import itertools
import random

import pytest

from drtwist.cohomology import (Bicharacter, Cocycle2, FlatteningError, NotCohomologousError, OneCochain,
                                OutOfBoxError, antisymmetrize, bicharacter_from_cocycle, box_points, centre,
                                coboundary, eval_cocycle, flatten_to_constant, group_convolve, is_cohomologous,
                                star, trace_canonical, twisted_group_algebra_simple, vanish_on_centre_normalize)
from drtwist.exact_circle import ZERO, angle, is_zero
from drtwist.lattice import Sublattice
from gen import BETA, random_bicharacter, random_cochain, random_cocycle

HALF = Bicharacter.from_rows([[ZERO, angle("1/2")], [ZERO, ZERO]])


def _skew(sigma, p, q):
    return eval_cocycle(sigma, p, q) - eval_cocycle(sigma, q, p)


def test_bicharacter_is_bilinear():
    rng = random.Random(1)
    w = random_bicharacter(rng, 3, irrational=True)
    pts = box_points(3, 1)
    for p, q, r in itertools.islice(itertools.product(pts, repeat=3), 0, None, 97):
        pr = tuple(a + b for a, b in zip(p, r))
        assert w(pr, q) == w(p, q) + w(r, q)
        assert w(q, pr) == w(q, p) + w(q, r)


@pytest.mark.parametrize("seed", range(5))
def test_cocycle_identity_with_cochain(seed):
    rng = random.Random(seed)
    sigma = random_cocycle(rng, 2, 4)
    pts = box_points(2, 1)
    for p, q, r in itertools.product(pts, repeat=3):
        pq = tuple(a + b for a, b in zip(p, q))
        qr = tuple(a + b for a, b in zip(q, r))
        assert eval_cocycle(sigma, p, q) + eval_cocycle(sigma, pq, r) == \
            eval_cocycle(sigma, q, r) + eval_cocycle(sigma, p, qr)


def test_normalised():
    sigma = random_cocycle(random.Random(3), 2, 2)
    for p in box_points(2, 2):
        assert is_zero(eval_cocycle(sigma, (0, 0), p)) and is_zero(eval_cocycle(sigma, p, (0, 0)))


def test_cochain_vanishes_at_zero_and_out_of_box():
    with pytest.raises(ValueError):
        OneCochain(1, {(0,): angle("1/2")})
    b = OneCochain(1, {(1,): angle("1/3")})
    with pytest.raises(OutOfBoxError):
        b((5,))


def test_coboundary_is_symmetric_and_cohomologically_trivial():
    b = random_cochain(random.Random(4), 2, 4)
    c = coboundary(b)
    for p, q in itertools.product(box_points(2, 2), repeat=2):
        assert eval_cocycle(c, p, q) == eval_cocycle(c, q, p)
    assert is_cohomologous(c, Cocycle2.trivial(2))


def test_star_and_antisymmetrize():
    sigma = random_cocycle(random.Random(5), 2, 3)
    s = star(sigma)
    for p, q in itertools.product(box_points(2, 1), repeat=2):
        assert eval_cocycle(s, p, q) == -eval_cocycle(sigma, q, p)
    skew = antisymmetrize(sigma)
    assert skew.is_antisymmetric()
    for p, q in itertools.product(box_points(2, 1), repeat=2):
        assert skew(p, q) == _skew(sigma, p, q)


@pytest.mark.parametrize("seed", range(10))
def test_bicharacter_from_cocycle_matches_skew(seed):
    rng = random.Random(seed)
    sigma = random_cocycle(rng, 3, 4)
    omega = bicharacter_from_cocycle(sigma)
    for p, q in itertools.product(box_points(3, 1), repeat=2):
        assert omega(p, q) - omega(q, p) == _skew(sigma, p, q)
    assert all(is_zero(omega.pairing[i][j]) for i in range(3) for j in range(3) if i <= j)


def test_not_cohomologous():
    a = Cocycle2.of(HALF)
    assert not is_cohomologous(a, Cocycle2.trivial(2))
    assert is_cohomologous(a, Cocycle2.of(-HALF.transpose()))


def test_centre_of_skew_half_is_2z2():
    assert centre(HALF) == Sublattice.span(2, [[2, 0], [0, 2]])


def test_centre_with_irrational_entry_is_trivial():
    w = Bicharacter.from_rows([[ZERO, BETA], [ZERO, ZERO]])
    nf = vanish_on_centre_normalize(w)
    assert nf.centre.is_zero()
    assert twisted_group_algebra_simple(nf.omega_tilde)


def test_trivial_bicharacter_has_full_centre():
    nf = vanish_on_centre_normalize(Bicharacter.trivial(2))
    assert nf.centre.is_full()
    # the quotient by the centre is the trivial group, whose algebra is C
    assert nf.omega_tilde.rank == 0 and twisted_group_algebra_simple(nf.omega_tilde)


def test_simplicity_test_on_presented_quotients():
    assert not twisted_group_algebra_simple(Bicharacter.trivial(1))
    free = Bicharacter.from_rows([[ZERO, ZERO], [angle("1/2"), ZERO]])
    assert not twisted_group_algebra_simple(free)
    cyclic = Bicharacter.from_rows([[ZERO, ZERO], [angle("1/2"), ZERO]], [2, 2])
    assert twisted_group_algebra_simple(cyclic)


def test_rank_three_mixed_normal_form():
    w = Bicharacter.from_rows([[ZERO, angle("1/3"), ZERO], [ZERO, ZERO, BETA], [ZERO, ZERO, ZERO]])
    nf = vanish_on_centre_normalize(w)
    box = box_points(3, 2)
    for z in nf.centre.basis:
        for p in box:
            assert is_zero(nf.omega_prime(z, p)) and is_zero(nf.omega_prime(p, z))
    for p, q in itertools.islice(itertools.product(box, repeat=2), 0, None, 7):
        assert nf.omega_prime(p, q) == nf.omega_tilde(nf.project(p), nf.project(q))
    assert nf.omega_tilde.is_well_defined()


def test_flatten_recovers_planted_cochain():
    rng = random.Random(8)
    omega = random_bicharacter(rng, 2)
    b = random_cochain(rng, 2, 6)
    rho = Cocycle2.of(omega, b)
    got = flatten_to_constant(rho, omega, 2)
    e1, e2 = b((1, 0)), b((0, 1))
    for m in box_points(2, 2):
        assert got(m) == b(m) - (m[0] * e1 + m[1] * e2)


def test_flatten_refuses_other_class():
    with pytest.raises(NotCohomologousError):
        flatten_to_constant(Cocycle2.of(HALF), Bicharacter.trivial(2), 2)
    assert issubclass(FlatteningError, ValueError)


def test_group_convolution_associative_and_trace():
    w = Bicharacter.from_rows([[ZERO, BETA], [ZERO, ZERO]])
    rng = random.Random(2)
    pts = box_points(2, 1)

    def rand_fn():
        return {p: complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for p in rng.sample(pts, 4)}

    f, g, h = rand_fn(), rand_fn(), rand_fn()
    left = group_convolve(group_convolve(f, g, w), h, w)
    right = group_convolve(f, group_convolve(g, h, w), w)
    for k in set(left) | set(right):
        assert abs(left.get(k, 0) - right.get(k, 0)) < 1e-9
    assert trace_canonical({(0, 0): 2 + 1j, (1, 0): 5}) == 2 + 1j
    assert trace_canonical({(1, 0): 5}) == 0
