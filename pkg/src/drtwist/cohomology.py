"""Normalised 2-cocycles and bicharacters on Z^l, written additively in turns.

A cocycle is *presented* as ``base(p, q) + b(p) + b(q) - b(p + q)`` where
``base`` is a bicharacter (an l x l matrix of angles) and ``b`` an optional
normalised 1-cochain tabulated on a finite set of lattice points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .exact_circle import ZERO, ExactAngle, angle_add, angle_scale, dot, is_zero, phase
from .lattice import (Matrix, Sublattice, diagonal, matvec, rational_kernel_mod1,
                      smith_normal_form, transpose, unimodular_inverse)

Vector = tuple[int, ...]


class OutOfBoxError(KeyError):
    """A cochain was evaluated outside the set of points it is tabulated on."""


class NotCohomologousError(ValueError):
    pass


class FlatteningError(ValueError):
    """The inductive cochain construction produced an inconsistent table."""


def _vec(v: Sequence[int], rank: int) -> Vector:
    v = tuple(int(x) for x in v)
    if len(v) != rank:
        raise ValueError(f"expected a vector of length {rank}, got {v}")
    return v


def _add(p: Vector, q: Vector) -> Vector:
    return tuple(a + b for a, b in zip(p, q))


def box_points(rank: int, radius: int) -> list[Vector]:
    return list(itertools.product(range(-radius, radius + 1), repeat=rank))


# --------------------------------------------------------------------------
# bicharacters

@dataclass(frozen=True)
class Bicharacter:
    """``omega(p, q) = sum_ij p_i q_j pairing[i][j]``.

    ``orders`` presents the group the bicharacter lives on: ``None`` means
    Z^rank, otherwise entry ``d`` makes coordinate i cyclic of order ``d``
    (``0`` keeps it free).  Well-definedness on a cyclic factor is the
    caller's contract and is checked by :meth:`is_well_defined`.
    """

    rank: int
    pairing: tuple[tuple[ExactAngle, ...], ...]
    orders: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.pairing) != self.rank or any(len(r) != self.rank for r in self.pairing):
            raise ValueError(f"pairing must be {self.rank}x{self.rank}")
        if self.orders is not None and len(self.orders) != self.rank:
            raise ValueError("orders length must equal rank")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[ExactAngle]], orders: Sequence[int] | None = None) -> "Bicharacter":
        return cls(len(rows), tuple(tuple(r) for r in rows), tuple(orders) if orders is not None else None)

    @classmethod
    def trivial(cls, rank: int) -> "Bicharacter":
        return cls(rank, tuple((ZERO,) * rank for _ in range(rank)))

    def __call__(self, p: Sequence[int], q: Sequence[int]) -> ExactAngle:
        p, q = _vec(p, self.rank), _vec(q, self.rank)
        out = ZERO
        for i, pi in enumerate(p):
            if pi:
                out = angle_add(out, angle_scale(pi, dot(q, self.pairing[i])))
        return out

    def transpose(self) -> "Bicharacter":
        return Bicharacter(self.rank, tuple(tuple(self.pairing[j][i] for j in range(self.rank))
                                            for i in range(self.rank)), self.orders)

    def __neg__(self) -> "Bicharacter":
        return Bicharacter(self.rank, tuple(tuple(-a for a in r) for r in self.pairing), self.orders)

    def __sub__(self, other: "Bicharacter") -> "Bicharacter":
        return Bicharacter(self.rank, tuple(tuple(a - b for a, b in zip(r, s))
                                            for r, s in zip(self.pairing, other.pairing)), self.orders)

    def is_trivial(self) -> bool:
        return all(is_zero(a) for r in self.pairing for a in r)

    def is_antisymmetric(self) -> bool:
        return all(self.pairing[i][j] == -self.pairing[j][i]
                   for i in range(self.rank) for j in range(self.rank))

    def is_well_defined(self) -> bool:
        """Each cyclic coordinate of order d pairs to zero after scaling by d."""
        if self.orders is None:
            return True
        for i, d in enumerate(self.orders):
            if d == 0:
                continue
            for j in range(self.rank):
                if not is_zero(angle_scale(d, self.pairing[i][j])) or \
                        not is_zero(angle_scale(d, self.pairing[j][i])):
                    return False
        return True

    def to_json(self) -> dict:
        out = {"rank": self.rank, "pairing": [[str(a) for a in r] for r in self.pairing]}
        if self.orders is not None:
            out["orders"] = list(self.orders)
        return out


# --------------------------------------------------------------------------
# cochains and cocycles

@dataclass(frozen=True)
class OneCochain:
    """A normalised 1-cochain tabulated on a finite set of points of Z^rank."""

    rank: int
    values: Mapping[Vector, ExactAngle] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        zero = (0,) * self.rank
        vals = dict(self.values)
        if zero in vals and not is_zero(vals[zero]):
            raise ValueError("1-cochain must vanish at 0")
        vals[zero] = ZERO
        for k in vals:
            _vec(k, self.rank)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, rank: int, radius: int, fn: Callable[[Vector], ExactAngle]) -> "OneCochain":
        return cls(rank, {m: fn(m) for m in box_points(rank, radius)})

    @classmethod
    def zero(cls, rank: int) -> "OneCochain":
        return cls(rank, {})

    def __call__(self, m: Sequence[int]) -> ExactAngle:
        m = _vec(m, self.rank)
        if not any(m):
            return ZERO
        try:
            return self.values[m]
        except KeyError:
            raise OutOfBoxError(f"cochain not tabulated at {m}") from None

    def __contains__(self, m) -> bool:
        return tuple(m) in self.values

    def domain(self) -> list[Vector]:
        return sorted(self.values)

    def __neg__(self) -> "OneCochain":
        return OneCochain(self.rank, {k: -v for k, v in self.values.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, OneCochain) and self.rank == other.rank and self.values == other.values

    def to_json(self) -> list:
        return [[list(k), str(v)] for k, v in sorted(self.values.items()) if any(k)]


@dataclass(frozen=True)
class Cocycle2:
    rank: int
    base: Bicharacter
    cochain: OneCochain | None = None

    def __post_init__(self):
        if self.base.rank != self.rank or (self.cochain is not None and self.cochain.rank != self.rank):
            raise ValueError("rank mismatch inside cocycle presentation")

    @classmethod
    def trivial(cls, rank: int) -> "Cocycle2":
        return cls(rank, Bicharacter.trivial(rank))

    @classmethod
    def of(cls, base: Bicharacter, cochain: OneCochain | None = None) -> "Cocycle2":
        return cls(base.rank, base, cochain)

    def __call__(self, p, q) -> ExactAngle:
        return eval_cocycle(self, p, q)


def eval_cocycle(sigma: Cocycle2, p: Sequence[int], q: Sequence[int]) -> ExactAngle:
    p, q = _vec(p, sigma.rank), _vec(q, sigma.rank)
    out = sigma.base(p, q)
    b = sigma.cochain
    if b is not None:
        out = out + b(p) + b(q) - b(_add(p, q))
    return out


def coboundary(b: OneCochain) -> Cocycle2:
    return Cocycle2(b.rank, Bicharacter.trivial(b.rank), b)


def star(sigma: Cocycle2) -> Cocycle2:
    """``(star sigma)(g, h) = -sigma(h, g)``."""
    b = -sigma.cochain if sigma.cochain is not None else None
    return Cocycle2(sigma.rank, -sigma.base.transpose(), b)


def antisymmetrize(sigma: Cocycle2) -> Bicharacter:
    """The skew bicharacter ``sigma - sigma^T``; the coboundary part cancels."""
    return sigma.base - sigma.base.transpose()


def bicharacter_from_skew(skew: Bicharacter) -> Bicharacter:
    """Strictly lower triangular bicharacter whose own skew form is ``skew``."""
    l = skew.rank
    rows = [[skew.pairing[i][j] if i > j else ZERO for j in range(l)] for i in range(l)]
    return Bicharacter.from_rows(rows, skew.orders)


def bicharacter_from_cocycle(sigma: Cocycle2) -> Bicharacter:
    return bicharacter_from_skew(antisymmetrize(sigma))


def is_cohomologous(sigma: Cocycle2, tau: Cocycle2) -> bool:
    if sigma.rank != tau.rank:
        raise ValueError("cocycles of different rank")
    return antisymmetrize(sigma).pairing == antisymmetrize(tau).pairing


def skew_centre(skew: Bicharacter) -> Sublattice:
    """Centre computed directly from an antisymmetric pairing."""
    l = skew.rank
    rows = [[skew.pairing[i][j] for i in range(l)] for j in range(l)]
    return rational_kernel_mod1(rows, l)


def centre(omega: Bicharacter) -> Sublattice:
    """``{a : (omega omega*)(a, b) = 0 for all b}`` as a sublattice of Z^l."""
    return skew_centre(omega - omega.transpose())


# --------------------------------------------------------------------------
# vanishing on the centre

@dataclass(frozen=True)
class CentreNormalForm:
    """Output of :func:`vanish_on_centre_normalize`.

    ``frame`` is a unimodular matrix whose columns f_i give a basis of Z^l
    adapted to the centre: ``Z = span(d_i f_i)``.  ``coframe`` is its inverse;
    the quotient map sends ``p`` to the coordinates ``coframe @ p`` restricted
    to ``kept`` and reduced modulo ``orders``.
    """

    omega_prime: Bicharacter
    centre: Sublattice
    omega_tilde: Bicharacter
    frame: Matrix
    coframe: Matrix
    invariants: tuple[int, ...]
    kept: tuple[int, ...]

    def project(self, p: Sequence[int]) -> Vector:
        coords = matvec(self.coframe, p)
        out = []
        for i in self.kept:
            d = self.invariants[i]
            out.append(coords[i] % d if d else coords[i])
        return tuple(out)

    def centre_generators(self) -> list[list[int]]:
        """``d_i f_i`` for the centre directions."""
        l = len(self.frame)
        return [[self.invariants[i] * self.frame[r][i] for r in range(l)]
                for i in range(l) if self.invariants[i] != 0]

    def to_json(self) -> dict:
        return {
            "Z_omega": self.centre.to_json(),
            "omega_prime": self.omega_prime.to_json(),
            "omega_tilde": self.omega_tilde.to_json(),
            "quotient_orders": list(self.omega_tilde.orders or ()),
        }


def _conjugate(pairing: Sequence[Sequence[ExactAngle]], a: Matrix) -> list[list[ExactAngle]]:
    """Pairing matrix of ``(p, q) -> omega(a p, a q)``, i.e. ``a^T W a``."""
    n = len(a)
    cols = len(a[0]) if a else 0
    at = transpose(a, cols)
    half = [[dot([a[k][j] for k in range(n)], [pairing[i][k] for k in range(n)]) for j in range(cols)]
            for i in range(n)]  # W a
    return [[dot(at[i], [half[k][j] for k in range(n)]) for j in range(cols)] for i in range(cols)]


def vanish_on_centre_normalize(omega: Bicharacter) -> CentreNormalForm:
    """Cohomologous bicharacter vanishing on the centre, plus its quotient.

    The centre Z is put in Smith form against Z^l, giving a frame f_i with
    ``Z = span(d_i f_i)``.  In that frame the strictly lower triangular part
    of the skew form already kills Z on both sides, and descends to the
    quotient ``Z^l / Z = sum Z/d_i``.
    """
    l = omega.rank
    skew = omega - omega.transpose()
    z = skew_centre(skew)
    if z.rank:
        s, u, _ = smith_normal_form(z.basis_matrix())
        d = diagonal(s)
        frame = unimodular_inverse(u)
        coframe = u
    else:
        d, frame, coframe = [], [[int(i == j) for j in range(l)] for i in range(l)], \
            [[int(i == j) for j in range(l)] for i in range(l)]
    invariants = tuple(list(d) + [0] * (l - len(d)))
    adapted = _conjugate(skew.pairing, frame)
    lower = [[adapted[i][j] if i > j else ZERO for j in range(l)] for i in range(l)]
    # back to standard coordinates: coframe^T W coframe
    omega_prime = Bicharacter.from_rows(_conjugate(lower, coframe))
    kept = tuple(i for i in range(l) if invariants[i] != 1)
    tilde = Bicharacter.from_rows([[lower[i][j] for j in kept] for i in kept],
                                  [invariants[i] for i in kept])
    return CentreNormalForm(omega_prime, z, tilde, frame, coframe, invariants, kept)


def twisted_group_algebra_simple(omega_tilde: Bicharacter) -> bool:
    """Trivial centre test on ``Z^r + finite part`` (presented by ``orders``)."""
    r = omega_tilde.rank
    if r == 0:
        return True
    orders = omega_tilde.orders or (0,) * r
    lifts = skew_centre(omega_tilde - omega_tilde.transpose())
    for v in lifts.basis:
        for x, d in zip(v, orders):
            if (d == 0 and x != 0) or (d and x % d):
                return False
    return True


def trace_canonical(f: Mapping[Vector, complex]) -> complex:
    """The canonical trace: value at the identity."""
    for k, v in f.items():
        if not any(k):
            return complex(v)
    return 0j


def group_convolve(f: Mapping[Vector, complex], g: Mapping[Vector, complex], omega: Bicharacter
                   ) -> dict[Vector, complex]:
    """Twisted convolution on Z^l: ``(f*g)(r) = sum e(omega(p,q)) f(p) g(q)``, p + q = r."""
    out: dict[Vector, complex] = {}
    for p, a in f.items():
        for q, b in g.items():
            r = _add(p, q)
            out[r] = out.get(r, 0j) + phase(omega(p, q)) * a * b
    return {k: v for k, v in out.items() if v != 0}


# --------------------------------------------------------------------------
# flattening a cohomologous cocycle onto its bicharacter

def flatten_to_constant(rho: Cocycle2, omega: Bicharacter, radius: int) -> OneCochain:
    """A 1-cochain b on the cube of the given radius with ``delta b = rho - omega``.

    Built one generator at a time: b vanishes on 0 and on each e_i, and for a
    point whose last nonzero coordinate is i,
    ``b(m) = b(m - e_i) - c(e_i, m - e_i)`` (stepping up) or
    ``b(m) = b(m + e_i) + c(e_i, m)`` (stepping down), with ``c = rho - omega``.
    The full identity is then verified on every pair inside the cube.
    """
    l = rho.rank
    if omega.rank != l:
        raise ValueError("rank mismatch")
    if not is_cohomologous(rho, Cocycle2.of(omega)):
        raise NotCohomologousError("not cohomologous")

    def c(p, q):
        return eval_cocycle(rho, p, q) - omega(p, q)

    values: dict[Vector, ExactAngle] = {(0,) * l: ZERO}
    # ordering by (last nonzero index, |last coordinate|) makes each lookup
    # refer to a point already computed
    def key(m):
        nz = [i for i, x in enumerate(m) if x]
        i = nz[-1] if nz else -1
        return (i, abs(m[i]) if nz else 0)

    for m in sorted(box_points(l, radius), key=key):
        nz = [i for i, x in enumerate(m) if x]
        if not nz:
            continue
        i = nz[-1]
        e = tuple(int(j == i) for j in range(l))
        if m[i] > 0:
            prev = tuple(a - b for a, b in zip(m, e))
            values[m] = values[prev] - c(e, prev)
        else:
            nxt = _add(m, e)
            values[m] = values[nxt] + c(e, m)
    b = OneCochain(l, values)
    pts = box_points(l, radius)
    inside = set(pts)
    for p in pts:
        for q in pts:
            s = _add(p, q)
            if s not in inside:
                continue
            if b(p) + b(q) - b(s) != c(p, q):
                raise FlatteningError(f"recursion inconsistent at p={p}, q={q}")
    return b
