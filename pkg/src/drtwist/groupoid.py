"""Deaconu-Renault groupoid elements over product systems, twisted convolution,
and the tau cocycle attached to a 2-cocycle on the groupoid.

An element ``(x, p, y)`` is stored with a per-coordinate certificate
``(m_i, n_i)``: the least ``m_i >= max(0, p_i)`` such that
``T^{m_i} x_i = T^{m_i - p_i} y_i``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .cohomology import Cocycle2, eval_cocycle
from .exact_circle import ExactAngle, angle_scale, phase
from .graphs import EdgeLabeling, EPPoint, Graph, ProductSystem, compute_P_T, enumerate_points, label_sum
from .lattice import Sublattice

Point = tuple[EPPoint, ...]


class NotComposableError(ValueError):
    pass


class NotInGroupoidError(ValueError):
    pass


def _certificate(x: EPPoint, p: int, y: EPPoint) -> tuple[int, int] | None:
    lo = max(0, p)
    hi = max(len(x.prefix), len(y.prefix) + p, lo) + len(x.cycle)
    for m in range(lo, hi + 1):
        if x.shift(m) == y.shift(m - p):
            return m, m - p
    return None


@dataclass(frozen=True)
class GroupoidElem:
    x: Point
    p: tuple[int, ...]
    y: Point
    cert: tuple[tuple[int, int], ...] = field(compare=False, repr=False)

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.x, self.p, self.y))
            object.__setattr__(self, "_hash", h)
            return h

    @classmethod
    def make(cls, x: Sequence[EPPoint], p: Sequence[int], y: Sequence[EPPoint]) -> "GroupoidElem":
        x, y, p = tuple(x), tuple(y), tuple(int(v) for v in p)
        if not (len(x) == len(y) == len(p)):
            raise ValueError("rank mismatch in groupoid element")
        cert = []
        for xi, pi, yi in zip(x, p, y):
            c = _certificate(xi, pi, yi)
            if c is None:
                raise NotInGroupoidError(f"({xi}, {pi}, {yi}) is not in the groupoid")
            cert.append(c)
        return cls(x, p, y, tuple(cert))

    @classmethod
    def unit(cls, x: Sequence[EPPoint]) -> "GroupoidElem":
        x = tuple(x)
        return cls(x, (0,) * len(x), x, ((0, 0),) * len(x))

    @property
    def rank(self) -> int:
        return len(self.p)

    @property
    def range(self) -> Point:
        return self.x

    @property
    def source(self) -> Point:
        return self.y

    def is_unit(self) -> bool:
        return self.x == self.y and not any(self.p)

    def __str__(self):
        return f"({', '.join(map(str, self.x))}; {self.p}; {', '.join(map(str, self.y))})"

    def to_json(self) -> dict:
        return {"x": [a.to_json() for a in self.x], "p": list(self.p), "y": [a.to_json() for a in self.y]}


def compose(a: GroupoidElem, b: GroupoidElem) -> GroupoidElem:
    if a.y != b.x:
        raise NotComposableError(f"source of {a} differs from range of {b}")
    return GroupoidElem.make(a.x, tuple(u + v for u, v in zip(a.p, b.p)), b.y)


def inverse(a: GroupoidElem) -> GroupoidElem:
    return GroupoidElem(a.y, tuple(-v for v in a.p), a.x, tuple((n, m) for m, n in a.cert))


def degree(a: GroupoidElem) -> tuple[int, ...]:
    return a.p


def in_isotropy_interior(s: ProductSystem, a: GroupoidElem, pt: Sublattice | None = None) -> bool:
    pt = pt if pt is not None else compute_P_T(s)
    return a.x == a.y and a.p in pt


def product_with_Z(a: GroupoidElem, n: int) -> GroupoidElem:
    """Append a trivial Z coordinate acting as the single-loop graph."""
    return GroupoidElem(a.x + (LOOP_POINT,), a.p + (int(n),), a.y + (LOOP_POINT,),
                        a.cert + ((max(0, n), max(0, n) - n),))


LOOP_GRAPH = Graph.build([("z", "*", "*")])
LOOP_POINT = EPPoint((), ("z",))


# --------------------------------------------------------------------------
# cocycles on the groupoid

class CocycleSpec:
    """A normalised circle-valued 2-cocycle on a product groupoid."""

    kind = "abstract"

    def __call__(self, a: GroupoidElem, b: GroupoidElem) -> ExactAngle:
        return eval_sigma(self, a, b)

    def value(self, a: GroupoidElem, b: GroupoidElem) -> ExactAngle:  # pragma: no cover
        raise NotImplementedError

    def isotropy(self, x: Point, m: Sequence[int], n: Sequence[int]) -> ExactAngle:
        """``sigma_x(m, n)`` on the isotropy group at x."""
        return self.value(GroupoidElem.make(x, m, x), GroupoidElem.make(x, n, x))


@dataclass(frozen=True)
class DegreeCocycle(CocycleSpec):
    """Pull back of a cocycle on Z^k through the degree map."""

    rho: Cocycle2
    kind = "degree"

    def value(self, a, b):
        return eval_cocycle(self.rho, a.p, b.p)


@dataclass(frozen=True)
class CHCocycle(CocycleSpec):
    """``sigma((x,(m,n),y), (y,(p,q),z)) = n * htilde(y,p,z)`` on graph x loop."""

    graph: Graph
    labels: EdgeLabeling
    kind = "ch"

    def value(self, a, b):
        return angle_scale(a.p[1], h_tilde_elem(self.labels, b))


def eval_sigma(sigma: CocycleSpec, a: GroupoidElem, b: GroupoidElem) -> ExactAngle:
    if a.y != b.x:
        raise NotComposableError(f"source of {a} differs from range of {b}")
    return sigma.value(a, b)


def h_tilde_elem(ell: EdgeLabeling, a: GroupoidElem, coord: int = 0) -> ExactAngle:
    """``l(x(0, m)) - l(y(0, n))`` on the chosen coordinate, any valid certificate."""
    return _h_tilde(ell, a.x[coord], a.y[coord], *a.cert[coord])


@lru_cache(maxsize=1 << 16)
def _h_tilde(ell, x: EPPoint, y: EPPoint, m: int, n: int) -> ExactAngle:
    return label_sum(ell, x.head(m)) - label_sum(ell, y.head(n))


def tau(sigma: CocycleSpec, g: GroupoidElem, p: Sequence[int], pt: Sublattice | None = None) -> ExactAngle:
    """``sigma(g, (y,p,y)) + sigma(g (y,p,y), g^-1) - sigma(g, g^-1)``."""
    p = tuple(int(v) for v in p)
    if pt is not None and p not in pt:
        raise ValueError(f"{p} is not in the periodicity group")
    try:
        loop = GroupoidElem.make(g.y, p, g.y)
    except NotInGroupoidError:
        raise ValueError(f"{p} is not in the periodicity group") from None
    gi = inverse(g)
    return sigma.value(g, loop) + sigma.value(compose(g, loop), gi) - sigma.value(g, gi)


def theta_apply(sigma: CocycleSpec, g: GroupoidElem, basepoint: Point, chi: Sequence[ExactAngle],
                z_basis: Sequence[Sequence[int]]) -> tuple[Point, tuple[ExactAngle, ...]]:
    if tuple(basepoint) != g.y:
        raise ValueError("basepoint is not the source of the element")
    if len(chi) != len(z_basis):
        raise ValueError("character dimension does not match the centre basis")
    return g.x, tuple(c + tau(sigma, g, z) for c, z in zip(chi, z_basis))


# --------------------------------------------------------------------------
# finitely supported functions

TwistedFn = dict  # GroupoidElem -> complex


def convolve(f: Mapping[GroupoidElem, complex], g: Mapping[GroupoidElem, complex],
             sigma: CocycleSpec) -> dict[GroupoidElem, complex]:
    by_range: dict[Point, list[tuple[GroupoidElem, complex]]] = {}
    for b, v in g.items():
        by_range.setdefault(b.x, []).append((b, v))
    out: dict[GroupoidElem, complex] = {}
    for a, u in f.items():
        for b, v in by_range.get(a.y, ()):
            c = compose(a, b)
            out[c] = out.get(c, 0j) + phase(sigma.value(a, b)) * u * v
    return {k: v for k, v in out.items() if v != 0}


def involution(f: Mapping[GroupoidElem, complex], sigma: CocycleSpec) -> dict[GroupoidElem, complex]:
    out = {}
    for a, v in f.items():
        ai = inverse(a)
        out[ai] = phase(-sigma.value(ai, a)) * complex(v).conjugate()
    return out


def conditional_expectation(f: Mapping[GroupoidElem, complex], s: ProductSystem,
                            pt: Sublattice | None = None) -> dict[GroupoidElem, complex]:
    pt = pt if pt is not None else compute_P_T(s)
    return {a: v for a, v in f.items() if in_isotropy_interior(s, a, pt)}


# --------------------------------------------------------------------------
# truncations

def system_points(s: ProductSystem, max_prefix: int, max_cycle: int) -> list[Point]:
    per = [enumerate_points(g, max_prefix, max_cycle) for g in s.graphs]
    return [tuple(c) for c in itertools.product(*per)]


def truncation(s: ProductSystem, max_prefix: int = 4, max_cycle: int = 4, max_degree: int = 4
               ) -> list[GroupoidElem]:
    """Elements between enumerated points whose certificates are bounded by max_degree."""
    per_comp = []
    for g in s.graphs:
        pts = enumerate_points(g, max_prefix, max_cycle)
        comp = []
        for x in pts:
            for y in pts:
                for p in range(-max_degree, max_degree + 1):
                    c = _certificate(x, p, y)
                    if c is not None and max(c) <= max_degree:
                        comp.append((x, p, y, c))
        per_comp.append(comp)
    out = []
    for combo in itertools.product(*per_comp):
        out.append(GroupoidElem(tuple(c[0] for c in combo), tuple(c[1] for c in combo),
                                tuple(c[2] for c in combo), tuple(c[3] for c in combo)))
    return out


def composable_pairs(elems: Sequence[GroupoidElem]) -> Iterator[tuple[GroupoidElem, GroupoidElem]]:
    by_range: dict[Point, list[GroupoidElem]] = {}
    for b in elems:
        by_range.setdefault(b.x, []).append(b)
    for a in elems:
        for b in by_range.get(a.y, ()):
            yield a, b
