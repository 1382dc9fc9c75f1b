"""Finite directed graphs as shift systems on their infinite path spaces.

Conventions.  An edge ``e`` runs from its origin ``o(e)`` to its terminus
``t(e)``.  A word ``e1 e2 ... en`` is composable when ``o(e_i) = t(e_{i+1})``,
so it is read against the edge direction: it starts (``t``) at ``t(e1)`` and
ends (``o``) at ``o(en)``.  The shift drops the first edge of an infinite
path.  Only eventually periodic points are represented.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

import networkx as nx

from .exact_circle import ZERO, ExactAngle, angle_sum, format_angle
from .lattice import Sublattice

Word = tuple[str, ...]


class GraphError(ValueError):
    pass


class NonMinimalError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    name: str
    o: str
    t: str


@dataclass(frozen=True)
class Graph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise GraphError("duplicate vertex names")
        names = [e.name for e in self.edges]
        if len(set(names)) != len(names):
            raise GraphError("duplicate edge names")
        for e in self.edges:
            if e.o not in vs or e.t not in vs:
                raise GraphError(f"edge {e.name!r} uses an undeclared vertex")
        hit = {e.t for e in self.edges}
        missing = [v for v in self.vertices if v not in hit]
        if missing:
            raise GraphError(f"terminus map not surjective; vertices receiving no edge: {missing}")
        if not self.vertices:
            raise GraphError("graph has no vertices")

    @classmethod
    def build(cls, edges: Iterable[tuple[str, str, str]], vertices: Iterable[str] | None = None) -> "Graph":
        """From ``(name, origin, terminus)`` triples."""
        es = tuple(Edge(str(n), str(o), str(t)) for n, o, t in edges)
        if vertices is None:
            seen: dict[str, None] = {}
            for e in es:
                seen.setdefault(e.o)
                seen.setdefault(e.t)
            vertices = seen
        return cls(tuple(str(v) for v in vertices), es)

    # -- lookups --------------------------------------------------------------
    @cached_property
    def edge(self) -> dict[str, Edge]:
        return {e.name: e for e in self.edges}

    @cached_property
    def into(self) -> dict[str, tuple[Edge, ...]]:
        """Edges with a given terminus (the ways a path can start at a vertex)."""
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.t].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def out_of(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.o].append(e)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def digraph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.vertices)
        for e in self.edges:
            g.add_edge(e.o, e.t, key=e.name)
        return g

    @cached_property
    def components(self) -> list[frozenset[str]]:
        """Strongly connected components carrying at least one cycle."""
        out = []
        for comp in nx.strongly_connected_components(self.digraph):
            comp = frozenset(comp)
            if any(e.o in comp and e.t in comp for e in self.edges):
                out.append(comp)
        return sorted(out, key=lambda c: sorted(c))

    def internal_edges(self, comp: frozenset[str]) -> list[Edge]:
        return [e for e in self.edges if e.o in comp and e.t in comp]

    def reaches(self, u: str, w: str) -> bool:
        """A word with origin u and terminus w exists (possibly empty)."""
        return u == w or nx.has_path(self.digraph, u, w)

    # -- words ----------------------------------------------------------------
    def is_word(self, word: Sequence[str]) -> bool:
        try:
            es = [self.edge[n] for n in word]
        except KeyError:
            return False
        return all(a.o == b.t for a, b in zip(es, es[1:]))

    def terminus(self, word: Sequence[str], vertex: str | None = None) -> str:
        if not word:
            if vertex is None:
                raise GraphError("empty word needs an explicit vertex")
            return vertex
        return self.edge[word[0]].t

    def origin(self, word: Sequence[str], vertex: str | None = None) -> str:
        if not word:
            if vertex is None:
                raise GraphError("empty word needs an explicit vertex")
            return vertex
        return self.edge[word[-1]].o

    def words_from(self, origin: str, length: int) -> Iterator[Word]:
        """Words of exactly ``length`` edges whose origin is ``origin``."""
        if length == 0:
            yield ()
            return
        stack: list[tuple[Word, str]] = [((), origin)]
        while stack:
            w, v = stack.pop()
            for e in self.out_of[v]:
                nw = (e.name,) + w
                if len(nw) == length:
                    yield nw
                else:
                    stack.append((nw, e.t))

    def words_to(self, terminus: str, length: int) -> Iterator[Word]:
        """Words of exactly ``length`` edges starting (terminus side) at a vertex."""
        if length == 0:
            yield ()
            return
        stack: list[tuple[Word, str]] = [((), terminus)]
        while stack:
            w, v = stack.pop()
            for e in self.into[v]:
                nw = w + (e.name,)
                if len(nw) == length:
                    yield nw
                else:
                    stack.append((nw, e.o))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [{"name": e.name, "o": e.o, "t": e.t} for e in self.edges]}


# --------------------------------------------------------------------------
# eventually periodic points

def _primitive_root(cycle: Word) -> Word:
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle == cycle[:d] * (n // d):
            return cycle[:d]
    return cycle


@dataclass(frozen=True)
class EPPoint:
    """The infinite path ``prefix . cycle . cycle . ...`` in canonical form."""

    prefix: Word
    cycle: Word

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.prefix, self.cycle))
            object.__setattr__(self, "_hash", h)
            return h

    @classmethod
    def make(cls, prefix: Sequence[str], cycle: Sequence[str]) -> "EPPoint":
        prefix, cycle = tuple(prefix), _primitive_root(tuple(cycle))
        if not cycle:
            raise GraphError("cycle must be nonempty")
        while prefix and prefix[-1] == cycle[-1]:
            prefix, cycle = prefix[:-1], (cycle[-1],) + cycle[:-1]
        return cls(prefix, cycle)

    def validate(self, g: Graph) -> "EPPoint":
        word = self.prefix + self.cycle + self.cycle[:1]
        if not g.is_word(word):
            raise GraphError(f"{self} is not an infinite path of the graph")
        return self

    def terminus(self, g: Graph) -> str:
        return g.edge[(self.prefix or self.cycle)[0]].t

    def head(self, n: int) -> Word:
        """The first n edges ``x(0, n)``."""
        if n <= len(self.prefix):
            return self.prefix[:n]
        k = n - len(self.prefix)
        reps = -(-k // len(self.cycle))
        return self.prefix + (self.cycle * reps)[:k]

    def shift(self, n: int) -> "EPPoint":
        return shift(self, n)

    def prepend(self, word: Sequence[str]) -> "EPPoint":
        return EPPoint.make(tuple(word) + self.prefix, self.cycle)

    def __str__(self):
        return f"{'.'.join(self.prefix) or '()'}|({'.'.join(self.cycle)})^inf"

    def to_json(self) -> dict:
        return {"prefix": list(self.prefix), "cycle": list(self.cycle)}


def shift(x: EPPoint, n: int) -> EPPoint:
    if n < 0:
        raise ValueError("shift by a negative amount")
    if n <= len(x.prefix):
        return EPPoint(x.prefix[n:], x.cycle) if n else x
    k = (n - len(x.prefix)) % len(x.cycle)
    return EPPoint((), x.cycle[k:] + x.cycle[:k])


def primitive_cycles(g: Graph, max_len: int) -> list[Word]:
    """All primitive closed words of length <= max_len (every rotation listed)."""
    out = []
    for v in g.vertices:
        for n in range(1, max_len + 1):
            for w in g.words_to(v, n):
                if g.edge[w[-1]].o == v and _primitive_root(w) == w:
                    out.append(w)
    return sorted(set(out), key=lambda w: (len(w), w))


def enumerate_points(g: Graph, max_prefix: int, max_cycle: int) -> list[EPPoint]:
    """Canonical EP points with |prefix| <= max_prefix and |cycle| <= max_cycle."""
    pts = set()
    for c in primitive_cycles(g, max_cycle):
        base = g.edge[c[0]].t
        for k in range(max_prefix + 1):
            for pre in g.words_from(base, k):
                pts.add(EPPoint.make(pre, c))
    return sorted(pts, key=lambda p: (len(p.prefix) + len(p.cycle), p.prefix, p.cycle))


# --------------------------------------------------------------------------
# labels

@dataclass(frozen=True)
class EdgeLabeling:
    labels: Mapping[str, ExactAngle] = field(hash=False)

    def __post_init__(self):
        object.__setattr__(self, "labels", dict(self.labels))

    @classmethod
    def constant(cls, g: Graph, value: ExactAngle = ZERO) -> "EdgeLabeling":
        return cls({e.name: value for e in g.edges})

    def check_total(self, g: Graph) -> "EdgeLabeling":
        missing = [e.name for e in g.edges if e.name not in self.labels]
        if missing:
            raise GraphError(f"edges without labels: {missing}")
        return self

    def __getitem__(self, name: str) -> ExactAngle:
        return self.labels[name]

    def __eq__(self, other):
        return isinstance(other, EdgeLabeling) and self.labels == other.labels

    def __hash__(self):
        return hash(tuple(sorted(self.labels.items())))

    def to_json(self) -> dict:
        return {k: format_angle(v) for k, v in sorted(self.labels.items())}


def label_sum(ell: EdgeLabeling, word: Sequence[str]) -> ExactAngle:
    return angle_sum(ell[e] for e in word)


def h_tilde(ell: EdgeLabeling, mu: Sequence[str], nu: Sequence[str], g: Graph | None = None,
            vertex: str | None = None) -> ExactAngle:
    """``l(mu) - l(nu)`` for words with a common origin.

    With a graph supplied the common-origin requirement is enforced; an empty
    word then takes its origin from ``vertex`` or from the other word.
    """
    if g is not None:
        om = g.origin(mu, vertex) if mu or vertex else None
        on = g.origin(nu, vertex) if nu or vertex else None
        if om is not None and on is not None and om != on:
            raise GraphError(f"words {mu} and {nu} have different origins {om} != {on}")
    return label_sum(ell, mu) - label_sum(ell, nu)


# --------------------------------------------------------------------------
# dynamics-level decisions

def is_minimal(g: Graph) -> bool:
    """Every vertex on a cycle reaches every vertex."""
    return non_minimal_witness(g) is None


def non_minimal_witness(g: Graph) -> tuple[str, str] | None:
    """A cycle vertex u and a vertex w with no word from u to w, if any."""
    dg = g.digraph
    for comp in g.components:
        u = min(comp)
        reach = nx.descendants(dg, u) | {u}
        for w in g.vertices:
            if w not in reach:
                return u, w
    return None


def is_path_space_uncountable(g: Graph) -> bool:
    """Some cyclic component carries more than one cycle."""
    return any(len(g.internal_edges(c)) > len(c) for c in g.components)


def component_period(g: Graph, comp: frozenset[str]) -> int:
    """gcd of cycle lengths in a strongly connected component."""
    level: dict[str, int] = {}
    start = min(comp)
    level[start] = 0
    queue = deque([start])
    gcd = 0
    edges = g.internal_edges(comp)
    adj: dict[str, list[str]] = {v: [] for v in comp}
    for e in edges:
        adj[e.o].append(e.t)
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in level:
                level[w] = level[v] + 1
                queue.append(w)
    for e in edges:
        gcd = math.gcd(gcd, level[e.o] + 1 - level[e.t])
    return gcd


@dataclass(frozen=True)
class ProductSystem:
    """Commuting shifts on a product of path spaces, one coordinate per graph."""

    components: tuple[tuple[Graph, EdgeLabeling | None], ...]

    def __post_init__(self):
        if not self.components:
            raise GraphError("a product system needs at least one component")

    @classmethod
    def of(cls, *graphs: Graph | tuple[Graph, EdgeLabeling | None]) -> "ProductSystem":
        comps = []
        for g in graphs:
            comps.append(g if isinstance(g, tuple) else (g, None))
        return cls(tuple(comps))

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def graphs(self) -> list[Graph]:
        return [g for g, _ in self.components]

    def is_minimal(self) -> bool:
        return all(is_minimal(g) for g in self.graphs)

    def is_countable(self) -> bool:
        return not any(is_path_space_uncountable(g) for g in self.graphs)


def component_P_T(g: Graph) -> int:
    """Generator of the periodicity group of a minimal graph (0 for the trivial group)."""
    if not is_minimal(g):
        raise NonMinimalError("P_T defined here only for minimal systems")
    if is_path_space_uncountable(g):
        return 0
    (comp,) = g.components
    return len(comp)


def compute_P_T(s: ProductSystem) -> Sublattice:
    gens = [component_P_T(g) for g in s.graphs]
    k = s.k
    return Sublattice.span(k, [[gens[i] if i == j else 0 for j in range(k)] for i in range(k)])


def _irrational_part(a: ExactAngle) -> ExactAngle:
    return ExactAngle(Fraction(0), a.coeffs, a.basis)


def component_has_irrational_cycle(g: Graph, ell: EdgeLabeling, comp: frozenset[str]) -> bool:
    """Some cycle inside ``comp`` has a label with nonzero irrational part.

    Equivalent to the irrational part of the labels on internal edges failing
    to be a vertex-potential difference.
    """
    edges = g.internal_edges(comp)
    pot: dict[str, ExactAngle] = {}
    start = min(comp)
    pot[start] = ZERO
    adj: dict[str, list[tuple[str, ExactAngle]]] = {v: [] for v in comp}
    for e in edges:
        w = _irrational_part(ell[e.name])
        adj[e.o].append((e.t, w))
        adj[e.t].append((e.o, -w))
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w, a in adj[v]:
            if w not in pot:
                pot[w] = pot[v] + a
                queue.append(w)
    return any(pot[e.t] - pot[e.o] != _irrational_part(ell[e.name]) for e in edges)


@dataclass(frozen=True)
class DensityResult:
    dense: bool
    vertex: str | None = None
    reason: str = ""
    cosets: tuple[ExactAngle, ...] = ()
    generator_cycle: tuple[str, ...] = ()

    def to_json(self) -> dict:
        out: dict = {"dense": self.dense, "reason": self.reason}
        if self.vertex is not None:
            out["vertex"] = self.vertex
        if self.cosets:
            out["cosets"] = [format_angle(a) for a in self.cosets]
        if self.generator_cycle:
            out["cycle"] = list(self.generator_cycle)
        return out


MAX_STATES = 200_000


def label_states(g: Graph, ell: EdgeLabeling, starts: Iterable[tuple[str, ExactAngle]],
                 allowed: set[str] | None = None, max_states: int = MAX_STATES) -> dict[str, set[ExactAngle]]:
    """Reachable (vertex, label) pairs following edges from origin to terminus."""
    seen: dict[str, set[ExactAngle]] = {}
    queue = deque()
    for v, a in starts:
        if allowed is not None and v not in allowed:
            continue
        if a not in seen.setdefault(v, set()):
            seen[v].add(a)
            queue.append((v, a))
    count = sum(len(s) for s in seen.values())
    while queue:
        v, a = queue.popleft()
        for e in g.out_of[v]:
            if allowed is not None and e.t not in allowed:
                continue
            b = a + ell[e.name]
            bucket = seen.setdefault(e.t, set())
            if b not in bucket:
                bucket.add(b)
                count += 1
                if count > max_states:
                    raise RuntimeError("label state enumeration exceeded its budget")
                queue.append((e.t, b))
    return seen


def _route_vertices(g: Graph, v: str, w: str) -> set[str]:
    dg = g.digraph
    down = nx.descendants(dg, v) | {v}
    up = nx.ancestors(dg, w) | {w}
    return down & up


def route_is_dense(g: Graph, ell: EdgeLabeling, v: str, w: str) -> tuple[bool, tuple[str, ...]]:
    """Labels of words from v to w are dense in the circle; returns a witnessing cycle."""
    on_route = _route_vertices(g, v, w)
    for comp in g.components:
        if comp <= on_route and component_has_irrational_cycle(g, ell, comp):
            return True, _irrational_cycle(g, ell, comp)
    return False, ()


def _irrational_cycle(g: Graph, ell: EdgeLabeling, comp: frozenset[str]) -> tuple[str, ...]:
    # a failing edge closes a cycle through the BFS tree with irrational label
    for n in range(1, 2 * len(comp) + 2):
        for c in primitive_cycles_in(g, comp, n):
            if not label_sum(ell, c).is_rational:
                return c
    return ()


def primitive_cycles_in(g: Graph, comp: frozenset[str], n: int) -> Iterator[Word]:
    for v in sorted(comp):
        for w in g.words_to(v, n):
            if g.edge[w[-1]].o == v and all(g.edge[e].o in comp for e in w):
                yield w


def forward_orbit_dense(g: Graph, ell: EdgeLabeling, v: str) -> DensityResult:
    """Is ``{(t(mu), l(mu)) : o(mu) = v}`` dense in vertices x circle?"""
    dg = g.digraph
    reach = nx.descendants(dg, v) | {v}
    for w in g.vertices:
        if w not in reach:
            return DensityResult(False, w, "unreachable")
    for w in g.vertices:
        ok, _ = route_is_dense(g, ell, v, w)
        if not ok:
            states = label_states(g, ell, [(v, ZERO)], _route_vertices(g, v, w))
            cos = tuple(sorted(states.get(w, ()), key=_angle_key))
            return DensityResult(False, w, "finite label set", cos)
    return DensityResult(True, None, "irrational cycle on every route")


def _angle_key(a: ExactAngle):
    return (a.rational, a.coeffs)
