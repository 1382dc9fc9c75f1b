"""Brute-force cross-checks: definition-level enumerations and epsilon-nets.

None of these decide anything on their own; they exist to catch a wrong
translation between a definition and the finite criteria used elsewhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .exact_circle import ExactAngle, approx
from .graphs import EdgeLabeling, EPPoint, Graph, _primitive_root, enumerate_points, label_sum
from .groupoid import _certificate
from .lattice import Sublattice


@dataclass
class OracleResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, **self.details}


# --------------------------------------------------------------------------
# periodicity and minimality by enumeration

def iter_points(g: Graph, max_prefix: int, max_cycle: int) -> Iterator[EPPoint]:
    """EP points by increasing cycle length, then prefix length (repeats possible)."""
    for n in range(1, max_cycle + 1):
        for v in g.vertices:
            for c in g.words_to(v, n):
                if g.edge[c[-1]].o != v or _primitive_root(c) != c:
                    continue
                for k in range(max_prefix + 1):
                    for pre in g.words_from(v, k):
                        yield EPPoint.make(pre, c)


def brute_force_P_T(g: Graph, max_prefix: int = 6, max_cycle: int = 6, max_p: int = 8) -> int:
    """Generator of ``{p : (x, p, x) in G for every enumerated x}`` among |p| <= max_p.

    Cycles are enumerated up to ``max(max_cycle, 2 * max_p + 2)``: two
    distinct cycles through a vertex concatenate to a primitive cycle of the
    summed length, so a refuting point for p in range is always reached.
    Each p stops at the first point refuting it.
    """
    bound = max(max_cycle, 2 * max_p + 2)
    for p in range(1, max_p + 1):
        if all(_certificate(x, p, x) is not None and _certificate(x, -p, x) is not None
               for x in iter_points(g, max_prefix, bound)):
            return p
    return 0


def orbit_meets_cylinder(g: Graph, x: EPPoint, mu: Sequence[str], depth: int) -> bool:
    """Some ``lam T^n x`` starts with ``mu`` (|lam| and n bounded by the search depth)."""
    mu = tuple(mu)
    horizon = len(x.prefix) + len(x.cycle) + depth
    for n in range(horizon + 1):
        y = x.shift(n)
        v = y.terminus(g)
        # lam = mu nu with nu a word from v to o(mu)
        target = g.edge[mu[-1]].o
        for k in range(0, depth + 1):
            for nu in g.words_from(v, k):
                if (nu and g.edge[nu[0]].t == target) or (not nu and v == target):
                    return True
        # lam a proper prefix of mu, the rest supplied by y
        for j in range(len(mu)):
            if y.head(len(mu) - j) == mu[j:]:
                return True
    return False


def minimal_by_cylinders(g: Graph, depth: int = 6, max_points: int = 400) -> bool:
    """Every enumerated point's orbit meets every cylinder of length <= depth."""
    pts = enumerate_points(g, 2, min(depth, len(g.vertices) + 1))[:max_points]
    cylinders = set()
    for v in g.vertices:
        for k in range(1, depth + 1):
            for w in g.words_to(v, k):
                cylinders.add(w)
    return all(orbit_meets_cylinder(g, x, mu, depth) for x in pts for mu in sorted(cylinders))


def point_counts(g: Graph, bounds: Sequence[int]) -> list[int]:
    return [len(enumerate_points(g, n, n)) for n in bounds]


def uncountable_by_growth(g: Graph) -> bool:
    """EP point counts keep growing once the bound exceeds the vertex count."""
    n = len(g.vertices)
    a, b = point_counts(g, [n + 1, n + 3])
    return b > a


# --------------------------------------------------------------------------
# epsilon-nets

def _values(angles: Sequence[ExactAngle]) -> np.ndarray:
    return np.array([approx(a) for a in angles], dtype=float)


def _circ(d: np.ndarray) -> np.ndarray:
    d = np.mod(d, 1.0)
    return np.minimum(d, 1.0 - d)


def subgroup_sample(gens: np.ndarray, budget: int, rng: np.random.Generator) -> np.ndarray:
    """Points ``sum k_i g_i mod 1`` (rows), ``gens`` of shape (r, d).

    Half the budget goes to the full grid |k_i| <= K, the rest to random
    coefficient vectors up to ``budget`` in size.  Long words matter when an
    irrational generator sits close to a rational one.
    """
    r = gens.shape[0]
    if r == 0:
        return np.zeros((1, gens.shape[1]))
    half = max(1, budget // 2)
    k = max(1, int((half ** (1.0 / r) - 1) // 2))
    grid = np.array(list(itertools.product(range(-k, k + 1), repeat=r)), dtype=float)
    wide = rng.integers(-budget, budget + 1, size=(budget - len(grid), r)).astype(float)
    return np.mod(np.vstack([grid, wide]) @ gens, 1.0)


def covers(points: np.ndarray, eps: float, samples: int, rng: np.random.Generator) -> tuple[bool, list[float] | None]:
    """Every random target lies within eps (sup metric on the torus) of some point."""
    d = points.shape[1]
    targets = rng.random((samples, d))
    tree = cKDTree(np.mod(points, 1.0), boxsize=1.0)
    dist, _ = tree.query(targets, p=np.inf)
    bad = np.nonzero(dist >= eps)[0]
    if bad.size:
        return False, targets[bad[0]].tolist()
    return True, None


def circle_net(gens: Sequence[ExactAngle], claim_dense: bool, finite_group: Sequence[ExactAngle] = (),
               eps: float = 0.05, samples: int = 10_000, seed: int = 0, budget: int = 20_000) -> OracleResult:
    rng = np.random.default_rng(seed)
    g = _values(gens).reshape(len(gens), 1)
    pts = subgroup_sample(g, budget, rng)
    if claim_dense:
        ok, miss = covers(pts, eps, samples, rng)
        return OracleResult("circle_net", ok, {"uncovered_target": miss})
    fam = _values(finite_group)
    dist = _circ(pts[:, 0][:, None] - fam[None, :]).min(axis=1) if fam.size else np.full(len(pts), 1.0)
    ok = bool((dist < 1e-9).all())
    return OracleResult("circle_net", ok, {"max_distance": float(dist.max())})


def torus_net(gens: Sequence[Sequence[ExactAngle]], dim: int, claim_dense: bool,
              annihilator: Sublattice | None = None, eps: float = 0.05, samples: int = 10_000,
              seed: int = 0, budget: int = 40_000) -> OracleResult:
    """Coverage for dense claims; otherwise every sample must satisfy m . y = 0 mod 1."""
    rng = np.random.default_rng(seed)
    g = np.array([[approx(a) for a in v] for v in gens], dtype=float).reshape(len(gens), dim)
    pts = subgroup_sample(g, budget, rng)
    if claim_dense:
        ok, miss = covers(pts, eps, samples, rng)
        return OracleResult("torus_net", ok, {"uncovered_target": miss})
    assert annihilator is not None
    worst = 0.0
    for m in annihilator.basis:
        worst = max(worst, float(_circ(pts @ np.array(m, dtype=float)).max()))
    return OracleResult("torus_net", worst < 1e-9, {"max_residual": worst})


def labels_stay_in_cosets(g: Graph, ell: EdgeLabeling, x: EPPoint, vertex: str,
                          cosets: Sequence[ExactAngle], depth: int = 6) -> bool:
    """Enumerated orbit points ``lam T^n x`` with terminus ``vertex`` keep labels in the coset list."""
    allowed = set(cosets)
    for n in range(depth + 1):
        y = x.shift(n)
        base = -label_sum(ell, x.head(n))
        v = y.terminus(g)
        for k in range(depth + 1):
            for lam in g.words_from(v, k):
                if g.terminus(lam, v) == vertex and base + label_sum(ell, lam) not in allowed:
                    return False
    return True


def forward_labels_within(g: Graph, ell: EdgeLabeling, v: str, w: str, eps: float,
                          max_len: int, samples: int = 200, seed: int = 0) -> bool:
    """Labels of words from v to w come within eps of random targets."""
    rng = np.random.default_rng(seed)
    vals = []
    for k in range(max_len + 1):
        for mu in g.words_from(v, k):
            if g.terminus(mu, v) == w:
                vals.append(approx(label_sum(ell, mu)))
    if not vals:
        return False
    pts = np.array(vals).reshape(-1, 1)
    ok, _ = covers(pts, eps, samples, rng)
    return ok
