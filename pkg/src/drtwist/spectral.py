"""Density decisions in circles and tori, and the simplicity pipelines.

Verdicts carry machine-checkable reasons.  Every decision here is exact
under the irrational-basis independence contract.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

from .cohomology import (Bicharacter, Cocycle2, OneCochain, antisymmetrize, bicharacter_from_skew, flatten_to_constant,
                         twisted_group_algebra_simple, vanish_on_centre_normalize)
from .exact_circle import ExactAngle, angle, format_angle, is_zero
from .graphs import (EdgeLabeling, EPPoint, Graph, ProductSystem, component_has_irrational_cycle,
                     component_period, compute_P_T, enumerate_points, forward_orbit_dense,
                     is_path_space_uncountable, label_states, label_sum, non_minimal_witness,
                     primitive_cycles_in)
from .groupoid import LOOP_GRAPH, CHCocycle, CocycleSpec, DegreeCocycle, GroupoidElem, tau
from .lattice import Sublattice, rational_kernel_mod1

SIMPLE, NOT_SIMPLE, UNKNOWN = "Simple", "NotSimple", "Unknown"


@dataclass
class Verdict:
    status: str
    reasons: list[dict] = field(default_factory=list)
    derivation: dict = field(default_factory=dict)

    def add(self, kind: str, **data: Any) -> "Verdict":
        self.reasons.append({"kind": kind, **data})
        return self

    def to_json(self) -> dict:
        return {"status": self.status, "reasons": self.reasons, "derivation": self.derivation}


# --------------------------------------------------------------------------
# circle and torus

def _finite_subgroup(gens: Sequence[ExactAngle]) -> list[ExactAngle]:
    order = 1
    for g in gens:
        d = g.rational.denominator
        order = order * d // math.gcd(order, d)
    return [angle(f"{k}/{order}") for k in range(order)]


def circle_dense(gens: Sequence[ExactAngle]) -> tuple[bool, Any]:
    """Dense iff some generator has an irrational part; otherwise the finite subgroup."""
    for g in gens:
        if not g.is_rational:
            return True, g
    return False, _finite_subgroup(gens)


@dataclass(frozen=True)
class TorusSubgroupPresentation:
    dim: int
    generators: tuple[tuple[ExactAngle, ...], ...]
    offset: tuple[ExactAngle, ...] = ()

    def __post_init__(self):
        for g in self.generators + ((self.offset,) if self.offset else ()):
            if len(g) != self.dim:
                raise ValueError(f"vector of length {len(g)} in a {self.dim}-torus")


def annihilators(p: TorusSubgroupPresentation) -> Sublattice:
    """``{m in Z^d : m . g = 0 for every generator g}``."""
    return rational_kernel_mod1([list(g) for g in p.generators], p.dim)


def torus_dense(p: TorusSubgroupPresentation) -> tuple[bool, list[int] | None]:
    """Kronecker: dense iff no nonzero integer functional kills every generator."""
    if p.dim == 0:
        return True, None
    ann = annihilators(p)
    if ann.is_zero():
        return True, None
    best = min(ann.basis, key=lambda v: (sum(abs(x) for x in v), [-abs(x) for x in v]))
    return False, list(best)


# --------------------------------------------------------------------------
# the rotation-extended orbit on paths x circle

def _start_states(g: Graph, ell: EdgeLabeling, x: EPPoint) -> list[tuple[str, ExactAngle]]:
    """``(t(T^n x), -l(x(0, n)))`` for n covering every class modulo the cycle."""
    cyc = label_sum(ell, x.cycle)
    reps = cyc.order() or 1
    out = []
    for n in range(len(x.prefix) + reps * len(x.cycle) + 1):
        y = x.shift(n)
        out.append((y.terminus(g), -label_sum(ell, x.head(n))))
    return out


def rho_orbit_dense(g: Graph, ell: EdgeLabeling, x: EPPoint) -> tuple[bool, dict]:
    """Density of ``{(lam T^n x, l(lam) - l(x(0,n)))}`` in paths x circle.

    In a minimal graph every cycle can be spliced into the words ``lam``, so
    the orbit is dense exactly when some cycle label is irrational.  When all
    cycle labels are rational the labels over each terminus form a finite set,
    which is returned as the witness.
    """
    wit = non_minimal_witness(g)
    if wit is not None:
        return False, {"reason": "non-minimal", "cycle_vertex": wit[0], "unreached_vertex": wit[1]}
    for comp in g.components:
        if component_has_irrational_cycle(g, ell, comp):
            cyc = _first_irrational_cycle(g, ell, comp)
            return True, {"reason": "irrational cycle", "cycle": list(cyc),
                          "label": format_angle(label_sum(ell, cyc))}
    states = label_states(g, ell, _start_states(g, ell, x))
    cosets = {v: sorted(states.get(v, ()), key=lambda a: a.rational) for v in g.vertices}
    v0 = x.terminus(g)
    return False, {"reason": "finite label set", "vertex": v0,
                   "cosets": [format_angle(a) for a in cosets[v0]],
                   "per_vertex": {v: [format_angle(a) for a in c] for v, c in cosets.items()}}


def _first_irrational_cycle(g: Graph, ell: EdgeLabeling, comp) -> tuple[str, ...]:
    for n in range(1, 2 * len(comp) + 2):
        for c in primitive_cycles_in(g, comp, n):
            if not label_sum(ell, c).is_rational:
                return c
    return ()


def _representatives(g: Graph) -> list[EPPoint]:
    """One periodic point per cyclic component vertex."""
    out = []
    for comp in g.components:
        for v in sorted(comp):
            for n in range(1, len(comp) + 1):
                cyc = next((c for c in primitive_cycles_in(g, comp, n) if g.edge[c[0]].t == v), None)
                if cyc:
                    out.append(EPPoint.make((), cyc))
                    break
    return out


def crossed_product_simple(g: Graph, ell: EdgeLabeling) -> Verdict:
    """Simplicity of the graph algebra crossed by the quasi-free action of the labels."""
    ell.check_total(g)
    wit = non_minimal_witness(g)
    if wit is not None:
        return Verdict(NOT_SIMPLE).add("NonMinimalSystem", cycle_vertex=wit[0], unreached_vertex=wit[1])
    if is_path_space_uncountable(g):
        fo = [forward_orbit_dense(g, ell, v) for v in g.vertices]
        if all(r.dense for r in fo):
            return Verdict(SIMPLE).add("DenseCertificate", route="forward orbits dense at every vertex",
                                       vertices=list(g.vertices))
        results = [(x, rho_orbit_dense(g, ell, x)) for x in _representatives(g)]
        verdicts = {dense for _, (dense, _) in results}
        if len(verdicts) != 1:  # pragma: no cover - guards the basepoint independence argument
            return Verdict(UNKNOWN).add("SearchExhausted", detail="basepoint dependent orbit density")
        x, (dense, cert) = results[0]
        if dense:
            return Verdict(SIMPLE).add("DenseCertificate", route="rotation orbit dense", basepoint=str(x), **cert)
        return Verdict(NOT_SIMPLE).add("NonDenseOrbit", basepoint=str(x), **cert)
    # countable path space: decide through the twisted groupoid on graph x Z
    system = ProductSystem.of((g, ell), LOOP_GRAPH)
    v = simplicity_pipeline(system, CHCocycle(g, ell))
    x = _representatives(g)[0]
    dense, cert = rho_orbit_dense(g, ell, x)
    v.add("HypothesisFailure", detail="path space countable; decided on the twisted product groupoid")
    if dense:
        v.add("DenseCertificate", route="rotation orbit dense", basepoint=str(x), **cert)
    else:
        v.add("NonDenseOrbit", basepoint=str(x), **cert)
    return v


# --------------------------------------------------------------------------
# the general pipeline

def _basepoint(s: ProductSystem) -> tuple[EPPoint, ...]:
    return tuple(_representatives(gr)[0] for gr in s.graphs)


def isotropy_skew(s: ProductSystem, sigma: CocycleSpec, basis: Sequence[Sequence[int]],
                  x: tuple[EPPoint, ...] | None = None) -> Bicharacter:
    """``sigma_x(g_i, g_j) - sigma_x(g_j, g_i)`` on a basis of the periodicity group."""
    x = x if x is not None else _basepoint(s)
    l = len(basis)
    rows = [[sigma.isotropy(x, basis[i], basis[j]) - sigma.isotropy(x, basis[j], basis[i])
             for j in range(l)] for i in range(l)]
    return Bicharacter.from_rows(rows)


def _is_trivial(sigma: CocycleSpec) -> bool:
    if isinstance(sigma, DegreeCocycle):
        rho = sigma.rho
        return rho.base.is_trivial() and (rho.cochain is None or all(is_zero(a) for a in rho.cochain.values.values()))
    if isinstance(sigma, CHCocycle):
        return all(is_zero(a) for a in sigma.labels.labels.values())
    return False


def simplicity_pipeline(s: ProductSystem, sigma: CocycleSpec, flatten_radius: int = 2) -> Verdict:
    if not isinstance(sigma, (DegreeCocycle, CHCocycle)):
        raise TypeError("unsupported cocycle presentation")
    if isinstance(sigma, CHCocycle):
        if s.k != 2 or s.graphs[1] != LOOP_GRAPH or s.graphs[0] != sigma.graph:
            raise TypeError("the labelled cocycle lives on (graph, single loop) systems")
    elif sigma.rho.rank != s.k:
        raise ValueError("cocycle rank differs from the number of system components")

    for i, gr in enumerate(s.graphs):
        wit = non_minimal_witness(gr)
        if wit is not None:
            v = Verdict(NOT_SIMPLE).add("NonMinimalSystem", component=i, cycle_vertex=wit[0],
                                        unreached_vertex=wit[1])
            return _cross_check(v, s, sigma, minimal=False, pt=None)

    pt = compute_P_T(s)
    basis = [list(b) for b in pt.basis]
    x = _basepoint(s)
    skew = isotropy_skew(s, sigma, basis, x)
    omega = bicharacter_from_skew(skew)
    nf = vanish_on_centre_normalize(omega)
    z_coords = [list(b) for b in nf.centre.basis]
    z_basis = [[sum(c * basis[i][r] for i, c in enumerate(zc)) for r in range(s.k)] for zc in z_coords]
    derivation = {
        "P_T": pt.to_json(),
        "skew_on_P_T": [[format_angle(a) for a in r] for r in skew.pairing],
        "omega": omega.to_json(),
        "Z_omega": z_basis,
        "Z_omega_P_T_coordinates": z_coords,
        "omega_tilde": nf.omega_tilde.to_json(),
        "twisted_group_algebra_simple": twisted_group_algebra_simple(nf.omega_tilde),
        "certificates": [],
    }
    if basis:
        derivation["flattening"] = _flatten_trail(s, sigma, basis, omega, x, flatten_radius)

    d = len(z_basis)
    if d == 0:
        v = Verdict(SIMPLE, derivation=derivation).add(
            "DenseCertificate", route="trivial centre", detail="character space is a point; base system minimal")
        return _cross_check(v, s, sigma, True, pt)

    if s.is_countable():
        v = _finite_route(s, sigma, basis, z_basis, derivation)
    elif isinstance(sigma, DegreeCocycle):
        v = _degree_route(s, sigma, z_basis, derivation)
    else:
        g, ell = s.graphs[0], sigma.labels
        rep = _representatives(g)[0]
        dense, cert = rho_orbit_dense(g, ell, rep)
        v = Verdict(SIMPLE if dense else NOT_SIMPLE, derivation=derivation)
        v.add("DenseCertificate" if dense else "NonDenseOrbit", route="rotation orbit", basepoint=str(rep), **cert)
    return _cross_check(v, s, sigma, True, pt)


def _flatten_trail(s, sigma, basis, omega, x, radius) -> dict:
    """Present sigma restricted to the isotropy at x in P_T coordinates, then flatten it onto omega."""
    l = len(basis)

    def lift(p):
        return [sum(a * basis[i][r] for i, a in enumerate(p)) for r in range(s.k)]

    unit = [[int(i == a) for a in range(l)] for i in range(l)]
    try:
        if isinstance(sigma, DegreeCocycle):
            m = sigma.rho.base
            rows = [[m(lift(unit[i]), lift(unit[j])) for j in range(l)] for i in range(l)]
            b = sigma.rho.cochain
            cochain = None if b is None else OneCochain.from_function(l, radius, lambda p: b(lift(p)))
            rho = Cocycle2.of(Bicharacter.from_rows(rows), cochain)
        else:
            # n * htilde(x, p, x) is bilinear on the isotropy group
            rows = [[sigma.isotropy(x, lift(unit[i]), lift(unit[j])) for j in range(l)] for i in range(l)]
            rho = Cocycle2.of(Bicharacter.from_rows(rows))
        b = flatten_to_constant(rho, omega, radius)
        return {"radius": radius, "cochain": b.to_json(), "ok": True}
    except (ValueError, KeyError) as exc:
        return {"radius": radius, "ok": False, "error": str(exc)}


def _finite_route(s, sigma, basis, z_basis, derivation) -> Verdict:
    """Finite X: loops at each base point act on the character torus by tau."""
    points = _all_points(s)
    gens_by_point = {}
    for x in points:
        gens = []
        for g in basis:
            loop = GroupoidElem.make(x, g, x)
            gens.append(tuple(tau(sigma, loop, z) for z in z_basis))
        gens_by_point[x] = gens
    x0 = points[0]
    pres = TorusSubgroupPresentation(len(z_basis), tuple(gens_by_point[x0]))
    dense, m = torus_dense(pres)
    derivation["certificates"].append({"route": "finite path space", "points": len(points),
                                       "loop_generators": [[format_angle(a) for a in g] for g in pres.generators]})
    if dense:
        return Verdict(SIMPLE, derivation=derivation).add("DenseCertificate", route="loop group dense")
    return Verdict(NOT_SIMPLE, derivation=derivation).add(
        "AnnihilatorFunctional", m=m, basepoint=[str(p) for p in x0],
        generators=[[format_angle(a) for a in g] for g in pres.generators])


def _all_points(s: ProductSystem) -> list[tuple[EPPoint, ...]]:
    per = []
    for g in s.graphs:
        n = len(g.vertices)
        per.append(enumerate_points(g, n, n))
    return [tuple(c) for c in itertools.product(*per)]


def _degree_route(s: ProductSystem, sigma: DegreeCocycle, z_basis, derivation) -> Verdict:
    """Degrees reachable into any cylinder fill a coset of the period lattice."""
    k = s.k
    periods = []
    for g in s.graphs:
        (comp,) = g.components
        periods.append(component_period(g, comp))
    skew = antisymmetrize(sigma.rho)
    gens = []
    for i, d in enumerate(periods):
        m = [d if j == i else 0 for j in range(k)]
        gens.append(tuple(skew(m, z) for z in z_basis))
    pres = TorusSubgroupPresentation(len(z_basis), tuple(gens))
    dense, m = torus_dense(pres)
    derivation["certificates"].append({"route": "period lattice", "periods": periods,
                                       "generators": [[format_angle(a) for a in g] for g in gens]})
    if dense:
        return Verdict(SIMPLE, derivation=derivation).add("DenseCertificate", route="period lattice dense")
    return Verdict(NOT_SIMPLE, derivation=derivation).add(
        "AnnihilatorFunctional", m=m, generators=[[format_angle(a) for a in g] for g in gens])


def _cross_check(v: Verdict, s: ProductSystem, sigma: CocycleSpec, minimal: bool, pt) -> Verdict:
    if not _is_trivial(sigma):
        return v
    expected = SIMPLE if (minimal and pt is not None and pt.is_zero()) else NOT_SIMPLE
    v.add("ConsistencyCheck", expected=expected, agrees=(expected == v.status))
    if expected != v.status:  # pragma: no cover
        raise AssertionError(f"untwisted verdict {v.status} disagrees with minimal-and-effective {expected}")
    return v
