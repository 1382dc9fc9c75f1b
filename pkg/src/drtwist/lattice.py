"""Integer matrix normal forms, kernels and sublattices of Z^d.

Matrices are plain lists of lists of Python ints (arbitrary precision).  The
Hermite form is row-style: ``U @ M = H`` with ``H`` in row echelon form,
positive pivots, and entries above each pivot reduced into ``[0, pivot)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact_circle import ExactAngle

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> Matrix:
    return [[0] * c for _ in range(r)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if any(len(row) != inner for row in a):
        raise ValueError("matmul dimension mismatch")
    return [[sum(row[k] * b[k][j] for k in range(inner)) for j in range(cols)] for row in a]


def transpose(a: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def det(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _check(m: Sequence[Sequence[int]]) -> tuple[int, int]:
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(r) != cols for r in m):
        raise ValueError("ragged integer matrix")
    return rows, cols


def hermite_normal_form(m: Sequence[Sequence[int]], cols: int | None = None) -> tuple[Matrix, Matrix]:
    """Return ``(H, U)`` with ``U @ M == H`` and ``U`` unimodular."""
    rows, ncols = _check(m)
    if rows == 0:
        return [], []
    if cols is not None:
        ncols = cols
    h = [list(map(int, r)) for r in m]
    u = identity(rows)
    pivot_row = 0
    for j in range(ncols):
        if pivot_row >= rows:
            break
        # gcd-combine the column into the pivot row
        for i in range(pivot_row + 1, rows):
            if h[i][j] == 0:
                continue
            a, b = h[pivot_row][j], h[i][j]
            g, x, y = xgcd(a, b)
            ag, bg = a // g, b // g
            rp, ri = h[pivot_row], h[i]
            h[pivot_row] = [x * p + y * q for p, q in zip(rp, ri)]
            h[i] = [-bg * p + ag * q for p, q in zip(rp, ri)]
            up, ui = u[pivot_row], u[i]
            u[pivot_row] = [x * p + y * q for p, q in zip(up, ui)]
            u[i] = [-bg * p + ag * q for p, q in zip(up, ui)]
        piv = h[pivot_row][j]
        if piv == 0:
            continue
        if piv < 0:
            h[pivot_row] = [-v for v in h[pivot_row]]
            u[pivot_row] = [-v for v in u[pivot_row]]
            piv = -piv
        for i in range(pivot_row):
            q = h[i][j] // piv
            if q:
                h[i] = [p - q * r for p, r in zip(h[i], h[pivot_row])]
                u[i] = [p - q * r for p, r in zip(u[i], u[pivot_row])]
        pivot_row += 1
    return h, u


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(S, U, V)`` with ``U @ M @ V == S`` diagonal, ``d1 | d2 | ...``."""
    rows, cols = _check(m)
    s = [list(map(int, r)) for r in m]
    u = identity(rows)
    v = identity(cols)

    def row_op(i, j, a, b, c, d):
        # (row_i, row_j) <- (a*row_i + b*row_j, c*row_i + d*row_j)
        for mat in (s, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [a * p + b * q for p, q in zip(ri, rj)]
            mat[j] = [c * p + d * q for p, q in zip(ri, rj)]

    def col_op(i, j, a, b, c, d):
        for mat in (s, v):
            for row in mat:
                p, q = row[i], row[j]
                row[i], row[j] = a * p + b * q, c * p + d * q

    for t in range(min(rows, cols)):
        # bring a nonzero entry of minimal magnitude to (t, t)
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if s[i][j] and (best is None or abs(s[i][j]) < abs(s[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if i != t:
                s[t], s[i] = s[i], s[t]
                u[t], u[i] = u[i], u[t]
            if j != t:
                for mat in (s, v):
                    for row in mat:
                        row[t], row[j] = row[j], row[t]
            done = True
            for i in range(t + 1, rows):
                if s[i][t]:
                    a, b = s[t][t], s[i][t]
                    if b % a == 0:
                        row_op(t, i, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = xgcd(a, b)
                        row_op(t, i, x, y, -b // g, a // g)
            for j in range(t + 1, cols):
                if s[t][j]:
                    a, b = s[t][t], s[t][j]
                    if b % a == 0:
                        col_op(t, j, 1, 0, -(b // a), 1)
                    else:
                        g, x, y = xgcd(a, b)
                        col_op(t, j, x, y, -b // g, a // g)
            if any(s[i][t] for i in range(t + 1, rows)) or any(s[t][j] for j in range(t + 1, cols)):
                done = False
            if done:
                # enforce divisibility of the remaining block
                piv = s[t][t]
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if s[i][j] % piv), None)
                if bad is None:
                    break
                row_op(t, bad[0], 1, 1, 0, 1)
            continue
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
    return s, u, v


def diagonal(s: Sequence[Sequence[int]]) -> list[int]:
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


@dataclass(frozen=True)
class Sublattice:
    """A subgroup of Z^d given by an HNF row basis (canonical, so ``==`` is lattice equality)."""

    dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def span(cls, dim: int, vectors: Iterable[Sequence[int]]) -> "Sublattice":
        vecs = [list(map(int, v)) for v in vectors]
        for v in vecs:
            if len(v) != dim:
                raise ValueError(f"vector {v} not of dimension {dim}")
        if not vecs:
            return cls(dim, ())
        h, _ = hermite_normal_form(vecs, dim)
        return cls(dim, tuple(tuple(r) for r in h if any(r)))

    @classmethod
    def full(cls, dim: int) -> "Sublattice":
        return cls.span(dim, identity(dim))

    @classmethod
    def zero(cls, dim: int) -> "Sublattice":
        return cls(dim, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.rank == self.dim and all(
            self.basis[i][i] == 1 for i in range(self.dim))

    def __contains__(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Integer coefficients of ``v`` in the basis, or None if not in the lattice."""
        v = list(map(int, v))
        if len(v) != self.dim:
            raise ValueError("dimension mismatch")
        coeffs = []
        for row in self.basis:
            j = next(k for k, x in enumerate(row) if x)
            q, r = divmod(v[j], row[j])
            if r:
                return None
            coeffs.append(q)
            v = [a - q * b for a, b in zip(v, row)]
        return coeffs if not any(v) else None

    def vector(self, coeffs: Sequence[int]) -> list[int]:
        out = [0] * self.dim
        for c, row in zip(coeffs, self.basis):
            for j, x in enumerate(row):
                out[j] += c * x
        return out

    def basis_matrix(self) -> Matrix:
        """Basis vectors as columns (dim x rank)."""
        return transpose([list(r) for r in self.basis], self.dim) if self.basis else [[] for _ in range(self.dim)]

    def index_data(self) -> list[int]:
        """Smith invariants of Z^d / L (0 for free directions), trivial ones dropped."""
        if not self.basis:
            return [0] * self.dim
        s, _, _ = smith_normal_form([list(r) for r in self.basis])
        d = diagonal(s) + [0] * (self.dim - self.rank)
        return [x for x in d if x != 1]

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.basis]


def integer_kernel(m: Sequence[Sequence[int]], cols: int | None = None) -> Sublattice:
    """Saturated lattice ``{v in Z^cols : M v = 0}``."""
    rows, ncols = _check(m)
    if cols is not None:
        ncols = cols
    if rows == 0:
        return Sublattice.full(ncols)
    mt = transpose(m, ncols)
    h, u = hermite_normal_form(mt, rows)
    kern = [u[i] for i in range(ncols) if not any(h[i])]
    return Sublattice.span(ncols, kern)


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def rational_kernel_mod1(rows: Sequence[Sequence[ExactAngle]], dim: int) -> Sublattice:
    """``{a in Z^dim : sum_j a_j * rows[r][j] == 0 in the circle, for every r}``.

    Irrational coefficients must cancel exactly; rational parts must sum to an
    integer (a congruence, handled by one slack variable per row).
    """
    for r in rows:
        if len(r) != dim:
            raise ValueError(f"row of length {len(r)} in a {dim}-column angle matrix")
    equations: list[list[int]] = []      # over a only
    congruences: list[tuple[list[int], int]] = []
    for r in rows:
        symbols = sorted({s for a in r for s, _ in a.coeffs})
        for sym in symbols:
            fr = [a.coeff(sym) for a in r]
            den = _lcm(f.denominator for f in fr)
            equations.append([int(f * den) for f in fr])
        fr = [Fraction(a.rational) for a in r]
        den = _lcm(f.denominator for f in fr)
        if den > 1:
            congruences.append(([int(f * den) for f in fr], den))
    nslack = len(congruences)
    width = dim + nslack
    system: Matrix = [eq + [0] * nslack for eq in equations]
    for k, (coeffs, den) in enumerate(congruences):
        row = coeffs + [0] * nslack
        row[dim + k] = -den
        system.append(row)
    if not system:
        return Sublattice.full(dim)
    kern = integer_kernel(system, width)
    return Sublattice.span(dim, [list(v[:dim]) for v in kern.basis])


def unimodular_inverse(u: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a unimodular matrix (its HNF is the identity)."""
    n, c = _check(u)
    if n != c or abs(det(u)) != 1:
        raise ValueError("matrix is not unimodular")
    h, w = hermite_normal_form(u)
    assert h == identity(n)
    return w
