"""Exact arithmetic in the circle group, written additively in turns.

An angle ``a`` stands for the unit complex number ``exp(2*pi*i*a)``.  Angles
are a reduced rational in ``[0, 1)`` plus a finite rational combination of
formal irrational generators declared in an :class:`IrrationalBasis`.  The
generators together with 1 are *assumed* linearly independent over the
rationals, so equality and zero tests are purely structural.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Iterable, Mapping, Sequence


class IncompatibleBasisError(ValueError):
    """Raised when angles declared over different irrational bases meet."""


class AngleParseError(ValueError):
    pass


@dataclass(frozen=True)
class IrrationalBasis:
    """Ordered formal irrational generators with numeric approximations (turns)."""

    generators: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        names = [name for name, _ in self.generators]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator symbols in {names}")
        for name in names:
            if not _SYMBOL_RE.fullmatch(name):
                raise ValueError(f"invalid generator symbol {name!r}")

    @classmethod
    def of(cls, mapping: Mapping[str, float] | Iterable[tuple[str, float]]) -> "IrrationalBasis":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple((str(k), float(v)) for k, v in items))

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.generators)

    def value(self, symbol: str) -> float:
        for name, val in self.generators:
            if name == symbol:
                return val
        raise KeyError(symbol)

    @cached_property
    def order(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def __bool__(self):
        return bool(self.generators)


EMPTY_BASIS = IrrationalBasis()

_SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _merge_basis(a: IrrationalBasis, b: IrrationalBasis) -> IrrationalBasis:
    if a is b or a == b:
        return a
    if not a:
        return b
    if not b:
        return a
    raise IncompatibleBasisError(f"angles over different bases: {a.symbols} vs {b.symbols}")


@dataclass(frozen=True)
class ExactAngle:
    """``rational + sum(coeff * symbol)`` modulo 1.

    Construct through :func:`angle` or the arithmetic operators; the raw
    constructor expects already-normalised fields.
    """

    rational: Fraction = Fraction(0)
    coeffs: tuple[tuple[str, Fraction], ...] = ()
    basis: IrrationalBasis = field(default=EMPTY_BASIS, compare=False, repr=False)

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.rational, self.coeffs))
            object.__setattr__(self, "_hash", h)
            return h

    def __add__(self, other: "ExactAngle") -> "ExactAngle":
        if not isinstance(other, ExactAngle):
            return NotImplemented
        return angle_add(self, other)

    def __neg__(self) -> "ExactAngle":
        return angle_scale(-1, self)

    def __sub__(self, other: "ExactAngle") -> "ExactAngle":
        if not isinstance(other, ExactAngle):
            return NotImplemented
        return angle_add(self, angle_scale(-1, other))

    def __rmul__(self, n: int) -> "ExactAngle":
        if isinstance(n, bool) or not isinstance(n, int):
            return NotImplemented
        return angle_scale(n, self)

    __mul__ = __rmul__

    def coeff(self, symbol: str) -> Fraction:
        for name, c in self.coeffs:
            if name == symbol:
                return c
        return Fraction(0)

    @property
    def is_rational(self) -> bool:
        return not self.coeffs

    def order(self) -> int | None:
        """Order in the circle group, or None when infinite."""
        if self.coeffs:
            return None
        return self.rational.denominator

    def __str__(self) -> str:
        return format_angle(self)


ZERO = ExactAngle()


def _mod1(q: Fraction) -> Fraction:
    n, d = q.numerator, q.denominator
    if 0 <= n < d:
        return q
    # n mod d stays coprime to d
    return Fraction(n % d, d, _normalize=False)


def _normalise(rational: Fraction, coeffs: Mapping[str, Fraction], basis: IrrationalBasis) -> ExactAngle:
    rational = _mod1(rational)
    if not coeffs:
        return ExactAngle(rational, (), basis)
    order = basis.order
    for s in coeffs:
        if s not in order:
            raise IncompatibleBasisError(f"symbol {s!r} not declared in basis {basis.symbols}")
    items = tuple(sorted(((s, Fraction(c)) for s, c in coeffs.items() if c != 0), key=lambda kv: order[kv[0]]))
    return ExactAngle(rational, items, basis)


def angle(rational: Fraction | int | str = 0, coeffs: Mapping[str, Fraction | int | str] | None = None,
          basis: IrrationalBasis = EMPTY_BASIS) -> ExactAngle:
    coeffs = {s: Fraction(c) for s, c in (coeffs or {}).items()}
    return _normalise(Fraction(rational), coeffs, basis)


def generator(symbol: str, basis: IrrationalBasis) -> ExactAngle:
    """The angle ``1 * symbol``."""
    return angle(0, {symbol: 1}, basis)


def angle_add(a: ExactAngle, b: ExactAngle) -> ExactAngle:
    if not a.coeffs and not b.coeffs:
        basis = a.basis if a.basis is b.basis or not b.basis else _merge_basis(a.basis, b.basis)
        return ExactAngle(_mod1(a.rational + b.rational), (), basis)
    basis = _merge_basis(a.basis, b.basis)
    coeffs: dict[str, Fraction] = dict(a.coeffs)
    for s, c in b.coeffs:
        coeffs[s] = coeffs.get(s, Fraction(0)) + c
    return _normalise(a.rational + b.rational, coeffs, basis)


def angle_scale(n: int, a: ExactAngle) -> ExactAngle:
    return _normalise(n * a.rational, {s: n * c for s, c in a.coeffs}, a.basis)


def angle_sum(angles: Iterable[ExactAngle]) -> ExactAngle:
    total = ZERO
    for a in angles:
        total = angle_add(total, a)
    return total


def is_zero(a: ExactAngle) -> bool:
    return a.rational == 0 and not a.coeffs


def approx(a: ExactAngle) -> float:
    """Numeric value in ``[0, 1)`` using the basis approximations."""
    val = float(a.rational)
    for s, c in a.coeffs:
        val += float(c) * a.basis.value(s)
    val = val - math.floor(val)
    # float rounding can land exactly on 1.0
    return 0.0 if val >= 1.0 else val


def circle_distance(x: float, y: float) -> float:
    d = abs(x - y) % 1.0
    return min(d, 1.0 - d)


def phase(a: ExactAngle) -> complex:
    """``exp(2*pi*i*a)`` in double precision."""
    t = 2.0 * math.pi * approx(a)
    return complex(math.cos(t), math.sin(t))


def dot(coeffs: Sequence[int], angles: Sequence[ExactAngle]) -> ExactAngle:
    """``sum(n_i * a_i)`` for integers ``n_i``."""
    if len(coeffs) != len(angles):
        raise ValueError("length mismatch")
    return angle_sum(angle_scale(int(n), a) for n, a in zip(coeffs, angles))


# --------------------------------------------------------------------------
# string form:  "p/q"  or  "p/q + r/s*sym + ..."

def _frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_angle(a: ExactAngle) -> str:
    out = _frac_str(a.rational) if a.rational or not a.coeffs else ""
    for s, c in a.coeffs:
        term = f"{_frac_str(abs(c))}*{s}"
        if not out:
            out = term if c > 0 else "-" + term
        else:
            out += (" + " if c > 0 else " - ") + term
    return out


_TERM_RE = re.compile(
    r"""^\s*(?P<sign>[+-]?)\s*
        (?:(?P<num>\d+)(?:\s*/\s*(?P<den>\d+))?)?
        \s*(?:\*?\s*(?P<sym>[A-Za-z_][A-Za-z0-9_]*))?\s*$""",
    re.VERBOSE,
)


def parse_angle(text: str, basis: IrrationalBasis = EMPTY_BASIS) -> ExactAngle:
    """Parse the serialised form; also accepts ``-1/3*b``, ``b``, ``2``, ``1/4 - b``."""
    if not isinstance(text, str):
        if isinstance(text, int) and not isinstance(text, bool):
            return angle(text, None, basis)
        raise AngleParseError(f"angle must be a string, got {type(text).__name__}")
    src = text.strip()
    if not src:
        raise AngleParseError("empty angle string")
    # split on top-level +/- while keeping the sign with the term
    tokens = re.split(r"(?<=[^\s+\-*/])\s*(?=[+-])", src)
    rational = Fraction(0)
    coeffs: dict[str, Fraction] = {}
    for tok in tokens:
        tok = tok.strip()
        if tok.startswith("+"):
            tok = tok[1:].strip()
        m = _TERM_RE.match(tok)
        if not m or (m.group("num") is None and m.group("sym") is None):
            raise AngleParseError(f"cannot parse angle term {tok!r} in {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        if m.group("num") is None:
            value = Fraction(1)
        else:
            den = int(m.group("den")) if m.group("den") is not None else 1
            if den == 0:
                raise AngleParseError(f"zero denominator in {text!r}")
            value = Fraction(int(m.group("num")), den)
        value *= sign
        sym = m.group("sym")
        if sym is None:
            rational += value
        else:
            if sym not in basis.symbols:
                raise AngleParseError(f"undeclared irrational symbol {sym!r} in {text!r}")
            coeffs[sym] = coeffs.get(sym, Fraction(0)) + value
    return _normalise(rational, coeffs, basis)


class AngleCodec:
    """Exact integer encoding of the subgroup generated by some angles.

    Each angle in that subgroup becomes an integer tuple ``(r, c_1, ..., c_s)``
    over fixed common denominators, so bulk identity checks reduce to integer
    addition.  Zero test: ``r % rden == 0`` and all ``c_i == 0``.
    """

    def __init__(self, generators: Iterable[ExactAngle]):
        rden, cden, symbols = 1, 1, []
        for a in generators:
            rden = _lcm2(rden, a.rational.denominator)
            for s, c in a.coeffs:
                if s not in symbols:
                    symbols.append(s)
                cden = _lcm2(cden, c.denominator)
        self.rden, self.cden, self.symbols = rden, cden, tuple(symbols)

    def encode(self, a: ExactAngle) -> tuple[int, ...]:
        r = a.rational * self.rden
        if r.denominator != 1:
            raise ValueError(f"{a} lies outside the encoded subgroup")
        out = [r.numerator]
        for s in self.symbols:
            c = a.coeff(s) * self.cden
            if c.denominator != 1:
                raise ValueError(f"{a} lies outside the encoded subgroup")
            out.append(c.numerator)
        if any(s not in self.symbols for s, _ in a.coeffs):
            raise ValueError(f"{a} uses a symbol outside the encoded subgroup")
        return tuple(out)

    def is_zero(self, code: Sequence[int]) -> bool:
        return code[0] % self.rden == 0 and not any(code[1:])

    def zero_sum(self, plus: Sequence[Sequence[int]], minus: Sequence[Sequence[int]] = ()) -> bool:
        """Encoded ``sum(plus) - sum(minus) == 0``."""
        tot = [sum(col) for col in zip(*plus)] if plus else [0] * (1 + len(self.symbols))
        for c in minus:
            tot = [a - b for a, b in zip(tot, c)]
        return self.is_zero(tot)


def _lcm2(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)
