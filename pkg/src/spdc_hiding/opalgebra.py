"""Exact creation-operator polynomials with coefficients in Q[sqrt 2].

This layer never touches floating point until :func:`apply_to_vacuum`
converts a polynomial into a :class:`~spdc_hiding.fock.FockState`. It is
the reference against which the numeric Fock engine is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Union

from .fock import FockState, Mode, Occupation, h, occupation, v

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class RingElement:
    """``a + b*sqrt(2)`` with rational ``a``, ``b``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @staticmethod
    def lift(x) -> "RingElement":
        if isinstance(x, RingElement):
            return x
        if isinstance(x, (int, Fraction)):
            return RingElement(Fraction(x), Fraction(0))
        raise TypeError(f"cannot embed {type(x).__name__} exactly in Q[sqrt2]")

    def __add__(self, other) -> "RingElement":
        o = RingElement.lift(other)
        return RingElement(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self) -> "RingElement":
        return RingElement(-self.a, -self.b)

    def __sub__(self, other) -> "RingElement":
        return self + (-RingElement.lift(other))

    def __rsub__(self, other) -> "RingElement":
        return RingElement.lift(other) - self

    def __mul__(self, other) -> "RingElement":
        o = RingElement.lift(other)
        return RingElement(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def conjugate(self) -> "RingElement":
        """Galois conjugate ``a - b*sqrt(2)``."""
        return RingElement(self.a, -self.b)

    def field_norm(self) -> Fraction:
        return self.a * self.a - 2 * self.b * self.b

    def inverse(self) -> "RingElement":
        n = self.field_norm()
        if n == 0:
            raise ZeroDivisionError("zero has no inverse in Q[sqrt2]")
        c = self.conjugate()
        return RingElement(c.a / n, c.b / n)

    def __truediv__(self, other) -> "RingElement":
        return self * RingElement.lift(other).inverse()

    def __rtruediv__(self, other) -> "RingElement":
        return RingElement.lift(other) * self.inverse()

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def is_rational(self) -> bool:
        return self.b == 0

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __str__(self) -> str:
        if not self.b:
            return str(self.a)
        if self.b.numerator in (1, -1):
            root = "√2" if self.b.denominator == 1 else f"√2/{self.b.denominator}"
            sroot = ("-" if self.b < 0 else "") + root
        else:
            sroot = f"{self.b.numerator}√2" + ("" if self.b.denominator == 1 else f"/{self.b.denominator}")
        if not self.a:
            return sroot
        return f"({self.a} {'-' if self.b < 0 else '+'} {sroot.lstrip('-')})"


ZERO = RingElement()
ONE = RingElement(1)
SQRT2 = RingElement(0, 1)
INV_SQRT2 = RingElement(0, Fraction(1, 2))
HALF = RingElement(Fraction(1, 2))

Monomial = tuple  # sorted tuple of Mode, repeated for powers


class OperatorPolynomial:
    """Commuting polynomial in creation operators, stored canonically."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, RingElement] | None = None):
        merged: dict[Monomial, RingElement] = {}
        for mono, c in (terms or {}).items():
            key = tuple(sorted(mono))
            merged[key] = merged.get(key, ZERO) + RingElement.lift(c)
        self._terms = {k: merged[k] for k in sorted(merged) if merged[k]}

    @property
    def terms(self) -> Mapping[Monomial, RingElement]:
        return MappingProxyType(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degrees(self) -> set[int]:
        return {len(m) for m in self._terms}

    def __add__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, ZERO) + c
        return OperatorPolynomial(out)

    def __neg__(self) -> "OperatorPolynomial":
        return OperatorPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "OperatorPolynomial":
        if isinstance(other, OperatorPolynomial):
            return poly_mul(self, other)
        return scale(self, other)

    def __rmul__(self, other) -> "OperatorPolynomial":
        return scale(self, other)

    def __pow__(self, k: int) -> "OperatorPolynomial":
        out = unit()
        for _ in range(k):
            out = poly_mul(out, self)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, OperatorPolynomial) and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"OperatorPolynomial({format_polynomial(self)})"


def zero() -> OperatorPolynomial:
    return OperatorPolynomial()


def unit() -> OperatorPolynomial:
    return OperatorPolynomial({(): ONE})


def creation(mode: Mode) -> OperatorPolynomial:
    return OperatorPolynomial({(mode,): ONE})


def scale(p: OperatorPolynomial, c) -> OperatorPolynomial:
    c = RingElement.lift(c)
    return OperatorPolynomial({m: c * k for m, k in p.terms.items()})


def poly_mul(p: OperatorPolynomial, q: OperatorPolynomial) -> OperatorPolynomial:
    out: dict[Monomial, RingElement] = {}
    for mp, cp in p.terms.items():
        for mq, cq in q.terms.items():
            key = tuple(sorted(mp + mq))
            out[key] = out.get(key, ZERO) + cp * cq
    return OperatorPolynomial(out)


def poly_equal(p: OperatorPolynomial, q: OperatorPolynomial) -> bool:
    return p == q


def canonical(p: OperatorPolynomial) -> OperatorPolynomial:
    return OperatorPolynomial(p.terms)


def singlet_op(i: int, j: int) -> OperatorPolynomial:
    """(h_i v_j - v_i h_j)/sqrt2, the pair creation operator of the source."""
    if i == j:
        raise ValueError("degenerate singlet: paths must differ")
    return OperatorPolynomial({(h(i), v(j)): INV_SQRT2, (v(i), h(j)): -INV_SQRT2})


def monomial_occupation(mono: Monomial) -> Occupation:
    counts: dict[Mode, int] = {}
    for m in mono:
        counts[m] = counts.get(m, 0) + 1
    return occupation(counts)


def vacuum_expansion(p: OperatorPolynomial) -> dict[Occupation, tuple[RingElement, int]]:
    """Exact kets of ``p|vac>``: amplitude is ``coeff * sqrt(multiplicity)``.

    ``multiplicity`` is the integer product of occupation factorials, kept
    separate because sqrt(n!) leaves Q[sqrt2] for n >= 3.
    """
    out = {}
    for mono, c in p.terms.items():
        occ = monomial_occupation(mono)
        out[occ] = (c, math.prod(math.factorial(n) for _, n in occ))
    return out


def exact_inner(p: OperatorPolynomial, q: OperatorPolynomial) -> RingElement:
    """<vac|p^dag q|vac>; coefficients are real so no conjugation is needed."""
    ep, eq = vacuum_expansion(p), vacuum_expansion(q)
    total = ZERO
    for occ, (c, mult) in ep.items():
        if occ in eq:
            total = total + c * eq[occ][0] * mult
    return total


def exact_norm_squared(p: OperatorPolynomial) -> RingElement:
    return exact_inner(p, p)


def apply_to_vacuum(p: OperatorPolynomial) -> FockState:
    amps = {
        occ: complex(float(c) * math.sqrt(mult)) for occ, (c, mult) in vacuum_expansion(p).items()
    }
    return FockState(amps)


def proportionality(p: OperatorPolynomial, q: OperatorPolynomial) -> RingElement:
    """The exact ``c`` with ``p == c*q``; ValueError if none exists."""
    if p.is_zero() and q.is_zero():
        return ONE
    if set(p.terms) != set(q.terms):
        raise ValueError("not proportional: monomial supports differ")
    ratios = {p.terms[m] / q.terms[m] for m in p.terms}
    if len(ratios) != 1:
        raise ValueError("not proportional: term-wise ratios differ")
    return ratios.pop()


def _format_monomial(mono: Monomial) -> str:
    parts = []
    for m, n in monomial_occupation(mono):
        parts.append(str(m) + (f"^{n}" if n > 1 else ""))
    return "".join(parts)


def format_polynomial(p: OperatorPolynomial) -> str:
    """Render like ``1/2·h1v2h3v4 − 1/2·h1v2v3h4``."""
    if p.is_zero():
        return "0"
    pieces = []
    for mono, c in p.terms.items():
        negative = (c.a < 0 and c.b <= 0) or (c.b < 0 and c.a <= 0)
        mag = -c if negative else c
        body = _format_monomial(mono)
        if not body:
            text = str(mag)
        elif mag == ONE:
            text = body
        else:
            text = f"{mag}·{body}"
        pieces.append(("−" if negative else "+", text))
    first_sign, first = pieces[0]
    out = ("−" if first_sign == "−" else "") + first
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out
