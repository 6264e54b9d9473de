"""Exact arithmetic in the real quadratic field Q(λ).

λ is the larger root of x² − t·x + d, the characteristic polynomial of a
primitive substitution matrix. Elements are stored as a + b·λ with rational
coefficients, reduced with λ² = t·λ − d.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from math import isqrt
from typing import Tuple, Union

from .errors import DegenerateField, FieldMismatch, NotPrimitive, QuadDivisionByZero
from .substitution import IntMatrix2, is_primitive

Rational = Union[int, Fraction]


def _sgn(value: Fraction) -> int:
    return (value > 0) - (value < 0)


@dataclass(frozen=True)
class QuadField:
    trace: int
    det: int

    def __post_init__(self):
        disc = self.disc
        if disc <= 0 or isqrt(disc) ** 2 == disc:
            raise DegenerateField(
                f"x^2 - {self.trace}x + {self.det} has rational or complex roots (discriminant {disc})",
                {'trace': self.trace, 'det': self.det, 'discriminant': disc})

    @property
    def disc(self) -> int:
        return self.trace * self.trace - 4 * self.det

    @property
    def lam(self) -> QuadNum:
        return QuadNum(0, 1, self)

    @property
    def lam_star(self) -> QuadNum:
        return self.lam.star()

    def num(self, a: Rational, b: Rational = 0) -> QuadNum:
        return QuadNum(a, b, self)

    def __str__(self) -> str:
        return f"Q(λ), λ² = {self.trace}λ {'-' if self.det >= 0 else '+'} {abs(self.det)}"


@total_ordering
class QuadNum:
    __slots__ = ('a', 'b', 'field')

    def __init__(self, a: Rational, b: Rational, field: QuadField) -> None:
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.field = field

    def _coerce(self, other) -> QuadNum:
        if isinstance(other, QuadNum):
            if other.field != self.field:
                raise FieldMismatch(f"Cannot combine elements of {self.field} and {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNum(other, 0, self.field)
        return NotImplemented

    def __repr__(self) -> str:
        return f"QuadNum({self.a}, {self.b}, t={self.field.trace}, d={self.field.det})"

    def __str__(self) -> str:
        return f"({self.a}, {self.b})"

    def __add__(self, other) -> QuadNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadNum(self.a + other.a, self.b + other.b, self.field)

    __radd__ = __add__

    def __neg__(self) -> QuadNum:
        return QuadNum(-self.a, -self.b, self.field)

    def __sub__(self, other) -> QuadNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return QuadNum(self.a - other.a, self.b - other.b, self.field)

    def __rsub__(self, other) -> QuadNum:
        return (-self) + other

    def __mul__(self, other) -> QuadNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        t, d = self.field.trace, self.field.det
        bb = self.b * other.b
        return QuadNum(self.a * other.a - d * bb,
                       self.a * other.b + self.b * other.a + t * bb,
                       self.field)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """x · x*, always rational."""
        t, d = self.field.trace, self.field.det
        return self.a * self.a + t * self.a * self.b + d * self.b * self.b

    def inverse(self) -> QuadNum:
        n = self.norm()
        if n == 0:
            raise QuadDivisionByZero("Division by zero in Q(λ)")
        conj = self.star()
        return QuadNum(conj.a / n, conj.b / n, self.field)

    def __truediv__(self, other) -> QuadNum:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> QuadNum:
        return self.inverse() * other

    def __pow__(self, exponent: int) -> QuadNum:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadNum(1, 0, self.field)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def star(self) -> QuadNum:
        # λ* = t − λ
        return QuadNum(self.a + self.b * self.field.trace, -self.b, self.field)

    def sign(self) -> int:
        """Exact sign, from x = p + q·√D."""
        p = self.a + self.b * self.field.trace / 2
        q = self.b / 2
        sp, sq = _sgn(p), _sgn(q)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        return sp if p * p > q * q * self.field.disc else sq

    def __abs__(self) -> QuadNum:
        return -self if self.sign() < 0 else self

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if isinstance(other, QuadNum):
            return self.field == other.field and self.a == other.a and self.b == other.b
        return NotImplemented

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.field))

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __bool__(self) -> bool:
        return self.a != 0 or self.b != 0

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def enclosure(self, eps: Union[float, Fraction]) -> Tuple[Fraction, Fraction]:
        """Rational lo ≤ x ≤ hi with hi − lo ≤ eps."""
        if self.b == 0:
            return self.a, self.a
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        p = self.a + self.b * self.field.trace / 2
        q = abs(self.b / 2)
        scale = 1
        while q / scale > eps:
            scale <<= 4
        root = isqrt(self.field.disc * scale * scale)
        lo_root, hi_root = Fraction(root, scale), Fraction(root + 1, scale)
        if self.b > 0:
            return p + q * lo_root, p + q * hi_root
        return p - q * hi_root, p - q * lo_root

    def __float__(self) -> float:
        return to_real(self, 1e-17)

    def coordinates(self, beta: QuadNum) -> Tuple[Fraction, Fraction]:
        """(m, n) with self = m + n·β."""
        beta = self._coerce(beta)
        if beta.b == 0:
            raise ValueError("β must be irrational to serve as a module generator")
        n = self.b / beta.b
        return self.a - n * beta.a, n

    def in_module(self, beta: QuadNum) -> bool:
        m, n = self.coordinates(beta)
        return m.denominator == 1 and n.denominator == 1


@dataclass(frozen=True)
class PFData:
    lam: QuadNum
    lam_star: QuadNum
    left_vec: Tuple[QuadNum, QuadNum]
    right_vec: Tuple[QuadNum, QuadNum]


def make_field(m: IntMatrix2) -> QuadField:
    if not is_primitive(m):
        raise NotPrimitive(f"Matrix {m.rows()} is not primitive", {'matrix': m.rows()})
    return QuadField(m.trace, m.det)


def star(x: QuadNum) -> QuadNum:
    return x.star()


def sign(x: QuadNum) -> int:
    return x.sign()


def to_real(x: QuadNum, eps: Union[float, Fraction] = 1e-15) -> float:
    lo, hi = x.enclosure(eps)
    return float((lo + hi) / 2)


def is_pisot_unit(f: QuadField) -> bool:
    lam = f.lam
    lam_star = f.lam_star
    return (lam - 1).sign() > 0 and (lam_star * lam_star - 1).sign() < 0 and abs(f.det) == 1


def pf_data(m: IntMatrix2) -> PFData:
    f = make_field(m)
    lam = f.lam
    left = (lam - m.m22, f.num(m.m12))
    shortest = min(left)
    left = (left[0] / shortest, left[1] / shortest)
    right = (f.num(m.m12), lam - m.m11)
    return PFData(lam=lam, lam_star=lam.star(), left_vec=left, right_vec=right)
