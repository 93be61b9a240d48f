"""
Exact arithmetic in a real quadratic field K = Q[sqrt(D)].

An element is stored as two rationals (u, v) standing for u + v*sqrt(D)
under the real embedding with sqrt(D) > 0. Membership in the ring of
integers is decided by integrality of trace and norm, which covers the
half-integral elements of fields with D = 1 (mod 4) without a special basis.

Magnitudes are compared with `mpmath.iv` interval arithmetic. Products of
huge powers are never built for a comparison: `PowerProduct` keeps them as
rational exponents over a few bases and is evaluated in log-space.
"""
import enum
import logging
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import lcm
from typing import Tuple, Union

import mpmath
from mpmath import iv
from mpmath.libmp import MPZ
from sympy import factorint, radsimp, sqrt as sym_sqrt
from sympy.parsing.sympy_parser import parse_expr

from .conf import get_setting
from .exceptions import (
    FieldMismatchError,
    NotSquareFreeError,
    UndecidableComparisonError,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

MIN_PRECISION_BITS = 32
GUARD_BITS = 16
START_COMPARE_BITS = 64
DEFAULT_PRECISION_CAP_BITS = 2 ** 20

_ELEMENT_TEXT = re.compile(r'^[0-9sqrt()+\-*/ .]+$')


@lru_cache(maxsize=None)
def _is_square_free(D: int) -> bool:
    return all(exponent == 1 for exponent in factorint(D).values())


@dataclass(frozen=True)
class FieldDesc:
    """The field Q[sqrt(D)] for a square-free D >= 2"""

    D: int

    def __post_init__(self):
        if isinstance(self.D, bool) or not isinstance(self.D, int):
            raise NotSquareFreeError(f"D must be an integer, got {self.D!r}")
        if self.D < 2:
            raise NotSquareFreeError(f"D must be at least 2, got {self.D}")
        if not _is_square_free(self.D):
            raise NotSquareFreeError(f"D = {self.D} is not square-free")

    def element(self, u: Rational = 0, v: Rational = 0) -> 'QuadElem':
        return QuadElem(self, Fraction(u), Fraction(v))

    def one(self) -> 'QuadElem':
        return self.element(1)

    def sqrt_d(self) -> 'QuadElem':
        return self.element(0, 1)

    def parse(self, text: str) -> 'QuadElem':
        return QuadElem.parse(text, self.D)


@lru_cache(maxsize=256)
def field_for(D: int) -> FieldDesc:
    """Cached FieldDesc constructor"""
    return FieldDesc(D)


@dataclass(frozen=True)
class IntegralityWitness:
    elem: 'QuadElem'
    is_integral: bool
    trace: Fraction
    norm: Fraction


def _sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


@total_ordering
@dataclass(frozen=True)
class QuadElem:
    """Exact element u + v*sqrt(D) of a real quadratic field"""

    field: FieldDesc
    u: Fraction
    v: Fraction = Fraction(0)

    def __post_init__(self):
        # Fraction() keeps coordinates in lowest terms with positive denominators.
        object.__setattr__(self, 'u', Fraction(self.u))
        object.__setattr__(self, 'v', Fraction(self.v))

    # -- construction and text form -------------------------------------

    @classmethod
    def parse(cls, text: str, D: int) -> 'QuadElem':
        """
        Parse forms like "sqrt(2)", "3", "1/2+1/2*sqrt(5)", "(1+sqrt(5))/2" or
        "1/(1+sqrt(2))" in Q[sqrt(D)]. Powers are not accepted.
        """
        field = field_for(D)
        cleaned = text.strip()
        if not cleaned or not _ELEMENT_TEXT.match(cleaned) or '**' in cleaned:
            raise ValueError(f"Cannot parse quadratic element from {text!r}")
        try:
            # radsimp rationalizes denominators such as 1/(1+sqrt(2)).
            expr = radsimp(parse_expr(cleaned, evaluate=True)).expand()
        except Exception as exc:
            raise ValueError(f"Cannot parse quadratic element from {text!r}: {exc}") from exc

        root = sym_sqrt(D)
        v = expr.coeff(root)
        u = (expr - v * root).expand()
        if not (u.is_Rational and v.is_Rational):
            raise FieldMismatchError(f"{text!r} is not an element of Q[sqrt({D})]")
        return cls(field, Fraction(int(u.p), int(u.q)), Fraction(int(v.p), int(v.q)))

    def __str__(self) -> str:
        d = lcm(self.u.denominator, self.v.denominator)
        a = self.u.numerator * (d // self.u.denominator)
        b = self.v.numerator * (d // self.v.denominator)
        den = f"/{d}" if d != 1 else ""
        if b == 0:
            return f"{a}{den}"
        root = f"sqrt({self.field.D})"
        b_text = f"{abs(b)}{den}*{root}" if (abs(b) != 1 or d != 1) else root
        if a == 0:
            return f"-{b_text}" if b < 0 else b_text
        return f"{a}{den} {'-' if b < 0 else '+'} {b_text}"

    # -- predicates -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def sign(self) -> int:
        """Exact sign of u + v*sqrt(D) in the real embedding"""
        su, sv = _sign(self.u), _sign(self.v)
        if sv == 0:
            return su
        if su == 0 or su == sv:
            return sv
        # Opposite signs; u^2 != v^2 D because D is not a square.
        return su if self.u * self.u > self.v * self.v * self.field.D else sv

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> 'QuadElem':
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"Cannot combine elements of Q[sqrt({self.field.D})] and Q[sqrt({other.field.D})]"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, Fraction(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.field, self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self) -> 'QuadElem':
        return QuadElem(self.field, -self.u, -self.v)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.field, self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        D = self.field.D
        return QuadElem(
            self.field,
            self.u * other.u + self.v * other.v * D,
            self.u * other.v + self.v * other.u,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero:
            raise ZeroDivisionError("division by zero in quadratic field")
        n = other.norm()
        return self * QuadElem(self.field, other.u / n, -other.v / n)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int) -> 'QuadElem':
        if k < 0:
            return self.field.one() / self.pow_int(-k)
        return self.pow_int(k)

    def __lt__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return (self - other).sign() < 0

    def __abs__(self) -> 'QuadElem':
        return -self if self.sign() < 0 else self

    def integer_coords(self) -> Tuple[int, int, int]:
        """(a, b, d) with self = (a + b*sqrt(D)) / d and d > 0 minimal"""
        d = lcm(self.u.denominator, self.v.denominator)
        return (
            self.u.numerator * (d // self.u.denominator),
            self.v.numerator * (d // self.v.denominator),
            d,
        )

    def pow_int(self, k: int) -> 'QuadElem':
        """Exact k-th power by binary exponentiation on integer coordinates"""
        if k < 0:
            raise ValueError(f"pow_int needs k >= 0, got {k}")
        a, b, d = self.integer_coords()
        D = MPZ(self.field.D)
        base_a, base_b = MPZ(a), MPZ(b)
        acc_a, acc_b = MPZ(1), MPZ(0)
        e = k
        while e:
            if e & 1:
                acc_a, acc_b = acc_a * base_a + acc_b * base_b * D, acc_a * base_b + acc_b * base_a
            e >>= 1
            if e:
                base_a, base_b = base_a * base_a + base_b * base_b * D, 2 * base_a * base_b
        scale = d ** k
        return QuadElem(self.field, Fraction(int(acc_a), scale), Fraction(int(acc_b), scale))

    # -- field invariants -------------------------------------------------

    def conjugate(self) -> 'QuadElem':
        return QuadElem(self.field, self.u, -self.v)

    def norm(self) -> Fraction:
        return self.u * self.u - self.v * self.v * self.field.D

    def trace(self) -> Fraction:
        return 2 * self.u

    def sqrt_d_mul(self) -> 'QuadElem':
        """Multiply by sqrt(D): (u, v) -> (vD, u)"""
        return QuadElem(self.field, self.v * self.field.D, self.u)

    def twisted_trace(self) -> Fraction:
        """(x - conj(x)) * sqrt(D) = tr(sqrt(D) * x) = 2vD"""
        return 2 * self.v * self.field.D

    def is_integral(self) -> IntegralityWitness:
        tr, nm = self.trace(), self.norm()
        return IntegralityWitness(
            elem=self,
            is_integral=tr.denominator == 1 and nm.denominator == 1,
            trace=tr,
            norm=nm,
        )

    def clear_denominator(self) -> Tuple[int, 'QuadElem']:
        """Smallest A >= 1 with A*self integral, together with A*self"""
        if self.is_zero:
            raise ValueError("clear_denominator needs a non-zero element")
        A = lcm(self.u.denominator, self.v.denominator)
        # {A : A*x integral} is an ideal of Z, so stripping primes one at a time reaches its generator.
        for prime in sorted(factorint(A)):
            while A % prime == 0 and ((A // prime) * self).is_integral().is_integral:
                A //= prime
        return A, A * self


# Functional spellings of the QuadElem operations.

def conjugate(x: QuadElem) -> QuadElem:
    return x.conjugate()


def norm(x: QuadElem) -> Fraction:
    return x.norm()


def trace(x: QuadElem) -> Fraction:
    return x.trace()


def twisted_trace(x: QuadElem) -> Fraction:
    return x.twisted_trace()


def pow_int(x: QuadElem, k: int) -> QuadElem:
    return x.pow_int(k)


def is_integral(x: QuadElem) -> IntegralityWitness:
    return x.is_integral()


def clear_denominator(x: QuadElem) -> Tuple[int, QuadElem]:
    return x.clear_denominator()


# -- interval evaluation ------------------------------------------------------

# iv.prec is process-wide; nested blocks on one thread are allowed.
_IV_PRECISION_LOCK = threading.RLock()


@contextmanager
def iv_precision(bits: int):
    """Run the block with `mpmath.iv` at `bits` of working precision, then restore it"""
    with _IV_PRECISION_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def _iv_rational(q: Rational):
    q = Fraction(q)
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def interval_bounds(value) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """Endpoints of an `mpmath.iv` interval as exact mpf values"""
    lo, hi = value._mpi_
    return mpmath.mp.make_mpf(lo), mpmath.mp.make_mpf(hi)


def eval_interval(x: Union[QuadElem, Rational], precision_bits: int):
    """
    Outward-rounded `mpmath.iv` enclosure of x with relative width about
    2**-precision_bits.
    """
    if precision_bits < MIN_PRECISION_BITS:
        raise ValueError(f"precision_bits must be at least {MIN_PRECISION_BITS}, got {precision_bits}")
    with iv_precision(precision_bits + GUARD_BITS):
        if not isinstance(x, QuadElem):
            return _iv_rational(x)
        if x.is_zero:
            return iv.mpf(0)
        if x.is_rational:
            return _iv_rational(x.u)
        root = iv.sqrt(x.field.D)
        if x.u == 0 or (x.u > 0) == (x.v > 0):
            return _iv_rational(x.u) + _iv_rational(x.v) * root
        # u and v*sqrt(D) cancel; x = N(x)/conj(x) and conj(x) has no cancellation.
        return _iv_rational(x.norm()) / (_iv_rational(x.u) - _iv_rational(x.v) * root)


def _floor_scaled(value: mpmath.mpf, bits: int) -> int:
    scaled = mpmath.ldexp(value, bits)
    n = int(scaled)
    return n - 1 if n > scaled else n


def _ceil_scaled(value: mpmath.mpf, bits: int) -> int:
    scaled = mpmath.ldexp(value, bits)
    n = int(scaled)
    return n + 1 if n < scaled else n


def fixed_point_bounds(x: Union[QuadElem, Rational], bits: int) -> Tuple[int, int]:
    """Integers lo <= x * 2**bits <= hi, rounded outward"""
    magnitude_bits = 0
    if isinstance(x, QuadElem) and not x.is_zero:
        magnitude_bits = max(abs(x.u), abs(x.v) * x.field.D, 1).numerator.bit_length()
    precision = max(MIN_PRECISION_BITS, bits + magnitude_bits + GUARD_BITS)
    lo, hi = interval_bounds(eval_interval(x, precision))
    return _floor_scaled(lo, bits), _ceil_scaled(hi, bits)


# -- log-space comparisons ----------------------------------------------------

class Ordering(enum.Enum):
    LT = -1
    EQ = 0
    GT = 1


Base = Union[QuadElem, Fraction]


@dataclass(frozen=True)
class PowerProduct:
    """
    Formal product exp(c) * |b_1|^e_1 * ... * |b_k|^e_k with rational
    exponents e_i and a rational log offset c.
    """

    factors: Tuple[Tuple[Base, Fraction], ...]
    log_offset: Fraction = Fraction(0)

    @classmethod
    def of(cls, *pairs: Tuple[Union[Base, int], Rational]) -> 'PowerProduct':
        factors = []
        for base, exponent in pairs:
            exponent = Fraction(exponent)
            if exponent == 0:
                continue
            if isinstance(base, QuadElem) and base.is_rational:
                base = base.u
            elif not isinstance(base, QuadElem):
                base = Fraction(base)
            factors.append((base, exponent))
        return cls(tuple(factors))

    @classmethod
    def exp(cls, c: Rational) -> 'PowerProduct':
        return cls((), Fraction(c))

    @classmethod
    def coerce(cls, value: Union['PowerProduct', Base, int]) -> 'PowerProduct':
        if isinstance(value, PowerProduct):
            return value
        return cls.of((value, 1))

    def __mul__(self, other: 'PowerProduct') -> 'PowerProduct':
        other = PowerProduct.coerce(other)
        return PowerProduct(self.factors + other.factors, self.log_offset + other.log_offset)

    @property
    def is_zero(self) -> bool:
        return any(
            (base.is_zero if isinstance(base, QuadElem) else base == 0) and exponent > 0
            for base, exponent in self.factors
        )

    @property
    def is_exact_rational(self) -> bool:
        return self.log_offset == 0 and all(
            isinstance(base, Fraction) and exponent.denominator == 1
            for base, exponent in self.factors
        )

    def exact_value(self) -> Fraction:
        value = Fraction(1)
        for base, exponent in self.factors:
            value *= abs(base) ** int(exponent)
        return value

    def log_abs(self, precision_bits: int):
        """Interval for log|self|; call inside an `iv_precision` block"""
        total = _iv_rational(self.log_offset)
        for base, exponent in self.factors:
            magnitude = abs(eval_interval(base, precision_bits))
            total += iv.log(magnitude) * _iv_rational(exponent)
        return total


Comparable = Union[PowerProduct, QuadElem, Fraction, int]


def compare_abs(x: Comparable, y: Comparable, cap_bits: int = None) -> Ordering:
    """
    Decide |x| < |y| or |x| > |y| by interval evaluation, doubling the
    precision until the enclosures separate.
    """
    left, right = PowerProduct.coerce(x), PowerProduct.coerce(y)
    if left.is_exact_rational and right.is_exact_rational:
        a, b = left.exact_value(), right.exact_value()
        return Ordering.LT if a < b else Ordering.GT if a > b else Ordering.EQ
    if left.is_zero or right.is_zero:
        if left.is_zero and right.is_zero:
            return Ordering.EQ
        return Ordering.LT if left.is_zero else Ordering.GT

    cap = cap_bits or get_setting('QA_PRECISION_CAP_BITS', DEFAULT_PRECISION_CAP_BITS)
    bits = START_COMPARE_BITS
    while bits <= cap:
        with iv_precision(bits + GUARD_BITS):
            difference = left.log_abs(bits) - right.log_abs(bits)
            lo, hi = interval_bounds(difference)
        if lo > 0:
            return Ordering.GT
        if hi < 0:
            return Ordering.LT
        logger.debug(f"compare_abs undecided at {bits} bits, doubling")
        bits *= 2
    raise UndecidableComparisonError(
        f"undecidable at precision cap ({cap} bits); the compared quantities may be equal"
    )


def log2_interval(x: Comparable, precision_bits: int = 64) -> Tuple[float, float]:
    """Bracket of log2|x| as floats, for reports"""
    product = PowerProduct.coerce(x)
    with iv_precision(precision_bits + GUARD_BITS):
        value = product.log_abs(precision_bits) / iv.log(2)
        lo, hi = interval_bounds(value)
    return float(lo), float(hi)
