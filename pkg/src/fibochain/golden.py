"""
Golden Field Arithmetic
=======================

Exact arithmetic in the quadratic field Q(sqrt5) and its ring of integers Z[tau].

``GoldenNum`` stores a + b*sqrt5 with rational coefficients; ``GoldenInt`` is the
subtype of ring elements m + n*tau. The star map sends sqrt5 to -sqrt5 and is the
bridge between physical and internal space in every cut-and-project computation.

Text forms used by the command line:

* ``"m+n*t"`` for GoldenInt values, e.g. ``"4+1*t"``
* ``"a+b*s5"`` for GoldenNum values, e.g. ``"1/2+1/2*s5"``

The parser accepts any sum/product of rationals with the symbols ``t``/``tau``
and ``s5``/``sqrt5``, so ``"t-1"`` and ``"(1+s5)/2"`` are valid input as well.
"""

import math
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np

from .errors import ParseError, RangeError

Rational = Union[int, Fraction]

TAU_FLOAT = (1.0 + math.sqrt(5.0)) / 2.0
TAU_STAR_FLOAT = 1.0 - TAU_FLOAT


def _sign_of(a: Fraction, b: Fraction) -> int:
    """Sign of a + b*sqrt5, decided without floating point."""
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: the larger square wins
    return sa if a * a > 5 * b * b else sb


def _common_integers(a: Fraction, b: Fraction) -> Tuple[int, int, int]:
    """Write a + b*sqrt5 as (p + q*sqrt5) / den with integers."""
    den = math.lcm(a.denominator, b.denominator)
    p = a.numerator * (den // a.denominator)
    q = b.numerator * (den // b.denominator)
    return p, q, den


class GoldenNum:
    """
    Exact element a + b*sqrt5 of Q(sqrt5).

    Instances are immutable; equality is structural on (a, b) and agrees with
    equality of plain ints and Fractions, so ``GoldenNum(3) == 3``.
    """

    __slots__ = ("_a", "_b", "_float")

    def __init__(self, a: Rational = 0, b: Rational = 0):
        if isinstance(a, float) or isinstance(b, float):
            raise TypeError("GoldenNum coefficients must be exact rationals")
        self._a = Fraction(a)
        self._b = Fraction(b)
        self._float: Optional[float] = None

    @classmethod
    def from_tau(cls, p: Rational, q: Rational) -> "GoldenNum":
        """Build p + q*tau for rational p, q."""
        q = Fraction(q)
        return cls(Fraction(p) + q / 2, q / 2)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def tau_coefficients(self) -> Tuple[Fraction, Fraction]:
        """Coefficients (p, q) with value p + q*tau."""
        return self._a - self._b, 2 * self._b

    # -- coercion -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> Optional["GoldenNum"]:
        if isinstance(other, GoldenNum):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GoldenNum(other)
        if isinstance(other, np.integer):
            return GoldenNum(int(other))
        return None

    # -- field operations -----------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GoldenNum(self._a + other._a, self._b + other._b)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GoldenNum(self._a - other._a, self._b - other._b)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GoldenNum(other._a - self._a, other._b - self._b)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b, c, d = self._a, self._b, other._a, other._b
        return GoldenNum(a * c + 5 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def __neg__(self):
        return GoldenNum(-self._a, -self._b)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def inverse(self) -> "GoldenNum":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("GoldenNum division by zero")
        conj = self.star()
        return GoldenNum(conj._a / norm, conj._b / norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GoldenNum.__mul__(self, other.inverse())

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return GoldenNum.__mul__(other, self.inverse())

    def __pow__(self, exponent: int):
        exponent = operator.index(exponent)
        base = self if exponent >= 0 else self.inverse()
        result: GoldenNum = GoldenNum(1)
        for _ in range(abs(exponent)):
            result = GoldenNum.__mul__(result, base)
        return result

    # -- conjugation and invariants --------------------------------------

    def star(self) -> "GoldenNum":
        """Galois conjugate a - b*sqrt5."""
        return GoldenNum(self._a, -self._b)

    def norm(self) -> Fraction:
        """Field norm x * star(x) = a^2 - 5 b^2."""
        return self._a * self._a - 5 * self._b * self._b

    def trace(self) -> Fraction:
        return 2 * self._a

    def is_rational(self) -> bool:
        return self._b == 0

    def is_golden_int(self) -> bool:
        n = 2 * self._b
        return n.denominator == 1 and (self._a - self._b).denominator == 1

    def to_golden_int(self) -> "GoldenInt":
        if not self.is_golden_int():
            raise ValueError(f"{self} is not an element of Z[tau]")
        return GoldenInt(int(self._a - self._b), int(2 * self._b))

    # -- ordering ---------------------------------------------------------

    def sign(self) -> int:
        return _sign_of(self._a, self._b)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._a == other._a and self._b == other._b

    def __hash__(self):
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b))

    def _cmp(self, other) -> Optional[int]:
        other = self._coerce(other)
        if other is None:
            return None
        return _sign_of(self._a - other._a, self._b - other._b)

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __bool__(self):
        return self._a != 0 or self._b != 0

    # -- conversion -------------------------------------------------------

    def __float__(self) -> float:
        if self._float is None:
            self._float = _exact_to_float(self._a, self._b)
        return self._float

    def __floor__(self) -> int:
        p, q, den = _common_integers(self._a, self._b)
        if q == 0:
            return p // den
        root = math.isqrt(5 * q * q)
        if q > 0:
            return (p + root) // den
        return (p - root - 1) // den

    def __ceil__(self) -> int:
        return -math.floor(-self)

    def __repr__(self):
        return f"GoldenNum({format_golden(self)!r})"

    def __str__(self):
        return format_tau(self)


class GoldenInt(GoldenNum):
    """Element m + n*tau of Z[tau]; closed under +, - and *."""

    __slots__ = ("_m", "_n")

    def __init__(self, m: int = 0, n: int = 0):
        m = operator.index(m)
        n = operator.index(n)
        super().__init__(Fraction(2 * m + n, 2), Fraction(n, 2))
        self._m = m
        self._n = n

    @property
    def m(self) -> int:
        return self._m

    @property
    def n(self) -> int:
        return self._n

    @staticmethod
    def _coerce_int(other) -> Optional["GoldenInt"]:
        if isinstance(other, GoldenInt):
            return other
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return GoldenInt(int(other), 0)
        return None

    def __add__(self, other):
        o = self._coerce_int(other)
        if o is None:
            return GoldenNum.__add__(self, other)
        return GoldenInt(self._m + o._m, self._n + o._n)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce_int(other)
        if o is None:
            return GoldenNum.__sub__(self, other)
        return GoldenInt(self._m - o._m, self._n - o._n)

    def __rsub__(self, other):
        o = self._coerce_int(other)
        if o is None:
            return GoldenNum.__rsub__(self, other)
        return GoldenInt(o._m - self._m, o._n - self._n)

    def __mul__(self, other):
        o = self._coerce_int(other)
        if o is None:
            return GoldenNum.__mul__(self, other)
        m1, n1, m2, n2 = self._m, self._n, o._m, o._n
        return GoldenInt(m1 * m2 + n1 * n2, m1 * n2 + n1 * m2 + n1 * n2)

    __rmul__ = __mul__

    def __neg__(self):
        return GoldenInt(-self._m, -self._n)

    def __pow__(self, exponent: int):
        exponent = operator.index(exponent)
        if exponent < 0:
            return GoldenNum.__pow__(self, exponent)
        result = GoldenInt(1, 0)
        for _ in range(exponent):
            result = result * self
        return result

    def star(self) -> "GoldenInt":
        """m + n*(1 - tau)."""
        return GoldenInt(self._m + self._n, -self._n)

    def norm(self) -> Fraction:
        return Fraction(self._m * self._m + self._m * self._n - self._n * self._n)

    def to_golden_int(self) -> "GoldenInt":
        return self

    def __hash__(self):
        return GoldenNum.__hash__(self)

    def __repr__(self):
        return f"GoldenInt({self._m}, {self._n})"

    def __str__(self):
        return format_golden_int(self)


ZERO = GoldenInt(0, 0)
ONE = GoldenInt(1, 0)
TAU = GoldenInt(0, 1)
SQRT5 = GoldenNum(0, 1)


@dataclass(frozen=True)
class LatticePoint:
    """Point (x, x*) of the Minkowski embedding of Z[tau]."""

    x: GoldenNum
    xstar: GoldenNum

    def __post_init__(self):
        if self.x.star() != self.xstar:
            raise ValueError(f"internal coordinate {self.xstar} is not star({self.x})")

    @classmethod
    def of(cls, x: GoldenNum) -> "LatticePoint":
        return cls(x, x.star())


# -- module-level operations ------------------------------------------------


def add(p: GoldenNum, q: GoldenNum) -> GoldenNum:
    return p + q


def sub(p: GoldenNum, q: GoldenNum) -> GoldenNum:
    return p - q


def mul(p: GoldenNum, q: GoldenNum) -> GoldenNum:
    return p * q


def neg(p: GoldenNum) -> GoldenNum:
    return -p


def star(p: GoldenNum) -> GoldenNum:
    return as_golden(p).star()


def compare(p: GoldenNum, q: GoldenNum) -> int:
    """-1, 0 or 1 as p is less than, equal to or greater than q."""
    p, q = as_golden(p), as_golden(q)
    return _sign_of(p.a - q.a, p.b - q.b)


def to_float(p: GoldenNum) -> float:
    return float(as_golden(p))


def field_norm(p: GoldenNum) -> Fraction:
    return as_golden(p).norm()


def as_golden(value) -> GoldenNum:
    """Coerce ints, Fractions and GoldenNums; reject floats."""
    if isinstance(value, GoldenNum):
        return value
    if isinstance(value, (int, Fraction, np.integer)) and not isinstance(value, bool):
        return GoldenNum(int(value) if isinstance(value, np.integer) else value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact GoldenNum")


def _exact_to_float(a: Fraction, b: Fraction) -> float:
    try:
        if b == 0:
            return float(a)
        p, q, den = _common_integers(a, b)
        # enough guard bits to survive cancellation between p and q*sqrt5
        shift = 70 + 2 * max(p.bit_length(), q.bit_length() + 2)
        root = math.isqrt(5 * q * q << (2 * shift))
        numerator = (p << shift) + (root if q > 0 else -root)
        return float(Fraction(numerator, den << shift))
    except OverflowError as exc:
        raise RangeError(f"value too large for a double: {a} + {b}*sqrt5") from exc


# -- vectorised helpers for (m, n) arrays -----------------------------------


def physical_float(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Float value of m + n*tau for integer arrays."""
    return np.asarray(m, dtype=float) + np.asarray(n, dtype=float) * TAU_FLOAT


def internal_float(m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Float value of star(m + n*tau) = (m + n) - n*tau."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    return (m + n) - n * TAU_FLOAT


# -- text forms -------------------------------------------------------------


def format_golden_int(x: GoldenNum) -> str:
    """Canonical "m+n*t" text."""
    x = as_golden(x).to_golden_int()
    sign = "+" if x.n >= 0 else "-"
    return f"{x.m}{sign}{abs(x.n)}*t"


def format_golden(x: GoldenNum) -> str:
    """Canonical "a+b*s5" text."""
    x = as_golden(x)
    sign = "+" if x.b >= 0 else "-"
    return f"{x.a}{sign}{abs(x.b)}*s5"


def format_tau(x: GoldenNum) -> str:
    """Readable tau-basis text such as "t-1", "-t+2" or "3/2*t"."""
    p, q = as_golden(x).tau_coefficients
    if q == 0:
        return str(p)
    if q == 1:
        text = "t"
    elif q == -1:
        text = "-t"
    else:
        text = f"{q}*t"
    if p > 0:
        text += f"+{p}"
    elif p < 0:
        text += f"-{-p}"
    return text


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<sym>tau|sqrt5|s5|t|τ|√5)|(?P<op>[-+*/()]))"
)

_SYMBOLS = {
    "t": TAU,
    "tau": TAU,
    "τ": TAU,
    "s5": SQRT5,
    "sqrt5": SQRT5,
    "√5": SQRT5,
}


def _tokenize(text: str) -> List[Tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} in {text!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
        pos = match.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


class _ExprParser:
    """Recursive descent over + - * / and parentheses."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[Tuple[str, str]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Tuple[str, str]:
        token = self.peek()
        if token is None:
            raise ParseError(f"unexpected end of expression in {self.text!r}")
        self.pos += 1
        return token

    def parse(self) -> GoldenNum:
        if not self.tokens:
            raise ParseError("empty expression")
        value = self.expr()
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return value

    def expr(self) -> GoldenNum:
        value = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            _, op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> GoldenNum:
        value = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            _, op = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                try:
                    value = value / rhs
                except ZeroDivisionError as exc:
                    raise ParseError(f"division by zero in {self.text!r}") from exc
        return value

    def unary(self) -> GoldenNum:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> GoldenNum:
        kind, text = self.take()
        if kind == "num":
            return GoldenNum(Fraction(text))
        if kind == "sym":
            return _SYMBOLS[text]
        if text == "(":
            value = self.expr()
            if self.take() != ("op", ")"):
                raise ParseError(f"missing ')' in {self.text!r}")
            return value
        raise ParseError(f"unexpected {text!r} in {self.text!r}")


def parse_golden(text: str) -> GoldenNum:
    """Parse an exact expression; returns a GoldenInt when the value is in Z[tau]."""
    value = _ExprParser(text).parse()
    if value.is_golden_int():
        return value.to_golden_int()
    return value


def parse_golden_int(text: str) -> GoldenInt:
    value = parse_golden(text)
    if not isinstance(value, GoldenInt):
        raise ParseError(f"{text!r} is not an element of Z[tau]")
    return value
