"""Scalars: exact elements of Q(sqrt 2) or plain floats, plus small linear algebra.

Exact values are :class:`QSqrt2` instances; approximate values are Python
floats.  Mixing the two degrades to float.  Every comparison in the package
goes through :func:`sign`, which is exact for :class:`QSqrt2` and uses a
deadband of the global tolerance for floats.
"""

from __future__ import annotations

import contextlib
import math
import os
import re
from contextvars import ContextVar
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Sequence, Union

from .errors import DimensionMismatch, DivisionByZero, ExpressionSyntaxError

DEFAULT_EPS = 1e-9


def _env_eps() -> float:
    try:
        eps = float(os.environ.get("KSMOOTH_EPS", DEFAULT_EPS))
    except ValueError:
        return DEFAULT_EPS
    return eps if eps > 0 else DEFAULT_EPS


_eps: ContextVar[float] = ContextVar("ksmooth_eps", default=_env_eps())


def get_eps() -> float:
    return _eps.get()


def set_eps(eps: float) -> None:
    if not eps > 0:
        raise ValueError("tolerance must be positive")
    _eps.set(float(eps))


@contextlib.contextmanager
def tolerance(eps: float) -> Iterator[float]:
    """Temporarily replace the global tolerance used by float comparisons."""
    if not eps > 0:
        raise ValueError("tolerance must be positive")
    token = _eps.set(float(eps))
    try:
        yield eps
    finally:
        _eps.reset(token)


def _rat_sign(q: Fraction) -> int:
    return (q > 0) - (q < 0)


class QSqrt2:
    """An exact number ``a + b*sqrt(2)`` with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a: int | Fraction = 0, b: int | Fraction = 0) -> None:
        object.__setattr__(self, "a", Fraction(a))
        object.__setattr__(self, "b", Fraction(b))

    def __setattr__(self, name, value):
        raise AttributeError("QSqrt2 is immutable")

    @classmethod
    def _make(cls, a: Fraction, b: Fraction) -> QSqrt2:
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    @staticmethod
    def _coerce(other) -> QSqrt2 | None:
        if isinstance(other, QSqrt2):
            return other
        if isinstance(other, (int, Rational)) and not isinstance(other, bool):
            return QSqrt2._make(Fraction(other), Fraction(0))
        return None

    def conjugate(self) -> QSqrt2:
        return QSqrt2._make(self.a, -self.b)

    def field_norm(self) -> Fraction:
        """``a**2 - 2*b**2``, the product with the conjugate."""
        return self.a * self.a - 2 * self.b * self.b

    def sign(self) -> int:
        sa, sb = _rat_sign(self.a), _rat_sign(self.b)
        if sb == 0:
            return sa
        if sa == 0:
            return sb
        if sa == sb:
            return sa
        # opposite signs: the larger magnitude of |a| and |b|*sqrt2 wins
        return sa * _rat_sign(self.field_norm())

    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return bool(self.a) or bool(self.b)

    def __float__(self) -> float:
        return float(self.a) + float(self.b) * math.sqrt(2.0)

    def __neg__(self) -> QSqrt2:
        return QSqrt2._make(-self.a, -self.b)

    def __pos__(self) -> QSqrt2:
        return self

    def __abs__(self) -> QSqrt2:
        return -self if self.sign() < 0 else self

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) + other
            return NotImplemented
        return QSqrt2._make(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) - other
            return NotImplemented
        return QSqrt2._make(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return other - float(self)
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) * other
            return NotImplemented
        if not self.b and not o.b:
            return QSqrt2._make(self.a * o.a, Fraction(0))
        return QSqrt2._make(
            self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return float(self) / other
            return NotImplemented
        if not o:
            raise DivisionByZero("division by 0 + 0*sqrt2")
        if not o.b:
            return QSqrt2._make(self.a / o.a, self.b / o.a)
        n = o.field_norm()
        num = self * o.conjugate()
        return QSqrt2._make(num.a / n, num.b / n)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, float):
                return other / float(self)
            return NotImplemented
        return o / self

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self) -> int:
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare QSqrt2 with {type(other).__name__}")
        return (self - o).sign()

    def __lt__(self, other) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other) -> bool:
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self) -> str:
        # canonical printer; parse(str(s)) == s
        if not self.b:
            return str(self.a)
        tail = "sqrt2" if abs(self.b) == 1 else f"{abs(self.b)}*sqrt2"
        if not self.a:
            return tail if self.b > 0 else f"-{tail}"
        op = "+" if self.b > 0 else "-"
        return f"{self.a} {op} {tail}"


Scalar = Union[QSqrt2, float]

SQRT2 = QSqrt2(0, 1)
ZERO = QSqrt2(0, 0)
ONE = QSqrt2(1, 0)


def is_exact(s) -> bool:
    return isinstance(s, (QSqrt2, int, Fraction)) and not isinstance(s, bool)


def exact(s) -> QSqrt2:
    """Coerce an int, Fraction, QSqrt2 or expression string to :class:`QSqrt2`."""
    if isinstance(s, str):
        return scalar_parse(s)
    o = QSqrt2._coerce(s)
    if o is None:
        raise TypeError(f"not an exact scalar: {s!r}")
    return o


def sign(s) -> int:
    """Exact sign for exact scalars, sign with an eps-deadband for floats."""
    if isinstance(s, QSqrt2):
        return s.sign()
    if isinstance(s, (int, Fraction)):
        return (s > 0) - (s < 0)
    v = float(s)
    if abs(v) <= get_eps():
        return 0
    return 1 if v > 0 else -1


scalar_sign = sign


def is_zero(s) -> bool:
    return sign(s) == 0


def close(a, b, scale: float = 1.0) -> bool:
    """Equality of scalars; float comparisons use ``scale`` times the tolerance."""
    d = a - b
    if is_exact(d):
        return sign(d) == 0
    return abs(float(d)) <= scale * get_eps()


def to_float(s) -> float:
    return float(s)


def sqrt_exact(s) -> QSqrt2 | None:
    """The non-negative square root of ``s`` when it lies in Q(sqrt 2), else None."""
    s = exact(s)
    if s.sign() < 0:
        return None
    if s.sign() == 0:
        return ZERO
    # (c + d*sqrt2)^2 = s  <=>  c^2 + 2d^2 = a, 2cd = b
    root = _rational_sqrt(s.a * s.a - 2 * s.b * s.b)
    if root is None:
        return None
    for c2 in ((s.a + root) / 2, (s.a - root) / 2):
        c = _rational_sqrt(c2)
        if c is None:
            continue
        if c:
            d = s.b / (2 * c)
        else:
            d = _rational_sqrt(s.a / 2)
            if d is None:
                continue
        r = QSqrt2(c, d)
        if r.sign() < 0:
            r = -r
        if r * r == s:
            return r
    return None


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    num, den = _isqrt_exact(q.numerator), _isqrt_exact(q.denominator)
    return None if num is None or den is None else Fraction(num, den)


def _isqrt_exact(n: int) -> int | None:
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


# -- expression parser -------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(sqrt2)|([-+*/()]))")


def _tokenize(text: str) -> list[str]:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected input at {pos}: {text[pos:]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ExpressionSyntaxError(f"unexpected end of expression: {self.text!r}")
        self.i += 1
        return tok

    def parse(self) -> QSqrt2:
        if not self.tokens:
            raise ExpressionSyntaxError("empty expression")
        value = self.expr()
        if self.peek() is not None:
            raise ExpressionSyntaxError(
                f"unexpected token {self.peek()!r} in {self.text!r}"
            )
        return value

    def expr(self) -> QSqrt2:
        value = self.term()
        while self.peek() in ("+", "-"):
            if self.take() == "+":
                value = value + self.term()
            else:
                value = value - self.term()
        return value

    def term(self) -> QSqrt2:
        value = self.unary()
        while self.peek() in ("*", "/"):
            if self.take() == "*":
                value = value * self.unary()
            else:
                divisor = self.unary()
                if not divisor:
                    raise DivisionByZero(f"denominator is zero in {self.text!r}")
                value = value / divisor
        return value

    def unary(self) -> QSqrt2:
        if self.peek() == "-":
            self.take()
            return -self.unary()
        return self.atom()

    def atom(self) -> QSqrt2:
        tok = self.take()
        if tok == "(":
            value = self.expr()
            if self.take() != ")":
                raise ExpressionSyntaxError(f"expected ')' in {self.text!r}")
            return value
        if tok == "sqrt2":
            return SQRT2
        if tok.isdigit():
            return QSqrt2(int(tok))
        raise ExpressionSyntaxError(f"unexpected token {tok!r} in {self.text!r}")


def scalar_parse(text: str) -> QSqrt2:
    """Parse an expression over integers, ``sqrt2``, ``+ - * /`` and parentheses.

    >>> scalar_parse("sqrt2/2")
    QSqrt2(0, 1/2)
    """
    if not isinstance(text, str):
        raise ExpressionSyntaxError(f"expression must be a string, got {text!r}")
    return _Parser(text).parse()


def scalar_print(s: Scalar) -> str | float:
    """Canonical text for exact scalars; floats are returned unchanged."""
    if is_exact(s):
        return str(exact(s))
    return float(s)


# -- linear algebra ----------------------------------------------------------


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"lengths {len(u)} and {len(v)} differ")
    total = 0
    for a, b in zip(u, v):
        total = total + a * b
    return total


def _check_rows(rows: Sequence[Sequence]) -> int:
    if not rows:
        raise DimensionMismatch("no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatch("rows of unequal length")
    return width


def _all_exact(rows) -> bool:
    return all(is_exact(c) for r in rows for c in r)


def rank(rows: Sequence[Sequence]) -> int:
    """Rank of the row span.

    Exact rows use fraction-free (Bareiss) elimination over Q(sqrt 2); any
    float entry switches to elimination with partial pivoting where pivots
    below the tolerance count as zero.
    """
    if not rows:
        return 0
    width = _check_rows(rows)
    if _all_exact(rows):
        return _rank_bareiss([[exact(c) for c in r] for r in rows], width)
    return _rank_float([[float(c) for c in r] for r in rows], width)


def _rank_bareiss(m: list[list[QSqrt2]], width: int) -> int:
    n = len(m)
    r = 0
    prev = ONE
    for c in range(width):
        p = next((i for i in range(r, n) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, n):
            lead = m[i][c]
            row_i, row_r = m[i], m[r]
            for j in range(c + 1, width):
                row_i[j] = (row_i[j] * piv - lead * row_r[j]) / prev
            row_i[c] = ZERO
        prev = piv
        r += 1
        if r == n:
            break
    return r


def _rank_float(m: list[list[float]], width: int) -> int:
    eps = get_eps()
    n = len(m)
    r = 0
    for c in range(width):
        p = max(range(r, n), key=lambda i: abs(m[i][c]), default=None)
        if p is None or abs(m[p][c]) <= eps:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        for i in range(r + 1, n):
            f = m[i][c] / piv
            if f:
                row_i, row_r = m[i], m[r]
                for j in range(c, width):
                    row_i[j] -= f * row_r[j]
        r += 1
        if r == n:
            break
    return r


def row_basis(rows: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal independent subfamily, chosen greedily in order."""
    if not rows:
        return []
    width = _check_rows(rows)
    use_exact = _all_exact(rows)
    echelon: list[tuple[int, list]] = []
    chosen = []
    for idx, row in enumerate(rows):
        v = [exact(c) for c in row] if use_exact else [float(c) for c in row]
        for col, b in echelon:
            if sign(v[col]) != 0:
                f = v[col] / b[col]
                v = [x - f * y for x, y in zip(v, b)]
        if use_exact:
            col = next((j for j in range(width) if v[j]), None)
        else:
            col = max(range(width), key=lambda j: abs(v[j]))
            if abs(v[col]) <= get_eps():
                col = None
        if col is not None:
            echelon.append((col, v))
            chosen.append(idx)
    return chosen


def solve(a: Sequence[Sequence], b: Sequence):
    """Solve the square system ``a x = b``; returns None when ``a`` is singular."""
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n:
        raise DimensionMismatch("solve needs a square system")
    use_exact = _all_exact(a) and all(is_exact(c) for c in b)
    conv = exact if use_exact else float
    m = [[conv(c) for c in row] + [conv(rhs)] for row, rhs in zip(a, b)]
    for c in range(n):
        if use_exact:
            p = next((i for i in range(c, n) if m[i][c]), None)
        else:
            p = max(range(c, n), key=lambda i: abs(m[i][c]))
            if abs(m[p][c]) <= get_eps():
                p = None
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        for i in range(n):
            if i != c and sign(m[i][c]) != 0:
                f = m[i][c] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]
