"""Exact arithmetic over Q and its multi-quadratic extensions.

A value is a finite sum ``sum_i q_i * sqrt(d_i)`` with rational
coefficients ``q_i`` and pairwise-distinct squarefree positive integer
radicands ``d_i``; the radicand 1 carries the rational part.  Values of
this shape are closed under field arithmetic, can be compared exactly,
and (in the cases needed here) support exact square roots via classic
denesting.  Everything is immutable and safe to share.

The module also provides the text form used by catalog files and the
command line: ``17/300*sqrt(51)-65/288*sqrt(3)`` style literals, with a
canonical serialization that round-trips byte-identically.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "LT",
    "EQ",
    "GT",
    "SurdError",
    "DivisionByZero",
    "NegativeRadicand",
    "NotDenestable",
    "ParseError",
    "SurdExpr",
    "ZERO",
    "ONE",
    "normalize",
    "arith",
    "sqrt_denest",
    "compare",
    "parse_literal",
    "to_literal",
    "factorize",
    "squarefree_split",
    "is_probable_prime",
]

RationalLike = Union[int, Fraction]

LT, EQ, GT = -1, 0, 1


class SurdError(Exception):
    """Base class for errors raised by exact surd arithmetic."""


class DivisionByZero(SurdError, ZeroDivisionError):
    """Division by an exactly-zero value."""


class NegativeRadicand(SurdError):
    """A square root of a negative quantity was requested."""


class NotDenestable(SurdError):
    """The square root exists but has no representation in this number
    system (callers fall back to numeric evaluation)."""


class ParseError(SurdError):
    """A literal did not conform to the surd grammar.

    Carries ``position``, the character offset of the offending token.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


# ---------------------------------------------------------------------------
# Integer helpers: primality, factorization, squarefree decomposition.
# ---------------------------------------------------------------------------

_SMALL_PRIMES: tuple[int, ...] = tuple(
    p for p in range(2, 1000) if all(p % q for q in range(2, int(math.isqrt(p)) + 1))
)

# Witness set making Miller-Rabin deterministic for n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin primality test, deterministic below 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Return a nontrivial factor of composite odd n (Brent's cycle form)."""
    if n % 2 == 0:
        return 2
    for c in range(1, 100):
        x = y = 2
        d = 1
        f = lambda v: (v * v + c) % n  # noqa: E731 - tiny local iterator
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"factor search failed for {n}")  # pragma: no cover


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of a positive integer as {prime: exponent}."""
    if n <= 0:
        raise ValueError("factorize() requires a positive integer")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    if n == 1:
        return out
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return out


def squarefree_split(n: int) -> tuple[int, int]:
    """Write positive n as r**2 * m with m squarefree; return (r, m)."""
    if n <= 0:
        raise ValueError("squarefree_split() requires a positive integer")
    r, m = 1, 1
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            r *= p ** (e // 2)
            if e % 2:
                m *= p
    if n > 1:
        root = math.isqrt(n)
        if root * root == n:
            r *= root
        elif is_probable_prime(n):
            m *= n
        else:
            for p, e in factorize(n).items():
                r *= p ** (e // 2)
                if e % 2:
                    m *= p
    return r, m


def _as_fraction(q: RationalLike) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    raise TypeError(f"expected an int or Fraction, got {type(q).__name__}")


# ---------------------------------------------------------------------------
# The value type.
# ---------------------------------------------------------------------------


class SurdExpr:
    """An exact element of a multi-quadratic extension of Q.

    Internally a sorted tuple of (radicand, coefficient) pairs with
    squarefree positive radicands, nonzero coefficients, and radicand 1
    holding the rational part.  Instances are immutable and hashable;
    equality is structural, which by linear independence of square roots
    of distinct squarefree integers coincides with equality of values.
    """

    __slots__ = ("_terms",)

    def __init__(self, pairs: Iterable[tuple[RationalLike, int]] = ()) -> None:
        acc: dict[int, Fraction] = {}
        for coeff, rad in pairs:
            c = _as_fraction(coeff)
            if not isinstance(rad, int) or rad <= 0:
                raise NegativeRadicand(f"radicand must be a positive integer, got {rad!r}")
            if c == 0:
                continue
            root, sf = squarefree_split(rad)
            c *= root
            acc[sf] = acc.get(sf, Fraction(0)) + c
        self._terms = tuple(sorted((d, q) for d, q in acc.items() if q != 0))

    # -- builders ----------------------------------------------------------

    @staticmethod
    def rational(q: RationalLike) -> "SurdExpr":
        """The rational value q as a SurdExpr."""
        return SurdExpr([(q, 1)])

    @staticmethod
    def root(coeff: RationalLike, radicand: int) -> "SurdExpr":
        """The value coeff * sqrt(radicand)."""
        return SurdExpr([(coeff, radicand)])

    # -- views -------------------------------------------------------------

    @property
    def terms(self) -> Mapping[int, Fraction]:
        """Mapping radicand -> coefficient (copy; radicand 1 = rational part)."""
        return dict(self._terms)

    def __iter__(self) -> Iterator[tuple[int, Fraction]]:
        return iter(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(d == 1 for d, _ in self._terms)

    @property
    def rational_part(self) -> Fraction:
        for d, q in self._terms:
            if d == 1:
                return q
        return Fraction(0)

    def coefficient(self, radicand: int) -> Fraction:
        """Coefficient of sqrt(radicand) (after squarefree reduction)."""
        root, sf = squarefree_split(radicand)
        for d, q in self._terms:
            if d == sf:
                return q / root
        return Fraction(0)

    def as_fraction(self) -> Fraction:
        """The value as an exact Fraction; raises ValueError if irrational."""
        if not self.is_rational:
            raise ValueError(f"{self} is irrational")
        return self.rational_part

    # -- structural equality ----------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SurdExpr):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == SurdExpr.rational(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._terms)

    # -- ring arithmetic ---------------------------------------------------

    def _coerce(self, other: object) -> "SurdExpr":
        if isinstance(other, SurdExpr):
            return other
        if isinstance(other, (int, Fraction)):
            return SurdExpr.rational(other)
        raise TypeError(f"cannot combine SurdExpr with {type(other).__name__}")

    def __add__(self, other: object) -> "SurdExpr":
        o = self._coerce(other)
        acc = dict(self._terms)
        for d, q in o._terms:
            acc[d] = acc.get(d, Fraction(0)) + q
        out = SurdExpr()
        out._terms = tuple(sorted((d, q) for d, q in acc.items() if q != 0))
        return out

    __radd__ = __add__

    def __neg__(self) -> "SurdExpr":
        out = SurdExpr()
        out._terms = tuple((d, -q) for d, q in self._terms)
        return out

    def __sub__(self, other: object) -> "SurdExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other: object) -> "SurdExpr":
        return self._coerce(other) + (-self)

    def __mul__(self, other: object) -> "SurdExpr":
        o = self._coerce(other)
        acc: dict[int, Fraction] = {}
        for d1, q1 in self._terms:
            for d2, q2 in o._terms:
                if d1 == d2:
                    d, extra = 1, Fraction(d1)
                else:
                    g = math.gcd(d1, d2)
                    d, extra = (d1 // g) * (d2 // g), Fraction(g)
                q = q1 * q2 * extra
                acc[d] = acc.get(d, Fraction(0)) + q
        out = SurdExpr()
        out._terms = tuple(sorted((d, q) for d, q in acc.items() if q != 0))
        return out

    __rmul__ = __mul__

    def inverse(self) -> "SurdExpr":
        """Exact multiplicative inverse via successive conjugation.

        One conjugation per prime dividing a remaining irrational
        radicand; each pass strictly removes that prime from the
        denominator's radicands, so the loop terminates with a rational
        denominator.
        """
        if self.is_zero:
            raise DivisionByZero("inverse of zero")
        num = ONE
        den = self
        while not den.is_rational:
            p = None
            for d, _ in den._terms:
                if d != 1:
                    p = min(factorize(d))
                    break
            assert p is not None
            flipped = SurdExpr()
            flipped._terms = tuple(
                (d, -q if d % p == 0 else q) for d, q in den._terms
            )
            num = num * flipped
            den = den * flipped
        return num * SurdExpr.rational(1 / den.rational_part)

    def __truediv__(self, other: object) -> "SurdExpr":
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other: object) -> "SurdExpr":
        return self._coerce(other) * self.inverse()

    # -- order -------------------------------------------------------------

    def interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Enclosing rational interval [lo, hi] with hi-lo <= k/2**bits."""
        lo = Fraction(0)
        hi = Fraction(0)
        scale = 1 << bits
        for d, q in self._terms:
            if d == 1:
                lo += q
                hi += q
                continue
            s = math.isqrt(d * scale * scale)
            r_lo = Fraction(s, scale)
            r_hi = Fraction(s + 1, scale)
            if q >= 0:
                lo += q * r_lo
                hi += q * r_hi
            else:
                lo += q * r_hi
                hi += q * r_lo
        return lo, hi

    def sign(self) -> int:
        """-1, 0, or +1.  Zero is decided structurally, so the interval
        refinement below always terminates."""
        if self.is_zero:
            return 0
        if len(self._terms) == 1:
            return 1 if self._terms[0][1] > 0 else -1
        bits = 32
        while True:
            lo, hi = self.interval(bits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 2

    def __abs__(self) -> "SurdExpr":
        return -self if self.sign() < 0 else self

    def __lt__(self, other: object) -> bool:
        return (self - self._coerce(other)).sign() < 0

    def __le__(self, other: object) -> bool:
        return (self - self._coerce(other)).sign() <= 0

    def __gt__(self, other: object) -> bool:
        return (self - self._coerce(other)).sign() > 0

    def __ge__(self, other: object) -> bool:
        return (self - self._coerce(other)).sign() >= 0

    # -- numeric views -----------------------------------------------------

    def __float__(self) -> float:
        lo, hi = self.interval(128)
        return float((lo + hi) / 2)

    def __repr__(self) -> str:
        return f"SurdExpr({to_literal(self)!r})"

    def __str__(self) -> str:
        return to_literal(self)


ZERO = SurdExpr()
ONE = SurdExpr.rational(1)


# ---------------------------------------------------------------------------
# Spec-level operations.
# ---------------------------------------------------------------------------


def normalize(raw: Sequence[tuple[RationalLike, int]]) -> SurdExpr:
    """Build a SurdExpr from (coefficient, radicand) pairs.

    Radicands are reduced to squarefree form with the square part
    absorbed into the coefficient; like radicands merge; zero terms drop.
    """
    return SurdExpr(raw)


def arith(x: SurdExpr, y: SurdExpr, op: str) -> SurdExpr:
    """Field arithmetic: op is one of 'add', 'sub', 'mul', 'div'."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown operation {op!r}")


def _sqrt_of_fraction(q: Fraction) -> SurdExpr:
    """Exact square root of a nonnegative rational, as coeff*sqrt(m)."""
    if q < 0:
        raise NegativeRadicand(f"square root of negative rational {q}")
    if q == 0:
        return ZERO
    root, m = squarefree_split(q.numerator * q.denominator)
    return SurdExpr.root(Fraction(root, q.denominator), m)


def sqrt_denest(x: SurdExpr) -> SurdExpr:
    """The positive square root of x, exactly, when one exists here.

    Handles: nonnegative rationals (always); alpha + beta*sqrt(d) where
    alpha**2 - beta**2*d is a perfect rational square (the classic
    denesting sqrt(alpha+beta*sqrt(d)) = sqrt((alpha+c)/2) +
    sgn(beta)*sqrt((alpha-c)/2) with c = sqrt(alpha**2-beta**2*d)).
    Raises NotDenestable otherwise and NegativeRadicand for x < 0.
    """
    sgn = x.sign()
    if sgn < 0:
        raise NegativeRadicand(f"square root of negative value {x}")
    if sgn == 0:
        return ZERO
    if x.is_rational:
        return _sqrt_of_fraction(x.rational_part)
    surd_terms = [(d, q) for d, q in x if d != 1]
    if len(surd_terms) != 1:
        raise NotDenestable(f"no quadratic square root found for {x}")
    d, beta = surd_terms[0]
    alpha = x.rational_part
    if alpha <= 0:
        # x > 0 forces alpha >= |beta|*sqrt(d) > 0 in every denestable case.
        raise NotDenestable(f"no quadratic square root found for {x}")
    disc = alpha * alpha - beta * beta * d
    if disc < 0:
        raise NotDenestable(f"no quadratic square root found for {x}")
    root, m = squarefree_split(disc.numerator * disc.denominator) if disc else (0, 1)
    if m != 1:
        raise NotDenestable(f"no quadratic square root found for {x}")
    c = Fraction(root, disc.denominator) if disc else Fraction(0)
    u = (alpha + c) / 2
    v = (alpha - c) / 2
    y = _sqrt_of_fraction(u)
    y = y + _sqrt_of_fraction(v) if beta > 0 else y - _sqrt_of_fraction(v)
    if y * y != x:  # pragma: no cover - defensive; the identity is exact
        raise NotDenestable(f"denesting verification failed for {x}")
    return y


def compare(x: SurdExpr, y: SurdExpr) -> int:
    """LT, EQ, or GT for the real values of x and y.

    Equality is decided structurally; strict order by interval
    refinement, which terminates because a nonzero difference has
    nonzero value.
    """
    if x == y:
        return EQ
    return GT if (x - y).sign() > 0 else LT


# ---------------------------------------------------------------------------
# The literal grammar.
#
#   expr     := term (('+'|'-') term)*
#   term     := rational ('*' 'sqrt(' uint ')')? | 'sqrt(' uint ')'
#   rational := int ('/' uint)?
#
# Canonical form: no whitespace, rational part first then ascending
# radicands, so serialization round-trips byte-identically.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>-?\d+)|(?P<sqrt>sqrt\()|(?P<ch>[+\-*/)])|(?P<bad>\S))"
)


def to_literal(x: SurdExpr) -> str:
    """Canonical text form of x under the surd grammar."""
    if x.is_zero:
        return "0"
    parts: list[str] = []
    for d, q in x:
        mag = abs(q)
        body = str(mag.numerator)
        if mag.denominator != 1:
            body += f"/{mag.denominator}"
        if d != 1:
            body = f"sqrt({d})" if mag == 1 else f"{body}*sqrt({d})"
        if not parts:
            parts.append(body if q > 0 else f"-{body}")
        else:
            parts.append(("+" if q > 0 else "-") + body)
    return "".join(parts)


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def peek(self) -> str | None:
        m = _TOKEN.match(self.text, self.pos)
        if m is None:
            return None
        return m.group("num") or m.group("sqrt") or m.group("ch") or m.group("bad")

    def take(self) -> str | None:
        m = _TOKEN.match(self.text, self.pos)
        if m is None:
            return None
        tok = m.group("num") or m.group("sqrt") or m.group("ch") or m.group("bad")
        if m.group("bad") is not None:
            raise self.error(f"unexpected character {tok!r}")
        self.pos = m.end()
        return tok

    def parse_uint(self, what: str) -> int:
        tok = self.take()
        if tok is None or not tok.lstrip("-").isdigit() or tok.startswith("-"):
            raise self.error(f"expected {what}")
        return int(tok)

    def parse_sqrt_body(self) -> int:
        rad = self.parse_uint("a radicand")
        if self.take() != ")":
            raise self.error("expected ')'")
        if rad <= 0:
            raise self.error("radicand must be positive")
        return rad

    def parse_term(self, sign: int) -> tuple[Fraction, int]:
        tok = self.take()
        if tok == "-":
            sign = -sign
            tok = self.take()
        if tok == "sqrt(":
            return Fraction(sign), self.parse_sqrt_body()
        if tok is None or not tok.lstrip("-").isdigit():
            raise self.error("expected a number or sqrt(")
        num = int(tok)
        den = 1
        if self.peek() == "/":
            self.take()
            den = self.parse_uint("a denominator")
            if den == 0:
                raise self.error("zero denominator")
        coeff = Fraction(sign * num, den)
        if self.peek() == "*":
            self.take()
            if self.take() != "sqrt(":
                raise self.error("expected sqrt( after '*'")
            return coeff, self.parse_sqrt_body()
        return coeff, 1

    def parse_expr(self) -> SurdExpr:
        pairs: list[tuple[Fraction, int]] = []
        pairs.append(self.parse_term(1))
        while True:
            nxt = self.peek()
            if nxt is None:
                break
            if nxt == "+":
                self.take()
                pairs.append(self.parse_term(1))
            elif nxt == "-":
                self.take()
                coeff, rad = self.parse_term(1)
                pairs.append((-coeff, rad))
            elif nxt.lstrip("-").isdigit() and nxt.startswith("-"):
                # A '-5' token directly: treat as '+ (-5)'.
                pairs.append(self.parse_term(1))
            else:
                raise self.error(f"unexpected token {nxt!r}")
        rest = self.text[self.pos:].strip()
        if rest:
            raise self.error(f"trailing input {rest!r}")
        return SurdExpr(pairs)


def parse_literal(text: str) -> SurdExpr:
    """Parse a surd literal; normalizes on read.

    Raises ParseError (with position) on malformed input.
    """
    if not text.strip():
        raise ParseError("empty literal", 0)
    return _Parser(text).parse_expr()
