"""Truncated formal power series with exact coefficients.

Series carry Fraction or multi-quadratic (SurdExpr) coefficients indexed
0..order and never read or claim coefficients beyond their stated order.
On top of the ring operations sit composition, fractional powers, the
theta operator x*d/dx, hypergeometric constructors, the classical
two-term and three-term hypergeometric transformation checks, and
residual application of printed third-order differential operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .surd import SurdExpr

__all__ = [
    "SeriesError",
    "NonUnitDivisor",
    "NonzeroConstantInner",
    "NonUnitBase",
    "MalformedOde",
    "TruncSeries",
    "series_arith",
    "compose",
    "pow_rational",
    "theta",
    "hyp2f1",
    "hyp3f2",
    "hyp_series",
    "OdeSpec",
    "apply_ode",
    "printed_ode",
    "euler_identity_holds",
    "pfaff_identity_holds",
    "quadratic_identity_holds",
    "half_angle_identity_holds",
    "clausen_identity_holds",
]

Coeff = Union[Fraction, SurdExpr]


class SeriesError(Exception):
    """Base class for truncated-series errors."""


class NonUnitDivisor(SeriesError):
    """Division by a series whose constant term is zero."""


class NonzeroConstantInner(SeriesError):
    """Composition with an inner series whose constant term is nonzero."""


class NonUnitBase(SeriesError):
    """Fractional power of a series whose constant term is not one."""


class MalformedOde(SeriesError):
    """A differential operator contains a term with no dependent
    variable (or is otherwise not applicable); the finding is recorded by
    callers rather than repaired."""


def _c(value) -> Coeff:
    if isinstance(value, int):
        return Fraction(value)
    return value


class TruncSeries:
    """An exact power series truncated at an inclusive order."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Sequence[Coeff]) -> None:
        if len(coeffs) == 0:
            raise ValueError("a truncated series needs at least the constant term")
        self._coeffs = tuple(_c(v) for v in coeffs)

    # -- basic views -------------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> tuple[Coeff, ...]:
        return self._coeffs

    def __getitem__(self, n: int) -> Coeff:
        return self._coeffs[n]

    def __len__(self) -> int:
        return len(self._coeffs)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self._coeffs)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and all(
            a == b for a, b in zip(self._coeffs, other._coeffs)
        )

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        head = ", ".join(str(v) for v in self._coeffs[:5])
        tail = ", ..." if self.order > 4 else ""
        return f"TruncSeries([{head}{tail}], order={self.order})"

    # -- constructors ------------------------------------------------------

    @staticmethod
    def constant(value, order: int) -> "TruncSeries":
        return TruncSeries([_c(value)] + [Fraction(0)] * order)

    @staticmethod
    def zero(order: int) -> "TruncSeries":
        return TruncSeries.constant(0, order)

    @staticmethod
    def one(order: int) -> "TruncSeries":
        return TruncSeries.constant(1, order)

    @staticmethod
    def identity(order: int) -> "TruncSeries":
        """The series x."""
        coeffs = [Fraction(0)] * (order + 1)
        if order >= 1:
            coeffs[1] = Fraction(1)
        return TruncSeries(coeffs)

    @staticmethod
    def from_function(f: Callable[[int], Coeff], order: int) -> "TruncSeries":
        return TruncSeries([_c(f(n)) for n in range(order + 1)])

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} to {order}")
        return TruncSeries(self._coeffs[: order + 1])

    # -- ring operations (operands truncated to the smaller order) --------

    def _zip_order(self, other: "TruncSeries") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._zip_order(other)
        return TruncSeries([self[i] + other[i] for i in range(n + 1)])

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._zip_order(other)
        return TruncSeries([self[i] - other[i] for i in range(n + 1)])

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-v for v in self._coeffs])

    def scale(self, factor) -> "TruncSeries":
        factor = _c(factor)
        return TruncSeries([factor * v for v in self._coeffs])

    def add_constant(self, value) -> "TruncSeries":
        value = _c(value)
        return TruncSeries([self._coeffs[0] + value, *self._coeffs[1:]])

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._zip_order(other)
        out: list[Coeff] = []
        for i in range(n + 1):
            acc = self[0] * other[i]
            for k in range(1, i + 1):
                acc = acc + self[k] * other[i - k]
            out.append(acc)
        return TruncSeries(out)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        n = self._zip_order(other)
        g0 = other[0]
        if g0 == 0:
            raise NonUnitDivisor("division requires a nonzero constant term")
        out: list[Coeff] = []
        for i in range(n + 1):
            acc = self[i]
            for k in range(i):
                acc = acc - out[k] * other[i - k]
            out.append(acc / g0)
        return TruncSeries(out)

    # -- calculus ----------------------------------------------------------

    def derivative(self) -> "TruncSeries":
        """d/dx; the result's reliable order drops by one."""
        if self.order == 0:
            return TruncSeries.zero(0)
        return TruncSeries([(n * self[n]) for n in range(1, self.order + 1)])

    def shift_mul(self, power: int, factor) -> "TruncSeries":
        """Multiply by factor * x**power, keeping the same order."""
        factor = _c(factor)
        coeffs = [Fraction(0)] * min(power, self.order + 1)
        for n in range(self.order + 1 - power):
            coeffs.append(factor * self[n])
        return TruncSeries(coeffs[: self.order + 1])


# ---------------------------------------------------------------------------
# Spec-level operations.
# ---------------------------------------------------------------------------


def series_arith(f: TruncSeries, g: TruncSeries, op: str) -> TruncSeries:
    """Ring arithmetic on equal-order series: 'add', 'mul', or 'div'."""
    if f.order != g.order:
        raise ValueError(f"order mismatch: {f.order} != {g.order}")
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "div":
        return f / g
    raise ValueError(f"unknown operation {op!r}")


def compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """f(g(x)) in the truncated ring; g must have zero constant term."""
    if g[0] != 0:
        raise NonzeroConstantInner("inner series must have zero constant term")
    order = min(f.order, g.order)
    g = g.truncate(order)
    result = TruncSeries.constant(f[f.order], order)
    for i in range(f.order - 1, -1, -1):
        result = (result * g).add_constant(f[i])
    return result


def pow_rational(f: TruncSeries, e) -> TruncSeries:
    """f**e for rational e; f must have constant term exactly one.

    Uses the logarithmic-derivative recurrence
    n*g_n = sum_{j=1..n} ((e+1)j - n) * f_j * g_{n-j},  g_0 = 1,
    which is exact over any coefficient field of characteristic zero.
    """
    if isinstance(e, int):
        e = Fraction(e)
    if f[0] != 1:
        raise NonUnitBase("fractional powers require constant term one")
    n_max = f.order
    out: list[Coeff] = [Fraction(1)]
    for n in range(1, n_max + 1):
        acc = None
        for j in range(1, n + 1):
            w = (e + 1) * j - n
            term = (w * f[j]) * out[n - j]
            acc = term if acc is None else acc + term
        out.append(acc / n)
    return TruncSeries(out)


def theta(f: TruncSeries) -> TruncSeries:
    """The Euler operator x*d/dx: coefficient n is scaled by n."""
    return TruncSeries([n * f[n] for n in range(f.order + 1)])


# ---------------------------------------------------------------------------
# Hypergeometric constructors (rational parameters only).
# ---------------------------------------------------------------------------


def hyp_series(uppers: Sequence, lowers: Sequence, order: int) -> TruncSeries:
    """Generalized hypergeometric series sum_n (prod uppers)_n /
    ((prod lowers)_n n!) x**n as an exact TruncSeries."""
    ups = [Fraction(u) if isinstance(u, int) else u for u in uppers]
    lows = [Fraction(v) if isinstance(v, int) else v for v in lowers]
    for v in lows:
        if v <= 0 and v.denominator == 1 and -int(v) < order:
            raise ZeroDivisionError(f"lower parameter {v} hits a pole by order {order}")
    coeffs: list[Coeff] = [Fraction(1)]
    term = Fraction(1)
    for n in range(order):
        for u in ups:
            term *= u + n
        for v in lows:
            term /= v + n
        term /= n + 1
        coeffs.append(term)
    return TruncSeries(coeffs)


def hyp2f1(a, b, c, order: int) -> TruncSeries:
    return hyp_series([a, b], [c], order)


def hyp3f2(a1, a2, a3, b1, b2, order: int) -> TruncSeries:
    return hyp_series([a1, a2, a3], [b1, b2], order)


# ---------------------------------------------------------------------------
# Printed differential operators, applied as residuals.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OdeSpec:
    """A linear differential operator with polynomial coefficients.

    Each term is (derivative_order, polynomial) where derivative_order
    None marks a printed term carrying no dependent variable at all;
    applying such an operator raises MalformedOde.  The polynomials are
    the printed rational-function coefficients multiplied through by the
    printed common denominator, so everything stays polynomial.
    """

    name: str
    terms: tuple[tuple[int | None, tuple[Fraction, ...]], ...]

    @property
    def max_derivative(self) -> int:
        return max((j for j, _ in self.terms if j is not None), default=0)

    @property
    def is_malformed(self) -> bool:
        return any(j is None for j, _ in self.terms)


def _poly_mul(f: TruncSeries, poly: Sequence[Fraction]) -> TruncSeries:
    out: list[Coeff] = []
    for n in range(f.order + 1):
        acc = None
        for m, c in enumerate(poly):
            if c == 0 or m > n:
                continue
            term = c * f[n - m]
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else Fraction(0))
    return TruncSeries(out)


def apply_ode(f: TruncSeries, ode: OdeSpec) -> TruncSeries:
    """Residual of the operator applied to f, reliable to order
    f.order - ode.max_derivative (each differentiation costs one order).

    Raises MalformedOde if the operator has a term without a dependent
    variable; the caller records that finding instead of repairing it.
    """
    if ode.is_malformed:
        bad = [poly for j, poly in ode.terms if j is None]
        raise MalformedOde(
            f"operator {ode.name!r} has {len(bad)} term(s) with no dependent variable"
        )
    headroom = ode.max_derivative
    if f.order < headroom:
        raise ValueError(f"series order {f.order} below operator headroom {headroom}")
    checkable = f.order - headroom
    residual = TruncSeries.zero(checkable)
    for j, poly in ode.terms:
        d = f
        for _ in range(j):
            d = d.derivative()
        contrib = _poly_mul(d, poly).truncate(checkable)
        residual = residual + contrib
    return residual


def printed_ode(which: str, s=None) -> OdeSpec:
    """The four third-order operators printed alongside the series
    identities, keyed by the identity-check name they accompany.

    - '3': operator for the binomial-product family sum (denominator
      x**2 (1+4x)**2 cleared); residual is zero for the genuine series.
    - '5': operator printed for the squared-binomial family sum
      (denominator x**2 (1-x)**2 cleared); the printed coefficients are
      inconsistent with the series from order 0 on, so its residual is
      a recorded nonzero finding, not an implementation defect.
    - '6': operator for the three-term hypergeometric sum (denominator
      x**2 (1-x) cleared); residual is zero.
    - 'selfmap16': the transformation operator printed for the 1728-case
      self-map, whose last printed term carries no dependent variable;
      applying it raises MalformedOde.
    """
    F = Fraction
    if which == "selfmap16":
        return OdeSpec(
            name="selfmap16",
            terms=(
                (3, (F(0), F(0), F(1), F(-3456), F(2985984))),
                (2, (F(0), F(3), F(-15552), F(17915904))),
                (1, (F(1), F(-11856), F(20155392))),
                (None, (F(-744), F(2239488))),
            ),
        )
    if s is None:
        raise ValueError(f"operator {which!r} needs the parameter s")
    s = Fraction(s)
    sig = s - s * s
    if which == "3":
        return OdeSpec(
            name="3",
            terms=(
                (3, (F(0), F(0), F(1), F(8), F(16))),
                (2, (F(0), F(3), F(36), F(96))),
                (1, (F(1), F(28), F(108) + 16 * sig)),
                (0, (F(2), F(12) + 16 * sig)),
            ),
        )
    if which == "5":
        return OdeSpec(
            name="5",
            terms=(
                (3, (F(0), F(0), F(1), F(-2), F(1))),
                (2, (F(0), F(6), F(-21), F(15))),
                (1, (F(1), -(F(10) + sig), F(12) + sig)),
                (0, (-(F(2) + sig) / 2, (F(6) + 3 * sig) / 2)),
            ),
        )
    if which == "6":
        return OdeSpec(
            name="6",
            terms=(
                (3, (F(0), F(0), F(1), F(-1))),
                (2, (F(0), F(3), F(-9, 2))),
                (1, (F(1), -(F(3) + sig))),
                (0, (-sig / 2,)),
            ),
        )
    raise ValueError(f"unknown operator key {which!r}")


# ---------------------------------------------------------------------------
# Classical two-term transformation checks.
# ---------------------------------------------------------------------------


def _one_minus_x(order: int) -> TruncSeries:
    coeffs = [Fraction(1)] + [Fraction(0)] * order
    if order >= 1:
        coeffs[1] = Fraction(-1)
    return TruncSeries(coeffs)


def euler_identity_holds(a, b, c, order: int) -> bool:
    """F(a,b;c;x) = (1-x)**(c-a-b) * F(c-a,c-b;c;x) to the given order."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    lhs = hyp2f1(a, b, c, order)
    rhs = pow_rational(_one_minus_x(order), c - a - b) * hyp2f1(c - a, c - b, c, order)
    return lhs == rhs


def pfaff_identity_holds(a, b, c, order: int) -> bool:
    """F(a,b;c;x) = (1-x)**(-a) * F(a,c-b;c;x/(x-1)) to the given order."""
    a, b, c = Fraction(a), Fraction(b), Fraction(c)
    lhs = hyp2f1(a, b, c, order)
    # x/(x-1) = -x * 1/(1-x) as a zero-constant series.
    inner = TruncSeries([Fraction(-1)] * (order + 1)).shift_mul(1, 1)
    rhs = pow_rational(_one_minus_x(order), -a) * compose(hyp2f1(a, c - b, c, order), inner)
    return lhs == rhs


def quadratic_identity_holds(a, b, order: int) -> bool:
    """F(2a,2b;a+b+1/2;w) = F(a,b;a+b+1/2;4w(1-w)) to the given order."""
    a, b = Fraction(a), Fraction(b)
    c = a + b + Fraction(1, 2)
    lhs = hyp2f1(2 * a, 2 * b, c, order)
    inner = TruncSeries.identity(order).scale(4) - TruncSeries.identity(order).scale(
        4
    ) * TruncSeries.identity(order)
    rhs = compose(hyp2f1(a, b, c, order), inner)
    return lhs == rhs


def half_angle_identity_holds(a, b, order: int) -> bool:
    """F(2a,b;2b;x) = (1-x)**(-a) * F(a,b-a;b+1/2;x**2/(4(x-1))) to order.

    The quadratic step used with a = s/2, b = 1/2 in the classical proof
    of the binomial-product identity.
    """
    a, b = Fraction(a), Fraction(b)
    lhs = hyp2f1(2 * a, b, 2 * b, order)
    # x**2/(4(x-1)) = -(x**2/4) * 1/(1-x), a zero-constant series.
    geom = TruncSeries([Fraction(-1, 4)] * (order + 1))
    inner = geom.shift_mul(2, 1)
    rhs = pow_rational(_one_minus_x(order), -a) * compose(
        hyp2f1(a, b - a, b + Fraction(1, 2), order), inner
    )
    return lhs == rhs


def clausen_identity_holds(a, b, order: int) -> bool:
    """F(a,b;a+b+1/2;x)**2 = 3F2(2a,2b,a+b;a+b+1/2,2a+2b;x) to order."""
    a, b = Fraction(a), Fraction(b)
    c = a + b + Fraction(1, 2)
    f = hyp2f1(a, b, c, order)
    lhs = f * f
    rhs = hyp3f2(2 * a, 2 * b, a + b, c, 2 * a + 2 * b, order)
    return lhs == rhs
