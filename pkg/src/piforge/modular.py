"""Modular-function backend for the verification engine.

Evaluates the Dedekind eta product, the weight-4 Eisenstein series, the
discriminant, Klein's j, and the level-``N`` hauptmodul values ``t_N``
(``N`` in ``{1, 2, 3, 4}``) at purely imaginary arguments
``tau = i*sqrt(im_sq)``, entirely in certified fixed-point arithmetic
(:class:`~piforge.numeric.BigFloat`).  Every truncation is covered by an
explicit tail bound, so each returned enclosure contains the true value.

On top of the evaluators sit two consistency checks that tie the modular
side to the series side of the engine:

* ``tau_relation_check`` certifies that the imaginary part of ``tau``
  equals the scaled quotient of complementary series values at
  ``t = t_N(tau)``, and that the logarithmic derivative of ``t`` with
  respect to the nome matches ``t*(1-t)*(series value)**2`` via a
  centered difference.
* ``check_example`` runs one of the four worked level/argument bundles
  end to end: hauptmodul value against its exact closed form, then the
  two series identities that express ``1/pi``.

Arguments too close to the unit-disk boundary make the complementary
series uneconomical; those checks raise :class:`TooSlowAtBoundary` and
are reported as skipped rather than silently weakened.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

from .numeric import (
    BigFloat,
    PrecisionExhausted,
    _ceil_div,
    _const_ratio,
    _pq_gauss,
    _weighted_stream,
    bits_for_digits,
    certified_agreement_digits,
    exp_neg,
    pi_reference,
    surd_to_bigfloat,
)
from .surd import SurdExpr, parse_literal

F = Fraction


class OutsideDomain(ValueError):
    """Level or argument outside the supported fundamental domain."""


class OutOfDisk(ValueError):
    """Series argument certified to lie outside the open unit disk."""


class TooSlowAtBoundary(RuntimeError):
    """Argument so close to the disk boundary that the requested check
    would exceed its term budget; the caller should report a skip."""


# Relative step for the centered difference in the logarithmic-derivative
# check, and the engineering tolerance it is held to.  The truncation
# error of the difference quotient is of the order of the squared step,
# so a 1e-8 step leaves four orders of margin below the tolerance.
LOG_DERIV_STEP = F(1, 10**8)
LOG_DERIV_TOL = F(1, 10**10)

# Term budget shared by the boundary-sensitive complementary-series
# evaluations; estimates far beyond it fail fast without iterating.
DEFAULT_TERM_BUDGET = 2 * 10**6


@dataclass
class TauPoint:
    """A purely imaginary point ``tau = i*sqrt(im_sq)``, ``im_sq > 0``.

    Only the square of the imaginary part is stored, as an exact
    rational, so scaled points ``k*tau`` stay exactly representable.
    Computed nome enclosures are cached per working precision.
    """

    im_sq: Fraction
    _nome_cache: Dict[int, BigFloat] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        self.im_sq = F(self.im_sq)
        if self.im_sq <= 0:
            raise ValueError("im_sq must be positive")

    def scaled(self, k: int) -> "TauPoint":
        """The point ``k*tau``, i.e. imaginary part scaled by ``k``."""
        if k <= 0:
            raise ValueError("scale factor must be positive")
        return TauPoint(self.im_sq * k * k)

    def im_part(self, bits: int) -> BigFloat:
        """Certified ``sqrt(im_sq)``."""
        return BigFloat.from_fraction(self.im_sq, bits).sqrt()

    def nome(self, bits: int) -> BigFloat:
        """Certified ``q = exp(-2*pi*sqrt(im_sq))``, cached per ``bits``.

        The true value lies in (0, 1); the enclosure is checked to sit
        strictly below 1 and to have a nonnegative mantissa (it may
        degenerate to ``0 +/- err`` ulps when the true value underflows
        the working precision, which downstream tails tolerate).
        """
        got = self._nome_cache.get(bits)
        if got is None:
            z = pi_reference(bits=bits).mul_int(2) * self.im_part(bits)
            got = exp_neg(z)
            if got.man < 0 or got.man + got.err >= (1 << bits):
                raise ArithmeticError("nome enclosure escaped (0, 1)")
            self._nome_cache[bits] = got
        return got


def _product_terms(prec: int, im_sq: Fraction) -> int:
    """Truncation length for q-expansions: enough terms that the tail is
    far below the last kept decimal, plus a fixed safety margin."""
    y = math.sqrt(float(im_sq))
    return math.ceil(prec * math.log(10.0) / (2.0 * math.pi * y)) + 16


def _sigma3_table(n: int) -> list:
    """sigma_3(1..n) by a divisor sieve."""
    sig = [0] * (n + 1)
    for d in range(1, n + 1):
        d3 = d * d * d
        for m in range(d, n + 1, d):
            sig[m] += d3
    return sig


def eta(tau: TauPoint, prec: int = 30) -> BigFloat:
    """Certified Dedekind eta value ``q**(1/24) * prod(1 - q**n)``.

    The product is truncated after :func:`_product_terms` factors; the
    omitted factors multiply the result by ``exp(r)`` with
    ``|r| <= q**(N+1)/(1-q)``, which is folded into the error bound.
    """
    bits = bits_for_digits(prec)
    z = pi_reference(bits=bits).mul_int(2) * tau.im_part(bits)
    q24 = exp_neg(z.div_int(24))
    q = tau.nome(bits)
    one = BigFloat.exact_int(1, bits)
    nq = _product_terms(prec, tau.im_sq)
    prod = one
    qn = q
    for _ in range(nq):
        prod = prod * (one - qn)
        qn = qn * q
    q_hi = F(q.man + q.err, 1 << bits)
    qn_hi = F(abs(qn.man) + qn.err, 1 << bits)
    band = qn_hi / (1 - q_hi)
    if band > F(1, 2):
        raise PrecisionExhausted("eta tail bound out of control")
    extra = math.ceil((abs(prod.man) + prod.err) * 2 * band) + 1
    prod = BigFloat(prod.man, bits, prod.err + extra)
    return q24 * prod


def eisenstein_e4(tau: TauPoint, prec: int = 30) -> BigFloat:
    """Certified weight-4 Eisenstein value ``1 + 240*sum sigma_3(n) q**n``.

    The tail uses ``sigma_3(n) <= (13/10) n**3`` and the closed geometric
    bound ``sum (1+m)**3 x**m <= 6/(1-x)**4``.
    """
    bits = bits_for_digits(prec)
    q = tau.nome(bits)
    nq = _product_terms(prec, tau.im_sq)
    sig = _sigma3_table(nq)
    acc = BigFloat.exact_int(1, bits)
    qn = q
    for n in range(1, nq + 1):
        acc = acc + qn.mul_int(240 * sig[n])
        qn = qn * q
    q_hi = F(q.man + q.err, 1 << bits)
    qn_hi = F(abs(qn.man) + qn.err, 1 << bits)
    tail = 240 * F(13, 10) * 6 * (nq + 1) ** 3 * qn_hi / (1 - q_hi) ** 4
    extra = math.ceil(tail * (1 << bits)) + 1
    return BigFloat(acc.man, bits, acc.err + extra)


def discriminant_delta(tau: TauPoint, prec: int = 30) -> BigFloat:
    """Certified ``eta(tau)**24`` by repeated squaring."""
    e = eta(tau, prec)
    e2 = e * e
    e4 = e2 * e2
    e8 = e4 * e4
    e16 = e8 * e8
    return e16 * e8


def j_invariant(tau: TauPoint, prec: int = 30) -> BigFloat:
    """Certified Klein j value ``E4**3 / Delta``."""
    e4 = eisenstein_e4(tau, prec)
    return (e4 * e4 * e4) / discriminant_delta(tau, prec)


# Level data for the eta-quotient hauptmoduls: constant divisor and
# quotient exponent, with t = 1/(1 + (eta(tau)/eta(N*tau))**e / c).
_LEVEL_ETA = {2: (64, 24), 3: (27, 12), 4: (16, 8)}


def _bf_pow(x: BigFloat, e: int) -> BigFloat:
    acc = BigFloat.exact_int(1, x.bits)
    base = x
    while e:
        if e & 1:
            acc = acc * base
        base = base * base
        e >>= 1
    return acc


def t_level(level: int, tau: TauPoint, prec: int = 30) -> BigFloat:
    """Certified hauptmodul value ``t_N(tau)`` for ``N in {1, 2, 3, 4}``.

    Levels 2-4 use eta quotients; level 1 goes through the j-invariant
    as ``1/2 - (1/2)*sqrt(1 - 1728/j)``.  The result is checked a
    posteriori to lie inside the unit disk, else :class:`OutsideDomain`.
    """
    bits = bits_for_digits(prec)
    one = BigFloat.exact_int(1, bits)
    if level == 1:
        j = j_invariant(tau, prec)
        x = one - BigFloat.exact_int(1728, bits) / j
        try:
            root = x.sqrt()
        except ValueError:
            raise OutsideDomain("1 - 1728/j certified negative") from None
        t = (one - root).div_int(2)
    elif level in _LEVEL_ETA:
        c, e = _LEVEL_ETA[level]
        r = eta(tau, prec) / eta(tau.scaled(level), prec)
        t = one / (one + _bf_pow(r, e).div_int(c))
    else:
        raise OutsideDomain(f"unsupported level {level!r}")
    if abs(t.man) + t.err >= (1 << bits):
        raise OutsideDomain("hauptmodul value not inside the unit disk")
    return t


def hyp_value_and_theta(
    s: Fraction,
    t: BigFloat,
    prec: int = 30,
    max_terms: int = DEFAULT_TERM_BUDGET,
) -> Tuple[BigFloat, BigFloat, int]:
    """Certified pair ``(S, theta S)`` for the level series
    ``S(t) = sum_n (s)_n (1-s)_n / n!**2 * t**n`` and its Euler
    derivative ``theta S = t * S'``.

    Raises :class:`OutOfDisk` when the argument's upper bound reaches 1,
    and :class:`TooSlowAtBoundary` when the term budget cannot reach the
    precision target.
    """
    bits = t.bits
    x_hi = F(abs(t.man) + t.err, 1 << bits)
    if x_hi >= 1:
        raise OutOfDisk("series argument outside the open unit disk")
    if x_hi > 0:
        est = prec * math.log(10.0) / -math.log(float(x_hi))
        if est > max_terms:
            raise TooSlowAtBoundary(
                f"about {est:.2g} terms needed for {prec} digits"
            )
    stop = (1 << bits) // 10 ** (prec + 4)
    s0, s1, terms = _weighted_stream(
        _pq_gauss(s, 1 - s), t, stop, max_terms, _const_ratio(1, t)
    )
    if terms > max_terms:
        raise TooSlowAtBoundary(
            f"term budget {max_terms} exhausted before the tail target"
        )
    return s0, s1, terms


# The tau relation reads  im(tau) = c_s * S(1-t)/S(t)  at t = t_N(tau),
# where the constant is 1/(2*sin(pi*s)) for the matching exponent s.
_TAU_CONSTANT = {
    F(1, 2): "1/2",
    F(1, 3): "1/3*sqrt(3)",
    F(1, 4): "1/2*sqrt(2)",
    F(1, 6): "1",
}

# Exponent paired with each level: the quotient t_N feeds the series
# with this s in the tau relation and the worked bundles below.
LEVEL_EXPONENT = {4: F(1, 2), 3: F(1, 3), 2: F(1, 4), 1: F(1, 6)}


def tau_relation_constant(s: Fraction) -> SurdExpr:
    """The exact surd ``1/(2*sin(pi*s))`` for supported exponents."""
    try:
        return parse_literal(_TAU_CONSTANT[F(s)])
    except KeyError:
        raise OutsideDomain(f"unsupported exponent {s!r}") from None


def tau_relation_check(
    s: Fraction,
    level: int,
    tau: TauPoint,
    prec: int = 30,
    max_terms: int = DEFAULT_TERM_BUDGET,
) -> BigFloat:
    """Certified residual ``|sqrt(im_sq) - c_s * S(1-t)/S(t)|`` at
    ``t = t_N(tau)``, plus a centered-difference verification that the
    logarithmic derivative of ``t`` in the nome equals
    ``t*(1-t)*S(t)**2``.

    Raises :class:`TooSlowAtBoundary` when the complementary argument
    ``1 - t`` is too close to 1 for the term budget; callers report the
    check as skipped.  A derivative mismatch beyond the engineering
    tolerance raises :class:`ArithmeticError`.
    """
    bits = bits_for_digits(prec)
    one = BigFloat.exact_int(1, bits)
    t = t_level(level, tau, prec)
    w1 = one - t
    if F(w1.man + w1.err, 1 << bits) >= 1:
        # Mathematically 1 - t < 1 on the imaginary axis; the enclosure
        # only reaches the boundary when t has collapsed below the
        # working precision, i.e. the argument is degenerate.
        raise TooSlowAtBoundary(
            "complementary argument enclosure touches the unit circle"
        )
    s0, th0, _ = hyp_value_and_theta(s, t, prec, max_terms)
    s1, _, _ = hyp_value_and_theta(s, w1, prec, max_terms)
    cs = surd_to_bigfloat(tau_relation_constant(s), bits)
    y = tau.im_part(bits)
    residual = abs(cs * s1 / s0 - y)

    # Centered difference in the imaginary part, scaled to d/d(log q):
    # with y(1 +/- eps) on either side, q*dt/dq = -(1/(2*pi))*dt/dy.
    eps = LOG_DERIV_STEP
    up = TauPoint(tau.im_sq * (1 + eps) ** 2)
    down = TauPoint(tau.im_sq * (1 - eps) ** 2)
    tp = t_level(level, up, prec)
    tm = t_level(level, down, prec)
    quot = ((tm - tp) / (pi_reference(bits=bits).mul_int(4) * y)).mul_int(
        int(1 / eps)
    )
    dev = abs(quot - t * w1 * s0 * s0)
    if F(dev.man + dev.err, 1 << bits) > LOG_DERIV_TOL:
        raise ArithmeticError(
            "logarithmic-derivative identity violated beyond tolerance"
        )
    return residual


# ---------------------------------------------------------------------------
# Worked end-to-end bundles: hauptmodul value against its closed form,
# then the two series identities producing 1/pi.
# ---------------------------------------------------------------------------

_WORKED = {
    1: dict(
        s=F(1, 4),
        level=2,
        im_sq=F(1),
        w0="1/9",
        lin0="1",
        lin1="8",
        rhs="9/2",
    ),
    2: dict(
        s=F(1, 4),
        level=2,
        im_sq=F(29, 2),
        w0="1/2-910/9801*sqrt(29)",
        lin0="2206/9801*sqrt(2)",
        lin1="26390/9801*sqrt(2)+1/2*sqrt(58)",
        rhs="1",
    ),
    3: dict(
        s=F(1, 2),
        level=4,
        im_sq=F(3, 4),
        w0="1/2-1/4*sqrt(3)",
        lin0="1/4",
        lin1="3/4+1/2*sqrt(3)",
        rhs="1",
    ),
    4: dict(
        s=F(1, 6),
        level=1,
        im_sq=F(7),
        w0="1/2-171/14450*sqrt(1785)",
        lin0="144/7225*sqrt(255)",
        lin1="sqrt(7)+1197/7225*sqrt(255)",
        rhs="1",
    ),
}


@dataclass(frozen=True)
class ExampleReport:
    """Outcome of one end-to-end worked bundle.

    Digit counts are certified agreement digits; ``None`` marks a check
    skipped at the disk boundary, with the reason in ``notes``.
    """

    example: int
    level: int
    hauptmodul_agreement: int
    sum_identity_agreement: int
    split_identity_agreement: Optional[int]
    tau_residual: Optional[Fraction]
    notes: str = ""


def check_example(
    k: int,
    digits: int = 30,
    identity_digits: int = 20,
    split_digits: Optional[int] = None,
    max_terms: int = DEFAULT_TERM_BUDGET,
) -> ExampleReport:
    """Run worked bundle ``k`` in ``{1, 2, 3, 4}`` end to end.

    ``digits`` drives the hauptmodul-vs-closed-form comparison,
    ``identity_digits`` the two series identities; ``split_digits``
    optionally reduces the precision of the boundary-sensitive split
    identity (it needs the series at ``1 - w0``, which converges slowly
    when ``w0`` is tiny).
    """
    try:
        ex = _WORKED[k]
    except KeyError:
        raise ValueError(f"no worked bundle {k!r}") from None
    s, level = ex["s"], ex["level"]
    notes = []

    bits = bits_for_digits(digits)
    tau = TauPoint(ex["im_sq"])
    t = t_level(level, tau, digits)
    w0_exact = parse_literal(ex["w0"])
    w0_agree = certified_agreement_digits(t, surd_to_bigfloat(w0_exact, bits))

    # Summed identity: lin0*S**2 + 2*lin1*S*(theta S) = rhs/pi at w0.
    fb = bits_for_digits(identity_digits)
    w0b = surd_to_bigfloat(w0_exact, fb)
    v0, th0, _ = hyp_value_and_theta(s, w0b, identity_digits, max_terms)
    lin0 = surd_to_bigfloat(parse_literal(ex["lin0"]), fb)
    lin1 = surd_to_bigfloat(parse_literal(ex["lin1"]), fb)
    rhs = surd_to_bigfloat(parse_literal(ex["rhs"]), fb)
    lhs = lin0 * v0 * v0 + (lin1 * v0 * th0).mul_int(2)
    fg1_agree = certified_agreement_digits(lhs, rhs / pi_reference(bits=fb))

    # Split identity: 2*c_s*w0*(theta S)(1-w0)*S(w0)
    #                 + 2*im(tau)*(1-w0)*(theta S)(w0)*S(w0) = 1/pi.
    sd = identity_digits if split_digits is None else split_digits
    sb = bits_for_digits(sd)
    w0s = surd_to_bigfloat(w0_exact, sb)
    one = BigFloat.exact_int(1, sb)
    w1s = one - w0s
    fg2_agree: Optional[int]
    try:
        v0s, th0s, _ = hyp_value_and_theta(s, w0s, sd, max_terms)
        _, th1s, _ = hyp_value_and_theta(s, w1s, sd, max_terms)
        cs = surd_to_bigfloat(tau_relation_constant(s), sb)
        ys = tau.im_part(sb)
        lhs2 = (cs * w0s * th1s * v0s).mul_int(2) + (
            ys * w1s * th0s * v0s
        ).mul_int(2)
        one_over_pi = one / pi_reference(bits=sb)
        fg2_agree = certified_agreement_digits(lhs2, one_over_pi)
    except TooSlowAtBoundary as exc:
        fg2_agree = None
        notes.append(f"split identity skipped: {exc}")

    tau_res: Optional[Fraction]
    try:
        r = tau_relation_check(s, level, tau, digits, max_terms)
        tau_res = F(abs(r.man) + r.err, 1 << r.bits)
    except TooSlowAtBoundary as exc:
        tau_res = None
        notes.append(f"tau relation skipped: {exc}")

    return ExampleReport(
        example=k,
        level=level,
        hauptmodul_agreement=w0_agree,
        sum_identity_agreement=fg1_agree,
        split_identity_agreement=fg2_agree,
        tau_residual=tau_res,
        notes="; ".join(notes),
    )
