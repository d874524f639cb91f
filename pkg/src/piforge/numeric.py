"""Certified arbitrary-precision evaluation of pi and the catalog series.

Values are fixed-point big-floats: an integer mantissa ``man`` scaled by
``2**-bits`` together with a certified error bound ``err`` in the same
units (ulps), so the true value lies in ``[(man-err)*2**-bits,
(man+err)*2**-bits]``.  Every operation propagates the bound
conservatively; any agreement-digit count reported here is therefore
proven, not estimated.

The pi engine is binary-splitting over exact integers with a second,
structurally different Machin-style oracle for cross-checking.  Series
for 1/pi are summed by streaming exact rational term ratios through the
fixed-point accumulator; tails are certified by the geometric bound
|rate * argument| < 1 that also defines convergence for the catalog.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

from .families import REBALANCED_PAIRS, FamilySpec
from .surd import SurdExpr
from .transforms import Formula

try:  # big-integer backend: optional accelerated multiplication
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _mpz = int

__all__ = [
    "PrecisionExhausted",
    "BigFloat",
    "VerificationReport",
    "bits_for_digits",
    "certified_agreement_digits",
    "surd_to_bigfloat",
    "block_sum",
    "pi_reference",
    "machin_pi",
    "pi_decimal",
    "hyp_numeric",
    "sum_formula",
    "verify_formula",
    "slow_series_sum",
    "prop2_numeric_check",
]

F = Fraction
LOG10_2 = 0.30102999566398119


class PrecisionExhausted(ArithmeticError):
    """The requested certified accuracy cannot be met at this precision."""


def bits_for_digits(digits: int, guard: int = 96) -> int:
    """Working precision comfortably above `digits` decimal digits."""
    return int(digits / LOG10_2) + guard


def _rdiv(n: int, d: int) -> int:
    """Round-to-nearest division; d may be negative."""
    if d < 0:
        n, d = -n, -d
    h = d // 2
    if n >= 0:
        return (n + h) // d
    return -((-n + h) // d)


def _ceil_div(n: int, d: int) -> int:
    return -((-n) // d)


def _int_str(n: int) -> str:
    """str(n) with the interpreter's digit-count guard lifted just for
    this conversion, so very long decimal expansions can be printed."""
    try:
        return str(n)
    except ValueError:
        pass
    previous = sys.get_int_max_str_digits()
    sys.set_int_max_str_digits(0)
    try:
        return str(n)
    finally:
        sys.set_int_max_str_digits(previous)


class BigFloat:
    """Fixed-point value man * 2**-bits with certified error err ulps."""

    __slots__ = ("man", "bits", "err")

    def __init__(self, man: int, bits: int, err: int = 0):
        self.man = man
        self.bits = bits
        self.err = err

    # -- constructors ------------------------------------------------------

    @staticmethod
    def exact_int(n: int, bits: int) -> "BigFloat":
        return BigFloat(n << bits, bits, 0)

    @staticmethod
    def from_fraction(q: Fraction, bits: int) -> "BigFloat":
        n, d = q.numerator, q.denominator
        scaled = n << bits
        return BigFloat(_rdiv(scaled, d), bits, 0 if scaled % d == 0 else 1)

    @staticmethod
    def from_interval(lo: Fraction, hi: Fraction, bits: int) -> "BigFloat":
        m_lo = (lo.numerator << bits) // lo.denominator
        m_hi = _ceil_div(hi.numerator << bits, hi.denominator)
        man = (m_lo + m_hi) // 2
        return BigFloat(man, bits, max(m_hi - man, man - m_lo) + 1)

    # -- views -------------------------------------------------------------

    def to_fraction(self) -> Fraction:
        return F(self.man, 1 << self.bits)

    def bounds(self) -> Tuple[Fraction, Fraction]:
        scale = 1 << self.bits
        return F(self.man - self.err, scale), F(self.man + self.err, scale)

    def error_bound(self) -> Fraction:
        return F(self.err, 1 << self.bits)

    def decimal(self, digits: int) -> str:
        """Decimal string with `digits` places after the point (rounded
        mantissa; certification is the caller's concern via err)."""
        scaled = _rdiv(self.man * 10**digits, 1 << self.bits)
        neg = scaled < 0
        text = _int_str(-scaled if neg else scaled).rjust(digits + 1, "0")
        out = text[:-digits] + "." + text[-digits:] if digits else text
        return "-" + out if neg else out

    def __repr__(self) -> str:
        shown = min(self.bits, 64)
        approx = self.man / (1 << self.bits) if self.bits <= 900 else float(
            F(self.man >> (self.bits - shown), 1 << shown)
        )
        return f"BigFloat({approx!r} ± {self.err} ulps @ {self.bits} bits)"

    # -- arithmetic (same-bits discipline) ---------------------------------

    def _chk(self, other: "BigFloat") -> None:
        if self.bits != other.bits:
            raise ValueError("mixed precisions; rescale first")

    def __neg__(self) -> "BigFloat":
        return BigFloat(-self.man, self.bits, self.err)

    def __add__(self, other: "BigFloat") -> "BigFloat":
        self._chk(other)
        return BigFloat(self.man + other.man, self.bits, self.err + other.err)

    def __sub__(self, other: "BigFloat") -> "BigFloat":
        self._chk(other)
        return BigFloat(self.man - other.man, self.bits, self.err + other.err)

    def __abs__(self) -> "BigFloat":
        return BigFloat(abs(self.man), self.bits, self.err)

    def mul_int(self, k: int) -> "BigFloat":
        return BigFloat(self.man * k, self.bits, self.err * abs(k))

    def div_int(self, k: int) -> "BigFloat":
        if k == 0:
            raise ZeroDivisionError("div_int by zero")
        if k < 0:
            return (-self).div_int(-k)
        return BigFloat(_rdiv(self.man, k), self.bits, _ceil_div(self.err, k) + 1)

    def __mul__(self, other: "BigFloat") -> "BigFloat":
        self._chk(other)
        bits = self.bits
        man = _rdiv(self.man * other.man, 1 << bits)
        cross = (
            abs(self.man) * other.err
            + abs(other.man) * self.err
            + self.err * other.err
        )
        return BigFloat(man, bits, _ceil_div(cross, 1 << bits) + 1)

    def __truediv__(self, other: "BigFloat") -> "BigFloat":
        self._chk(other)
        bits = self.bits
        if abs(other.man) <= 2 * other.err:
            raise PrecisionExhausted("divisor not separated from zero")
        q = _rdiv(self.man << bits, other.man)
        err = 1 + _ceil_div(
            (self.err << bits) + abs(q) * other.err, abs(other.man) - other.err
        )
        return BigFloat(q, bits, err)

    def sqrt(self) -> "BigFloat":
        bits = self.bits
        if self.man + self.err < 0:
            raise ValueError("square root of a certified-negative value")
        hi = math.isqrt((self.man + self.err) << bits) + 1
        lo_in = self.man - self.err
        lo = math.isqrt(lo_in << bits) if lo_in > 0 else 0
        man = math.isqrt(max(self.man, 0) << bits)
        return BigFloat(man, bits, max(hi - man, man - lo) + 1)

    def rescale(self, new_bits: int) -> "BigFloat":
        d = new_bits - self.bits
        if d >= 0:
            return BigFloat(self.man << d, new_bits, self.err << d)
        return BigFloat(
            _rdiv(self.man, 1 << -d), new_bits, _ceil_div(self.err, 1 << -d) + 1
        )


def surd_to_bigfloat(x: SurdExpr, bits: int) -> BigFloat:
    if x.is_rational:
        return BigFloat.from_fraction(x.rational_part, bits)
    lo, hi = x.interval(bits + 8)
    return BigFloat.from_interval(lo, hi, bits)


def certified_agreement_digits(a: BigFloat, b: BigFloat) -> int:
    """Largest D such that |a - b| <= 10**-D * |b| is PROVEN from the
    error bounds (0 when even one digit cannot be certified)."""
    a._chk(b)
    e = abs(a.man - b.man) + a.err + b.err
    scale = max(abs(b.man) - b.err, 1)
    cap = int(a.bits * LOG10_2)
    if e == 0:
        return cap
    d = max((scale.bit_length() - e.bit_length()) * 3 // 10 - 2, 0)
    while d < cap and e * 10 ** (d + 1) <= scale:
        d += 1
    while d > 0 and e * 10**d > scale:
        d -= 1
    return d


def block_sum(values: Iterable[BigFloat], block_size: int = 1024) -> BigFloat:
    """Tree summation in fixed-size blocks.  Addition here is exact, so
    the result is bitwise identical for every block size and schedule."""
    if block_size < 2:
        raise ValueError("block_size must be at least 2")
    vals = list(values)
    if not vals:
        raise ValueError("empty summation")
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals), block_size):
            acc = vals[i]
            for v in vals[i + 1 : i + block_size]:
                acc = acc + v
            nxt.append(acc)
        vals = nxt
    return vals[0]


def exp_neg(z: BigFloat) -> BigFloat:
    """Certified e**(-z) for z >= 0.

    The argument is halved until it is at most 1/2, the Taylor series is
    accumulated with certified arithmetic (its tail past a term of
    magnitude m is below m because the term ratio is at most 1/2), and
    the reduction is undone by repeated certified squaring.
    """
    bits = z.bits
    if z.man < 0:
        raise ValueError("exp_neg expects a nonnegative argument")
    c = _ceil_div(2 * (z.man + z.err), 1 << bits)
    k = (c - 1).bit_length() if c > 1 else 0
    u = -z.div_int(1 << k) if k else -z
    one = BigFloat.exact_int(1, bits)
    term, acc = one, one
    j = 0
    while True:
        j += 1
        term = (term * u).div_int(j)
        acc = acc + term
        if abs(term.man) + term.err <= 4:
            break
        if j > 8 * bits:
            raise PrecisionExhausted("exp series failed to converge")
    acc = BigFloat(acc.man, bits, acc.err + abs(term.man) + term.err + 1)
    for _ in range(k):
        acc = acc * acc
    return acc


# ---------------------------------------------------------------------------
# pi by binary splitting, with an independent Machin-style oracle.
# ---------------------------------------------------------------------------

_CHUD_C3_24 = 10939058860032000  # 640320**3 / 24
_CHUD_A = 13591409
_CHUD_B = 545140134


def _chud_bs(a: int, b: int, leaf: int):
    """(P, Q, T) with sum_{k=a}^{b-1} t_k = T/Q for the 1/pi base series,
    t_k = (-1)**k (6k)! (A + B k) / ((3k)! k!**3 640320**(3k))."""
    if b - a <= leaf:
        P = _mpz(1)
        Q = _mpz(1)
        T = _mpz(0)
        for k in range(a, b):
            if k == 0:
                pk, qk = _mpz(1), _mpz(1)
            else:
                pk = _mpz((6 * k - 5) * (2 * k - 1) * (6 * k - 1))
                qk = _mpz(k) ** 3 * _CHUD_C3_24
            lin = _mpz(_CHUD_A + _CHUD_B * k)
            if k & 1:
                lin = -lin
            T = T * qk + P * pk * lin
            P *= pk
            Q *= qk
        return P, Q, T
    m = (a + b) // 2
    P1, Q1, T1 = _chud_bs(a, m, leaf)
    P2, Q2, T2 = _chud_bs(m, b, leaf)
    return P1 * P2, Q1 * Q2, T1 * Q2 + P1 * T2


def _bf_from_ratio(num: int, den: int, bits: int) -> BigFloat:
    return BigFloat(_rdiv(int(num) << bits, int(den)), bits, 1)


_PI_CACHE: dict = {}


def pi_reference(
    digits: Optional[int] = None, *, bits: Optional[int] = None, leaf: int = 32
) -> BigFloat:
    """pi to the requested precision by Chudnovsky-style binary splitting,
    with a certified truncation bound folded into the error."""
    if bits is None:
        if digits is None:
            raise ValueError("give digits or bits")
        bits = bits_for_digits(digits)
    cached = _PI_CACHE.get(bits)
    if cached is not None:
        return cached
    digits_est = int(bits * LOG10_2)
    n_terms = digits_est // 14 + 3
    P1, Q1, T1 = _chud_bs(0, n_terms, leaf)
    P2, Q2, T2 = _chud_bs(n_terms, n_terms + 1, leaf)
    Q = Q1 * Q2
    T = T1 * Q2 + P1 * T2
    root = BigFloat.exact_int(10005, bits).sqrt()
    pi_full = _bf_from_ratio(426880 * Q, T, bits) * root
    pi_part = _bf_from_ratio(426880 * Q1, T1, bits) * root
    # Terms shrink by > 1e13 per index, so the tail beyond the last
    # included term is under 1e-12 of the last term's own effect, which
    # the difference of the two partial evaluations bounds.
    step = abs(pi_full.man - pi_part.man) + pi_full.err + pi_part.err
    pi = BigFloat(pi_full.man, bits, pi_full.err + step // 10**12 + 1)
    _PI_CACHE[bits] = pi
    return pi


def _arctan_bs(inv_x: int, a: int, b: int, leaf: int):
    """(P, Q, T) with T/Q = sum_{k=a}^{b-1} prod_{j<=k} p(j)/q(j) for
    arctan(1/x): p(0)=1, q(0)=x, p(k)=-(2k-1), q(k)=(2k+1) x**2."""
    x = inv_x
    if b - a <= leaf:
        P = _mpz(1)
        Q = _mpz(1)
        T = _mpz(0)
        xx = _mpz(x) * x
        for k in range(a, b):
            if k == 0:
                pk, qk = _mpz(1), _mpz(x)
            else:
                pk = _mpz(-(2 * k - 1))
                qk = (2 * k + 1) * xx
            T = T * qk + P * pk
            P *= pk
            Q *= qk
        return P, Q, T
    m = (a + b) // 2
    P1, Q1, T1 = _arctan_bs(x, a, m, leaf)
    P2, Q2, T2 = _arctan_bs(x, m, b, leaf)
    return P1 * P2, Q1 * Q2, T1 * Q2 + P1 * T2


def machin_pi(
    digits: Optional[int] = None, *, bits: Optional[int] = None, leaf: int = 32
) -> BigFloat:
    """pi = 16 arctan(1/5) - 4 arctan(1/239), binary splitting: a slower,
    structurally independent oracle for cross-checking pi_reference."""
    if bits is None:
        if digits is None:
            raise ValueError("give digits or bits")
        bits = bits_for_digits(digits)
    digits_est = int(bits * LOG10_2)

    def n_for(x: int) -> int:
        return int((digits_est + 4) * math.log(10) / (2 * math.log(x))) + 2

    n5 = n_for(5)
    n239 = n_for(239)
    _, Q5, T5 = _arctan_bs(5, 0, n5, leaf)
    _, Q2, T2 = _arctan_bs(239, 0, n239, leaf)
    num = 16 * int(T5) * int(Q2) - 4 * int(T2) * int(Q5)
    den = int(Q5) * int(Q2)
    out = _bf_from_ratio(num, den, bits)
    # Alternating series with decreasing terms: truncation under the
    # first omitted term of each arctan, scaled by its Machin weight.
    trunc = _ceil_div(16 << bits, (2 * n5 + 1) * 5 ** (2 * n5 + 1)) + _ceil_div(
        4 << bits, (2 * n239 + 1) * 239 ** (2 * n239 + 1)
    )
    return BigFloat(out.man, bits, out.err + trunc + 1)


def pi_decimal(digits: int, leaf: int = 32) -> str:
    """Decimal expansion of pi with `digits` certified places."""
    pi = pi_reference(digits + 9, leaf=leaf)
    if pi.error_bound() > F(1, 10 ** (digits + 2)):
        raise PrecisionExhausted("pi error bound too wide for display")
    return pi.decimal(digits)


# ---------------------------------------------------------------------------
# Streaming series evaluation with certified geometric tails.
# ---------------------------------------------------------------------------


def _weighted_stream(
    pq: Callable[[int], Tuple[int, int]],
    x: BigFloat,
    stop_ulps: int,
    cap: int,
    tail_ratio: Callable[[int], Fraction],
    min_n: int = 0,
):
    """Certified S0 = sum t_n, S1 = sum n t_n for t_0 = 1 and
    t_{n+1} = t_n * (p(n)/q(n)) * x, q(n) > 0.

    tail_ratio(n) must be a proven bound r with |t_{m+1}| <= r |t_m|
    for every m >= n; it is consulted once, at the stopping index.
    Returns (S0, S1, terms) with the tails folded into the error bounds.
    """
    bits = x.bits
    x_man, x_err = x.man, x.err
    ax = abs(x_man) + x_err
    man, err = 1 << bits, 0
    S0 = E0 = S1 = E1 = 0
    n = 0
    terminated = False
    while True:
        S0 += man
        E0 += err
        S1 += n * man
        E1 += n * err
        size = (man if man >= 0 else -man) + err
        if (n >= min_n and size * (n + 2) <= stop_ulps) or n >= cap:
            break
        p, q = pq(n)
        if p == 0:
            # A vanished numerator factor ends the true series here.
            terminated = True
            break
        den = q << bits
        man_next = _rdiv(man * p * x_man, den)
        ap = p if p >= 0 else -p
        err_next = _ceil_div(err * ap * ax + abs(man) * ap * x_err, abs(den)) + 1
        man, err = man_next, err_next
        n += 1
    if size and not terminated:
        r = tail_ratio(n)
        if r >= 1:
            raise PrecisionExhausted("series tail not certifiable: ratio >= 1")
        g = r / (1 - r)
        E0 += math.ceil(size * g)
        E1 += math.ceil(size * (n * g + g / (1 - r)))
    return BigFloat(S0, bits, E0), BigFloat(S1, bits, E1), n + 1


def _const_ratio(rate: int, x: BigFloat) -> Callable[[int], Fraction]:
    bound = F(rate * (abs(x.man) + x.err), 1 << x.bits)
    return lambda n: bound


def _pq_hyp(s: Fraction, M: int) -> Callable[[int], Tuple[int, int]]:
    a, b = s.numerator, s.denominator
    return lambda n: (
        M * (2 * n + 1) * (b * n + a) * (b * n + b - a),
        2 * b * b * (n + 1) ** 3,
    )


def _pq_gauss(s1: Fraction, s2: Fraction) -> Callable[[int], Tuple[int, int]]:
    a1, b1 = s1.numerator, s1.denominator
    a2, b2 = s2.numerator, s2.denominator
    return lambda n: ((b1 * n + a1) * (b2 * n + a2), b1 * b2 * (n + 1) ** 2)


def sum_formula(
    f: Formula,
    digits: int,
    *,
    max_terms: int = 10**7,
    bits: Optional[int] = None,
) -> Tuple[BigFloat, int]:
    """Certified value of the formula's series sum_n K_n (lin0+lin1*n) arg**n.

    The coefficient stream is taken from the family's generating-function
    structure (a pure product of Gauss series for the convolution
    families), never from the stored linear weights, so a wrong catalog
    entry cannot verify itself.
    """
    if not f.convergent:
        raise ValueError(f"formula {f.id} is not convergent")
    if bits is None:
        bits = bits_for_digits(digits)
    w = surd_to_bigfloat(f.arg, bits)
    lin0 = surd_to_bigfloat(f.lin0, bits)
    lin1 = surd_to_bigfloat(f.lin1, bits)
    stop = max(1, (1 << bits) // 10 ** (digits + 4))
    s = f.s
    kind = f.family.kind
    if kind == "HYP":
        ratio = _const_ratio(f.family.M, w)
        if ratio(0) >= 1:
            raise PrecisionExhausted("series tail not certifiable: ratio >= 1")
        S0, S1, terms = _weighted_stream(
            _pq_hyp(s, f.family.M), w, stop, max_terms, ratio
        )
        val = lin0 * S0 + lin1 * S1
    else:
        if kind == "PROP1":
            if s not in REBALANCED_PAIRS:
                raise ValueError(f"no rebalanced convolution pairs for s={s}")
            y = w.mul_int(f.family.M)
            (p1, p2), (q1, q2) = REBALANCED_PAIRS[s]
            pq1, pq2 = _pq_gauss(-p1, -p2), _pq_gauss(-q1, -q2)
        elif kind == "PROP3":
            y = w.mul_int(-4)
            pq1, pq2 = _pq_gauss(F(1, 2), s), _pq_gauss(F(1, 2), 1 - s)
        elif kind == "PROP5":
            y = w
            pq1, pq2 = _pq_gauss(s, s), _pq_gauss(1 - s, 1 - s)
        elif kind == "PROP7":
            y = w
            pq1 = pq2 = _pq_gauss(s, 1 - s)
        else:  # pragma: no cover - FamilySpec validates kinds
            raise ValueError(f"unknown family kind {kind}")
        ratio = _const_ratio(1, y)
        if ratio(0) >= 1:
            raise PrecisionExhausted("series tail not certifiable: ratio >= 1")
        F1, G1, t1 = _weighted_stream(pq1, y, stop, max_terms, ratio)
        if pq2 is pq1:
            F2, G2, t2 = F1, G1, t1
        else:
            F2, G2, t2 = _weighted_stream(pq2, y, stop, max_terms, ratio)
        val = lin0 * (F1 * F2) + lin1 * (G1 * F2 + F1 * G2)
        terms = max(t1, t2)
    return val, terms


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one certified formula-vs-pi comparison."""

    id: str
    ok: bool
    digits_requested: int
    digits_achieved: int
    terms: int
    seconds: float
    note: str = ""

    @property
    def line(self) -> str:
        status = "pass" if self.ok else "fail"
        return (
            f"{self.id}\t{status}\t{self.digits_achieved}\t"
            f"{self.terms}\t{self.seconds:.3f}"
        )


def verify_formula(
    f: Formula,
    digits: int,
    *,
    max_terms: int = 10**7,
    retry: bool = True,
) -> VerificationReport:
    """Sum the formula and compare against rhs/pi with certified digits.

    Retries once at doubled working precision when the shortfall could be
    precision (never when the term cap was the binding constraint)."""
    t0 = time.perf_counter()
    bits = bits_for_digits(digits)
    achieved = 0
    terms = 0
    capped = False
    for attempt in (1, 2):
        try:
            val, terms = sum_formula(f, digits, max_terms=max_terms, bits=bits)
            pi = pi_reference(bits=bits)
            target = surd_to_bigfloat(f.rhs, bits) / pi
            achieved = certified_agreement_digits(val, target)
            capped = terms > max_terms
        except PrecisionExhausted:
            achieved = 0
            terms = 0
            capped = False
        if achieved >= digits or capped or not retry:
            break
        bits *= 2
    note = "term cap reached" if capped and achieved < digits else ""
    return VerificationReport(
        id=f.id,
        ok=achieved >= digits,
        digits_requested=digits,
        digits_achieved=achieved,
        terms=terms,
        seconds=time.perf_counter() - t0,
        note=note,
    )


def slow_series_sum(
    f: Formula, digits: int, max_terms: int = 5 * 10**6
) -> VerificationReport:
    """Companion-series evaluation near |arg| = 1: same contract as
    verify_formula but with an explicit term cap; when the cap binds the
    report carries the honestly achieved digit count, not a failure by
    exception."""
    return verify_formula(f, digits, max_terms=max_terms, retry=True)


# ---------------------------------------------------------------------------
# General hypergeometric point evaluation.
# ---------------------------------------------------------------------------


def hyp_numeric(
    uppers: Sequence[Union[Fraction, int]],
    lowers: Sequence[Union[Fraction, int]],
    x: Union[SurdExpr, Fraction, int],
    digits: int,
    max_terms: int = 10**6,
) -> Tuple[BigFloat, int]:
    """Certified value of pFq(uppers; lowers; x) (the factorial lower
    parameter is implicit), for arguments with a certifiable tail."""
    ups = [F(u) for u in uppers]
    los = [F(v) for v in lowers]
    if len(ups) > len(los) + 1:
        raise ValueError("need p <= q+1 hypergeometric parameters")
    for v in los:
        if v <= 0 and v.denominator == 1:
            raise ZeroDivisionError(f"lower parameter {v} hits a pole")
    bits = bits_for_digits(digits)
    if isinstance(x, SurdExpr):
        x_bf = surd_to_bigfloat(x, bits)
    else:
        x_bf = BigFloat.from_fraction(F(x), bits)
    terminating = any(u.denominator == 1 and u <= 0 for u in ups)
    if not terminating and F(abs(x_bf.man) + x_bf.err, 1 << bits) >= 1:
        raise PrecisionExhausted("tail not certifiable at |x| >= 1")

    up_nd = [(u.numerator, u.denominator) for u in ups]
    lo_nd = [(v.numerator, v.denominator) for v in los]

    def pq(n: int) -> Tuple[int, int]:
        p = 1
        for a, b in up_nd:
            p *= b * n + a
        for _, b in lo_nd:
            p *= b
        q = n + 1
        for c, d in lo_nd:
            q *= d * n + c
        for _, b in up_nd:
            q *= b
        return p, q

    abs_x = F(abs(x_bf.man) + x_bf.err, 1 << bits)
    paired = list(los) + [F(1)]

    def tail_ratio(n: int) -> Fraction:
        r = abs_x
        for i, u in enumerate(ups):
            r *= max(F(n + u) / (n + paired[i]), F(1))
        for v in paired[len(ups) :]:
            r /= n + v
        return r

    smallest = min(ups + los + [F(1)])
    min_n = 0 if smallest > 0 else int(-smallest) + 1
    stop = max(1, (1 << bits) // 10 ** (digits + 4))
    S0, _, terms = _weighted_stream(pq, x_bf, stop, max_terms, tail_ratio, min_n)
    return S0, terms


_SIN_PI_S = {
    F(1, 2): SurdExpr.rational(F(1)),
    F(1, 3): SurdExpr.root(F(1, 2), 3),
    F(1, 4): SurdExpr.root(F(1, 2), 2),
    F(1, 6): SurdExpr.rational(F(1, 2)),
}


def prop2_numeric_check(s: Fraction, digits: int = 30) -> Tuple[bool, int, int]:
    """Certified check that sum_n n (1/2)**n A_n = (2/pi) sin(pi s) for
    the squared-Gauss coefficients; returns (ok, digits_achieved, terms)."""
    s = F(s)
    bits = bits_for_digits(digits)
    half = BigFloat.from_fraction(F(1, 2), bits)
    stop = max(1, (1 << bits) // 10 ** (digits + 4))
    Fv, Gv, terms = _weighted_stream(
        _pq_gauss(s, 1 - s), half, stop, 10**6, _const_ratio(1, half)
    )
    lhs = (Fv * Gv).mul_int(2)
    rhs = surd_to_bigfloat(_SIN_PI_S[s] * 2, bits) / pi_reference(bits=bits)
    achieved = certified_agreement_digits(lhs, rhs)
    return achieved >= digits, achieved, terms
