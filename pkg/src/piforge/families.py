"""Coefficient families behind the 1/pi series and their generating laws.

Five families are supported, identified by the spec kinds HYP, PROP1,
PROP3, PROP5, PROP7:

- HYP: hypergeometric terms M**n (1/2)_n (s)_n (1-s)_n / n!**3, with M
  tied to s (16, 108, 256, 1728 for s = 1/2, 1/3, 1/4, 1/6).
- PROP1: the rebalanced family produced by the substitution
  x -> -x/(1-Mx) with prefactor (1-Mx)^(-1/2) applied to HYP; its
  coefficients are computed from the printed fractional-binomial
  convolutions (s = 1/3, 1/4, 1/6).
- PROP3: convolution binom(2k,k) binom(2n-2k,n-k) binom(-s,k)
  binom(-(1-s),n-k), generated by F(1/2,s;1;-4x) F(1/2,1-s;1;-4x).
- PROP5: convolution binom(-s,k)^2 binom(-(1-s),n-k)^2, generated by
  F(s,s;1;x) F(1-s,1-s;1;x).
- PROP7: convolution (s)_k (1-s)_k (s)_{n-k} (1-s)_{n-k} / (k! (n-k)!)^2,
  generated by F(s,1-s;1;x)^2; symmetric in k <-> n-k.

All coefficients are exact rationals.  Component sequences are cached
incrementally so streaming n = 0, 1, 2, ... costs O(n) rational
multiplications per convolution coefficient and O(1) per HYP term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .series import (
    TruncSeries,
    compose,
    hyp2f1,
    hyp3f2,
    pow_rational,
    theta,
)

__all__ = [
    "KINDS",
    "ALLOWED_S",
    "M_BY_S",
    "FamilySpec",
    "pochhammer",
    "frac_binomial",
    "a_n",
    "a_n_integer",
    "A_n",
    "generating_series",
    "family_rate",
    "coefficient_bound",
    "nonintegral_indices",
    "prop7_recurrence",
    "rebalance_series",
    "involution_check",
    "transformed_family_law_holds",
    "series_identity_holds",
]

F = Fraction

KINDS = ("HYP", "PROP1", "PROP3", "PROP5", "PROP7")
ALLOWED_S = (F(1, 2), F(1, 3), F(1, 4), F(1, 6))
M_BY_S = {F(1, 2): 16, F(1, 3): 108, F(1, 4): 256, F(1, 6): 1728}

# Printed fractional-binomial pairs for the rebalanced family: the first
# pair feeds binomials in k, the second in n-k, the whole sum scaled by
# M**n.  No pair is printed for s = 1/2.
REBALANCED_PAIRS = {
    F(1, 3): ((F(-2, 3), F(-1, 6)), (F(-1, 3), F(-5, 6))),
    F(1, 4): ((F(-1, 8), F(-5, 8)), (F(-3, 8), F(-7, 8))),
    F(1, 6): ((F(-1, 12), F(-7, 12)), (F(-5, 12), F(-11, 12))),
}


@dataclass(frozen=True)
class FamilySpec:
    """A coefficient family: kind, parameter s, and (for HYP/PROP1) the
    rescaling integer M implied by s."""

    kind: str
    s: Fraction
    M: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        s = Fraction(self.s)
        object.__setattr__(self, "s", s)
        if s not in ALLOWED_S:
            raise ValueError(f"parameter s={s} not in {ALLOWED_S}")
        if self.kind in ("HYP", "PROP1"):
            implied = M_BY_S[s]
            if self.M is None:
                object.__setattr__(self, "M", implied)
            elif self.M != implied:
                raise ValueError(f"M={self.M} inconsistent with s={s} (expected {implied})")
        elif self.M is not None:
            raise ValueError(f"family kind {self.kind} does not take M")


# ---------------------------------------------------------------------------
# Scalar building blocks.
# ---------------------------------------------------------------------------


def pochhammer(a, n: int) -> Fraction:
    """Rising factorial a (a+1) ... (a+n-1)."""
    if n < 0:
        raise ValueError("pochhammer needs n >= 0")
    a = Fraction(a)
    out = F(1)
    for j in range(n):
        out *= a + j
    return out


def frac_binomial(a, k: int) -> Fraction:
    """Generalized binomial coefficient a (a-1) ... (a-k+1) / k!."""
    if k < 0:
        raise ValueError("frac_binomial needs k >= 0")
    a = Fraction(a)
    out = F(1)
    for j in range(k):
        out *= (a - j) / (j + 1)
    return out


# ---------------------------------------------------------------------------
# Cached component sequences (extended on demand, never recomputed).
# ---------------------------------------------------------------------------

_SEQ_CACHE: dict[tuple, list[Fraction]] = {}


def _cached_seq(key: tuple, ratio: Callable[[int, Fraction], Fraction], upto: int) -> list[Fraction]:
    seq = _SEQ_CACHE.setdefault(key, [F(1)])
    while len(seq) <= upto:
        k = len(seq) - 1
        seq.append(ratio(k, seq[k]))
    return seq


def _hyp_terms(s: Fraction, M: int, upto: int) -> list[Fraction]:
    def step(n: int, t: Fraction) -> Fraction:
        return t * M * (F(1, 2) + n) * (s + n) * (1 - s + n) / (n + 1) ** 3

    return _cached_seq(("hyp", s, M), step, upto)


def _binom_pair_terms(pair: tuple[Fraction, Fraction], upto: int) -> list[Fraction]:
    p, q = pair

    def step(k: int, t: Fraction) -> Fraction:
        return t * (p - k) * (q - k) / (k + 1) ** 2

    return _cached_seq(("pair", p, q), step, upto)


def _central_binom_terms(s: Fraction, upto: int) -> list[Fraction]:
    # binom(2k,k) * binom(-s,k)
    def step(k: int, t: Fraction) -> Fraction:
        return t * 2 * (2 * k + 1) * (-s - k) / (k + 1) ** 2

    return _cached_seq(("central", s), step, upto)


def _square_binom_terms(s: Fraction, upto: int) -> list[Fraction]:
    # binom(-s,k)**2
    def step(k: int, t: Fraction) -> Fraction:
        return t * ((-s - k) / (k + 1)) ** 2

    return _cached_seq(("square", s), step, upto)


def _poch_square_terms(s: Fraction, upto: int) -> list[Fraction]:
    # (s)_k (1-s)_k / k!**2
    def step(k: int, t: Fraction) -> Fraction:
        return t * (s + k) * (1 - s + k) / (k + 1) ** 2

    return _cached_seq(("pochsq", s), step, upto)


# ---------------------------------------------------------------------------
# Family coefficients.
# ---------------------------------------------------------------------------


def a_n(spec: FamilySpec, n: int) -> Fraction:
    """Hypergeometric term M**n (1/2)_n (s)_n (1-s)_n / n!**3."""
    if spec.kind != "HYP":
        raise ValueError("a_n is defined for the HYP kind")
    return _hyp_terms(spec.s, spec.M, n)[n]


def a_n_integer(s, n: int) -> int:
    """The integer closed form of the HYP term for s in {1/3, 1/4, 1/6}:
    products of central binomial coefficients.  Used where integrality
    matters (congruence sweeps); equals a_n exactly."""
    s = Fraction(s)
    c = math.comb
    if s == F(1, 3):
        return c(2 * n, n) ** 2 * c(3 * n, n)
    if s == F(1, 4):
        return c(2 * n, n) ** 2 * c(4 * n, 2 * n)
    if s == F(1, 6):
        return c(2 * n, n) * c(3 * n, n) * c(6 * n, 3 * n)
    raise ValueError(f"no integer closed form for s={s}")


def A_n(spec: FamilySpec, n: int) -> Fraction:
    """Exact n-th coefficient of the family's series."""
    if n < 0:
        raise ValueError("coefficient index must be >= 0")
    s = spec.s
    if spec.kind == "HYP":
        return a_n(spec, n)
    if spec.kind == "PROP1":
        if s not in REBALANCED_PAIRS:
            raise ValueError(f"no printed coefficient convolution for s={s}")
        left_pair, right_pair = REBALANCED_PAIRS[s]
        left = _binom_pair_terms(left_pair, n)
        right = _binom_pair_terms(right_pair, n)
        total = sum(left[k] * right[n - k] for k in range(n + 1))
        return Fraction(spec.M) ** n * total
    if spec.kind == "PROP3":
        left = _central_binom_terms(s, n)
        right = _central_binom_terms(1 - s, n)
        return sum(left[k] * right[n - k] for k in range(n + 1))
    if spec.kind == "PROP5":
        left = _square_binom_terms(s, n)
        right = _square_binom_terms(1 - s, n)
        return sum(left[k] * right[n - k] for k in range(n + 1))
    if spec.kind == "PROP7":
        terms = _poch_square_terms(s, n)
        # The convolution is symmetric under k <-> n-k: fold the range.
        half = sum(terms[k] * terms[n - k] for k in range(n // 2 + 1 if n % 2 else n // 2))
        total = 2 * half
        if n % 2 == 0:
            total += terms[n // 2] ** 2
        return total
    raise AssertionError("unreachable")


def generating_series(spec: FamilySpec, order: int) -> TruncSeries:
    """The family's power series sum A_n x**n as an exact TruncSeries."""
    return TruncSeries([A_n(spec, n) for n in range(order + 1)])


def family_rate(spec: FamilySpec) -> Fraction:
    """Exponential growth rate r with |A_n| <= (n+1) r**n; the series at
    argument z converges (absolutely, geometrically) when |r z| < 1."""
    if spec.kind in ("HYP", "PROP1"):
        return F(spec.M)
    if spec.kind == "PROP3":
        return F(4)
    return F(1)


def coefficient_bound(spec: FamilySpec, n: int) -> Fraction:
    """A proved bound |A_n| <= (n+1) * rate**n.

    Each scalar component has magnitude at most rate-per-index to the
    n-th power: |(1/2)_n (s)_n (1-s)_n / n!**3| <= 1 and
    |binom(-t, k)| = (t)_k / k! <= 1 for 0 < t < 1, while
    binom(2k,k) <= 4**k; a convolution adds at most n+1 such products.
    """
    return (n + 1) * family_rate(spec) ** n


def nonintegral_indices(spec: FamilySpec, upto: int) -> tuple[int, ...]:
    """Indices n <= upto where A_n is not an integer — recorded as a
    finding, never asserted away."""
    return tuple(n for n in range(upto + 1) if A_n(spec, n).denominator != 1)


def prop7_recurrence(s) -> Callable[[int], tuple[Fraction, Fraction, Fraction]]:
    """Three-term recurrence for the PROP7 coefficients:

        cp(n) A_{n+1} + c0(n) A_n + cm(n) A_{n-1} = 0

    with cp(n) = (n+1)**3, c0(n) = -(2n+1)(n**2+n+2*sig),
    cm(n) = n**3 + (4*sig - 1) n, sig = s(1-s).  It is the coefficient
    recurrence of the symmetric-square differential operator of the
    underlying second-order hypergeometric operator, and is verified
    against the direct convolution in the tests.  It lets a numeric
    evaluator stream millions of coefficients at O(1) cost per term.
    """
    s = Fraction(s)
    sig = s * (1 - s)

    def coeffs(n: int) -> tuple[Fraction, Fraction, Fraction]:
        cp = F((n + 1) ** 3)
        c0 = -(2 * n + 1) * (n * n + n + 2 * sig)
        cm = F(n**3 - n) + 4 * sig * n
        return cp, c0, cm

    return coeffs


# ---------------------------------------------------------------------------
# Series-level laws.
# ---------------------------------------------------------------------------


def _geometric(order: int, ratio) -> TruncSeries:
    c = F(1)
    coeffs = []
    for _ in range(order + 1):
        coeffs.append(c)
        c *= ratio
    return TruncSeries(coeffs)


def _rebalanced_argument(order: int, M: int) -> TruncSeries:
    """-x/(1-Mx) as a zero-constant series."""
    return _geometric(order, F(M)).shift_mul(1, -1)


def rebalance_series(f: TruncSeries, M: int) -> TruncSeries:
    """(1-Mx)^(-1/2) * f(-x/(1-Mx)) in the truncated ring: the series
    substitution whose square is the identity map."""
    order = f.order
    inner = _rebalanced_argument(order, M)
    pref_base = TruncSeries([F(1), F(-M)] + [F(0)] * (order - 1)) if order >= 1 else TruncSeries.one(0)
    prefactor = pow_rational(pref_base, F(-1, 2))
    return prefactor * compose(f, inner)


def involution_check(spec: FamilySpec, order: int) -> bool:
    """Applying the rebalancing substitution twice returns the original
    series: the substitution is an involution."""
    if spec.kind not in ("HYP", "PROP1"):
        raise ValueError("involution applies to the HYP/PROP1 kinds")
    f = generating_series(spec, order)
    return rebalance_series(rebalance_series(f, spec.M), spec.M) == f


def transformed_family_law_holds(s, order: int) -> bool:
    """The rebalanced family is exactly the substitution applied to the
    hypergeometric family: sum A_n x**n = (1-Mx)^(-1/2) sum a_n
    (-x/(1-Mx))**n, checked coefficientwise."""
    s = Fraction(s)
    hyp = FamilySpec("HYP", s)
    reb = FamilySpec("PROP1", s)
    return generating_series(reb, order) == rebalance_series(generating_series(hyp, order), hyp.M)


def series_identity_holds(which: str, s, order: int) -> bool:
    """Finite-order checks of the generating identities, keyed by the
    identity-check name used throughout the suite:

    - '3': sum of the binomial-product family equals
      (1+4x)^(-1/2) * 3F2(1/2,s,1-s;1,1; -4x**2/(1+4x)).
    - '5': sum of the squared-binomial family equals
      (1-x)^(-1) * 3F2(1/2,s,1-s;1,1; -4x/(1-x)**2).
    - '6': F(s,1-s;1;w)**2 equals 3F2(1/2,s,1-s;1,1;4w(1-w)), and in the
      half-angle variable F(s,1-s;1;(1-sqrt(1-x))/2)**2 equals
      3F2(1/2,s,1-s;1,1;x).
    - '2': the weighted sum sum n A_n x**n of the squared-Gauss family
      equals 2s(1-s) x F(s,1-s;1;x) F(1+s,2-s;2;x) (the series half of
      the sine-evaluation identity; the numeric half lives in the
      numeric module).
    """
    s = Fraction(s)
    half = F(1, 2)
    if which == "3":
        lhs = generating_series(FamilySpec("PROP3", s), order)
        inner = _geometric(order, F(-4)).shift_mul(2, -4)  # -4x**2/(1+4x)
        pref = pow_rational(TruncSeries([F(1), F(4)] + [F(0)] * (order - 1)), F(-1, 2))
        rhs = pref * compose(hyp3f2(half, s, 1 - s, 1, 1, order), inner)
        return lhs == rhs
    if which == "5":
        lhs = generating_series(FamilySpec("PROP5", s), order)
        # -4x/(1-x)**2 has coefficients -4 n x**n
        inner = TruncSeries([F(-4 * n) for n in range(order + 1)])
        rhs = _geometric(order, F(1)) * compose(hyp3f2(half, s, 1 - s, 1, 1, order), inner)
        return lhs == rhs
    if which == "6":
        f = hyp2f1(s, 1 - s, 1, order)
        target = hyp3f2(half, s, 1 - s, 1, 1, order)
        # w-form
        wform = TruncSeries([F(0), F(4), F(-4)] + [F(0)] * (order - 2)) if order >= 2 else TruncSeries([F(0), F(4)][: order + 1])
        ok_w = compose(target, wform) == f * f
        # half-angle form
        sqrt1mx = pow_rational(TruncSeries([F(1), F(-1)] + [F(0)] * (order - 1)), half)
        inner = TruncSeries.one(order) - sqrt1mx
        inner = inner.scale(half)
        g = compose(f, inner)
        ok_x = g * g == target
        return ok_w and ok_x
    if which == "2":
        lhs = theta(generating_series(FamilySpec("PROP7", s), order))
        rhs = (hyp2f1(s, 1 - s, 1, order) * hyp2f1(1 + s, 2 - s, 2, order)).shift_mul(
            1, 2 * s * (1 - s)
        )
        return lhs == rhs
    raise ValueError(f"unknown identity key {which!r}")
