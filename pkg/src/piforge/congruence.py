"""Supercongruence verification mod p**3.

Two conjectured congruences tie the divergent integer-coefficient series
rows to a quadratic character: truncating the series at the p-th term
and reducing mod p**3 must yield a fixed multiple of
``p * (character / p)``.  This module checks them prime by prime.

The coefficient sequences are built once as exact integers through their
three-term multiplicative recurrences (the division by ``(n+1)**3`` in
each step is exact integer division), cached, and only then reduced
modulo ``p**3`` — no modular inverse of a factorial ever appears, so
primes dividing intermediate factorials cause no trouble.  Primes 2 and
3 are excluded throughout: they divide the series bases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Tuple

from .families import FamilySpec, a_n_integer

F = Fraction


class NotOddPrime(ValueError):
    """The argument must be an odd prime (greater than 3 for claims)."""


class PrimeDividesBase(ValueError):
    """The tested prime divides the series base, so the truncated sum
    cannot be reduced."""


@dataclass(frozen=True)
class CongruenceClaim:
    """A truncated-series congruence: for odd primes p > 3 not dividing
    ``base``,

        sum_{n=0}^{p-1} a_n * (lin0 + lin1*n) * base**(-n)
            == rhs_mult * p * (character_disc / p)   (mod p**3),

    with ``a_n`` the exact integer coefficients of ``family`` and
    ``(./p)`` the Legendre symbol.
    """

    family: FamilySpec
    lin0: int
    lin1: int
    base: int
    rhs_mult: int
    character_disc: int = -3


CLAIMS: Dict[str, CongruenceClaim] = {
    "s13": CongruenceClaim(FamilySpec("HYP", F(1, 3)), 4, 15, -27, 4),
    "s14": CongruenceClaim(FamilySpec("HYP", F(1, 4)), 1, 5, -144, 1),
}


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) by Euler's criterion, in {-1, 0, +1}."""
    if not is_odd_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    r = pow(a % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    if r == 1:
        return 1
    if r == p - 1:
        return -1
    raise ArithmeticError("Euler criterion produced a non-root")


# Multiplicative steps a_{n+1} = a_n * num(n) / (n+1)**3 for the integer
# coefficient sequences of the two claims; the division is exact.
_RECURRENCE_NUM: Dict[Fraction, Callable[[int], int]] = {
    F(1, 3): lambda n: 6 * (2 * n + 1) * (3 * n + 1) * (3 * n + 2),
    F(1, 4): lambda n: 8 * (2 * n + 1) * (4 * n + 1) * (4 * n + 3),
}

_EXACT_COEFFS: Dict[Fraction, List[int]] = {}


def coefficient_cache(s, count: int) -> List[int]:
    """The first ``count`` exact integer coefficients for exponent ``s``,
    extended by the multiplicative recurrence and cached across calls."""
    s = F(s)
    try:
        num = _RECURRENCE_NUM[s]
    except KeyError:
        raise ValueError(f"no integer recurrence for s={s}") from None
    seq = _EXACT_COEFFS.setdefault(s, [1])
    while len(seq) < count:
        n = len(seq) - 1
        step = seq[-1] * num(n)
        den = (n + 1) ** 3
        assert step % den == 0
        seq.append(step // den)
    return seq[:count]


def claim_sum_mod(c: CongruenceClaim, p: int) -> int:
    """The truncated series sum reduced mod p**3."""
    if p <= 3 or not is_odd_prime(p):
        raise NotOddPrime(f"claims require an odd prime > 3, got {p}")
    if c.base % p == 0:
        raise PrimeDividesBase(f"{p} divides base {c.base}")
    p3 = p**3
    inv_base = pow(c.base % p3, -1, p3)
    coeffs = coefficient_cache(c.family.s, p)
    acc = 0
    x = 1
    for n in range(p):
        acc = (acc + coeffs[n] * (c.lin0 + c.lin1 * n) * x) % p3
        x = x * inv_base % p3
    return acc


def claim_rhs_mod(c: CongruenceClaim, p: int) -> int:
    """The claimed right side ``rhs_mult * p * (disc/p)`` mod p**3."""
    return c.rhs_mult * p * legendre(c.character_disc, p) % p**3


def check_claim(c: CongruenceClaim, p: int) -> bool:
    """Whether the congruence holds at the odd prime p > 3."""
    return claim_sum_mod(c, p) == claim_rhs_mod(c, p)


def sweep(c: CongruenceClaim, pmax: int) -> List[Tuple[int, bool]]:
    """``check_claim`` over every prime 5 <= p <= pmax, ordered by p.

    Primes are independent, so this loop could be distributed; the
    sequential form is already far inside the time budget at desk scale.
    """
    out: List[Tuple[int, bool]] = []
    for p in range(5, pmax + 1):
        if is_odd_prime(p):
            out.append((p, check_claim(c, p)))
    return out
