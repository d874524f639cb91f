"""Tests for the mod-p**3 supercongruence checks."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from piforge.congruence import (
    CLAIMS,
    CongruenceClaim,
    NotOddPrime,
    PrimeDividesBase,
    check_claim,
    claim_rhs_mod,
    claim_sum_mod,
    coefficient_cache,
    is_odd_prime,
    legendre,
    sweep,
)
from piforge.families import FamilySpec, a_n_integer

F = Fraction

ODD_PRIMES = [5, 7, 11, 13, 17, 19, 23, 29, 31]


def exact_oracle_mod(c: CongruenceClaim, p: int) -> int:
    """Brute-force exact rational truncated sum, reduced mod p**3."""
    total = sum(
        F(a) * (c.lin0 + c.lin1 * n) * F(1, c.base) ** n
        for n, a in enumerate(coefficient_cache(c.family.s, p))
    )
    p3 = p**3
    return total.numerator * pow(total.denominator, -1, p3) % p3


class TestLegendre:
    def test_minus_three_at_five_is_nonresidue(self):
        # Squares mod 5 are {1, 4}; -3 = 2 is not among them.
        assert legendre(-3, 5) == -1

    def test_minus_three_at_seven_is_residue(self):
        # -3 = 4 = 2**2 mod 7.
        assert legendre(-3, 7) == 1

    def test_multiple_of_p_gives_zero(self):
        assert legendre(0, 7) == 0
        assert legendre(25, 5) == 0

    @pytest.mark.parametrize("bad", [1, 2, 4, 9, 15, 21])
    def test_rejects_non_odd_primes(self, bad):
        with pytest.raises(NotOddPrime):
            legendre(-3, bad)

    @given(
        st.integers(min_value=1, max_value=200),
        st.integers(min_value=1, max_value=200),
        st.sampled_from(ODD_PRIMES),
    )
    @settings(max_examples=60, deadline=None)
    def test_complete_multiplicativity(self, a, b, p):
        assert legendre(a * b, p) == legendre(a, p) * legendre(b, p)

    def test_is_odd_prime(self):
        assert [q for q in range(50) if is_odd_prime(q)] == [
            3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47
        ]


class TestCoefficientCache:
    @pytest.mark.parametrize("s", [F(1, 3), F(1, 4)])
    def test_recurrence_matches_direct_binomials(self, s):
        seq = coefficient_cache(s, 31)
        for n in range(31):
            assert seq[n] == a_n_integer(s, n)

    def test_unsupported_exponent_rejected(self):
        with pytest.raises(ValueError):
            coefficient_cache(F(1, 5), 4)


class TestClaims:
    def test_first_claim_at_five_matches_frozen_residues(self):
        c = CLAIMS["s13"]
        # sum = -20 = 105 mod 125, and 4*5*(-3/5) = -20 as well.
        assert claim_sum_mod(c, 5) == 105
        assert claim_rhs_mod(c, 5) == 105
        assert check_claim(c, 5)

    def test_second_claim_at_five_matches_frozen_residue(self):
        c = CLAIMS["s14"]
        # sum = -5 = 120 mod 125.
        assert claim_sum_mod(c, 5) == 120
        assert check_claim(c, 5)

    def test_second_claim_at_seven(self):
        assert check_claim(CLAIMS["s14"], 7)

    @pytest.mark.parametrize("name", ["s13", "s14"])
    @pytest.mark.parametrize("p", ODD_PRIMES)
    def test_fast_path_equals_exact_rational_oracle(self, name, p):
        c = CLAIMS[name]
        assert claim_sum_mod(c, p) == exact_oracle_mod(c, p)

    def test_non_prime_rejected(self):
        for bad in (3, 4, 9):
            with pytest.raises(NotOddPrime):
                check_claim(CLAIMS["s13"], bad)

    def test_prime_dividing_base_rejected(self):
        c = CongruenceClaim(FamilySpec("HYP", F(1, 3)), 4, 15, -135, 4)
        with pytest.raises(PrimeDividesBase):
            check_claim(c, 5)

    def test_mutated_multiplier_fails_at_five(self):
        good = CLAIMS["s13"]
        bad = CongruenceClaim(
            good.family, good.lin0, good.lin1, good.base, rhs_mult=5
        )
        assert not check_claim(bad, 5)


class TestSweep:
    def test_small_sweep_all_pass(self):
        for name in ("s13", "s14"):
            results = sweep(CLAIMS[name], 50)
            assert [p for p, _ in results] == [
                5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47
            ]
            assert all(ok for _, ok in results)

    def test_empty_below_five(self):
        assert sweep(CLAIMS["s13"], 4) == []

    def test_results_ordered_by_prime(self):
        ps = [p for p, _ in sweep(CLAIMS["s14"], 120)]
        assert ps == sorted(ps)
