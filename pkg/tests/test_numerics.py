from fractions import Fraction

import pytest
from typeguard import TypeCheckError

from renormlab.numerics import (
    DEFAULT_PRECISION,
    PRECISION_CAP,
    CertReal,
    Comparison,
    as_rational,
    cert_cmp,
    cert_exp,
    cert_log,
    cert_max,
    cert_pow,
    cert_root,
    cert_sqrt,
    cert_sqrt_real,
    format_rational,
    random_rational,
    refine_compare,
)

LN2 = Fraction("0.6931471805599453094172321")
E = Fraction("2.7182818284590452353602874")


class TestAsRational:  # noqa: D101
    @pytest.mark.parametrize(
        "value, expected",
        [("3/6", Fraction(1, 2)), (4, Fraction(4)), (Fraction(2, 3), Fraction(2, 3)), (" -5/10 ", Fraction(-1, 2))],
    )
    def test_as_rational_valid(self, value, expected):
        assert as_rational(value) == expected

    def test_as_rational_rejects_float(self):
        """Floats would import binary rounding."""
        with pytest.raises(TypeError, match="float"):
            as_rational(0.5)

    def test_as_rational_unparsable_string(self):
        with pytest.raises(ValueError, match="Cannot parse"):
            as_rational("one half")

    def test_format_rational(self):
        assert format_rational(Fraction(3, 4)) == "3/4"
        assert format_rational(Fraction(6, 3)) == "2"

    def test_random_rational_range(self, rng):
        for _ in range(100):
            q = random_rational(rng)
            assert -8 <= q <= 8
            assert q.denominator <= 64


class TestCertReal:  # noqa: D101
    def test_exact(self):
        x = CertReal.exact(Fraction(1, 3))
        assert x.is_exact
        assert x.lower == x.upper == Fraction(1, 3)

    def test_negative_radius_raises(self):
        with pytest.raises(ValueError, match="non-negative"):
            CertReal(Fraction(1), Fraction(-1))

    def test_from_bounds_order(self):
        with pytest.raises(ValueError):
            CertReal.from_bounds(Fraction(2), Fraction(1))

    def test_addition_adds_radii(self):
        s = CertReal(Fraction(1), Fraction(1, 8)) + CertReal(Fraction(2), Fraction(1, 8))
        assert s.midpoint == 3
        assert s.radius == Fraction(1, 4)

    def test_multiplication_encloses_products(self):
        a = CertReal(Fraction(2), Fraction(1, 10))
        b = CertReal(Fraction(-3), Fraction(1, 10))
        p = a * b
        for x in (a.lower, a.upper):
            for y in (b.lower, b.upper):
                assert p.contains(x * y)

    def test_division_by_enclosure_of_zero(self):
        with pytest.raises(ZeroDivisionError):
            CertReal.exact(1) / CertReal(Fraction(0), Fraction(1, 4))

    def test_square_straddling_zero(self):
        sq = CertReal(Fraction(0), Fraction(1, 2)).square()
        assert sq.lower == 0
        assert sq.upper == Fraction(1, 4)

    def test_cert_max(self):
        m = cert_max([CertReal.exact(1), CertReal(Fraction(2), Fraction(1, 2))])
        assert m.lower == Fraction(3, 2)
        assert m.upper == Fraction(5, 2)

    def test_cert_max_empty(self):
        with pytest.raises(ValueError):
            cert_max([])

    def test_to_dict(self):
        assert CertReal(Fraction(1, 2), Fraction(1, 4)).to_dict() == {"midpoint": "1/2", "radius": "1/4"}


class TestRoots:  # noqa: D101
    @pytest.mark.parametrize("x, root", [(Fraction(9, 4), Fraction(3, 2)), (0, 0), (Fraction(1, 16), Fraction(1, 4))])
    def test_cert_sqrt_perfect_squares_exact(self, x, root):
        value = cert_sqrt(x)
        assert value.is_exact
        assert value.midpoint == root

    def test_cert_sqrt_two(self):
        value = cert_sqrt(2)
        assert value.radius <= DEFAULT_PRECISION
        assert value.lower**2 <= 2 <= value.upper**2

    def test_cert_sqrt_nested(self):
        coarse = cert_sqrt(2, Fraction(1, 2**64))
        fine = cert_sqrt(2, Fraction(1, 2**128))
        assert coarse.lower <= fine.lower
        assert fine.upper <= coarse.upper

    def test_cert_sqrt_negative(self):
        with pytest.raises(ValueError, match="negative"):
            cert_sqrt(-1)

    def test_cert_sqrt_type_safety(self):
        with pytest.raises(TypeCheckError):
            cert_sqrt(2.0)

    def test_cert_root(self):
        assert cert_root(27, 3) == CertReal.exact(3)
        value = cert_root(2, 3)
        assert value.lower**3 <= 2 <= value.upper**3

    def test_cert_root_degree(self):
        with pytest.raises(ValueError, match="positive integer"):
            cert_root(2, 0)

    def test_cert_sqrt_real_clips_at_zero(self):
        value = cert_sqrt_real(CertReal(Fraction(0), Fraction(1, 4)))
        assert value.lower == 0
        assert value.upper >= Fraction(1, 2)


class TestPowers:  # noqa: D101
    def test_cert_pow_perfect_power(self):
        assert cert_pow(8, Fraction(1, 3)) == CertReal.exact(2)
        assert cert_pow(Fraction(4, 9), Fraction(3, 2)) == CertReal.exact(Fraction(8, 27))

    def test_cert_pow_integer_exponent(self):
        assert cert_pow(Fraction(2, 3), -2) == CertReal.exact(Fraction(9, 4))

    def test_cert_pow_irrational(self):
        value = cert_pow(2, Fraction(3, 2))
        assert value.radius <= DEFAULT_PRECISION
        assert value.lower**2 <= 8 <= value.upper**2

    def test_cert_pow_negative_fractional_exponent(self):
        value = cert_pow(2, Fraction(-1, 2))
        assert value.radius <= DEFAULT_PRECISION
        assert 2 * value.lower**2 <= 1 <= 2 * value.upper**2

    def test_cert_pow_large_denominator_uses_logarithm(self):
        value = cert_pow(2, Fraction(1, 101), Fraction(1, 2**40))
        assert value.radius <= Fraction(1, 2**40)
        assert value.lower**101 <= 2 <= value.upper**101

    @pytest.mark.parametrize("x, e", [(0, 0), (0, -1), (-1, Fraction(1, 2))])
    def test_cert_pow_domain(self, x, e):
        with pytest.raises(ValueError, match="domain error"):
            cert_pow(x, e)


class TestLogExp:  # noqa: D101
    def test_cert_log_one(self):
        assert cert_log(1) == CertReal.exact(0)

    def test_cert_log_two(self):
        value = cert_log(2)
        assert value.radius <= DEFAULT_PRECISION
        assert abs(value.midpoint - LN2) < Fraction(1, 10**18)

    def test_cert_log_small_argument(self):
        value = cert_log(Fraction(1, 4))
        assert abs(value.midpoint + 2 * LN2) < Fraction(1, 10**18)

    def test_cert_log_domain(self):
        with pytest.raises(ValueError, match="non-positive"):
            cert_log(0)

    def test_cert_exp(self):
        assert cert_exp(0) == CertReal.exact(1)
        value = cert_exp(1)
        assert value.radius <= DEFAULT_PRECISION
        assert abs(value.midpoint - E) < Fraction(1, 10**18)

    def test_cert_exp_negative(self):
        value = cert_exp(-1)
        assert abs(value.midpoint - 1 / E) < Fraction(1, 10**18)

    @pytest.mark.parametrize("x", [3, Fraction(1, 7), Fraction(10**30, 3)])
    def test_log_and_exp_bracket_each_other(self, x):
        log_x = cert_log(x)
        assert cert_exp(log_x.lower).lower <= x <= cert_exp(log_x.upper).upper

    def test_cert_exp_large_argument(self):
        value = cert_exp(200, Fraction(1, 2**10))
        assert value.radius <= Fraction(1, 2**10)
        assert value.lower > 2**288


class TestComparison:  # noqa: D101
    def test_cert_cmp_disjoint(self):
        assert cert_cmp(CertReal.exact(1), CertReal.exact(2)) is Comparison.LT
        assert cert_cmp(CertReal.exact(2), CertReal.exact(1)) is Comparison.GT

    def test_cert_cmp_exact_equal(self):
        assert cert_cmp(CertReal.exact(Fraction(1, 2)), CertReal.exact(Fraction(2, 4))) is Comparison.EQ

    def test_cert_cmp_overlap(self):
        assert cert_cmp(CertReal.exact(1), CertReal(Fraction(1), Fraction(1, 10))) is Comparison.INCONCLUSIVE

    def test_refine_compare_decides_close_values(self):
        """√2 against a 17-digit rational approximation from above."""
        approx = Fraction(14142135623730951, 10**16)
        outcome, a, b, refinements = refine_compare(lambda p: cert_sqrt(2, p), lambda p: CertReal.exact(approx))
        assert outcome is Comparison.LT
        assert a.upper < b.lower
        assert refinements == 0

    def test_refine_compare_equal_irrationals_stay_inconclusive(self):
        outcome, a, b, refinements = refine_compare(lambda p: cert_sqrt(2, p), lambda p: cert_sqrt(2, p))
        assert outcome is Comparison.INCONCLUSIVE
        assert refinements == 3
        assert a.radius <= PRECISION_CAP
