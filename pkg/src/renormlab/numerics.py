import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, Tuple, Union

import gmpy2
from typeguard import typechecked

Scalar = Union[Fraction, int]

DEFAULT_PRECISION = Fraction(1, 2**64)
PRECISION_CAP = Fraction(1, 2**512)

# Rational exponents a/b with both |a| and b up to this bound are enclosed by
# integer roots; larger ones go through the log/exp enclosures.
ROOT_EXPONENT_LIMIT = 64


class PrecisionExhaustedError(RuntimeError):
    """Raised when refinement reaches PRECISION_CAP without a decision."""


class Comparison(str, Enum):
    """Three-valued outcome of comparing two certified reals."""

    LT = "LT"
    GT = "GT"
    EQ = "EQ"
    INCONCLUSIVE = "INCONCLUSIVE"


# region rational helpers
def as_rational(value: Union[Fraction, int, str]) -> Fraction:
    """Convert an int, Fraction or "p/q" string into a canonical Fraction.

    Floats are rejected because they would silently import binary rounding.

    Args:
        value (Fraction | int | str): The value to convert.

    Returns:
        Fraction: The canonical rational.

    Raises:
        TypeError: If `value` is a float or another unsupported type.
        ValueError: If a string cannot be parsed as a rational.

    Examples:
        >>> as_rational("3/6")
        Fraction(1, 2)
        >>> as_rational(4)
        Fraction(4, 1)
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"Unsupported scalar type: {type(value).__name__}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Cannot parse rational from '{value}'.") from e
    raise TypeError(f"Unsupported scalar type: {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    """Render a rational as "p/q" (or "p" for integers)."""
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def random_rational(rng: random.Random, bound: int = 8, max_denominator: int = 64) -> Fraction:
    """Draw a rational in [-bound, bound] with denominator at most `max_denominator`."""
    den = rng.randint(1, max_denominator)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def _iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n, for n >= 0 and k >= 1."""
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _exact_root(q: Fraction, k: int) -> Fraction | None:
    """Return the exact k-th root of q >= 0 when it is rational, else None."""
    num = _iroot(q.numerator, k)
    den = _iroot(q.denominator, k)
    if num**k == q.numerator and den**k == q.denominator:
        return Fraction(num, den)
    return None


def _bits_for(precision: Fraction) -> int:
    """Number of binary digits k with 2**-k < precision."""
    return max(0, math.ceil(1 / precision).bit_length())
# endregion


# region certified reals
@dataclass(frozen=True)
class CertReal:
    """A real number known to lie in [midpoint - radius, midpoint + radius]."""

    midpoint: Fraction
    radius: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "midpoint", as_rational(self.midpoint))
        object.__setattr__(self, "radius", as_rational(self.radius))
        if self.radius < 0:
            raise ValueError("CertReal radius must be non-negative.")

    @classmethod
    def exact(cls, value: Scalar) -> "CertReal":
        return cls(as_rational(value), Fraction(0))

    @classmethod
    def from_bounds(cls, lower: Fraction, upper: Fraction) -> "CertReal":
        if lower > upper:
            raise ValueError("Lower bound exceeds upper bound.")
        return cls((lower + upper) / 2, (upper - lower) / 2)

    @property
    def lower(self) -> Fraction:
        return self.midpoint - self.radius

    @property
    def upper(self) -> Fraction:
        return self.midpoint + self.radius

    @property
    def is_exact(self) -> bool:
        return self.radius == 0

    def contains(self, value: Scalar) -> bool:
        return self.lower <= value <= self.upper

    def _coerce(self, other) -> "CertReal":
        if isinstance(other, CertReal):
            return other
        return CertReal.exact(other)

    def __add__(self, other) -> "CertReal":
        other = self._coerce(other)
        return CertReal(self.midpoint + other.midpoint, self.radius + other.radius)

    __radd__ = __add__

    def __neg__(self) -> "CertReal":
        return CertReal(-self.midpoint, self.radius)

    def __sub__(self, other) -> "CertReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "CertReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "CertReal":
        other = self._coerce(other)
        mid = self.midpoint * other.midpoint
        rad = (
            abs(self.midpoint) * other.radius
            + abs(other.midpoint) * self.radius
            + self.radius * other.radius
        )
        return CertReal(mid, rad)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "CertReal":
        other = self._coerce(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError("Divisor enclosure contains zero.")
        candidates = [a / b for a in (self.lower, self.upper) for b in (other.lower, other.upper)]
        return CertReal.from_bounds(min(candidates), max(candidates))

    def square(self) -> "CertReal":
        ends = (self.lower * self.lower, self.upper * self.upper)
        if self.lower <= 0 <= self.upper:
            return CertReal.from_bounds(Fraction(0), max(ends))
        return CertReal.from_bounds(min(ends), max(ends))

    def to_dict(self) -> dict:
        return {"midpoint": format_rational(self.midpoint), "radius": format_rational(self.radius)}

    def __str__(self) -> str:
        if self.is_exact:
            return format_rational(self.midpoint)
        return f"{float(self.midpoint):.12g} ± {float(self.radius):.3g}"


def cert_max(values) -> CertReal:
    """Certified maximum of a non-empty iterable of enclosures."""
    values = list(values)
    if not values:
        raise ValueError("cert_max requires at least one value.")
    return CertReal.from_bounds(max(v.lower for v in values), max(v.upper for v in values))
# endregion


# region roots and powers
@typechecked
def cert_sqrt(x: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose the square root of a non-negative rational.

    Perfect rational squares are returned exactly. Otherwise the enclosure is
    [s/N, (s+1)/N] with N a power of two and s the integer square root of
    floor(x*N^2), so enclosures for smaller precisions are nested.

    Args:
        x (Fraction | int): The radicand, x >= 0.
        precision (Fraction | int): Target radius, > 0.

    Returns:
        CertReal: An enclosure of sqrt(x) with radius at most `precision`.

    Raises:
        ValueError: If x < 0 or precision <= 0.

    Examples:
        >>> cert_sqrt(Fraction(9, 4))
        CertReal(midpoint=Fraction(3, 2), radius=Fraction(0, 1))
    """
    x = as_rational(x)
    precision = as_rational(precision)
    if x < 0:
        raise ValueError(f"cert_sqrt domain error: negative input {x}.")
    if precision <= 0:
        raise ValueError("precision must be positive.")
    root = _exact_root(x, 2)
    if root is not None:
        return CertReal.exact(root)
    return _root_enclosure(x, 2, precision)


def _root_enclosure(x: Fraction, k: int, precision: Fraction) -> CertReal:
    bits = _bits_for(precision)
    scale = 1 << bits
    s = _iroot(math.floor(x * scale**k), k)
    return CertReal(Fraction(2 * s + 1, 2 * scale), Fraction(1, 2 * scale))


@typechecked
def cert_root(x: Scalar, k: int, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose the k-th root of a non-negative rational (exact for perfect powers)."""
    x = as_rational(x)
    precision = as_rational(precision)
    if k < 1:
        raise ValueError("Root degree must be a positive integer.")
    if x < 0:
        raise ValueError(f"cert_root domain error: negative input {x}.")
    if precision <= 0:
        raise ValueError("precision must be positive.")
    root = _exact_root(x, k)
    if root is not None:
        return CertReal.exact(root)
    return _root_enclosure(x, k, precision)


@typechecked
def cert_pow(x: Scalar, e: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose x**e for rational x >= 0 and rational exponent e.

    Perfect powers are detected first, so identities such as 8**(1/3) = 2 verify
    with radius 0. Moderate exponents a/b are enclosed through integer b-th roots
    of x**a; the remaining ones through log/exp enclosures.

    Args:
        x (Fraction | int): The base, x >= 0.
        e (Fraction | int): The exponent.
        precision (Fraction | int): Target radius.

    Returns:
        CertReal: An enclosure of x**e.

    Raises:
        ValueError: On 0**0, 0 to a negative power, or negative x.

    Examples:
        >>> cert_pow(8, Fraction(1, 3))
        CertReal(midpoint=Fraction(2, 1), radius=Fraction(0, 1))
    """
    x = as_rational(x)
    e = as_rational(e)
    precision = as_rational(precision)
    if x < 0:
        raise ValueError(f"cert_pow domain error: negative base {x}.")
    if x == 0:
        if e <= 0:
            raise ValueError("cert_pow domain error: 0 raised to a non-positive power.")
        return CertReal.exact(0)
    if e.denominator == 1:
        return CertReal.exact(x ** e.numerator)
    a, b = e.numerator, e.denominator
    root = _exact_root(x, b)
    if root is not None:
        return CertReal.exact(root**a)
    if abs(a) <= ROOT_EXPONENT_LIMIT and b <= ROOT_EXPONENT_LIMIT:
        if a > 0:
            return _root_enclosure(x**a, b, precision)
        # x**(-a/b) = 1 / (x**(a/b)); refine the denominator until the quotient fits
        inner = precision
        while True:
            denom = _root_enclosure(x ** (-a), b, inner)
            if denom.lower > 0:
                value = CertReal.exact(1) / denom
                if value.radius <= precision:
                    return value
            inner /= 1 << 32
    return _pow_via_log(x, e, precision)


def _pow_via_log(x: Fraction, e: Fraction, precision: Fraction) -> CertReal:
    inner = precision
    while True:
        log_x = cert_log(x, inner)
        scaled = CertReal.exact(e) * log_x
        low = cert_exp(scaled.lower, inner)
        high = cert_exp(scaled.upper, inner)
        value = CertReal.from_bounds(low.lower, high.upper)
        if value.radius <= precision:
            return value
        inner /= 1 << 32


@typechecked
def cert_pow_real(x: CertReal, e: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose y**e over every y in the enclosure `x` (clipped at 0), for e > 0."""
    e = as_rational(e)
    if e <= 0:
        raise ValueError("cert_pow_real requires a positive exponent.")
    low = max(x.lower, Fraction(0))
    high = max(x.upper, Fraction(0))
    lower = cert_pow(low, e, precision).lower if low > 0 else Fraction(0)
    upper = cert_pow(high, e, precision).upper if high > 0 else Fraction(0)
    return CertReal.from_bounds(max(lower, Fraction(0)), upper)


@typechecked
def cert_sqrt_real(x: CertReal, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose sqrt(y) over every y in the enclosure `x` (clipped at 0)."""
    if x.is_exact:
        return cert_sqrt(max(x.midpoint, Fraction(0)), precision)
    return cert_pow_real(x, Fraction(1, 2), precision)
# endregion


# region log and exp
def _mpfr_bounds(fn: Callable, x: Fraction, bits: int) -> Tuple[Fraction, Fraction]:
    """Bounds of fn(x) for an increasing mpfr function, rounding down then up."""
    q = gmpy2.mpq(x.numerator, x.denominator)
    ends = []
    for mode in (gmpy2.RoundDown, gmpy2.RoundUp):
        with gmpy2.context(
            precision=bits,
            emin=gmpy2.get_emin_min(),
            emax=gmpy2.get_emax_max(),
            trap_overflow=True,
            trap_invalid=True,
            round=mode,
        ):
            # the argument is rounded in the same direction, fn is increasing
            num, den = fn(gmpy2.mpfr(q)).as_integer_ratio()
        ends.append(Fraction(int(num), int(den)))
    return ends[0], ends[1]


def _enclose(fn: Callable, x: Fraction, precision: Fraction, magnitude: int) -> CertReal:
    bits = _bits_for(precision) + magnitude + 8
    while True:
        lower, upper = _mpfr_bounds(fn, x, bits)
        value = CertReal.from_bounds(lower, upper)
        if value.radius <= precision:
            return value
        bits *= 2


@typechecked
def cert_log(x: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose the natural logarithm of a positive rational.

    Raises:
        ValueError: If x <= 0.
    """
    x = as_rational(x)
    precision = as_rational(precision)
    if x <= 0:
        raise ValueError(f"cert_log domain error: non-positive input {x}.")
    if x == 1:
        return CertReal.exact(0)
    magnitude = abs(x.numerator.bit_length() - x.denominator.bit_length()).bit_length()
    return _enclose(gmpy2.log, x, precision, magnitude)


@typechecked
def cert_exp(x: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Enclose exp(x) for rational x."""
    x = as_rational(x)
    precision = as_rational(precision)
    if x == 0:
        return CertReal.exact(1)
    magnitude = 2 * math.ceil(x) if x > 0 else 0
    return _enclose(gmpy2.exp, x, precision, magnitude)
# endregion


# region comparison
@typechecked
def cert_cmp(a: CertReal, b: CertReal) -> Comparison:
    """Compare two enclosures.

    LT/GT are returned only for disjoint enclosures and EQ only for two exact,
    equal values. Anything else is INCONCLUSIVE and asks for refinement.

    Examples:
        >>> cert_cmp(CertReal.exact(1), CertReal(Fraction(1), Fraction(1, 10)))
        <Comparison.INCONCLUSIVE: 'INCONCLUSIVE'>
    """
    if a.is_exact and b.is_exact and a.midpoint == b.midpoint:
        return Comparison.EQ
    if a.upper < b.lower:
        return Comparison.LT
    if b.upper < a.lower:
        return Comparison.GT
    return Comparison.INCONCLUSIVE


@typechecked
def refine_compare(
    left: Callable[[Fraction], CertReal],
    right: Callable[[Fraction], CertReal],
    precision: Scalar = DEFAULT_PRECISION,
    cap: Scalar = PRECISION_CAP,
) -> Tuple[Comparison, CertReal, CertReal, int]:
    """Compare two lazily evaluated reals, squaring the precision on INCONCLUSIVE.

    The precision goes 2^-64, 2^-128, 2^-256, 2^-512 with the defaults; once the
    cap is passed the comparison stays INCONCLUSIVE and the caller reports it.

    Args:
        left (Callable[[Fraction], CertReal]): Evaluates the left side at a precision.
        right (Callable[[Fraction], CertReal]): Evaluates the right side at a precision.
        precision (Fraction | int): Starting precision.
        cap (Fraction | int): Finest precision allowed.

    Returns:
        tuple: (comparison, left enclosure, right enclosure, number of refinements).
    """
    precision = as_rational(precision)
    cap = as_rational(cap)
    refinements = 0
    while True:
        a = left(precision)
        b = right(precision)
        outcome = cert_cmp(a, b)
        if outcome is not Comparison.INCONCLUSIVE or precision <= cap:
            return outcome, a, b, refinements
        precision = max(precision * precision, cap)
        refinements += 1
# endregion
