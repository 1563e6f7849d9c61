import operator
import random
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

from typeguard import typechecked

from .l1space import FreeWord, parse_word
from .numerics import DEFAULT_PRECISION, CertReal, Scalar, as_rational, cert_sqrt, format_rational, random_rational
from .reports import Report, Verdict

# region subshift points
class XTag(str, Enum):
    MARKER = "MARKER"
    CONST = "CONST"


@dataclass(frozen=True)
class XPoint:
    """A point of the countable subshift X of {-2, -1, 0, 1, 2}^Z.

    MARKER(k, n) is the sequence with 0 at n, k after n and -k before n;
    CONST(v) is the constant sequence v.
    """

    tag: XTag
    symbol: int
    offset: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tag", XTag(self.tag))
        if self.tag is XTag.MARKER and self.symbol not in (1, 2):
            raise ValueError(f"Marker kind must be 1 or 2, got {self.symbol}.")
        if self.tag is XTag.CONST:
            if self.symbol not in (-2, -1, 1, 2):
                raise ValueError(f"Constant value must be in {{-2, -1, 1, 2}}, got {self.symbol}.")
            object.__setattr__(self, "offset", 0)

    @classmethod
    def marker(cls, kind: int, offset: int) -> "XPoint":
        return cls(XTag.MARKER, kind, offset)

    @classmethod
    def const(cls, value: int) -> "XPoint":
        return cls(XTag.CONST, value)

    def __str__(self) -> str:
        if self.tag is XTag.MARKER:
            return f"MARKER({self.symbol},{self.offset})"
        return f"CONST({self.symbol})"

    def to_dict(self) -> str:
        return str(self)


CONSTANTS = tuple(XPoint.const(v) for v in (-2, -1, 1, 2))


def window_points(window: int) -> List[XPoint]:
    """Constants and all markers with |offset| <= window."""
    return list(CONSTANTS) + [
        XPoint.marker(k, n) for k in (1, 2) for n in range(-window, window + 1)
    ]


@typechecked
def x_eval(x: XPoint, k: int) -> int:
    """The symbol x(k).

    Examples:
        >>> x_eval(XPoint.marker(1, 0), -2)
        -1
    """
    if x.tag is XTag.CONST:
        return x.symbol
    if k == x.offset:
        return 0
    return x.symbol if k > x.offset else -x.symbol


@typechecked
def shift(x: XPoint, power: int = 1) -> XPoint:
    """σ^power with σ(x)(n) = x(n - 1): markers move right by `power`."""
    if x.tag is XTag.CONST:
        return x
    return XPoint.marker(x.symbol, x.offset + power)


@typechecked
def swap_map(x: XPoint) -> XPoint:
    """Homeomorphism of X exchanging the isolated points MARKER(1,0) and MARKER(2,0)."""
    if x.tag is XTag.MARKER and x.offset == 0:
        return XPoint.marker(3 - x.symbol, 0)
    return x
# endregion


# region clopen partition
CLASSES = ("A", "B", "C", "D", "E")

Partition = Dict[str, FrozenSet[Tuple[int, int]]]

# classes are determined by the pair (x(0), x(1))
PAPER_PARTITION: Partition = {
    "A": frozenset({(1, 1), (2, 2)}),
    "B": frozenset({(0, 1)}),
    "C": frozenset({(0, 2)}),
    "D": frozenset({(-1, 0), (-1, -1)}),
    "E": frozenset({(-2, 0), (-2, -2)}),
}


def mutated_partition() -> Partition:
    """The partition with the definitions of D and E exchanged."""
    mutated = dict(PAPER_PARTITION)
    mutated["D"], mutated["E"] = PAPER_PARTITION["E"], PAPER_PARTITION["D"]
    return mutated


@typechecked
def classify(x: XPoint, partition: Optional[Partition] = None) -> str:
    """Class of x among A-E, read off (x(0), x(1)).

    Raises:
        RuntimeError: If the pattern belongs to no class (a broken partition).

    Examples:
        >>> classify(XPoint.marker(2, 1))
        'E'
    """
    partition = PAPER_PARTITION if partition is None else partition
    pattern = (x_eval(x, 0), x_eval(x, 1))
    for name in CLASSES:
        if pattern in partition[name]:
            return name
    raise RuntimeError(f"Pattern {pattern} of {x} is not covered by the partition.")


@dataclass(frozen=True)
class PartFn:
    """Function on X constant on each partition class."""

    values: Dict[str, Fraction]

    def __post_init__(self):
        missing = set(CLASSES) - set(self.values)
        extra = set(self.values) - set(CLASSES)
        if missing or extra:
            raise ValueError(f"PartFn must be total on {CLASSES}; missing {sorted(missing)}, extra {sorted(extra)}.")
        object.__setattr__(self, "values", {k: as_rational(self.values[k]) for k in CLASSES})

    @classmethod
    def from_terms(cls, **coefficients: Scalar) -> "PartFn":
        """Linear combination of class indicators, e.g. from_terms(A=Fraction(1, 2), B=1)."""
        return cls({name: as_rational(coefficients.get(name, 0)) for name in CLASSES})

    def to_dict(self) -> dict:
        return {k: format_rational(v) for k, v in self.values.items()}


@typechecked
def eval_partition_fn(F: PartFn, x: XPoint, partition: Optional[Partition] = None) -> Fraction:
    """Value of F on the class of x."""
    return F.values[classify(x, partition)]


def obstruction_functions() -> Tuple[PartFn, PartFn]:
    """f = ½χ_A + χ_B + χ_D and f' = ½χ_A + χ_C + χ_D."""
    half = Fraction(1, 2)
    return PartFn.from_terms(A=half, B=1, D=1), PartFn.from_terms(A=half, C=1, D=1)
# endregion


# region functions pulled back along words
def act_point(w: FreeWord, x: XPoint) -> XPoint:
    """w·x with a = σ, A = σ⁻¹ and b = B = the swap involution."""
    for letter in reversed(w.letters):
        if letter == "a":
            x = shift(x, 1)
        elif letter == "A":
            x = shift(x, -1)
        elif letter in ("b", "B"):
            x = swap_map(x)
        else:
            raise ValueError(f"Letter '{letter}' does not act on the subshift.")
    return x


@dataclass(frozen=True)
class XFn:
    """Finite sum Σ c·(P∘w⁻¹) of translated partition functions."""

    terms: Tuple[Tuple[Fraction, PartFn, FreeWord], ...]

    @classmethod
    def of(cls, F: PartFn) -> "XFn":
        return cls(((Fraction(1), F, FreeWord()),))

    def value(self, x: XPoint) -> Fraction:
        return sum(
            (c * eval_partition_fn(P, act_point(w.inverse(), x)) for c, P, w in self.terms),
            Fraction(0),
        )

    def act(self, g: FreeWord) -> "XFn":
        """α(g)F = F∘g⁻¹."""
        return XFn(tuple((c, P, g * w) for c, P, w in self.terms))

    def __add__(self, other: "XFn") -> "XFn":
        return XFn(self.terms + other.terms)

    def __mul__(self, scalar) -> "XFn":
        c = as_rational(scalar)
        return XFn(tuple((c * a, P, w) for a, P, w in self.terms))

    __rmul__ = __mul__

    @property
    def reach(self) -> int:
        return max((len(w) for _, _, w in self.terms), default=0)

    def to_dict(self) -> list:
        return [[format_rational(c), P.to_dict(), str(w)] for c, P, w in self.terms]


def xfn_equal(F: XFn, G: XFn) -> bool:
    """Exact equality on all of X.

    A word of length L moves a marker by at most L, so beyond offset L + 3 both
    functions are constant along each marker kind; the window and the constants
    decide equality.
    """
    window = max(F.reach, G.reach) + 3
    return all(F.value(x) == G.value(x) for x in window_points(window))
# endregion


# region cover identities
IntRange = Tuple[Optional[int], Optional[int]]

_OFFSET_RANGES: Tuple[Tuple[IntRange, int], ...] = (
    ((None, -1), -1),
    ((0, 0), 0),
    ((1, 1), 1),
    ((2, None), 2),
)


def _normalize(ranges: Iterable[IntRange]) -> Tuple[IntRange, ...]:
    lo_key = lambda r: float("-inf") if r[0] is None else r[0]
    out: List[IntRange] = []
    for lo, hi in sorted(ranges, key=lo_key):
        if out:
            plo, phi = out[-1]
            if phi is None or lo is None or lo <= phi + 1:
                new_hi = None if phi is None or hi is None else max(phi, hi)
                out[-1] = (plo, new_hi)
                continue
        out.append((lo, hi))
    return tuple(out)


def _contains(ranges: Tuple[IntRange, ...], n: int) -> bool:
    return any((lo is None or lo <= n) and (hi is None or n <= hi) for lo, hi in ranges)


def _remove(ranges: Tuple[IntRange, ...], n: int) -> Tuple[IntRange, ...]:
    out: List[IntRange] = []
    for lo, hi in ranges:
        if (lo is None or lo <= n) and (hi is None or n <= hi):
            if lo is None or lo <= n - 1:
                out.append((lo, n - 1))
            if hi is None or n + 1 <= hi:
                out.append((n + 1, hi))
        else:
            out.append((lo, hi))
    return _normalize(out)


@dataclass(frozen=True)
class SymbolicSet:
    """Subset of X given by marker offset ranges per kind and a set of constants.

    Ranges are inclusive; None stands for -∞ or +∞.
    """

    markers: Tuple[Tuple[IntRange, ...], Tuple[IntRange, ...]] = ((), ())
    constants: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "markers", tuple(_normalize(r) for r in self.markers))
        object.__setattr__(self, "constants", frozenset(self.constants))

    @classmethod
    def of_class(cls, name: str, partition: Optional[Partition] = None) -> "SymbolicSet":
        """The class as a symbolic set; (x(0), x(1)) is constant on each offset range."""
        markers = []
        for kind in (1, 2):
            markers.append(
                tuple(rng for rng, rep in _OFFSET_RANGES if classify(XPoint.marker(kind, rep), partition) == name)
            )
        constants = {p.symbol for p in CONSTANTS if classify(p, partition) == name}
        return cls(tuple(markers), frozenset(constants))

    def shifted(self, power: int) -> "SymbolicSet":
        moved = tuple(
            tuple((None if lo is None else lo + power, None if hi is None else hi + power) for lo, hi in ranges)
            for ranges in self.markers
        )
        return SymbolicSet(moved, self.constants)

    def swapped(self) -> "SymbolicSet":
        has = [_contains(self.markers[0], 0), _contains(self.markers[1], 0)]
        markers = [list(_remove(r, 0)) for r in self.markers]
        if has[1]:
            markers[0].append((0, 0))
        if has[0]:
            markers[1].append((0, 0))
        return SymbolicSet((tuple(markers[0]), tuple(markers[1])), self.constants)

    def __or__(self, other: "SymbolicSet") -> "SymbolicSet":
        return SymbolicSet(
            (self.markers[0] + other.markers[0], self.markers[1] + other.markers[1]),
            self.constants | other.constants,
        )

    def contains(self, x: XPoint) -> bool:
        if x.tag is XTag.CONST:
            return x.symbol in self.constants
        return _contains(self.markers[x.symbol - 1], x.offset)

    def to_dict(self) -> dict:
        return {
            "markers": [[list(r) for r in ranges] for ranges in self.markers],
            "constants": sorted(self.constants),
        }


def _image_identities() -> List[Tuple[str, str, Tuple[str, ...], Tuple[str, ...]]]:
    """(label, map, source classes, image classes) for every claimed image identity."""
    return [
        ("shift(A) = A∪B∪C", "shift", ("A",), ("A", "B", "C")),
        ("shift(B∪D) = D", "shift", ("B", "D"), ("D",)),
        ("shift(C∪E) = E", "shift", ("C", "E"), ("E",)),
        ("swap(A) = A", "swap", ("A",), ("A",)),
        ("swap(B) = C", "swap", ("B",), ("C",)),
        ("swap(C) = B", "swap", ("C",), ("B",)),
        ("swap(D) = D", "swap", ("D",), ("D",)),
        ("swap(E) = E", "swap", ("E",), ("E",)),
    ]


def _preimage(name: str, y: XPoint) -> XPoint:
    return shift(y, -1) if name == "shift" else swap_map(y)


# Offset cells on which the classes of x, σ⁻¹x and swap(x) are all constant.
_MIDPOINT_CELLS: Tuple[Tuple[IntRange, int], ...] = (
    ((None, -1), -1),
    ((0, 0), 0),
    ((1, 1), 1),
    ((2, 2), 2),
    ((3, None), 3),
)


def _record_midpoint(
    report: Report, f: PartFn, f_prime: PartFn, x: XPoint, partition: Partition, **where: Any
) -> int:
    """Record failures of f∘σ⁻¹ = (f + f')/2 and f∘swap = f' at x; return their count."""
    try:
        lhs = eval_partition_fn(f, shift(x, -1), partition)
        rhs = (eval_partition_fn(f, x, partition) + eval_partition_fn(f_prime, x, partition)) / 2
        swapped = eval_partition_fn(f, swap_map(x), partition) == eval_partition_fn(f_prime, x, partition)
    except RuntimeError:
        report.record(Verdict.FAIL, identity="midpoint", point=x, **where)
        return 1
    failures = 0
    if lhs != rhs:
        report.record(Verdict.FAIL, identity="f∘σ⁻¹ = (f + f')/2", point=x, lhs=lhs, rhs=rhs, **where)
        failures += 1
    if not swapped:
        report.record(Verdict.FAIL, identity="f∘swap = f'", point=x, **where)
        failures += 1
    return failures


@typechecked
def verify_cover_identities(
    window: int = 8, partition: Optional[Partition] = None, verbose: bool = False
) -> Report:
    """Verify the partition, image identities and midpoint identity on X.

    Every identity is checked exhaustively on the constants and the markers with
    |offset| <= window (y ∈ F(S) iff F⁻¹(y) ∈ S), and symbolically on offset ranges
    n <= -1, n = 0, n = 1, n >= 2, which covers all of X. The midpoint and swap
    identities are checked on the cells n <= -1, 0, 1, 2, n >= 3, where the classes of x,
    σ⁻¹x and swap(x) do not change. Failures are recorded
    as witnesses, never raised.

    Args:
        window (int): Half-width N >= 2 of the exhaustive window.
        partition (Partition, optional): Class definitions; defaults to the
            obstruction partition.
        verbose (bool): If True, print one line per identity.

    Returns:
        Report: PASS when every identity holds, FAIL with witness points otherwise.

    Raises:
        ValueError: If window < 2.
    """
    if window < 2:
        raise ValueError("window must be at least 2.")
    partition = PAPER_PARTITION if partition is None else partition
    report = Report(check="cover-identities", instance=f"subshift window={window}")
    points = window_points(window)

    for x in points:
        hits = [name for name in CLASSES if (x_eval(x, 0), x_eval(x, 1)) in partition[name]]
        if len(hits) != 1:
            report.record(Verdict.FAIL, identity="partition", method="exhaustive", point=x, classes=hits)
    empty = [name for name in CLASSES if not any(_safe_class(x, partition) == name for x in points)]
    report.record(
        Verdict.FAIL if empty else Verdict.PASS, identity="partition", method="exhaustive", empty_classes=empty
    )

    sets = {name: SymbolicSet.of_class(name, partition) for name in CLASSES}
    for label, mapping, sources, images in _image_identities():
        witness = next(
            (
                y
                for y in points
                if (_safe_class(_preimage(mapping, y), partition) in sources)
                != (_safe_class(y, partition) in images)
            ),
            None,
        )
        report.record(
            Verdict.FAIL if witness is not None else Verdict.PASS,
            identity=label,
            method="exhaustive",
            point=witness,
        )
        union_src = _union(sets[name] for name in sources)
        union_img = _union(sets[name] for name in images)
        moved = union_src.shifted(1) if mapping == "shift" else union_src.swapped()
        report.record(
            Verdict.PASS if moved == union_img else Verdict.FAIL,
            identity=label,
            method="symbolic",
            image=moved,
            expected=union_img,
        )
        if verbose:
            print(f"{'✅' if witness is None and moved == union_img else '❌'} {label}")

    f, f_prime = obstruction_functions()
    failures = 0
    for x in points:
        failures += _record_midpoint(report, f, f_prime, x, partition, method="exhaustive")
    for kind in (1, 2):
        for cell, rep in _MIDPOINT_CELLS:
            failures += _record_midpoint(
                report, f, f_prime, XPoint.marker(kind, rep), partition, method="symbolic", cell=cell
            )
    if not failures:
        report.record(Verdict.PASS, identity="midpoint", method="symbolic")
    if verbose:
        print(f"{'❌' if failures else '✅'} f∘σ⁻¹ = (f + f')/2, f∘swap = f'")
    report.notes.append(
        "Y = X × 2^N is handled through X: every function and map is pulled back from X and "
        "acts as the identity on the second factor, which only makes Y perfect."
    )
    return report


def _safe_class(x: XPoint, partition: Partition) -> Optional[str]:
    try:
        return classify(x, partition)
    except RuntimeError:
        return None


def _union(sets: Iterable[SymbolicSet]) -> SymbolicSet:
    out = SymbolicSet()
    for s in sets:
        out = out | s
    return out
# endregion


# region obstruction certificates
def _default_midpoint(x: Any, y: Any) -> Any:
    return (x + y) * Fraction(1, 2)


@dataclass(frozen=True)
class ObstructionCertificate:
    """Data (x, y, g, h) with g·x = y and h·x = (x + y)/2, bound to an action.

    `act(word, vector)` realizes the action; `equal` and `midpoint` default to
    `==` and (x + y)/2 for vectors with exact arithmetic.
    """

    space: str
    x: Any
    y: Any
    g_word: FreeWord
    h_word: FreeWord
    act: Callable[[FreeWord, Any], Any] = field(compare=False)
    equal: Callable[[Any, Any], bool] = field(default=operator.eq, compare=False)
    midpoint: Callable[[Any, Any], Any] = field(default=_default_midpoint, compare=False)

    def to_dict(self) -> dict:
        return {
            "space": self.space,
            "x": self.x,
            "y": self.y,
            "g_word": str(self.g_word),
            "h_word": str(self.h_word),
        }


@typechecked
def subshift_certificate(shift_power: int = 1) -> ObstructionCertificate:
    """Certificate x = f, y = f', g = swap ("b"), h = shift ("a") on C(X).

    Args:
        shift_power (int): Power of the shift used as h; only 1 gives a valid
            certificate.
    """
    f, f_prime = obstruction_functions()
    h_word = parse_word("a" * shift_power) if shift_power >= 0 else parse_word("A" * -shift_power)
    return ObstructionCertificate(
        space="C(X)",
        x=XFn.of(f),
        y=XFn.of(f_prime),
        g_word=parse_word("b"),
        h_word=h_word,
        act=lambda w, F: F.act(w),
        equal=xfn_equal,
    )
# endregion


# region binary odometer
@dataclass(frozen=True)
class CylFn:
    """Function on 2^N depending on the first `depth` coordinates.

    Entry j of `table` is the value on the cylinder x_1 ... x_m with
    j = Σ x_i 2^(i-1). The depth is reduced while the function ignores x_m.
    """

    depth: int
    table: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative.")
        table = tuple(as_rational(v) for v in self.table)
        if len(table) != 2**self.depth:
            raise ValueError(f"Depth {self.depth} needs {2**self.depth} values, got {len(table)}.")
        depth = self.depth
        while depth > 0:
            half = 2 ** (depth - 1)
            if table[:half] != table[half:]:
                break
            table = table[:half]
            depth -= 1
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "table", table)

    @classmethod
    def constant(cls, value: Scalar) -> "CylFn":
        return cls(0, (value,))

    @classmethod
    def cylinder(cls, bits: Tuple[int, ...], value: Scalar = 1) -> "CylFn":
        """`value` times the indicator of the cylinder [x_1 ... x_m = bits]."""
        index = sum(b << i for i, b in enumerate(bits))
        table = [Fraction(0)] * (2 ** len(bits))
        table[index] = as_rational(value)
        return cls(len(bits), tuple(table))

    def lifted(self, depth: int) -> Tuple[Fraction, ...]:
        """Table of the same function at a larger depth."""
        if depth < self.depth:
            raise ValueError("Cannot lift to a smaller depth.")
        return self.table * (2 ** (depth - self.depth))

    def __add__(self, other: "CylFn") -> "CylFn":
        depth = max(self.depth, other.depth)
        return CylFn(depth, tuple(a + b for a, b in zip(self.lifted(depth), other.lifted(depth))))

    def __rmul__(self, scalar) -> "CylFn":
        c = as_rational(scalar)
        return CylFn(self.depth, tuple(c * v for v in self.table))

    def sup(self) -> Fraction:
        return max(abs(v) for v in self.table)

    def l2_squared(self) -> Fraction:
        """‖F‖₂² for the coin-flip measure."""
        return sum((v * v for v in self.table), Fraction(0)) / 2**self.depth

    def to_dict(self) -> dict:
        return {"depth": self.depth, "table": [format_rational(v) for v in self.table]}


@typechecked
def odometer_act(F: CylFn) -> CylFn:
    """F∘T⁻¹ for the add-one-with-carry map T.

    Examples:
        >>> odometer_act(CylFn.cylinder((0,))) == CylFn.cylinder((1,))
        True
    """
    size = len(F.table)
    return CylFn(F.depth, tuple(F.table[(j - 1) % size] for j in range(size)))


@typechecked
def odometer_sc_parts(F: CylFn) -> Tuple[Fraction, Fraction]:
    """Exact (sup, L2 squared) data of `odometer_sc_norm`."""
    return F.sup(), F.l2_squared()


@typechecked
def odometer_sc_norm(F: CylFn, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """‖F‖_∞ + ‖F‖_{L2(μ)} with μ the coin-flip measure.

    Examples:
        >>> odometer_sc_norm(CylFn.constant(1))
        CertReal(midpoint=Fraction(2, 1), radius=Fraction(0, 1))
    """
    sup, sq = odometer_sc_parts(F)
    return CertReal.exact(sup) + cert_sqrt(sq, precision)


def random_cylfn(rng: random.Random, max_depth: int = 10) -> CylFn:
    depth = rng.randint(0, max_depth)
    return CylFn(depth, tuple(random_rational(rng) for _ in range(2**depth)))
# endregion
