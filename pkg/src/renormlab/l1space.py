import json
import random
import re
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from typeguard import typechecked

from .numerics import (
    DEFAULT_PRECISION,
    CertReal,
    Scalar,
    as_rational,
    cert_pow,
    cert_pow_real,
    format_rational,
    random_rational,
)


class SearchBudgetError(RuntimeError):
    """Raised when a certificate search runs out of candidates."""


# region step functions
@dataclass(frozen=True)
class StepFn:
    """Rational step function on [0, 1): value `values[i]` on [b_i, b_{i+1}).

    Adjacent pieces with equal values are merged, so equal functions (up to null
    sets) have equal representations.
    """

    breakpoints: Tuple[Fraction, ...] = (Fraction(0), Fraction(1))
    values: Tuple[Fraction, ...] = (Fraction(0),)

    def __post_init__(self):
        bps = tuple(as_rational(b) for b in self.breakpoints)
        vals = tuple(as_rational(v) for v in self.values)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise ValueError("Breakpoints must start at 0 and end at 1.")
        if len(vals) != len(bps) - 1:
            raise ValueError(f"Expected {len(bps) - 1} values, got {len(vals)}.")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError("Breakpoints must be strictly increasing.")
        merged_b = [bps[0]]
        merged_v: List[Fraction] = []
        for end, v in zip(bps[1:], vals):
            if merged_v and merged_v[-1] == v:
                merged_b[-1] = end
            else:
                merged_v.append(v)
                merged_b.append(end)
        object.__setattr__(self, "breakpoints", tuple(merged_b))
        object.__setattr__(self, "values", tuple(merged_v))

    @classmethod
    def constant(cls, value: Scalar) -> "StepFn":
        return cls((0, 1), (value,))

    @classmethod
    def indicator(cls, start: Scalar, end: Scalar, value: Scalar = 1) -> "StepFn":
        """`value` times the indicator of [start, end)."""
        return cls.from_pieces([(start, end, value)])

    @classmethod
    def from_pieces(cls, pieces: Iterable[Tuple[Scalar, Scalar, Scalar]]) -> "StepFn":
        """Assemble a step function from disjoint pieces (start, end, value), zero elsewhere.

        Raises:
            ValueError: If pieces overlap or leave [0, 1).
        """
        ordered = sorted(
            (as_rational(a), as_rational(b), as_rational(v)) for a, b, v in pieces if as_rational(a) < as_rational(b)
        )
        bps = [Fraction(0)]
        vals: List[Fraction] = []
        for start, end, value in ordered:
            if start < bps[-1] or start < 0 or end > 1:
                raise ValueError(f"Piece [{start}, {end}) overlaps another piece or leaves [0, 1).")
            if start > bps[-1]:
                vals.append(Fraction(0))
                bps.append(start)
            vals.append(value)
            bps.append(end)
        if bps[-1] < 1:
            vals.append(Fraction(0))
            bps.append(Fraction(1))
        return cls(tuple(bps), tuple(vals))

    @property
    def pieces(self) -> Tuple[Tuple[Fraction, Fraction, Fraction], ...]:
        return tuple(zip(self.breakpoints, self.breakpoints[1:], self.values))

    @property
    def support_end(self) -> Fraction:
        """Smallest b such that the function vanishes on [b, 1)."""
        if self.values[-1] != 0:
            return Fraction(1)
        return self.breakpoints[-2]

    def value_at(self, t: Scalar) -> Fraction:
        t = as_rational(t)
        if not 0 <= t < 1:
            raise ValueError(f"Point {t} is outside [0, 1).")
        return self.values[bisect_right(self.breakpoints, t) - 1]

    def _combine(self, other: "StepFn", op) -> "StepFn":
        bps = sorted(set(self.breakpoints) | set(other.breakpoints))
        vals = [op(self.value_at(a), other.value_at(a)) for a in bps[:-1]]
        return StepFn(tuple(bps), tuple(vals))

    def __add__(self, other: "StepFn") -> "StepFn":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "StepFn") -> "StepFn":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "StepFn":
        return StepFn(self.breakpoints, tuple(-v for v in self.values))

    def __mul__(self, other) -> "StepFn":
        if isinstance(other, StepFn):
            return self._combine(other, lambda a, b: a * b)
        c = as_rational(other)
        return StepFn(self.breakpoints, tuple(c * v for v in self.values))

    __rmul__ = __mul__

    def integral(self, start: Scalar = 0, end: Scalar = 1, absolute: bool = False) -> Fraction:
        """Exact integral of f (or |f|) over [start, end)."""
        start, end = as_rational(start), as_rational(end)
        total = Fraction(0)
        for a, b, v in self.pieces:
            overlap = min(b, end) - max(a, start)
            if overlap > 0:
                total += (abs(v) if absolute else v) * overlap
        return total

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    def to_dict(self) -> dict:
        return {
            "breakpoints": [format_rational(b) for b in self.breakpoints],
            "values": [format_rational(v) for v in self.values],
        }


@typechecked
def l1_norm(f: StepFn) -> Fraction:
    """Exact L1 norm Σ|v_i|·(b_i - b_{i-1}).

    Examples:
        >>> l1_norm(StepFn.indicator(0, Fraction(1, 3)))
        Fraction(1, 3)
    """
    return f.integral(absolute=True)


@typechecked
def step_to_json(f: StepFn) -> str:
    """Serialize a step function with rationals as "p/q" strings."""
    return json.dumps(f.to_dict(), sort_keys=True)


@typechecked
def step_from_json(payload: Union[str, Dict[str, Any]]) -> StepFn:
    """Parse a step function from its JSON object form.

    Args:
        payload (str | dict): `{"breakpoints": ["0", "1/3", "1"], "values": ["1", "0"]}`
            either as text or already decoded.

    Returns:
        StepFn: The canonical step function.

    Raises:
        ValueError: If the JSON is malformed or fields are missing.
    """
    if isinstance(payload, str):
        try:
            payload = json.loads(payload)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid step function JSON: {e}") from e
    if not isinstance(payload, dict):
        raise ValueError("Step function JSON must be an object.")
    missing = {"breakpoints", "values"} - set(payload)
    if missing:
        raise ValueError(f"Step function JSON is missing fields: {sorted(missing)}")
    return StepFn(
        tuple(as_rational(str(b)) for b in payload["breakpoints"]),
        tuple(as_rational(str(v)) for v in payload["values"]),
    )


def random_step(rng: random.Random, max_pieces: int = 6, max_denominator: int = 64) -> StepFn:
    """Sample a step function with rational breakpoints and values in [-8, 8]."""
    count = rng.randint(1, max_pieces)
    cuts = set()
    while len(cuts) < count - 1:
        den = rng.randint(2, max_denominator)
        cuts.add(Fraction(rng.randint(1, den - 1), den))
    bps = (Fraction(0),) + tuple(sorted(cuts)) + (Fraction(1),)
    return StepFn(bps, tuple(random_rational(rng) for _ in range(count)))
# endregion


# region interval maps and Banach-Lamperti isometries
@dataclass(frozen=True)
class AffinePiece:
    """Affine bijection of [src_start, src_end) onto [tgt_start, tgt_end).

    Orientation -1 reverses the interval.
    """

    src_start: Fraction
    src_end: Fraction
    tgt_start: Fraction
    tgt_end: Fraction
    orientation: int = 1

    def __post_init__(self):
        for name in ("src_start", "src_end", "tgt_start", "tgt_end"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        if self.orientation not in (1, -1):
            raise ValueError("Orientation must be +1 or -1.")
        if self.src_start >= self.src_end or self.tgt_start >= self.tgt_end:
            raise ValueError("Affine pieces must have positive length.")

    @property
    def slope(self) -> Fraction:
        return (self.tgt_end - self.tgt_start) / (self.src_end - self.src_start)

    @property
    def rn_derivative(self) -> Fraction:
        """Density of the pushed-forward Lebesgue measure on the target piece."""
        return 1 / self.slope

    def forward(self, t: Fraction) -> Fraction:
        if self.orientation == 1:
            return self.tgt_start + (t - self.src_start) * self.slope
        return self.tgt_end - (t - self.src_start) * self.slope

    def backward(self, u: Fraction) -> Fraction:
        if self.orientation == 1:
            return self.src_start + (u - self.tgt_start) / self.slope
        return self.src_start + (self.tgt_end - u) / self.slope

    def inverse(self) -> "AffinePiece":
        return AffinePiece(self.tgt_start, self.tgt_end, self.src_start, self.src_end, self.orientation)


def _check_partition(intervals: List[Tuple[Fraction, Fraction]], label: str) -> None:
    cursor = Fraction(0)
    for start, end in sorted(intervals):
        if start != cursor:
            raise ValueError(f"{label} intervals do not partition [0, 1): gap or overlap at {start}.")
        cursor = end
    if cursor != 1:
        raise ValueError(f"{label} intervals do not cover [0, 1).")


@dataclass(frozen=True)
class IntervalMap:
    """Piecewise-affine bijection of [0, 1) mod null sets.

    Sources and targets must both partition [0, 1). Contiguous pieces with the same
    slope and orientation are merged, so equal maps have equal representations.
    """

    pieces: Tuple[AffinePiece, ...]

    def __post_init__(self):
        pieces = sorted(
            (p if isinstance(p, AffinePiece) else AffinePiece(*p) for p in self.pieces),
            key=lambda p: p.src_start,
        )
        _check_partition([(p.src_start, p.src_end) for p in pieces], "Source")
        _check_partition([(p.tgt_start, p.tgt_end) for p in pieces], "Target")
        merged: List[AffinePiece] = []
        for p in pieces:
            if merged:
                q = merged[-1]
                contiguous = (
                    q.tgt_end == p.tgt_start if p.orientation == 1 else q.tgt_start == p.tgt_end
                )
                if q.orientation == p.orientation and q.slope == p.slope and contiguous:
                    merged[-1] = AffinePiece(
                        q.src_start,
                        p.src_end,
                        min(q.tgt_start, p.tgt_start),
                        max(q.tgt_end, p.tgt_end),
                        p.orientation,
                    )
                    continue
            merged.append(p)
        object.__setattr__(self, "pieces", tuple(merged))

    @classmethod
    def identity(cls) -> "IntervalMap":
        return cls((AffinePiece(0, 1, 0, 1),))

    def __call__(self, t: Scalar) -> Fraction:
        t = as_rational(t)
        for p in self.pieces:
            if p.src_start <= t < p.src_end:
                return p.forward(t)
        if t == 1:
            last = self.pieces[-1]
            return last.forward(t)
        raise ValueError(f"Point {t} is outside [0, 1].")

    def inverse(self) -> "IntervalMap":
        return IntervalMap(tuple(p.inverse() for p in self.pieces))

    def compose(self, other: "IntervalMap") -> "IntervalMap":
        """Return self∘other (apply `other` first)."""
        pieces = []
        for p in other.pieces:
            for q in self.pieces:
                lo = max(p.tgt_start, q.src_start)
                hi = min(p.tgt_end, q.src_end)
                if lo >= hi:
                    continue
                s1, s2 = sorted((p.backward(lo), p.backward(hi)))
                t1, t2 = sorted((q.forward(lo), q.forward(hi)))
                pieces.append(AffinePiece(s1, s2, t1, t2, p.orientation * q.orientation))
        return IntervalMap(tuple(pieces))

    def push(self, f: StepFn, weighted: bool = True) -> StepFn:
        """Transport f along the map: f∘φ⁻¹, times the RN derivative when `weighted`."""
        out = []
        for p in self.pieces:
            factor = p.rn_derivative if weighted else Fraction(1)
            for a, b, v in f.pieces:
                lo, hi = max(a, p.src_start), min(b, p.src_end)
                if lo >= hi:
                    continue
                u1, u2 = sorted((p.forward(lo), p.forward(hi)))
                out.append((u1, u2, v * factor))
        return StepFn.from_pieces(out)

    def rn_derivative(self) -> StepFn:
        """The Radon-Nikodym derivative dφ_*λ/dλ as a step function."""
        return StepFn.from_pieces([(p.tgt_start, p.tgt_end, p.rn_derivative) for p in self.pieces])

    def to_dict(self) -> dict:
        return {
            "pieces": [
                [format_rational(p.src_start), format_rational(p.src_end),
                 format_rational(p.tgt_start), format_rational(p.tgt_end), p.orientation]
                for p in self.pieces
            ]
        }


@dataclass(frozen=True)
class L1Iso:
    """Banach-Lamperti isometry f -> sign · (dφ_*λ/dλ) · f∘φ⁻¹ of L1[0, 1]."""

    map: IntervalMap = field(default_factory=IntervalMap.identity)
    sign: StepFn = field(default_factory=lambda: StepFn.constant(1))

    def __post_init__(self):
        if any(v not in (1, -1) for v in self.sign.values):
            raise ValueError("Sign function must take values in {-1, +1}.")

    @classmethod
    def identity(cls) -> "L1Iso":
        return cls()

    @property
    def is_lattice(self) -> bool:
        return self.sign == StepFn.constant(1)

    def to_dict(self) -> dict:
        return {"map": self.map.to_dict(), "sign": self.sign.to_dict()}


@typechecked
def apply_iso(T: L1Iso, f: StepFn) -> StepFn:
    """Apply a Banach-Lamperti isometry to a step function.

    Examples:
        >>> T1, T2 = f2_counterexample()
        >>> apply_iso(T2, StepFn.indicator(0, Fraction(1, 3))) == StepFn.indicator(Fraction(1, 3), Fraction(2, 3))
        True
    """
    return T.sign * T.map.push(f, weighted=True)


@typechecked
def compose_iso(S: L1Iso, T: L1Iso) -> L1Iso:
    """Return S∘T. The sign of T is carried along the map of S."""
    return L1Iso(S.map.compose(T.map), S.sign * S.map.push(T.sign, weighted=False))


@typechecked
def invert_iso(T: L1Iso) -> L1Iso:
    """Two-sided inverse: map φ⁻¹ with sign σ∘φ."""
    inverse_map = T.map.inverse()
    return L1Iso(inverse_map, inverse_map.push(T.sign, weighted=False))


@typechecked
def f2_counterexample() -> Tuple[L1Iso, L1Iso]:
    """The two lattice isometries generating the free-group obstruction on L1[0, 1].

    T1 is induced by φ, which doubles [0, 1/3) onto [0, 2/3) and compresses
    [1/3, 1) onto [2/3, 1); its weight 1/2 on [0, 2/3) and 2 on [2/3, 1) is the RN
    derivative of φ. T2 is induced by the rotation by 1/3.

    Returns:
        tuple[L1Iso, L1Iso]: (T1, T2).
    """
    third, two_thirds = Fraction(1, 3), Fraction(2, 3)
    phi = IntervalMap((AffinePiece(0, third, 0, two_thirds), AffinePiece(third, 1, two_thirds, 1)))
    psi = IntervalMap((AffinePiece(0, two_thirds, third, 1), AffinePiece(two_thirds, 1, 0, third)))
    return L1Iso(phi), L1Iso(psi)
# endregion


# region free words
_LETTER = re.compile(r"([a-zA-Z])(\^-1|⁻¹)?")


@dataclass(frozen=True)
class FreeWord:
    """Reduced word over free generators: lowercase letters, uppercase for inverses."""

    letters: Tuple[str, ...] = ()

    def __post_init__(self):
        reduced: List[str] = []
        for letter in self.letters:
            if len(letter) != 1 or not letter.isalpha():
                raise ValueError(f"Invalid letter '{letter}' in free word.")
            if reduced and reduced[-1] == letter.swapcase():
                reduced.pop()
            else:
                reduced.append(letter)
        object.__setattr__(self, "letters", tuple(reduced))

    @classmethod
    def identity(cls) -> "FreeWord":
        return cls()

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple(letter.swapcase() for letter in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return " ".join(self.letters) if self.letters else "e"

    def to_dict(self) -> str:
        return str(self)


@typechecked
def parse_word(text: str) -> FreeWord:
    """Parse "a b A", "a b a^-1" or "aba⁻¹" into a reduced word ("e" or "" is the identity).

    Raises:
        ValueError: If the text contains anything but letters and inverse marks.
    """
    compact = "".join(text.split())
    if compact in ("", "e"):
        return FreeWord()
    letters = []
    pos = 0
    while pos < len(compact):
        match = _LETTER.match(compact, pos)
        if match is None:
            raise ValueError(f"Cannot parse free word '{text}' at position {pos}.")
        letter = match.group(1)
        letters.append(letter.swapcase() if match.group(2) else letter)
        pos = match.end()
    return FreeWord(tuple(letters))


def random_word(rng: random.Random, max_length: int = 8, alphabet: str = "ab") -> FreeWord:
    """Sample a reduced word of length at most `max_length`."""
    target = rng.randint(0, max_length)
    choices = list(alphabet) + [c.upper() for c in alphabet]
    letters: List[str] = []
    while len(letters) < target:
        letter = rng.choice(choices)
        if letters and letters[-1] == letter.swapcase():
            continue
        letters.append(letter)
    return FreeWord(tuple(letters))


@typechecked
def eval_word(w: FreeWord, a: L1Iso, b: L1Iso) -> L1Iso:
    """Evaluate a word in the generators a, b as a composition of isometries.

    eval_word(u*v) == compose_iso(eval_word(u), eval_word(v)).
    """
    table = {"a": a, "b": b, "A": invert_iso(a), "B": invert_iso(b)}
    result = L1Iso.identity()
    for letter in w.letters:
        if letter not in table:
            raise ValueError(f"Letter '{letter}' is not a generator of the free group on a, b.")
        result = compose_iso(result, table[letter])
    return result
# endregion


# region fundamental domain actions
class GroupKind(str, Enum):
    INT = "INT"
    CYCLIC = "CYCLIC"
    FREE = "FREE"


GroupElement = Union[int, FreeWord]

_GROUP_SPEC = re.compile(r"^\s*(INT|Z|CYCLIC|FREE)\s*(?:\(\s*(\d+)\s*\))?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class FDAction:
    """Free action of a countable group on [0, 1) by lattice isometries.

    The k-th group element g_k owns the dyadic interval I_k = [1 - 2^-k, 1 - 2^-(k+1));
    for a cyclic group the last element takes the remaining [1 - 2^-(n-1), 1). Each
    g maps I_h affinely onto I_{gh}, so A = I_e is a fundamental domain.
    """

    kind: GroupKind
    parameter: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GroupKind(self.kind))
        if self.kind is GroupKind.INT and self.parameter is not None:
            raise ValueError("INT takes no parameter.")
        if self.kind is GroupKind.CYCLIC and (self.parameter is None or self.parameter < 1):
            raise ValueError("CYCLIC(n) requires n >= 1.")
        if self.kind is GroupKind.FREE and (self.parameter is None or not 1 <= self.parameter <= 26):
            raise ValueError("FREE(k) requires 1 <= k <= 26.")

    @property
    def name(self) -> str:
        return self.kind.value if self.parameter is None else f"{self.kind.value}({self.parameter})"

    @property
    def alphabet(self) -> str:
        return "abcdefghijklmnopqrstuvwxyz"[: self.parameter or 0]

    @property
    def size(self) -> Optional[int]:
        """Group order, or None for infinite groups."""
        return self.parameter if self.kind is GroupKind.CYCLIC else None

    @property
    def identity(self) -> GroupElement:
        return FreeWord() if self.kind is GroupKind.FREE else 0

    @property
    def generators(self) -> Tuple[GroupElement, ...]:
        if self.kind is GroupKind.FREE:
            return tuple(FreeWord((c,)) for c in self.alphabet)
        return (1 % self.parameter,) if self.kind is GroupKind.CYCLIC else (1,)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        if self.kind is GroupKind.FREE:
            return g * h
        if self.kind is GroupKind.CYCLIC:
            return (g + h) % self.parameter
        return g + h

    def inverse(self, g: GroupElement) -> GroupElement:
        if self.kind is GroupKind.FREE:
            return g.inverse()
        if self.kind is GroupKind.CYCLIC:
            return (-g) % self.parameter
        return -g

    def _letter_order(self) -> List[str]:
        return [x for c in self.alphabet for x in (c, c.upper())]

    def element(self, k: int) -> GroupElement:
        """The k-th element of the fixed enumeration (g_0 = e)."""
        if k < 0:
            raise ValueError("Enumeration indices are non-negative.")
        if self.kind is GroupKind.INT:
            return (k + 1) // 2 if k % 2 else -(k // 2)
        if self.kind is GroupKind.CYCLIC:
            if k >= self.parameter:
                raise ValueError(f"CYCLIC({self.parameter}) has no element with index {k}.")
            return k
        # shortlex order over reduced words
        order = self._letter_order()
        rank = 2 * self.parameter
        length, count = 0, 1
        while k >= count:
            k -= count
            length += 1
            count = rank * (rank - 1) ** (length - 1)
        letters: List[str] = []
        for pos in range(length):
            remaining = (rank - 1) ** (length - pos - 1)
            allowed = order if not letters else [c for c in order if c != letters[-1].swapcase()]
            letters.append(allowed[k // remaining])
            k %= remaining
        return FreeWord(tuple(letters))

    def index(self, g: GroupElement) -> int:
        """Inverse of `element`."""
        if self.kind is GroupKind.INT:
            return 2 * g - 1 if g > 0 else -2 * g
        if self.kind is GroupKind.CYCLIC:
            return g % self.parameter
        order = self._letter_order()
        rank = 2 * self.parameter
        length = len(g)
        k = 1 + sum(rank * (rank - 1) ** (n - 1) for n in range(1, length))
        if length == 0:
            return 0
        prev = None
        for pos, letter in enumerate(g.letters):
            if letter not in order:
                raise ValueError(f"Letter '{letter}' is not a generator of {self.name}.")
            allowed = order if prev is None else [c for c in order if c != prev.swapcase()]
            k += allowed.index(letter) * (rank - 1) ** (length - pos - 1)
            prev = letter
        return k

    def interval(self, g: GroupElement) -> Tuple[Fraction, Fraction]:
        """The interval I_g."""
        k = self.index(g)
        start = 1 - Fraction(1, 2**k)
        if self.kind is GroupKind.CYCLIC and k == self.parameter - 1:
            return start, Fraction(1)
        return start, 1 - Fraction(1, 2 ** (k + 1))

    def piece(self, g: GroupElement, h: GroupElement) -> AffinePiece:
        """The affine map I_h -> I_{gh} realizing g on the translate hA."""
        s, t = self.interval(h)
        u, w = self.interval(self.multiply(g, h))
        return AffinePiece(s, t, u, w)

    def generator_map(self, g: GroupElement) -> IntervalMap:
        """Full interval map of g; only finite groups have finitely many pieces."""
        if self.size is None:
            raise ValueError(f"{self.name} is infinite; use `piece` on finitely many translates.")
        return IntervalMap(tuple(self.piece(g, self.element(k)) for k in range(self.size)))

    def elements(self, count: int) -> List[GroupElement]:
        """The first `count` elements of the enumeration (capped at the group order)."""
        if self.size is not None:
            count = min(count, self.size)
        return [self.element(k) for k in range(count)]

    def covering_elements(self, f: StepFn) -> List[GroupElement]:
        """Elements whose translate of A meets the support of f.

        Raises:
            ValueError: If the group is infinite and f does not vanish on a final tail.
        """
        end = f.support_end
        if self.size is not None:
            return self.elements(self.size)
        if end == 1:
            raise ValueError(f"Step function must vanish on a final dyadic tail to be translated by {self.name}.")
        out = []
        k = 0
        while 1 - Fraction(1, 2**k) < end:
            out.append(self.element(k))
            k += 1
        return out

    def to_dict(self) -> dict:
        return {"group": self.name}


@typechecked
def fundamental_domain_action(spec: str) -> FDAction:
    """Build the dyadic fundamental-domain action of INT, CYCLIC(n) or FREE(k).

    Args:
        spec (str): Group choice, e.g. "INT", "CYCLIC(5)", "FREE(2)".

    Returns:
        FDAction: The action, with A = I_e = [0, 1/2) (or [0, 1) for the trivial group).

    Raises:
        ValueError: If the group spec is not supported.

    Examples:
        >>> act = fundamental_domain_action("INT")
        >>> act.interval(1)
        (Fraction(1, 2), Fraction(3, 4))
    """
    match = _GROUP_SPEC.match(spec)
    if match is None:
        raise ValueError(f"Unsupported group spec '{spec}'. Expected INT, CYCLIC(n) or FREE(k).")
    kind, param = match.group(1).upper(), match.group(2)
    if kind in ("INT", "Z"):
        if param is not None:
            raise ValueError("INT takes no parameter.")
        return FDAction(GroupKind.INT)
    if param is None:
        raise ValueError(f"{kind} requires a parameter, e.g. {kind}(2).")
    return FDAction(GroupKind(kind), int(param))


@typechecked
def fd_apply(act: FDAction, g: GroupElement, f: StepFn) -> StepFn:
    """Lattice isometry of g on a step function supported in finitely many translates.

    Each restriction f|I_h is carried affinely onto I_{gh} and weighted by
    λ(I_h)/λ(I_{gh}).
    """
    out = []
    for h in act.covering_elements(f):
        p = act.piece(g, h)
        for a, b, v in f.pieces:
            lo, hi = max(a, p.src_start), min(b, p.src_end)
            if lo < hi and v != 0:
                out.append((p.forward(lo), p.forward(hi), v * p.rn_derivative))
    return StepFn.from_pieces(out)
# endregion


# region P_n operators
@dataclass(frozen=True)
class TruncVec:
    """Finitely many entries of a vector in l1(G × n) plus a bound on the omitted mass."""

    entries: Dict[Tuple[Any, int], Fraction]
    tail_bound: Fraction = Fraction(0)

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be non-negative.")

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.entries.values()), Fraction(0))

    def __rmul__(self, c: Scalar) -> "TruncVec":
        c = as_rational(c)
        return TruncVec({key: c * v for key, v in self.entries.items()}, abs(c) * self.tail_bound)

    def to_dict(self) -> dict:
        return {
            "entries": [[str(g), i, format_rational(v)] for (g, i), v in self.entries.items()],
            "tail_bound": format_rational(self.tail_bound),
        }


@typechecked
def pn_apply(act: FDAction, n: int, f: StepFn, trunc: Sequence[GroupElement]) -> TruncVec:
    """Integrate f over the n equal parts of each translate gA, g in `trunc`.

    Args:
        act (FDAction): The fundamental-domain action.
        n (int): Number of equal parts of A.
        f (StepFn): The function.
        trunc (Sequence): Group elements kept; must contain the identity.

    Returns:
        TruncVec: Entries (g, i) -> ∫_{gA_i} f and the exact mass of |f| outside ∪ gA.

    Raises:
        ValueError: If n < 1 or `trunc` omits the identity.

    Examples:
        >>> act = fundamental_domain_action("INT")
        >>> pn_apply(act, 2, StepFn.constant(1), [0]).entries
        {(0, 1): Fraction(1, 4), (0, 2): Fraction(1, 4)}
    """
    if n < 1:
        raise ValueError("n must be a positive integer.")
    if act.identity not in list(trunc):
        raise ValueError("Truncation must contain the identity element.")
    entries: Dict[Tuple[Any, int], Fraction] = {}
    covered = Fraction(0)
    for g in dict.fromkeys(trunc):
        start, end = act.interval(g)
        width = (end - start) / n
        for i in range(1, n + 1):
            entries[(g, i)] = f.integral(start + (i - 1) * width, start + i * width)
        covered += f.integral(start, end, absolute=True)
    return TruncVec(entries, l1_norm(f) - covered)


@typechecked
def lp_norm(v: TruncVec, p: Scalar, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """(Σ|entry|^p)^{1/p} over the stored entries; exact for p = 1.

    Raises:
        ValueError: If p < 1.
    """
    p = as_rational(p)
    precision = as_rational(precision)
    if p < 1:
        raise ValueError("lp_norm requires p >= 1.")
    if p == 1:
        return CertReal.exact(v.l1())
    nonzero = [abs(e) for e in v.entries.values() if e != 0]
    if not nonzero:
        return CertReal.exact(0)
    share = precision / (2 * len(nonzero))
    total = CertReal.exact(0)
    for e in nonzero:
        total = total + cert_pow(e, p, share)
    return cert_pow_real(total, 1 / p, precision / 2)


DEFAULT_EXPONENTS = (Fraction(2), Fraction(3, 2), Fraction(5, 4), Fraction(9, 8), Fraction(17, 16))


def _truncation_for(act: FDAction, f: StepFn, budget: Fraction, max_elements: int) -> List[GroupElement]:
    if act.size is not None:
        return act.elements(act.size)
    if f.support_end < 1:
        return act.covering_elements(f)
    for count in range(1, max_elements + 1):
        trunc = act.elements(count)
        covered = sum((f.integral(*act.interval(g), absolute=True) for g in trunc), Fraction(0))
        if l1_norm(f) - covered <= budget:
            return trunc
    return act.elements(max_elements)


@typechecked
def find_np(
    act: FDAction,
    f: StepFn,
    ratio: Scalar = Fraction(1, 2),
    max_n: int = 64,
    exponents: Sequence[Fraction] = DEFAULT_EXPONENTS,
    max_elements: int = 64,
    precision: Scalar = DEFAULT_PRECISION,
    verbose: bool = False,
) -> Tuple[int, Fraction, CertReal]:
    """Search (n, p) with ‖P_n f‖_p ≥ ratio·‖f‖₁, certified.

    n runs upward from 1; for each n the exponents are tried from the largest down
    toward 1. The truncation keeps the uncovered mass of |f| within
    (1 - ratio)/2·‖f‖₁, and the value is the l_p norm of the kept entries only, so
    it is a lower bound of the full norm.

    Args:
        act (FDAction): The fundamental-domain action.
        f (StepFn): The function, ‖f‖₁ > 0.
        ratio (Fraction): Target ratio in (0, 1). Defaults to 1/2.
        max_n (int): Largest n tried.
        exponents (Sequence[Fraction]): Exponents p > 1, tried in order.
        max_elements (int): Largest truncation for functions with full support.
        precision (Fraction): Radius target of the l_p evaluation.
        verbose (bool): If True, print each certified or rejected candidate.

    Returns:
        tuple: (n, p, value) with value.lower >= ratio·‖f‖₁.

    Raises:
        ValueError: If ratio is outside (0, 1) or f = 0.
        SearchBudgetError: If no candidate certifies.
    """
    ratio = as_rational(ratio)
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}.")
    norm = l1_norm(f)
    if norm == 0:
        raise ValueError("find_np requires a non-zero function.")
    target = ratio * norm
    trunc = _truncation_for(act, f, (1 - ratio) * norm / 2, max_elements)
    for n in range(1, max_n + 1):
        vec = pn_apply(act, n, f, trunc)
        for p in exponents:
            value = lp_norm(vec, p, precision)
            if value.lower >= target:
                if verbose:
                    print(f"✅ Certified n={n}, p={format_rational(p)}: {value} >= {format_rational(target)}")
                return n, as_rational(p), value
        if verbose:
            print(f"⚠️ n={n}: no exponent reaches {format_rational(target)}.")
    raise SearchBudgetError(f"No (n, p) with n <= {max_n} certifies ratio {format_rational(ratio)}.")


@typechecked
def pn_defect_schedule(
    act: FDAction, f: StepFn, steps: int = 5
) -> List[Dict[str, Any]]:
    """Exact defects ‖f‖₁ - ‖P_n f‖₁ along n = 1, 2, 4, ... with growing truncation.

    Both refinements only add mass, so the defects are nonincreasing.

    Returns:
        list[dict]: One row per step with n, truncation size, l1 of entries,
        tail bound and defect.
    """
    norm = l1_norm(f)
    rows = []
    for step in range(steps):
        n = 2**step
        trunc = act.elements(2 * step + 1)
        vec = pn_apply(act, n, f, trunc)
        rows.append(
            {
                "n": n,
                "trunc": len(trunc),
                "l1": vec.l1(),
                "tail_bound": vec.tail_bound,
                "defect": norm - vec.l1(),
            }
        )
    return rows


def random_fd_step(rng: random.Random, act: FDAction, max_index: int = 4, max_pieces: int = 4) -> StepFn:
    """Sample a step function supported in I_{g_0} ∪ ... ∪ I_{g_max_index}."""
    pieces = []
    for g in act.elements(max_index + 1):
        start, end = act.interval(g)
        count = rng.randint(1, max_pieces)
        cuts = sorted({start + (end - start) * Fraction(rng.randint(1, 15), 16) for _ in range(count - 1)})
        bps = [start] + cuts + [end]
        for a, b in zip(bps, bps[1:]):
            pieces.append((a, b, random_rational(rng)))
    return StepFn.from_pieces(pieces)
# endregion
