import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Sequence, Tuple, Union

from typeguard import typechecked

from .numerics import (
    DEFAULT_PRECISION,
    CertReal,
    Scalar,
    as_rational,
    cert_sqrt,
    cert_sqrt_real,
    format_rational,
    random_rational,
)

# region sequences in c and c0
@dataclass(frozen=True)
class CSeq:
    """Eventually constant rational sequence: `prefix` on positions 1..k, then `tail`.

    Trailing prefix entries equal to the tail are trimmed, so equal sequences have
    equal representations. A zero tail means the sequence lies in c0.
    """

    prefix: Tuple[Fraction, ...] = ()
    tail: Fraction = Fraction(0)

    def __post_init__(self):
        prefix = [as_rational(v) for v in self.prefix]
        tail = as_rational(self.tail)
        while prefix and prefix[-1] == tail:
            prefix.pop()
        object.__setattr__(self, "prefix", tuple(prefix))
        object.__setattr__(self, "tail", tail)

    @classmethod
    def constant(cls, value: Scalar) -> "CSeq":
        return cls((), as_rational(value))

    @classmethod
    def unit(cls, n: int) -> "CSeq":
        if n < 1:
            raise ValueError("Positions start at 1.")
        return cls(tuple([0] * (n - 1) + [1]), 0)

    @property
    def is_c0(self) -> bool:
        return self.tail == 0

    def entry(self, n: int) -> Fraction:
        """Value at position n (1-based)."""
        if n < 1:
            raise ValueError("Positions start at 1.")
        return self.prefix[n - 1] if n <= len(self.prefix) else self.tail

    def padded(self, length: int) -> Tuple[Fraction, ...]:
        return tuple(self.entry(n) for n in range(1, max(length, len(self.prefix)) + 1))

    def __add__(self, other: "CSeq") -> "CSeq":
        length = max(len(self.prefix), len(other.prefix))
        return CSeq(
            tuple(a + b for a, b in zip(self.padded(length), other.padded(length))),
            self.tail + other.tail,
        )

    def __neg__(self) -> "CSeq":
        return CSeq(tuple(-v for v in self.prefix), -self.tail)

    def __sub__(self, other: "CSeq") -> "CSeq":
        return self + (-other)

    def __rmul__(self, scalar) -> "CSeq":
        c = as_rational(scalar)
        return CSeq(tuple(c * v for v in self.prefix), c * self.tail)

    def to_dict(self) -> dict:
        return {"prefix": [format_rational(v) for v in self.prefix], "tail": format_rational(self.tail)}


@typechecked
def sup_norm(x: CSeq) -> Fraction:
    """Sup norm of an element of c (or c0).

    Examples:
        >>> sup_norm(CSeq((3, -1), 1))
        Fraction(3, 1)
    """
    return max([abs(v) for v in x.prefix] + [abs(x.tail)])


def random_cseq(rng: random.Random, max_length: int = 16, c0: bool = True) -> CSeq:
    """Sample a sequence with rational entries (tail zero when `c0`)."""
    length = rng.randint(0, max_length)
    tail = Fraction(0) if c0 else random_rational(rng)
    return CSeq(tuple(random_rational(rng) for _ in range(length)), tail)
# endregion


# region isometries of c and c0
def _cycles_from_mapping(mapping: Dict[int, int]) -> Tuple[Tuple[int, ...], ...]:
    seen = set()
    cycles = []
    for start in sorted(mapping):
        if start in seen or mapping[start] == start:
            continue
        cycle = [start]
        seen.add(start)
        nxt = mapping[start]
        while nxt != start:
            cycle.append(nxt)
            seen.add(nxt)
            nxt = mapping[nxt]
        cycles.append(tuple(cycle))
    return tuple(cycles)


@dataclass(frozen=True)
class IsoCElem:
    """Signed finite-support permutation acting on c and c0.

    The sign at position n is `tail_sign`, flipped on `sign_dev`; since `sign_dev`
    is finite the sign function is continuous at infinity with limit `tail_sign`.
    The action is (g.x)(n) = sign(n) * x(perm^-1(n)).
    """

    perm: Tuple[Tuple[int, ...], ...] = ()
    sign_dev: FrozenSet[int] = frozenset()
    tail_sign: int = 1

    def __post_init__(self):
        if self.tail_sign not in (1, -1):
            raise ValueError("tail_sign must be +1 or -1.")
        mapping: Dict[int, int] = {}
        for cycle in self.perm:
            for i, n in enumerate(cycle):
                if n < 1:
                    raise ValueError("Permutation entries are positions starting at 1.")
                if n in mapping:
                    raise ValueError(f"Position {n} appears in more than one cycle.")
                mapping[n] = cycle[(i + 1) % len(cycle)]
        if any(n < 1 for n in self.sign_dev):
            raise ValueError("Sign deviations are positions starting at 1.")
        object.__setattr__(self, "perm", _cycles_from_mapping(mapping))
        object.__setattr__(self, "sign_dev", frozenset(self.sign_dev))

    @classmethod
    def identity(cls) -> "IsoCElem":
        return cls()

    @classmethod
    def from_mapping(cls, mapping: Dict[int, int], sign_dev: Iterable[int] = (), tail_sign: int = 1) -> "IsoCElem":
        if sorted(mapping) != sorted(mapping.values()):
            raise ValueError("Mapping is not a bijection of its support.")
        return cls(_cycles_from_mapping(mapping), frozenset(sign_dev), tail_sign)

    @property
    def mapping(self) -> Dict[int, int]:
        out = {}
        for cycle in self.perm:
            for i, n in enumerate(cycle):
                out[n] = cycle[(i + 1) % len(cycle)]
        return out

    @property
    def support(self) -> int:
        """Largest position moved or sign-flipped (0 for none)."""
        return max(list(self.mapping) + list(self.sign_dev) + [0])

    def image(self, n: int) -> int:
        return self.mapping.get(n, n)

    def preimage(self, n: int) -> int:
        for src, dst in self.mapping.items():
            if dst == n:
                return src
        return n

    def sign(self, n: int) -> int:
        return -self.tail_sign if n in self.sign_dev else self.tail_sign

    def compose(self, other: "IsoCElem") -> "IsoCElem":
        """Return self∘other, i.e. apply `other` first."""
        positions = set(self.mapping) | set(other.mapping)
        mapping = {n: self.image(other.image(n)) for n in positions}
        top = max([self.support, other.support, 0])
        tail_sign = self.tail_sign * other.tail_sign
        dev = {
            n
            for n in range(1, top + 1)
            if self.sign(n) * other.sign(self.preimage(n)) != tail_sign
        }
        return IsoCElem.from_mapping(mapping, dev, tail_sign)

    def inverse(self) -> "IsoCElem":
        mapping = {dst: src for src, dst in self.mapping.items()}
        dev = {n for n in range(1, self.support + 1) if self.sign(self.image(n)) != self.tail_sign}
        return IsoCElem.from_mapping(mapping, dev, self.tail_sign)

    def to_dict(self) -> dict:
        return {
            "perm": [list(c) for c in self.perm],
            "sign_dev": sorted(self.sign_dev),
            "tail_sign": self.tail_sign,
        }


@typechecked
def act_c(g: IsoCElem, x: CSeq) -> CSeq:
    """Apply a signed permutation to an element of c.

    Args:
        g (IsoCElem): The isometry.
        x (CSeq): The sequence.

    Returns:
        CSeq: The sequence n -> sign(n) * x(perm^-1(n)), with tail tail_sign * tail(x).

    Examples:
        >>> act_c(IsoCElem(((1, 2),)), CSeq((5, 7)))
        CSeq(prefix=(Fraction(7, 1), Fraction(5, 1)), tail=Fraction(0, 1))
    """
    length = max(len(x.prefix), g.support)
    return CSeq(
        tuple(g.sign(n) * x.entry(g.preimage(n)) for n in range(1, length + 1)),
        g.tail_sign * x.tail,
    )


def random_iso_c(rng: random.Random, max_support: int = 16, free_tail_sign: bool = True) -> IsoCElem:
    """Sample a signed permutation supported on positions 1..max_support."""
    size = rng.randint(1, max_support)
    positions = list(range(1, size + 1))
    images = positions[:]
    rng.shuffle(images)
    dev = {n for n in positions if rng.random() < 0.5}
    tail_sign = rng.choice((1, -1)) if free_tail_sign else 1
    return IsoCElem.from_mapping(dict(zip(positions, images)), dev, tail_sign)
# endregion


# region invariant norms on c0 and c
def _require_c0(x: CSeq) -> None:
    if not x.is_c0:
        raise ValueError(f"Domain error: sequence has non-zero tail {x.tail}, not an element of c0.")


@typechecked
def weighted_sc_norm(x: CSeq, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """The strictly convex base norm ‖x‖_∞ + (Σ x_i²/4^i)^{1/2} on c0 (no rearrangement)."""
    _require_c0(x)
    radicand = sum((v * v / Fraction(4) ** i for i, v in enumerate(x.prefix, start=1)), Fraction(0))
    return CertReal.exact(sup_norm(x)) + cert_sqrt(radicand, precision)


@typechecked
def sorted_sc_parts(x: CSeq) -> Tuple[Fraction, Fraction]:
    """Exact (sup part, radicand) of `sorted_sc_norm`; equal parts mean equal norms."""
    _require_c0(x)
    decreasing = sorted((abs(v) for v in x.prefix), reverse=True)
    radicand = sum((v * v / Fraction(4) ** i for i, v in enumerate(decreasing, start=1)), Fraction(0))
    return sup_norm(x), radicand


@typechecked
def sorted_sc_norm(x: CSeq, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Iso(c0)-invariant strictly convex norm on c0.

    The base norm ‖x‖_∞ + (Σ x_i²/4^i)^{1/2} is maximized over the orbit of x by
    the permutation sorting |x| decreasingly, so the value is that of the sorted
    sequence. The radicand is an exact rational.

    Args:
        x (CSeq): An element of c0.
        precision (Fraction | int): Target radius of the square root.

    Returns:
        CertReal: The norm value.

    Raises:
        ValueError: If x has a non-zero tail.

    Examples:
        >>> sorted_sc_norm(CSeq.unit(1))
        CertReal(midpoint=Fraction(3, 2), radius=Fraction(0, 1))
    """
    sup, radicand = sorted_sc_parts(x)
    return CertReal.exact(sup) + cert_sqrt(radicand, precision)


@typechecked
def sorting_iso(x: CSeq) -> IsoCElem:
    """Permutation h with |h.x| decreasing, attaining the orbit supremum."""
    _require_c0(x)
    order = sorted(range(1, len(x.prefix) + 1), key=lambda n: (-abs(x.entry(n)), n))
    return IsoCElem.from_mapping({src: dst for dst, src in enumerate(order, start=1)})


@typechecked
def c_renorm_map(x: CSeq) -> Tuple[CSeq, Fraction]:
    """The injection x -> (x - lim x, lim x) of c into c0 ⊕ R."""
    return x - CSeq.constant(x.tail), x.tail


@typechecked
def act_c_pair(g: IsoCElem, pair: Tuple[CSeq, Fraction]) -> Tuple[CSeq, Fraction]:
    """Action of Iso(c) on c0 ⊕ R: canonically on c0, by the tail sign on R."""
    z, t = pair
    return act_c(g, z), g.tail_sign * t


@typechecked
def c_renorm_parts(x: CSeq) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
    """Exact data (‖x‖_c, sup part, radicand, lim²) determining `c_renorm`."""
    z, t = c_renorm_map(x)
    sup, radicand = sorted_sc_parts(z)
    return sup_norm(x), sup, radicand, t * t


@typechecked
def c_renorm(x: CSeq, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Renorming of c: ‖x‖_c + (sorted_sc_norm(x - lim)² + lim²)^{1/2}.

    This is the pushforward of the ℓ2-sum (c0, sorted_sc_norm) ⊕ R along
    `c_renorm_map`, evaluated verbatim.

    Examples:
        >>> c_renorm(CSeq.constant(1))
        CertReal(midpoint=Fraction(2, 1), radius=Fraction(0, 1))
    """
    precision = as_rational(precision)
    norm_c, sup, radicand, tail_sq = c_renorm_parts(x)
    inner = CertReal.exact(sup) + cert_sqrt(radicand, precision / 8)
    return CertReal.exact(norm_c) + cert_sqrt_real(inner.square() + tail_sq, precision / 2)
# endregion


# region c0- and l1-sums of Euclidean blocks
class Ambient(str, Enum):
    """Which sum the blocks live in."""

    C0SUM = "C0SUM"
    L1SUM = "L1SUM"


Block = Tuple[int, Tuple[Fraction, ...]]


@dataclass(frozen=True)
class BlockVec:
    """Finitely many Euclidean blocks (class_id, coords) in a c0- or l1-sum.

    Blocks with the same class id are isometric summands and must have the same
    dimension.
    """

    blocks: Tuple[Block, ...]
    ambient: Ambient = Ambient.C0SUM

    def __post_init__(self):
        blocks = tuple((int(cid), tuple(as_rational(c) for c in coords)) for cid, coords in self.blocks)
        dims: Dict[int, int] = {}
        for cid, coords in blocks:
            if dims.setdefault(cid, len(coords)) != len(coords):
                raise ValueError(f"Class-length mismatch: class {cid} has blocks of different dimension.")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "ambient", Ambient(self.ambient))

    @classmethod
    def real_blocks(cls, values: Sequence[Scalar], ambient: Ambient = Ambient.L1SUM) -> "BlockVec":
        """All-blocks-R vector: the l1 (or c0) sequence space with one class."""
        return cls(tuple((0, (v,)) for v in values), ambient)

    @property
    def shape(self) -> Tuple[Tuple[int, int], ...]:
        return tuple((cid, len(coords)) for cid, coords in self.blocks)

    def norms_squared(self) -> Tuple[Fraction, ...]:
        return tuple(sum((c * c for c in coords), Fraction(0)) for _, coords in self.blocks)

    def _check_compatible(self, other: "BlockVec") -> None:
        if self.shape != other.shape or self.ambient != other.ambient:
            raise ValueError("Block vectors have incompatible shapes.")

    def __add__(self, other: "BlockVec") -> "BlockVec":
        self._check_compatible(other)
        return BlockVec(
            tuple(
                (cid, tuple(a + b for a, b in zip(xs, ys)))
                for (cid, xs), (_, ys) in zip(self.blocks, other.blocks)
            ),
            self.ambient,
        )

    def __rmul__(self, scalar) -> "BlockVec":
        c = as_rational(scalar)
        return BlockVec(tuple((cid, tuple(c * v for v in xs)) for cid, xs in self.blocks), self.ambient)

    def to_dict(self) -> dict:
        return {
            "ambient": self.ambient.value,
            "blocks": [[cid, [format_rational(c) for c in coords]] for cid, coords in self.blocks],
        }


Matrix = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class BlockIso:
    """Isometry of a sum: block i goes to position class_perm[i] after Q_i is applied."""

    class_perm: Tuple[int, ...]
    block_maps: Tuple[Matrix, ...]

    def __post_init__(self):
        maps = tuple(tuple(tuple(as_rational(v) for v in row) for row in q) for q in self.block_maps)
        if sorted(self.class_perm) != list(range(len(self.class_perm))):
            raise ValueError("class_perm must be a permutation of the block indices.")
        if len(maps) != len(self.class_perm):
            raise ValueError("One block map is required per block.")
        for q in maps:
            dim = len(q)
            if any(len(row) != dim for row in q):
                raise ValueError("Block maps must be square matrices.")
            for i in range(dim):
                for j in range(dim):
                    dot = sum((q[k][i] * q[k][j] for k in range(dim)), Fraction(0))
                    if dot != (1 if i == j else 0):
                        raise ValueError("Block map is not orthogonal (QᵀQ ≠ I).")
        object.__setattr__(self, "class_perm", tuple(self.class_perm))
        object.__setattr__(self, "block_maps", maps)

    @classmethod
    def identity(cls, v: BlockVec) -> "BlockIso":
        return cls(
            tuple(range(len(v.blocks))),
            tuple(_identity_matrix(len(coords)) for _, coords in v.blocks),
        )

    def to_dict(self) -> dict:
        return {
            "class_perm": list(self.class_perm),
            "block_maps": [[[format_rational(v) for v in row] for row in q] for q in self.block_maps],
        }


def _identity_matrix(dim: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim))


@typechecked
def act_blocks(g: BlockIso, v: BlockVec) -> BlockVec:
    """Apply a block isometry: rotate each block, then move it within its class.

    Raises:
        ValueError: If shapes are incompatible or a block would change class.

    Examples:
        >>> q = ((Fraction(3, 5), Fraction(4, 5)), (Fraction(-4, 5), Fraction(3, 5)))
        >>> act_blocks(BlockIso((0,), (q,)), BlockVec(((0, (1, 0)),))).blocks
        ((0, (Fraction(3, 5), Fraction(-4, 5))),)
    """
    if len(g.class_perm) != len(v.blocks):
        raise ValueError("Block isometry and vector have a different number of blocks.")
    out = [None] * len(v.blocks)
    for i, (cid, coords) in enumerate(v.blocks):
        target = g.class_perm[i]
        q = g.block_maps[i]
        if len(q) != len(coords):
            raise ValueError(f"Block map {i} has dimension {len(q)}, block has {len(coords)}.")
        if v.blocks[target][0] != cid:
            raise ValueError(f"Block {i} of class {cid} cannot move to position {target}.")
        out[target] = (cid, tuple(sum((q[r][c] * coords[c] for c in range(len(coords))), Fraction(0)) for r in range(len(q))))
    return BlockVec(tuple(out), v.ambient)


def random_block_iso(rng: random.Random, v: BlockVec) -> BlockIso:
    """Sample a block isometry compatible with v: class-preserving shuffle and signed
    coordinate permutations or Pythagorean rotations inside each block."""
    positions: Dict[int, list] = {}
    for i, (cid, _) in enumerate(v.blocks):
        positions.setdefault(cid, []).append(i)
    perm = list(range(len(v.blocks)))
    for idxs in positions.values():
        shuffled = idxs[:]
        rng.shuffle(shuffled)
        for src, dst in zip(idxs, shuffled):
            perm[src] = dst
    maps = []
    triples = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)]
    for _, coords in v.blocks:
        dim = len(coords)
        if dim == 2 and rng.random() < 0.5:
            a, b, c = rng.choice(triples)
            s = rng.choice((1, -1))
            maps.append(((Fraction(a, c), Fraction(-s * b, c)), (Fraction(s * b, c), Fraction(a, c))))
            continue
        order = list(range(dim))
        rng.shuffle(order)
        maps.append(
            tuple(
                tuple(Fraction(rng.choice((1, -1)) if order[r] == c else 0) for c in range(dim))
                for r in range(dim)
            )
        )
    return BlockIso(tuple(perm), tuple(maps))


def random_block_vec(
    rng: random.Random, ambient: Ambient, max_blocks: int = 6, classes: Sequence[int] = (1, 2, 3)
) -> BlockVec:
    """Sample a block vector whose class c has dimension c."""
    count = rng.randint(1, max_blocks)
    blocks = []
    for _ in range(count):
        cid = rng.choice(list(classes))
        blocks.append((cid, tuple(random_rational(rng) for _ in range(cid))))
    return BlockVec(tuple(blocks), ambient)


@typechecked
def c0sum_sorted_parts(v: BlockVec) -> Tuple[Fraction, Fraction]:
    """Exact (max squared block norm, sorted weighted radicand) of `c0sum_sorted_norm`."""
    if v.ambient is not Ambient.C0SUM:
        raise ValueError("c0sum_sorted_norm expects a C0SUM block vector.")
    sq = v.norms_squared()
    by_class: Dict[int, list] = {}
    for i, (cid, _) in enumerate(v.blocks):
        by_class.setdefault(cid, []).append(i)
    arranged = list(sq)
    for idxs in by_class.values():
        for pos, value in zip(idxs, sorted((sq[i] for i in idxs), reverse=True)):
            arranged[pos] = value
    radicand = sum((s / Fraction(4) ** i for i, s in enumerate(arranged, start=1)), Fraction(0))
    return max(sq, default=Fraction(0)), radicand


@typechecked
def c0sum_sorted_norm(v: BlockVec, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Invariant strictly convex norm on a c0-sum of Euclidean blocks.

    Within each isometry class the block norms are rearranged decreasingly over
    the positions of that class; the value is the largest block norm plus the
    square root of Σ ‖x_sorted(i)‖²/4^i.

    Examples:
        >>> c0sum_sorted_norm(BlockVec(((0, (0,)), (1, (3, 4)))))
        CertReal(midpoint=Fraction(25, 4), radius=Fraction(0, 1))
    """
    precision = as_rational(precision)
    top_sq, radicand = c0sum_sorted_parts(v)
    return cert_sqrt(top_sq, precision / 2) + cert_sqrt(radicand, precision / 2)


@typechecked
def l1sum_parts(v: BlockVec) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """Exact data (sorted squared block norms, their total) determining `l1sum_sc_norm`."""
    if v.ambient is not Ambient.L1SUM:
        raise ValueError("l1sum_sc_norm expects an L1SUM block vector.")
    sq = v.norms_squared()
    return tuple(sorted(sq)), sum(sq, Fraction(0))


@typechecked
def l1sum_sc_norm(v: BlockVec, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """Invariant strictly convex norm on an l1-sum of Euclidean blocks.

    Σ‖x_n‖₂ + (Σ‖x_n‖₂²)^{1/2}: the base l1-sum norm plus the pushforward of the
    l2-sum along the block-wise identity.

    Examples:
        >>> l1sum_sc_norm(BlockVec.real_blocks([3, 4]))
        CertReal(midpoint=Fraction(12, 1), radius=Fraction(0, 1))
    """
    precision = as_rational(precision)
    sq, total = l1sum_parts(v)
    share = precision / (2 * (len(sq) + 1))
    value = cert_sqrt(total, precision / 2)
    for s in sq:
        value = value + cert_sqrt(s, share)
    return value


@typechecked
def l1sum_base_norm(v: BlockVec, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """The l1-sum norm Σ‖x_n‖₂ itself."""
    precision = as_rational(precision)
    share = precision / (len(v.blocks) + 1)
    value = CertReal.exact(0)
    for s in v.norms_squared():
        value = value + cert_sqrt(s, share)
    return value


@typechecked
def c0sum_base_norm(v: BlockVec, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """The c0-sum norm max‖x_n‖₂ itself."""
    return cert_sqrt(max(v.norms_squared(), default=Fraction(0)), precision)
# endregion
