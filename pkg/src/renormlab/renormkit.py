import dataclasses
import itertools
import operator
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, List, Optional, Sequence, Tuple

from typeguard import typechecked

from .cantorspace import CylFn, ObstructionCertificate, odometer_sc_norm, odometer_sc_parts
from .l1space import (
    FDAction,
    FreeWord,
    StepFn,
    TruncVec,
    apply_iso,
    eval_word,
    f2_counterexample,
    fd_apply,
    l1_norm,
    parse_word,
    pn_apply,
    pn_defect_schedule,
)
from .numerics import (
    DEFAULT_PRECISION,
    PRECISION_CAP,
    CertReal,
    Comparison,
    Scalar,
    as_rational,
    cert_max,
    cert_sqrt,
    cert_sqrt_real,
    format_rational,
    refine_compare,
)
from .reports import Report, Verdict
from .seqspace import (
    BlockVec,
    CSeq,
    c0sum_sorted_norm,
    c0sum_sorted_parts,
    c_renorm,
    c_renorm_parts,
    l1sum_parts,
    l1sum_sc_norm,
    sorted_sc_norm,
    sorted_sc_parts,
    sup_norm,
    weighted_sc_norm,
)

Evaluator = Callable[[Any, Fraction], CertReal]

EPSILON_NOTE = (
    "The ε-close norm is ‖x‖ + ε‖φ(x)‖/‖φ‖: the displayed formula omits the codomain "
    "norm around φ(x), which is required for the expression to be a number."
)
PN_CONSTANT_NOTE = (
    "The stated estimate ‖T^p_n P_n f‖ >= 2‖f‖ cannot hold for operators of norm at most 1; "
    "the search certifies ratio·‖f‖₁ instead (ratio 1/2 by default)."
)
C_RENORM_NOTE = (
    "The map x -> (x - lim x) ⊕ lim x is not equivariant for signed permutations whose sign "
    "function is not constant: for g flipping position 1 and x = 𝟙, T(gx) = ((-2, 0, ...), 1) "
    "but g·T(x) = (0, 1), and the renorming takes the values 2 and 1 + √10. The norm is "
    "evaluated as stated; Iso(c) acts on c0 by the signed permutation and on R by the tail sign."
)


# region vectors
def vec_add(x: Any, y: Any) -> Any:
    if isinstance(x, tuple):
        if len(x) != len(y):
            raise ValueError("Vectors have different dimensions.")
        return tuple(a + b for a, b in zip(x, y))
    return x + y


def vec_scale(c: Scalar, x: Any) -> Any:
    c = as_rational(c)
    if isinstance(x, tuple):
        return tuple(c * a for a in x)
    return c * x


def vec_sub(x: Any, y: Any) -> Any:
    return vec_add(x, vec_scale(-1, y))


def coordinates(x: Any, y: Any) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """Rational coordinates of x and y in a common finite frame."""
    if isinstance(x, tuple):
        return tuple(as_rational(v) for v in x), tuple(as_rational(v) for v in y)
    if isinstance(x, CSeq):
        length = max(len(x.prefix), len(y.prefix))
        return x.padded(length) + (x.tail,), y.padded(length) + (y.tail,)
    if isinstance(x, BlockVec):
        if x.shape != y.shape:
            raise ValueError("Block vectors have incompatible shapes.")
        flat = lambda v: tuple(c for _, coords in v.blocks for c in coords)
        return flat(x), flat(y)
    if isinstance(x, StepFn):
        points = sorted(set(x.breakpoints[:-1]) | set(y.breakpoints[:-1]))
        return tuple(x.value_at(t) for t in points), tuple(y.value_at(t) for t in points)
    if isinstance(x, CylFn):
        depth = max(x.depth, y.depth)
        return x.lifted(depth), y.lifted(depth)
    raise TypeError(f"No coordinate frame for {type(x).__name__}.")


def is_parallel(x: Any, y: Any) -> bool:
    """Exact test for linear dependence of x and y (all 2x2 minors vanish)."""
    a, b = coordinates(x, y)
    pivot = next((i for i in range(len(a)) if a[i] != 0 or b[i] != 0), None)
    if pivot is None:
        return True
    return all(a[i] * b[pivot] == a[pivot] * b[i] for i in range(len(a)))


def sup_vector_norm(x: Tuple[Fraction, ...]) -> Fraction:
    return max((abs(v) for v in x), default=Fraction(0))


def weighted_sc_vector(x: Tuple[Fraction, ...], precision: Scalar = DEFAULT_PRECISION) -> CertReal:
    """‖x‖_∞ + (Σ x_i²/4^i)^{1/2} on R^d."""
    radicand = sum((v * v / Fraction(4) ** i for i, v in enumerate(x, start=1)), Fraction(0))
    return CertReal.exact(sup_vector_norm(x)) + cert_sqrt(radicand, precision)
# endregion


# region oracles and descriptors
@dataclass(frozen=True)
class NormOracle:
    """Evaluation contract for a norm: vector -> certified real.

    `parts` returns exact rational data that determines the value, so equal parts
    certify equal norms without refinement. `square` returns the exact squared
    norm of a Euclidean-type norm. `reference` is the original norm that
    `claimed_bounds` (c, C) compare against.
    """

    space: str
    evaluator: Evaluator
    exact: bool = False
    claimed_bounds: Optional[Tuple[Fraction, Fraction]] = None
    parts: Optional[Callable[[Any], Hashable]] = None
    square: Optional[Callable[[Any], Fraction]] = None
    reference: Optional[Evaluator] = None
    name: str = ""
    notes: Tuple[str, ...] = ()

    def __call__(self, x: Any, precision: Scalar = DEFAULT_PRECISION) -> CertReal:
        return self.evaluator(x, as_rational(precision))


@dataclass(frozen=True)
class EquivariantMapDescriptor:
    """A bounded linear map T: X -> Y together with the norms on both sides.

    `operator_bound` is a rational upper bound of ‖T‖; `operator_norm_sq`, when
    given, is the exact square of ‖T‖. Components and witnesses carry the data of
    an l2-assembly: each component has its own injectivity constant and witness
    vectors x_n with ‖T_n(x_n)‖ >= C‖x_n‖.
    """

    domain: str
    codomain: str
    map: Callable[[Any], Any]
    domain_norm: NormOracle
    codomain_norm: NormOracle
    operator_bound: Fraction
    operator_norm_sq: Optional[Fraction] = None
    injectivity_constant: Optional[Fraction] = None
    witnesses: Tuple[Any, ...] = ()
    components: Tuple["EquivariantMapDescriptor", ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "operator_bound", as_rational(self.operator_bound))
        if self.operator_bound < 0:
            raise ValueError("operator_bound must be non-negative.")


def identity_descriptor(oracle: NormOracle, codomain: Optional[NormOracle] = None, bound: Scalar = 1) -> EquivariantMapDescriptor:
    """The identity map from `oracle`'s space into `codomain` (the same norm by default)."""
    codomain = oracle if codomain is None else codomain
    return EquivariantMapDescriptor(
        domain=oracle.space,
        codomain=codomain.space,
        map=lambda x: x,
        domain_norm=oracle,
        codomain_norm=codomain,
        operator_bound=as_rational(bound),
        name="id",
    )


def _sum_oracles_exact(*oracles: NormOracle) -> bool:
    return all(o.exact for o in oracles)


@typechecked
def pushforward_norm(d: EquivariantMapDescriptor, base: NormOracle) -> NormOracle:
    """‖x‖' = ‖x‖_X + ‖T(x)‖_Y, the sum of two invariant norms.

    Strictly convex when Y is and T is injective; invariant when T is equivariant
    and both norms are invariant.
    """
    codomain = d.codomain_norm

    def evaluate(x, precision):
        return base(x, precision / 2) + codomain(d.map(x), precision / 2)

    parts = None
    if base.parts is not None and codomain.parts is not None:
        parts = lambda x: (base.parts(x), codomain.parts(d.map(x)))
    return NormOracle(
        space=d.domain,
        evaluator=evaluate,
        exact=_sum_oracles_exact(base, codomain),
        parts=parts,
        reference=base.reference or base.evaluator,
        name=f"{base.name} + {codomain.name}∘{d.name}",
        notes=base.notes + codomain.notes,
    )


@typechecked
def epsilon_close_norm(d: EquivariantMapDescriptor, epsilon: Scalar, warn: bool = False) -> NormOracle:
    """‖x‖_X + ε‖φ(x)‖_Y/‖φ‖, which lies between ‖x‖_X and (1 + ε)‖x‖_X.

    When the exact squared operator norm and an exact squared codomain norm are
    available the quotient is evaluated under a single square root, so rational
    values come out exactly.

    Args:
        d (EquivariantMapDescriptor): The map φ and its operator bound.
        epsilon (Fraction): ε in (0, 1).
        warn (bool): If True, emit a UserWarning about the codomain-norm emendation.

    Returns:
        NormOracle: The ε-close norm, with claimed bounds (1 - ε, 1 + ε).

    Raises:
        ValueError: If ε is outside (0, 1) or the operator bound is zero.

    Examples:
        >>> sup = tuple_sup_oracle()
        >>> d = identity_descriptor(sup, euclidean_oracle(), bound=2)
        >>> d = dataclasses.replace(d, operator_norm_sq=Fraction(2))
        >>> epsilon_close_norm(d, Fraction(1, 2))((Fraction(1), Fraction(1)))
        CertReal(midpoint=Fraction(3, 2), radius=Fraction(0, 1))
    """
    epsilon = as_rational(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}.")
    if d.operator_bound <= 0 and not d.operator_norm_sq:
        raise ValueError("The operator bound must be positive.")
    if warn:
        warnings.warn(EPSILON_NOTE, UserWarning, stacklevel=2)
    base = d.domain_norm
    codomain = d.codomain_norm
    exact_path = d.operator_norm_sq is not None and codomain.square is not None

    def evaluate(x, precision):
        y = d.map(x)
        if exact_path:
            scaled = cert_sqrt(codomain.square(y) / d.operator_norm_sq, precision / 4)
        else:
            scaled = codomain(y, precision / 4) * (1 / d.operator_bound)
        return base(x, precision / 2) + scaled * epsilon

    parts = None
    if base.parts is not None and codomain.square is not None:
        parts = lambda x: (base.parts(x), codomain.square(d.map(x)))
    return NormOracle(
        space=d.domain,
        evaluator=evaluate,
        exact=False,
        claimed_bounds=(1 - epsilon, 1 + epsilon),
        parts=parts,
        reference=base.evaluator,
        name=f"{base.name} + {format_rational(epsilon)}·{codomain.name}∘{d.name}/‖{d.name}‖",
        notes=(EPSILON_NOTE,),
    )


@typechecked
def l2_assembly(maps: Sequence[EquivariantMapDescriptor]) -> EquivariantMapDescriptor:
    """Combine T_1, ..., T_k into x -> (T_n(x)/2^n)_n with values in the l2-sum.

    Args:
        maps (Sequence[EquivariantMapDescriptor]): Components with a common domain,
            each of norm at most 1.

    Returns:
        EquivariantMapDescriptor: The assembled map; its operator bound is the
        rational upper end of (Σ ‖T_n‖²/4^n)^{1/2} <= 1.

    Raises:
        ValueError: If `maps` is empty, a bound exceeds 1, or domains differ.
    """
    if not maps:
        raise ValueError("l2_assembly needs at least one map.")
    domain = maps[0].domain
    for n, m in enumerate(maps, start=1):
        if m.operator_bound > 1:
            raise ValueError(f"Component {n} has operator bound {m.operator_bound} > 1.")
        if m.domain != domain:
            raise ValueError(f"Component {n} has domain {m.domain}, expected {domain}.")
    weights = [Fraction(1, 2**n) for n in range(1, len(maps) + 1)]

    def assembled(x):
        return tuple(vec_scale(w, m.map(x)) for w, m in zip(weights, maps))

    all_square = all(m.codomain_norm.square is not None for m in maps)

    def square(y):
        return sum((m.codomain_norm.square(part) for m, part in zip(maps, y)), Fraction(0))

    def evaluate(y, precision):
        if all_square:
            return cert_sqrt(square(y), precision)
        total = CertReal.exact(0)
        share = precision / (4 * len(maps))
        for m, part in zip(maps, y):
            total = total + m.codomain_norm(part, share).square()
        return cert_sqrt_real(total, precision / 2)

    codomain = NormOracle(
        space="l2-sum(" + ", ".join(m.codomain for m in maps) + ")",
        evaluator=evaluate,
        exact=False,
        parts=(lambda y: square(y)) if all_square else None,
        square=square if all_square else None,
        name="l2-sum",
    )
    bound_sq = sum((m.operator_bound**2 * w * w for m, w in zip(maps, weights)), Fraction(0))
    return EquivariantMapDescriptor(
        domain=domain,
        codomain=codomain.space,
        map=assembled,
        domain_norm=maps[0].domain_norm,
        codomain_norm=codomain,
        operator_bound=cert_sqrt(bound_sq).upper,
        components=tuple(maps),
        name="⊕".join(m.name or f"T{n}" for n, m in enumerate(maps, start=1)),
    )


@typechecked
def orbit_sup_norm(
    base: NormOracle, elements: Sequence[Any], act: Callable[[Any, Any], Any], name: str = ""
) -> NormOracle:
    """N(x) = max over the finite group of base(g·x).

    For a finite (or compact) group the supremum is attained, so a strictly convex
    base norm gives an invariant strictly convex norm. `elements` must be the whole
    group so that the orbit of g·x is the orbit of x.
    """
    if not elements:
        raise ValueError("orbit_sup_norm needs at least one group element.")
    elements = list(elements)

    def evaluate(x, precision):
        return cert_max(base(act(g, x), precision) for g in elements)

    parts = None
    if base.parts is not None:
        parts = lambda x: frozenset(base.parts(act(g, x)) for g in elements)
    return NormOracle(
        space=base.space,
        evaluator=evaluate,
        exact=base.exact,
        parts=parts,
        reference=base.reference,
        name=name or f"sup over orbit of {base.name}",
    )


@typechecked
def pn_descriptor(act: FDAction, n: int) -> EquivariantMapDescriptor:
    """T_n∘P_n: L1[0,1] -> l2(G × n), f -> (∫_{gA_i} f)_{g, i}.

    The truncation is the set of translates meeting the support of f, so the
    image is exact and has no tail. ‖T_n∘P_n‖ <= ‖P_n‖ = 1.
    """
    if n < 1:
        raise ValueError("n must be a positive integer.")
    return EquivariantMapDescriptor(
        domain="L1[0,1]",
        codomain=f"l2({act.name}×{n})",
        map=lambda f: pn_apply(act, n, f, [act.identity] + act.covering_elements(f)),
        domain_norm=l1_oracle(),
        codomain_norm=trunc_l2_oracle(),
        operator_bound=Fraction(1),
        name=f"P_{n}",
    )


@typechecked
def fundamental_domain_norm(act: FDAction, steps: int = 5) -> NormOracle:
    """‖f‖₁ + ‖(P_{2^k} f / 2^(k+1))_k‖, the l2-assembly of P_1, P_2, ..., P_{2^(steps-1)}.

    Every component is equivariant for the action, so the norm is invariant; it is
    strictly convex on functions whose breakpoints inside each translate lie on the
    2^(steps-1)-th subdivision, where the assembled map is injective.

    Args:
        act (FDAction): A free action with a dyadic fundamental domain.
        steps (int): Number of components.

    Returns:
        NormOracle: The invariant renorming, with claimed bounds (1, 2) against ‖·‖₁.

    Raises:
        ValueError: If steps < 1.

    Examples:
        >>> N = fundamental_domain_norm(fundamental_domain_action("INT"), steps=1)
        >>> N(StepFn.indicator(0, Fraction(1, 2)))
        CertReal(midpoint=Fraction(3, 4), radius=Fraction(0, 1))
    """
    if steps < 1:
        raise ValueError("steps must be a positive integer.")
    assembled = l2_assembly([pn_descriptor(act, 2**k) for k in range(steps)])
    norm = pushforward_norm(assembled, l1_oracle())
    return dataclasses.replace(norm, claimed_bounds=(Fraction(1), Fraction(2)), name=f"fundamental_domain_norm({act.name})")

# endregion


# region catalog of norm oracles
def tuple_sup_oracle() -> NormOracle:
    return NormOracle(
        space="l∞^d",
        evaluator=lambda x, p: CertReal.exact(sup_vector_norm(x)),
        exact=True,
        parts=sup_vector_norm,
        name="‖·‖∞",
    )


def euclidean_oracle() -> NormOracle:
    square = lambda x: sum((as_rational(v) ** 2 for v in x), Fraction(0))
    return NormOracle(
        space="l2^d",
        evaluator=lambda x, p: cert_sqrt(square(x), p),
        parts=square,
        square=square,
        name="‖·‖₂",
    )


def weighted_sc_vector_oracle() -> NormOracle:
    def parts(x):
        return sup_vector_norm(x), sum((v * v / Fraction(4) ** i for i, v in enumerate(x, start=1)), Fraction(0))

    return NormOracle(
        space="R^d",
        evaluator=weighted_sc_vector,
        parts=parts,
        reference=lambda x, p: CertReal.exact(sup_vector_norm(x)),
        name="‖·‖∞ + weighted ‖·‖₂",
    )


def c0_sup_oracle() -> NormOracle:
    return NormOracle(
        space="c0",
        evaluator=lambda x, p: CertReal.exact(sup_norm(x)),
        exact=True,
        parts=sup_norm,
        name="‖·‖_c0",
    )


def weighted_sc_oracle() -> NormOracle:
    """Base norm of the sorted renorming, before the orbit supremum is taken."""

    def parts(x):
        radicand = sum((v * v / Fraction(4) ** i for i, v in enumerate(x.prefix, start=1)), Fraction(0))
        return sup_norm(x), radicand

    return NormOracle(
        space="c0",
        evaluator=weighted_sc_norm,
        parts=parts,
        reference=lambda x, p: CertReal.exact(sup_norm(x)),
        name="weighted_sc_norm",
    )


def sorted_sc_oracle() -> NormOracle:
    return NormOracle(
        space="c0",
        evaluator=sorted_sc_norm,
        claimed_bounds=(Fraction(1), Fraction(2)),
        parts=sorted_sc_parts,
        reference=lambda x, p: CertReal.exact(sup_norm(x)),
        name="sorted_sc_norm",
    )


def c_renorm_oracle() -> NormOracle:
    return NormOracle(
        space="c",
        evaluator=c_renorm,
        parts=c_renorm_parts,
        reference=lambda x, p: CertReal.exact(sup_norm(x)),
        name="c_renorm",
        notes=(C_RENORM_NOTE,),
    )


def c_pair_oracle() -> NormOracle:
    """(sorted_sc_norm(z)² + t²)^{1/2} on the l2-sum c0 ⊕ R."""

    def evaluate(pair, precision):
        z, t = pair
        return cert_sqrt_real(sorted_sc_norm(z, precision / 8).square() + t * t, precision / 2)

    return NormOracle(
        space="c0 ⊕ R",
        evaluator=evaluate,
        parts=lambda pair: (sorted_sc_parts(pair[0]), pair[1] * pair[1]),
        name="c0 ⊕₂ R",
    )


def c0sum_oracle() -> NormOracle:
    return NormOracle(space="c0-sum", evaluator=c0sum_sorted_norm, parts=c0sum_sorted_parts, name="c0sum_sorted_norm")


def l1sum_oracle() -> NormOracle:
    return NormOracle(space="l1-sum", evaluator=l1sum_sc_norm, parts=l1sum_parts, name="l1sum_sc_norm")


def l1_oracle() -> NormOracle:
    return NormOracle(
        space="L1[0,1]",
        evaluator=lambda f, p: CertReal.exact(l1_norm(f)),
        exact=True,
        parts=l1_norm,
        reference=lambda f, p: CertReal.exact(l1_norm(f)),
        name="‖·‖₁",
    )


def trunc_l2_oracle() -> NormOracle:
    """l2 norm of the stored entries of a truncated vector, exact squared norm available."""
    square = lambda v: sum((e * e for e in v.entries.values()), Fraction(0))
    return NormOracle(
        space="l2(G×n)",
        evaluator=lambda v, p: cert_sqrt(square(v), p),
        parts=square,
        square=square,
        name="‖·‖₂",
    )


def odometer_oracle() -> NormOracle:
    return NormOracle(space="C(2^N)", evaluator=odometer_sc_norm, parts=odometer_sc_parts, name="odometer_sc_norm")


def cylinder_sup_oracle() -> NormOracle:
    return NormOracle(
        space="C(2^N)",
        evaluator=lambda F, p: CertReal.exact(F.sup()),
        exact=True,
        parts=lambda F: F.sup(),
        reference=lambda F, p: CertReal.exact(F.sup()),
        name="‖·‖∞",
    )


def cylinder_l2_oracle() -> NormOracle:
    return NormOracle(
        space="L2(2^N)",
        evaluator=lambda F, p: cert_sqrt(F.l2_squared(), p),
        parts=lambda F: F.l2_squared(),
        square=lambda F: F.l2_squared(),
        name="‖·‖_L2(μ)",
    )
# endregion


# region checkers
def _sample_pairs(elements: Sequence[Any], vectors: Sequence[Any], paired: bool):
    if paired:
        if len(elements) != len(vectors):
            raise ValueError("Paired sampling needs as many elements as vectors.")
        return list(zip(elements, vectors))
    return [(g, x) for g in elements for x in vectors]


def _compare(
    N: NormOracle, left: Any, right: Any, precision: Fraction, cap: Fraction
) -> Tuple[Comparison, CertReal, CertReal, int]:
    return refine_compare(lambda p: N(left, p), lambda p: N(right, p), precision, cap)


@typechecked
def check_invariance(
    N: NormOracle,
    action: Callable[[Any, Any], Any],
    vectors: Sequence[Any],
    elements: Sequence[Any],
    paired: bool = False,
    instance: str = "",
    seed: Optional[int] = None,
    precision: Scalar = DEFAULT_PRECISION,
    cap: Scalar = PRECISION_CAP,
    verbose: bool = False,
) -> Report:
    """Check N(g·x) = N(x) for every sampled pair (g, x).

    Equal exact parts give PASS with radius 0. Otherwise the two values are
    compared with refinement: exact equality passes, disjoint enclosures fail,
    and overlap at the precision cap is INCONCLUSIVE.

    Args:
        N (NormOracle): The norm.
        action (Callable): (g, x) -> g·x.
        vectors (Sequence): Sample vectors.
        elements (Sequence): Sample group elements (or words).
        paired (bool): If True, pair elements and vectors position by position
            instead of taking all combinations.
        instance (str): Label of the instance in the report.
        seed (int, optional): Seed the samples were drawn with.
        precision (Fraction): Starting precision.
        cap (Fraction): Finest precision.
        verbose (bool): If True, print the final verdict.

    Returns:
        Report: One trial per pair; failing pairs are kept as witnesses.
    """
    precision, cap = as_rational(precision), as_rational(cap)
    report = Report(check="invariance", instance=instance or N.name, seed=seed, notes=list(N.notes))
    for g, x in _sample_pairs(elements, vectors, paired):
        gx = action(g, x)
        if N.parts is not None and N.parts(gx) == N.parts(x):
            report.record(Verdict.PASS)
            continue
        outcome, a, b, refinements = _compare(N, gx, x, precision, cap)
        verdict = {
            Comparison.EQ: Verdict.PASS,
            Comparison.LT: Verdict.FAIL,
            Comparison.GT: Verdict.FAIL,
        }.get(outcome, Verdict.INCONCLUSIVE)
        report.record(verdict, a, b, refinements=refinements, element=g, vector=x, n_gx=a, n_x=b)
    if verbose:
        print(f"{report.verdict.value}: invariance of {N.name} on {report.trials} pairs")
    return report


@typechecked
def check_equivariance(
    d: EquivariantMapDescriptor,
    act_domain: Callable[[Any, Any], Any],
    act_codomain: Callable[[Any, Any], Any],
    vectors: Sequence[Any],
    elements: Sequence[Any],
    equal: Callable[[Any, Any], bool] = operator.eq,
    paired: bool = False,
    instance: str = "",
    seed: Optional[int] = None,
    verbose: bool = False,
) -> Report:
    """Check T(g·x) = g·T(x) exactly for every sampled pair.

    `equal` decides equality in the codomain; failing pairs keep both sides.
    """
    report = Report(check="equivariance", instance=instance or d.name, seed=seed)
    for g, x in _sample_pairs(elements, vectors, paired):
        lhs = d.map(act_domain(g, x))
        rhs = act_codomain(g, d.map(x))
        if equal(lhs, rhs):
            report.record(Verdict.PASS)
        else:
            report.record(Verdict.FAIL, element=g, vector=x, t_of_gx=lhs, g_of_tx=rhs)
    if verbose:
        print(f"{report.verdict.value}: equivariance of {d.name} on {report.trials} pairs")
    return report


@typechecked
def check_strict_convexity(
    N: NormOracle,
    sampler: Optional[Callable[[random.Random], Tuple[Any, Any]]] = None,
    trials: int = 500,
    seed: int = 0,
    pairs: Sequence[Tuple[Any, Any]] = (),
    instance: str = "",
    precision: Scalar = DEFAULT_PRECISION,
    cap: Scalar = PRECISION_CAP,
    verbose: bool = False,
) -> Report:
    """Test N(x + y) < N(x) + N(y) on non-parallel pairs.

    Explicit `pairs` are checked first, then `trials` non-parallel pairs drawn from
    `sampler` with a generator seeded by `seed`. Parallel pairs are detected
    exactly and skipped. A certified strict gap passes; equality or a reversed
    inequality fails; overlap at the cap is INCONCLUSIVE.

    Returns:
        Report: Failing pairs carry both sides; `notes` records the smallest gap.
    """
    precision, cap = as_rational(precision), as_rational(cap)
    report = Report(check="strict-convexity", instance=instance or N.name, seed=seed)
    rng = random.Random(seed)
    skipped = 0
    smallest_gap: Optional[Fraction] = None

    def candidates():
        yield from pairs
        if sampler is None:
            return
        drawn = 0
        attempts = 0
        while drawn < trials and attempts < 10 * trials:
            attempts += 1
            pair = sampler(rng)
            if is_parallel(*pair):
                continue
            drawn += 1
            yield pair

    for x, y in candidates():
        if is_parallel(x, y):
            skipped += 1
            continue
        s = vec_add(x, y)
        outcome, a, b, refinements = refine_compare(
            lambda p: N(s, p), lambda p: N(x, p / 2) + N(y, p / 2), precision, cap
        )
        if outcome is Comparison.LT:
            gap = b.lower - a.upper
            smallest_gap = gap if smallest_gap is None else min(smallest_gap, gap)
            report.record(Verdict.PASS, a, b, refinements=refinements)
        elif outcome is Comparison.INCONCLUSIVE:
            report.record(Verdict.INCONCLUSIVE, a, b, refinements=refinements, x=x, y=y, n_sum=a, n_x_plus_n_y=b)
        else:
            report.record(Verdict.FAIL, a, b, refinements=refinements, x=x, y=y, n_sum=a, n_x_plus_n_y=b)
    if skipped:
        report.notes.append(f"Skipped {skipped} parallel pair(s).")
    if smallest_gap is not None:
        report.notes.append(f"Smallest certified gap: {format_rational(smallest_gap)}")
    if verbose:
        print(f"{report.verdict.value}: strict convexity of {N.name} on {report.trials} pairs")
    return report


@typechecked
def check_equivalence(
    N: NormOracle,
    bounds: Tuple[Scalar, Scalar],
    vectors: Sequence[Any],
    instance: str = "",
    seed: Optional[int] = None,
    precision: Scalar = DEFAULT_PRECISION,
    cap: Scalar = PRECISION_CAP,
    verbose: bool = False,
) -> Report:
    """Check c‖x‖ <= N(x) <= C‖x‖ against the oracle's reference norm.

    Raises:
        ValueError: If the bounds are not 0 < c <= C or the oracle has no reference norm.
    """
    c, C = (as_rational(b) for b in bounds)
    if not 0 < c <= C:
        raise ValueError(f"Bounds must satisfy 0 < c <= C, got ({c}, {C}).")
    if N.reference is None:
        raise ValueError(f"Oracle {N.name} has no reference norm.")
    precision, cap = as_rational(precision), as_rational(cap)
    report = Report(
        check="equivalence",
        instance=instance or f"{N.name} in [{format_rational(c)}, {format_rational(C)}]",
        seed=seed,
        notes=list(N.notes),
    )
    for x in vectors:
        lower = refine_compare(lambda p: N.reference(x, p) * c, lambda p: N(x, p), precision, cap)
        upper = refine_compare(lambda p: N(x, p), lambda p: N.reference(x, p) * C, precision, cap)
        verdicts = []
        for outcome, a, b, refinements in (lower, upper):
            if outcome in (Comparison.LT, Comparison.EQ):
                verdicts.append(Verdict.PASS)
            elif outcome is Comparison.GT:
                verdicts.append(Verdict.FAIL)
            else:
                verdicts.append(Verdict.INCONCLUSIVE)
        verdict = Verdict.FAIL if Verdict.FAIL in verdicts else (
            Verdict.INCONCLUSIVE if Verdict.INCONCLUSIVE in verdicts else Verdict.PASS
        )
        witness = {} if verdict is Verdict.PASS else {"vector": x, "norm": upper[1], "reference": lower[1]}
        report.record(
            verdict, lower[1], lower[2], upper[1], upper[2],
            refinements=max(lower[3], upper[3]),
            **witness,
        )
    if verbose:
        print(f"{report.verdict.value}: equivalence of {N.name} on {report.trials} vectors")
    return report


@typechecked
def obstruction_report(cert: ObstructionCertificate) -> Report:
    """Validate an obstruction certificate, naming the first condition that fails."""
    report = Report(check="obstruction", instance=cert.space, verdict=Verdict.VALID)
    if cert.equal(cert.x, cert.y):
        report.record(Verdict.INVALID, reason="x = y")
        return report
    if not cert.equal(cert.act(cert.g_word, cert.x), cert.y):
        report.record(Verdict.INVALID, reason="g·x != y", g_word=str(cert.g_word))
        return report
    if not cert.equal(cert.act(cert.h_word, cert.x), cert.midpoint(cert.x, cert.y)):
        report.record(Verdict.INVALID, reason="h·x != (x + y)/2", h_word=str(cert.h_word))
        return report
    report.record(Verdict.VALID)
    report.notes.append(
        "Every norm invariant under g and h takes the same value at x, y and (x + y)/2, "
        "so none is strictly convex."
    )
    return report


@typechecked
def check_obstruction(cert: ObstructionCertificate) -> Verdict:
    """VALID iff x != y, g·x = y and h·x = (x + y)/2 hold exactly.

    Examples:
        >>> check_obstruction(f2_certificate())
        <Verdict.VALID: 'VALID'>
    """
    return obstruction_report(cert).verdict


@typechecked
def f2_certificate() -> ObstructionCertificate:
    """x = χ[0,1/3), y = χ[1/3,2/3), g = T2 ("b"), h = T1 ("a") on L1[0, 1]."""
    t1, t2 = f2_counterexample()
    third = Fraction(1, 3)
    return ObstructionCertificate(
        space="L1[0,1]",
        x=StepFn.indicator(0, third),
        y=StepFn.indicator(third, 2 * third),
        g_word=parse_word("b"),
        h_word=parse_word("a"),
        act=lambda w, f: apply_iso(eval_word(w, t1, t2), f),
    )


@typechecked
def certify_injectivity(
    d: EquivariantMapDescriptor,
    vectors: Sequence[Any],
    instance: str = "",
    precision: Scalar = DEFAULT_PRECISION,
) -> Report:
    """Certify T(x) != 0 for an l2-assembly on sample vectors.

    For a component with constant C and witness x_n with ‖x - x_n‖ < C‖x_n‖,
    ‖T_n(x)‖ >= ‖T_n(x_n)‖ - ‖x - x_n‖ >= C‖x_n‖ - ‖x - x_n‖ > 0. Vectors no
    witness covers are decided by evaluating ‖T(x)‖ directly.
    """
    precision = as_rational(precision)
    report = Report(check="injectivity", instance=instance or d.name)
    dom = d.domain_norm
    for n, comp in enumerate(d.components, start=1):
        C = comp.injectivity_constant
        if C is None:
            continue
        for w in comp.witnesses:
            image = comp.codomain_norm(comp.map(w), precision)
            bound = dom(w, precision) * C
            ok = image.lower >= bound.upper or (image.is_exact and bound.is_exact and image.midpoint == bound.midpoint)
            report.record(Verdict.PASS if ok else Verdict.FAIL, image, bound, component=n, witness=w)
    for x in vectors:
        if dom(x, precision).upper == 0:
            continue
        method = None
        for n, comp in enumerate(d.components, start=1):
            C = comp.injectivity_constant
            if C is None:
                continue
            for w in comp.witnesses:
                margin = dom(w, precision) * C - dom(vec_sub(x, w), precision)
                if margin.lower > 0:
                    method = f"estimate via component {n}"
                    break
            if method:
                break
        if method:
            report.record(Verdict.PASS)
            continue
        value = d.codomain_norm(d.map(x), precision)
        if value.lower > 0:
            report.record(Verdict.PASS, value)
        elif value.is_exact and value.midpoint == 0:
            report.record(Verdict.FAIL, value, vector=x, method="direct")
        else:
            report.record(Verdict.INCONCLUSIVE, value, vector=x, method="direct")
    return report


@typechecked
def check_orbit_attainment(
    N: NormOracle,
    base: NormOracle,
    action: Callable[[Any, Any], Any],
    vectors: Sequence[Any],
    elements: Sequence[Any],
    maximizer: Callable[[Any], Any],
    instance: str = "",
    seed: Optional[int] = None,
    precision: Scalar = DEFAULT_PRECISION,
    cap: Scalar = PRECISION_CAP,
) -> Report:
    """Check that N is the orbit supremum of `base`, attained at `maximizer(x)`.

    For every x: base(g·x) <= N(x) for each sampled g, and base(h·x) = N(x) for
    h = maximizer(x). Equal exact parts decide equality; everything else is
    compared with refinement.
    """
    precision, cap = as_rational(precision), as_rational(cap)
    report = Report(check="orbit-attainment", instance=instance or N.name, seed=seed)
    for x in vectors:
        h = maximizer(x)
        hx = action(h, x)
        if base.parts is not None and N.parts is not None and base.parts(hx) == N.parts(x):
            report.record(Verdict.PASS)
        else:
            outcome, a, b, refinements = refine_compare(lambda p: base(hx, p), lambda p: N(x, p), precision, cap)
            verdict = Verdict.PASS if outcome is Comparison.EQ else Verdict.FAIL
            report.record(verdict, a, b, refinements=refinements, vector=x, maximizer=h, base_value=a, norm=b)
        for g in elements:
            gx = action(g, x)
            if base.parts is not None and N.parts is not None and base.parts(gx) == N.parts(x):
                report.record(Verdict.PASS)
                continue
            outcome, a, b, refinements = refine_compare(lambda p: base(gx, p), lambda p: N(x, p), precision, cap)
            if outcome in (Comparison.LT, Comparison.EQ):
                report.record(Verdict.PASS, a, b, refinements=refinements)
            elif outcome is Comparison.GT:
                report.record(Verdict.FAIL, a, b, refinements=refinements, vector=x, element=g, base_value=a, norm=b)
            else:
                report.record(Verdict.INCONCLUSIVE, a, b, refinements=refinements, vector=x, element=g)
    return report
# endregion


# region fundamental domain checks
@typechecked
def check_fundamental_domain(act: FDAction, count: int = 16) -> Report:
    """Check the tiling and translation data of a fundamental-domain action.

    On the first `count` elements: the intervals I_g are disjoint with positive
    length and their total is 1 - 2^-count (1 once a finite group is exhausted);
    every generator maps I_h affinely onto I_{gh} with an RN derivative that is a
    power of two; the enumeration is a bijection.
    """
    report = Report(check="fundamental-domain", instance=act.name)
    elements = act.elements(count)
    intervals = sorted(act.interval(g) for g in elements)
    overlaps = [(a, b) for a, b in zip(intervals, intervals[1:]) if a[1] > b[0]]
    report.record(Verdict.FAIL if overlaps else Verdict.PASS, property="disjoint", overlaps=overlaps)
    total = sum((end - start for start, end in intervals), Fraction(0))
    expected = Fraction(1) if act.size is not None and count >= act.size else 1 - Fraction(1, 2 ** len(elements))
    report.record(
        Verdict.PASS if total == expected and all(e > s for s, e in intervals) else Verdict.FAIL,
        property="tiling",
        total=total,
        expected=expected,
    )
    identity_ok = act.interval(act.identity) == (Fraction(0), Fraction(1) if act.size == 1 else Fraction(1, 2))
    report.record(Verdict.PASS if identity_ok else Verdict.FAIL, property="A = I_e", interval=act.interval(act.identity))
    for k, g in enumerate(elements):
        if act.index(g) != k:
            report.record(Verdict.FAIL, property="enumeration", index=k, element=g)
    for s in act.generators:
        for h in elements:
            p = act.piece(s, h)
            rn = p.rn_derivative
            power_of_two = rn.numerator & (rn.numerator - 1) == 0 and rn.denominator & (rn.denominator - 1) == 0
            ok = (p.src_start, p.src_end) == act.interval(h) and (p.tgt_start, p.tgt_end) == act.interval(
                act.multiply(s, h)
            )
            if not (ok and power_of_two):
                report.record(Verdict.FAIL, property="gI_h = I_gh", generator=s, element=h, rn=rn)
            else:
                report.record(Verdict.PASS)
    return report


@typechecked
def pn_defect_report(act: FDAction, f: StepFn, steps: int = 5) -> Report:
    """Exact defects of P_n along a refinement schedule.

    Each step must satisfy 0 <= tail_bound <= defect, and the defects must not
    increase from one step to the next.
    """
    report = Report(check="pn-defect", instance=f"{act.name}, {steps} steps")
    rows = pn_defect_schedule(act, f, steps)
    previous = None
    for row in rows:
        ok = 0 <= row["tail_bound"] <= row["defect"]
        if previous is not None and row["defect"] > previous:
            ok = False
        report.record(Verdict.PASS if ok else Verdict.FAIL, **({} if ok else row))
        previous = row["defect"]
        report.notes.append(
            f"n={row['n']} trunc={row['trunc']} l1={format_rational(row['l1'])} "
            f"tail={format_rational(row['tail_bound'])} defect={format_rational(row['defect'])}"
        )
    return report


@typechecked
def pn_equivariance_report(
    act: FDAction,
    n: int,
    functions: Sequence[StepFn],
    elements: Sequence[Any],
    trunc: Sequence[Any],
    seed: Optional[int] = None,
) -> Report:
    """P_n(h·f)(g, i) = P_n(f)(h⁻¹g, i) on the entries with g in `trunc`."""
    wide = list(dict.fromkeys(list(trunc) + [act.multiply(act.inverse(h), g) for h in elements for g in trunc]))
    keep = set(trunc)

    def pn(f):
        return pn_apply(act, n, f, wide)

    def translate(h, v: TruncVec) -> TruncVec:
        h_inv = act.inverse(h)
        return TruncVec(
            {(g, i): v.entries[(act.multiply(h_inv, g), i)] for g in trunc for i in range(1, n + 1)},
            v.tail_bound,
        )

    def equal(lhs: TruncVec, rhs: TruncVec) -> bool:
        return all(lhs.entries[key] == value for key, value in rhs.entries.items() if key[0] in keep)

    descriptor = EquivariantMapDescriptor(
        domain="L1[0,1]",
        codomain="l1(G×n)",
        map=pn,
        domain_norm=l1_oracle(),
        codomain_norm=l1_oracle(),
        operator_bound=Fraction(1),
        name=f"P_{n}",
    )
    return check_equivariance(
        descriptor,
        lambda h, f: fd_apply(act, h, f),
        translate,
        functions,
        elements,
        equal=equal,
        instance=f"P_{n} on {act.name}",
        seed=seed,
    )


def hyperoctahedral_group(dim: int) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """All signed permutations (perm, signs) of R^dim."""
    return [
        (perm, signs)
        for perm in itertools.permutations(range(dim))
        for signs in itertools.product((1, -1), repeat=dim)
    ]


def act_signed_perm(g: Tuple[Tuple[int, ...], Tuple[int, ...]], x: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    """(g·x)_{perm(i)} = sign_i · x_i."""
    perm, signs = g
    out = [Fraction(0)] * len(x)
    for i, v in enumerate(x):
        out[perm[i]] = signs[i] * v
    return tuple(out)


def act_word_l1(t1, t2) -> Callable[[FreeWord, StepFn], StepFn]:
    """Action of F2 on L1[0, 1] through the generators t1 = a and t2 = b."""
    return lambda w, f: apply_iso(eval_word(w, t1, t2), f)
# endregion
