import dataclasses
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional

from typeguard import typechecked

from .cantorspace import (
    CylFn,
    mutated_partition,
    odometer_act,
    random_cylfn,
    subshift_certificate,
    verify_cover_identities,
)
from .l1space import (
    SearchBudgetError,
    StepFn,
    apply_iso,
    eval_word,
    f2_counterexample,
    fd_apply,
    find_np,
    fundamental_domain_action,
    l1_norm,
    random_fd_step,
    random_step,
    random_word,
    step_from_json,
    step_to_json,
)
from .numerics import DEFAULT_PRECISION, PrecisionExhaustedError, as_rational, format_rational, random_rational
from .renormkit import (
    PN_CONSTANT_NOTE,
    EquivariantMapDescriptor,
    act_signed_perm,
    act_word_l1,
    c0_sup_oracle,
    c_pair_oracle,
    c0sum_oracle,
    c_renorm_oracle,
    certify_injectivity,
    check_equivalence,
    check_equivariance,
    check_fundamental_domain,
    check_invariance,
    check_orbit_attainment,
    check_strict_convexity,
    cylinder_l2_oracle,
    cylinder_sup_oracle,
    epsilon_close_norm,
    euclidean_oracle,
    f2_certificate,
    fundamental_domain_norm,
    hyperoctahedral_group,
    identity_descriptor,
    l1_oracle,
    l1sum_oracle,
    l2_assembly,
    obstruction_report,
    odometer_oracle,
    orbit_sup_norm,
    pn_defect_report,
    pn_equivariance_report,
    pushforward_norm,
    sorted_sc_oracle,
    tuple_sup_oracle,
    weighted_sc_oracle,
    weighted_sc_vector_oracle,
)
from .reports import Report, Verdict, merge_verdicts, to_jsonable
from .seqspace import (
    Ambient,
    BlockVec,
    CSeq,
    IsoCElem,
    act_blocks,
    act_c,
    act_c_pair,
    c_renorm_map,
    random_block_iso,
    random_block_vec,
    random_cseq,
    random_iso_c,
    sorted_sc_parts,
    sorting_iso,
)

MAX_DIM = 64
MAX_WINDOW = 128
MAX_DEPTH = 16


# region configuration
@dataclass
class ScenarioConfig:
    """Settings of one scenario run.

    `trials` of None means the scenario's own default. Caps: dim <= 64,
    window <= 128, depth <= 16. `function` is a step function in its JSON form;
    find-np searches it instead of the built-in examples.

    Raises:
        ValueError: If any setting is out of range.
    """

    scenario: str
    seed: int = 42
    trials: Optional[int] = None
    precision: Fraction = DEFAULT_PRECISION
    dim: int = 12
    window: int = 32
    depth: int = 10
    function: Optional[str] = None
    out: Optional[Path] = None

    def __post_init__(self):
        self.precision = as_rational(self.precision)
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}.")
        if self.trials is not None and self.trials <= 0:
            raise ValueError(f"trials must be positive, got {self.trials}.")
        if not 0 < self.precision < 1:
            raise ValueError(f"precision must lie in (0, 1), got {format_rational(self.precision)}.")
        for name, value, cap in (("dim", self.dim, MAX_DIM), ("window", self.window, MAX_WINDOW), ("depth", self.depth, MAX_DEPTH)):
            if not 1 <= value <= cap:
                raise ValueError(f"{name} must lie in [1, {cap}], got {value}.")
        if self.window < 2:
            raise ValueError("window must be at least 2.")
        if self.function is not None and l1_norm(step_from_json(self.function)) == 0:
            raise ValueError("function must not vanish identically.")

    def trials_or(self, default: int) -> int:
        return default if self.trials is None else self.trials

    @property
    def step_function(self) -> Optional[StepFn]:
        """The user-supplied step function, if any."""
        return None if self.function is None else step_from_json(self.function)
# endregion


# region scenario model
@dataclass(frozen=True)
class Scenario:
    """A named verification job and the verdicts it is expected to produce."""

    name: str
    paper_result: str
    description: str
    runner: Callable[[ScenarioConfig], Dict[str, Report]]
    expected: Dict[str, Verdict]


@dataclass
class ScenarioResult:
    scenario: str
    paper_result: str
    reports: Dict[str, Report]
    expected: Dict[str, Verdict]
    config: Dict[str, object] = field(default_factory=dict)

    @property
    def verdicts(self) -> Dict[str, Verdict]:
        return {key: report.verdict for key, report in self.reports.items()}

    @property
    def met(self) -> bool:
        """True when every expected verdict was produced."""
        return all(self.verdicts.get(key) is verdict for key, verdict in self.expected.items())

    @property
    def verdict(self) -> Verdict:
        return merge_verdicts(list(self.verdicts.values()))

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "paper_result": self.paper_result,
            "config": self.config,
            "met": self.met,
            "expected": self.expected,
            "reports": {key: report.to_dict() for key, report in self.reports.items()},
        }

    def to_json(self) -> str:
        return json.dumps(to_jsonable(self.to_dict()), sort_keys=True, indent=2)

    def summary(self) -> dict:
        return {
            "scenario": self.scenario,
            "paper_result": self.paper_result,
            "verdicts": self.verdicts,
            "expected": self.expected,
            "met": self.met,
        }
# endregion


# region runners
def _f2_obstruction(cfg: ScenarioConfig) -> Dict[str, Report]:
    cert = f2_certificate()
    t1, t2 = f2_counterexample()
    half = Fraction(1, 2)
    pairs = [(StepFn.indicator(0, half), StepFn.indicator(half, 1)), (cert.x, cert.y)]
    return {
        "certificate": obstruction_report(cert),
        "l1-invariance": check_invariance(
            l1_oracle(), act_word_l1(t1, t2), [cert.x, cert.y], [cert.g_word, cert.h_word], instance="‖·‖₁ under T1, T2"
        ),
        "l1-strict-convexity": check_strict_convexity(l1_oracle(), pairs=pairs, instance="‖·‖₁ on disjoint supports"),
    }


def _l1_word_isometry(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    t1, t2 = f2_counterexample()
    words = [random_word(rng, max_length=8) for _ in range(cfg.trials_or(200))]
    functions = [random_step(rng) for _ in range(20)]
    isos = {w: eval_word(w, t1, t2) for w in words}

    return {
        "l1-invariance": check_invariance(
            l1_oracle(), lambda w, f: apply_iso(isos[w], f), functions, words, instance="reduced words of length <= 8", seed=cfg.seed
        )
    }


_FD_GROUPS = ("INT", "CYCLIC(5)", "FREE(2)")


def _fd_action_build(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    reports = {}
    for spec in _FD_GROUPS:
        act = fundamental_domain_action(spec)
        reports[f"tiling {spec}"] = check_fundamental_domain(act, count=16)
        functions = [random_fd_step(rng, act) for _ in range(cfg.trials_or(10))]
        reports[f"l1-invariance {spec}"] = check_invariance(
            l1_oracle(),
            lambda g, f, act=act: fd_apply(act, g, f),
            functions,
            act.elements(8),
            instance=f"‖·‖₁ under {spec}",
            seed=cfg.seed,
        )
    return reports


def _pn_test_function() -> StepFn:
    return StepFn.indicator(0, Fraction(1, 4)) - StepFn.indicator(Fraction(1, 4), Fraction(1, 2))


def _pn_convergence(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    act = fundamental_domain_action("INT")
    functions = [random_fd_step(rng, act) for _ in range(cfg.trials_or(10))]
    return {
        "defect": pn_defect_report(act, _pn_test_function(), steps=5),
        "equivariance": pn_equivariance_report(act, 4, functions, act.elements(5), act.elements(9), seed=cfg.seed),
    }


def _find_np(cfg: ScenarioConfig) -> Dict[str, Report]:
    act = fundamental_domain_action("INT")
    report = Report(check="find-np", instance="INT", notes=[PN_CONSTANT_NOTE])
    functions = (_pn_test_function(), StepFn.indicator(0, Fraction(1, 2)))
    if cfg.function is not None:
        functions = (cfg.step_function,)
    for f in functions:
        try:
            n, p, value = find_np(act, f, precision=cfg.precision)
        except SearchBudgetError as e:
            report.record(Verdict.FAIL, function=f, error=str(e))
            continue
        report.record(Verdict.PASS, value)
        report.notes.append(f"{step_to_json(f)}: n={n}, p={format_rational(p)}, ‖P_n f‖_p >= {format_rational(value.lower)}")
    return {"search": report}


def _fd_l1_renorm(cfg: ScenarioConfig) -> Dict[str, Report]:
    act = fundamental_domain_action("INT")
    norm = fundamental_domain_norm(act)
    rng = random.Random(cfg.seed)
    functions = [random_fd_step(rng, act, max_index=3) for _ in range(cfg.trials_or(20))]
    disjoint = (StepFn.indicator(0, Fraction(1, 2)), StepFn.indicator(Fraction(1, 2), Fraction(3, 4)))
    return {
        "invariance": check_invariance(
            norm, lambda g, f: fd_apply(act, g, f), functions, act.elements(7), seed=cfg.seed, precision=cfg.precision
        ),
        "equivalence (1, 2)": check_equivalence(norm, (1, 2), functions, seed=cfg.seed, precision=cfg.precision),
        "strict-convexity": check_strict_convexity(
            norm,
            lambda r: (random_fd_step(r, act, max_index=2), random_fd_step(r, act, max_index=2)),
            trials=cfg.trials_or(100),
            seed=cfg.seed,
            pairs=[disjoint],
            precision=cfg.precision,
        ),
        "l1-strict-convexity": check_strict_convexity(l1_oracle(), pairs=[disjoint], instance="‖·‖₁ on disjoint supports"),
    }


def _c0_sorted_invariance(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    count = cfg.trials_or(1000)
    vectors = [random_cseq(rng, max_length=cfg.dim) for _ in range(count)]
    elements = [random_iso_c(rng) for _ in range(count)]
    norm = sorted_sc_oracle()
    return {
        "invariance": check_invariance(
            norm, act_c, vectors, elements, paired=True, seed=cfg.seed, precision=cfg.precision
        ),
        "sup-attainment": check_orbit_attainment(
            norm,
            weighted_sc_oracle(),
            act_c,
            vectors[:100],
            elements[:20],
            sorting_iso,
            seed=cfg.seed,
            precision=cfg.precision,
        ),
    }


def _c0_strict_convexity(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    norm = sorted_sc_oracle()
    vectors = [CSeq.unit(1)] + [random_cseq(rng, max_length=cfg.dim) for _ in range(100)]
    return {
        "strict-convexity": check_strict_convexity(
            norm,
            lambda r: (random_cseq(r, max_length=cfg.dim), random_cseq(r, max_length=cfg.dim)),
            trials=cfg.trials_or(500),
            seed=cfg.seed,
            precision=cfg.precision,
        ),
        "equivalence (1, 2)": check_equivalence(norm, (1, 2), vectors, seed=cfg.seed, precision=cfg.precision),
        "equivalence (1, 5/4)": check_equivalence(
            norm, (1, Fraction(5, 4)), vectors, seed=cfg.seed, precision=cfg.precision
        ),
    }


def _same_shape(rng: random.Random, v: BlockVec) -> BlockVec:
    return BlockVec(tuple((cid, tuple(random_rational(rng) for _ in coords)) for cid, coords in v.blocks), v.ambient)


def _block_reports(cfg: ScenarioConfig, ambient: Ambient) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    count = cfg.trials_or(500)
    norm = c0sum_oracle() if ambient is Ambient.C0SUM else l1sum_oracle()
    vectors = [random_block_vec(rng, ambient) for _ in range(count)]
    elements = [random_block_iso(rng, v) for v in vectors]

    def sampler(r):
        v = random_block_vec(r, ambient)
        return v, _same_shape(r, v)

    return {
        "invariance": check_invariance(
            norm, act_blocks, vectors, elements, paired=True, seed=cfg.seed, precision=cfg.precision
        ),
        "strict-convexity": check_strict_convexity(
            norm, sampler, trials=count, seed=cfg.seed, precision=cfg.precision
        ),
    }


def _c0sum_norm(cfg: ScenarioConfig) -> Dict[str, Report]:
    return _block_reports(cfg, Ambient.C0SUM)


def _l1sum_norm(cfg: ScenarioConfig) -> Dict[str, Report]:
    return _block_reports(cfg, Ambient.L1SUM)


def discrepancy_element() -> IsoCElem:
    """Identity permutation, sign -1 at position 1, tail sign +1."""
    return IsoCElem.from_mapping({}, sign_dev=(1,), tail_sign=1)


def _c_renorm_audit(cfg: ScenarioConfig) -> Dict[str, Report]:
    norm = c_renorm_oracle()
    descriptor = EquivariantMapDescriptor(
        domain="c",
        codomain="c0 ⊕ R",
        map=c_renorm_map,
        domain_norm=c0_sup_oracle(),
        codomain_norm=c_pair_oracle(),
        operator_bound=Fraction(2),
        name="x -> (x - lim x, lim x)",
    )
    g, one = discrepancy_element(), CSeq.constant(1)
    rng = random.Random(cfg.seed)
    transported = pushforward_norm(descriptor, c0_sup_oracle())
    matches = Report(check="pushforward", instance="‖x‖_c + ‖T x‖ = c_renorm")
    for x in [one] + [random_cseq(rng, max_length=cfg.dim, c0=False) for _ in range(100)]:
        sup, ((top, radicand), tail_sq) = transported.parts(x)
        same = (sup, top, radicand, tail_sq) == norm.parts(x)
        matches.record(Verdict.PASS if same else Verdict.FAIL, **({} if same else {"vector": x}))
    return {
        "pushforward": matches,
        "equivariance": check_equivariance(descriptor, act_c, act_c_pair, [one], [g], instance="c_renorm_map at 𝟙"),
        "invariance": check_invariance(norm, act_c, [one], [g], instance="c_renorm at 𝟙", precision=cfg.precision),
        "strict-convexity": check_strict_convexity(
            norm,
            lambda r: (random_cseq(r, max_length=cfg.dim, c0=False), random_cseq(r, max_length=cfg.dim, c0=False)),
            trials=cfg.trials_or(500),
            seed=cfg.seed,
            precision=cfg.precision,
        ),
    }


def _subshift_identities(cfg: ScenarioConfig) -> Dict[str, Report]:
    return {
        "obstruction partition": verify_cover_identities(window=cfg.window),
        "mutated partition": verify_cover_identities(window=cfg.window, partition=mutated_partition()),
    }


def _subshift_obstruction(cfg: ScenarioConfig) -> Dict[str, Report]:
    cert = subshift_certificate()
    return {
        "certificate": obstruction_report(cert),
        "shift power 2": obstruction_report(subshift_certificate(shift_power=2)),
        "x = y": obstruction_report(dataclasses.replace(cert, y=cert.x)),
    }


def odometer_fixture() -> List[CylFn]:
    """The 62 cylinder indicators of depth 1 to 5 plus the constants 0 and 1."""
    out = [CylFn.constant(0), CylFn.constant(1)]
    for depth in range(1, 6):
        for k in range(2**depth):
            out.append(CylFn.cylinder(tuple((k >> (depth - 1 - j)) & 1 for j in range(depth))))
    return out


def _odometer_power(k: int, F: CylFn) -> CylFn:
    for _ in range(k):
        F = odometer_act(F)
    return F


def _odometer_invariance(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    functions = odometer_fixture() + [random_cylfn(rng, max_depth=cfg.depth) for _ in range(cfg.trials_or(200))]
    powers = [1, 2, 3, 5, 8]
    norm = odometer_oracle()
    inclusion = identity_descriptor(cylinder_sup_oracle(), cylinder_l2_oracle())
    transported = pushforward_norm(inclusion, cylinder_sup_oracle())
    matches = Report(check="pushforward", instance="‖·‖∞ + ‖·‖_L2(μ) = odometer_sc_norm")
    for F in functions:
        same = transported.parts(F) == norm.parts(F)
        matches.record(Verdict.PASS if same else Verdict.FAIL, **({} if same else {"function": F}))
    return {
        "invariance": check_invariance(norm, _odometer_power, functions, powers, seed=cfg.seed),
        "inclusion-equivariance": check_equivariance(
            inclusion, _odometer_power, _odometer_power, functions[:64], powers, seed=cfg.seed
        ),
        "pushforward": matches,
        "strict-convexity": check_strict_convexity(
            norm,
            lambda r: (random_cylfn(r, max_depth=cfg.depth), random_cylfn(r, max_depth=cfg.depth)),
            trials=cfg.trials_or(200),
            seed=cfg.seed,
            precision=cfg.precision,
        ),
    }


EPSILONS = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 10))


def _half_integrals(f: StepFn):
    half = Fraction(1, 2)
    return f.integral(0, half), f.integral(half, 1)


def _epsilon_instances():
    sup = tuple_sup_oracle()
    r2 = dataclasses.replace(identity_descriptor(sup, euclidean_oracle(), bound=2), operator_norm_sq=Fraction(2))
    c0 = identity_descriptor(c0_sup_oracle(), sorted_sc_oracle(), bound=2)
    step = EquivariantMapDescriptor(
        domain="L1[0,1]",
        codomain="l2^2",
        map=_half_integrals,
        domain_norm=l1_oracle(),
        codomain_norm=euclidean_oracle(),
        operator_bound=Fraction(1),
        operator_norm_sq=Fraction(1),
        name="half integrals",
    )
    return (
        ("R2", r2, lambda r: (random_rational(r), random_rational(r))),
        ("c0", c0, lambda r: random_cseq(r, max_length=12)),
        ("step", step, random_step),
    )


def _epsilon_close_bounds(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    reports = {}
    for label, descriptor, sampler in _epsilon_instances():
        vectors = [sampler(rng) for _ in range(cfg.trials_or(200))]
        for eps in EPSILONS:
            norm = epsilon_close_norm(descriptor, eps)
            reports[f"{label} eps={format_rational(eps)}"] = check_equivalence(
                norm, (1 - eps, 1 + eps), vectors, seed=cfg.seed, precision=cfg.precision
            )
    return reports


def _projection(index: int) -> EquivariantMapDescriptor:
    return EquivariantMapDescriptor(
        domain="l∞^2",
        codomain="R",
        map=lambda x, index=index: (x[index],),
        domain_norm=tuple_sup_oracle(),
        codomain_norm=euclidean_oracle(),
        operator_bound=Fraction(1),
        injectivity_constant=Fraction(1),
        witnesses=(tuple(Fraction(int(i == index)) for i in range(2)),),
        name=f"x{index + 1}",
    )


def _assembly_injectivity(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    assembled = l2_assembly([_projection(0), _projection(1)])
    vectors = [(random_rational(rng), random_rational(rng)) for _ in range(cfg.trials_or(200))]
    bound = Report(check="operator-bound", instance=assembled.name)
    ok = assembled.operator_bound <= 1
    bound.record(Verdict.PASS if ok else Verdict.FAIL, **({} if ok else {"bound": assembled.operator_bound}))
    scalar = l2_assembly([identity_descriptor(tuple_sup_oracle(), euclidean_oracle())] * 2)
    weights = Report(check="l2-weights", instance="two identities on R")
    for x in vectors:
        value = scalar.codomain_norm.square(scalar.map(x[:1]))
        ok = value == Fraction(5, 16) * x[0] ** 2
        weights.record(Verdict.PASS if ok else Verdict.FAIL, **({} if ok else {"vector": x[:1], "square": value}))
    return {
        "injectivity": certify_injectivity(assembled, vectors, precision=cfg.precision),
        "operator-bound": bound,
        "l2-weights": weights,
        "strict-convexity": check_strict_convexity(
            pushforward_norm(assembled, tuple_sup_oracle()),
            lambda r: ((random_rational(r), random_rational(r)), (random_rational(r), random_rational(r))),
            trials=cfg.trials_or(200),
            seed=cfg.seed,
            precision=cfg.precision,
        ),
    }


def _finite_group_sup(cfg: ScenarioConfig) -> Dict[str, Report]:
    rng = random.Random(cfg.seed)
    dim = min(cfg.dim, 3)
    group = hyperoctahedral_group(dim)
    norm = orbit_sup_norm(weighted_sc_vector_oracle(), group, act_signed_perm, name="orbit sup on R^d")
    vectors = [tuple(random_rational(rng) for _ in range(dim)) for _ in range(cfg.trials_or(100))]
    elements = rng.sample(group, min(10, len(group)))
    sorted_match = Report(check="orbit-sup = sorted_sc_norm", instance=f"R^{dim}")
    for x in vectors:
        top = sorted_sc_parts(CSeq(x))
        radicands = [r for _, r in norm.parts(x)]
        ok = top in norm.parts(x) and max(radicands) == top[1]
        sorted_match.record(Verdict.PASS if ok else Verdict.FAIL, **({} if ok else {"vector": x}))
    return {
        "invariance": check_invariance(norm, act_signed_perm, vectors, elements, seed=cfg.seed),
        "strict-convexity": check_strict_convexity(
            norm,
            lambda r: tuple(tuple(random_rational(r) for _ in range(dim)) for _ in range(2)),
            trials=cfg.trials_or(100),
            seed=cfg.seed,
            precision=cfg.precision,
        ),
        "matches sorted_sc_norm": sorted_match,
    }
# endregion


# region catalog
P, F, V, I = Verdict.PASS, Verdict.FAIL, Verdict.VALID, Verdict.INVALID

SCENARIOS: Dict[str, Scenario] = {
    s.name: s
    for s in (
        Scenario(
            "f2-l1-obstruction",
            "L1[0,1] has no F2-invariant strictly convex renorming",
            "Certificate χ[0,1/3) -> χ[1/3,2/3) under T2 with midpoint under T1; ‖·‖₁ fails on disjoint supports.",
            _f2_obstruction,
            {"certificate": V, "l1-invariance": P, "l1-strict-convexity": F},
        ),
        Scenario(
            "l1-word-isometry",
            "Lattice isometries T1, T2 of L1[0,1] generate F2",
            "Random reduced words preserve ‖·‖₁ exactly on random step functions.",
            _l1_word_isometry,
            {"l1-invariance": P},
        ),
        Scenario(
            "fd-action-build",
            "Free actions with a measurable fundamental domain",
            "Dyadic fundamental domains tile [0, 1) and the actions preserve ‖·‖₁.",
            _fd_action_build,
            {key: P for spec in _FD_GROUPS for key in (f"tiling {spec}", f"l1-invariance {spec}")},
        ),
        Scenario(
            "pn-convergence",
            "Operators P_n for an action with a measurable fundamental domain",
            "Exact defects of P_n decrease under refinement; P_n is equivariant on the truncation.",
            _pn_convergence,
            {"defect": P, "equivariance": P},
        ),
        Scenario(
            "find-np",
            "Operators P_n for an action with a measurable fundamental domain",
            "Certified (n, p) with ‖P_n f‖_p >= ‖f‖₁/2.",
            _find_np,
            {"search": P},
        ),
        Scenario(
            "fd-l1-renorm",
            "L1 with a free action by lattice isometries and a measurable fundamental domain has an invariant strictly convex renorming",
            "‖·‖₁ plus the l2-assembly of P_1, P_2, ..., P_16 for the dyadic Z-action is invariant, equivalent and strictly convex.",
            _fd_l1_renorm,
            {"invariance": P, "equivalence (1, 2)": P, "strict-convexity": P, "l1-strict-convexity": F},
        ),
        Scenario(
            "c0-sorted-invariance",
            "c0 admits an Iso(c0)-invariant strictly convex renorming",
            "sorted_sc_norm is invariant under signed permutations and is the attained orbit supremum.",
            _c0_sorted_invariance,
            {"invariance": P, "sup-attainment": P},
        ),
        Scenario(
            "c0-strict-convexity",
            "c0 admits an Iso(c0)-invariant strictly convex renorming",
            "Midpoint-triangle sampling and the equivalence constants of sorted_sc_norm.",
            _c0_strict_convexity,
            {"strict-convexity": P, "equivalence (1, 2)": P, "equivalence (1, 5/4)": F},
        ),
        Scenario(
            "c0sum-norm",
            "c0-sums of Euclidean spaces admit invariant strictly convex renormings",
            "Invariance under block isometries and strict convexity of c0sum_sorted_norm.",
            _c0sum_norm,
            {"invariance": P, "strict-convexity": P},
        ),
        Scenario(
            "l1sum-norm",
            "l1-sums of Euclidean spaces admit invariant strictly convex renormings",
            "Invariance under block isometries and strict convexity of l1sum_sc_norm.",
            _l1sum_norm,
            {"invariance": P, "strict-convexity": P},
        ),
        Scenario(
            "c-renorm-audit",
            "The Banach space c has an Iso(c)-invariant strictly convex renorming",
            "The stated map is not equivariant for a non-constant sign function; the norm is strictly convex.",
            _c_renorm_audit,
            {"pushforward": P, "equivariance": F, "invariance": F, "strict-convexity": P},
        ),
        Scenario(
            "subshift-identities",
            "A countable compact subshift without invariant strictly convex renorming of C(X)",
            "Partition, image and midpoint identities, exhaustively and symbolically; a mutated partition fails.",
            _subshift_identities,
            {"obstruction partition": P, "mutated partition": F},
        ),
        Scenario(
            "subshift-obstruction",
            "A countable compact subshift without invariant strictly convex renorming of C(X)",
            "Certificate f -> f' under the swap with midpoint under the shift; negative controls are rejected.",
            _subshift_obstruction,
            {"certificate": V, "shift power 2": I, "x = y": I},
        ),
        Scenario(
            "odometer-invariance",
            "Finite disjoint unions of minimal subspaces: the binary odometer",
            "‖·‖∞ + ‖·‖_L2(μ) is odometer-invariant, a pushforward and strictly convex.",
            _odometer_invariance,
            {"invariance": P, "inclusion-equivariance": P, "pushforward": P, "strict-convexity": P},
        ),
        Scenario(
            "epsilon-close-bounds",
            "ε-close invariant strictly convex renormings",
            "(1 - ε)‖x‖ <= |||x||| <= (1 + ε)‖x‖ on R^2, c0 and step functions.",
            _epsilon_close_bounds,
            {
                f"{label} eps={format_rational(eps)}": P
                for label in ("R2", "c0", "step")
                for eps in EPSILONS
            },
        ),
        Scenario(
            "assembly-injectivity",
            "Assembling equivariant operators into an injective one",
            "x -> (T_n x / 2^n) is bounded by 1, injective on samples and yields a strictly convex pushforward.",
            _assembly_injectivity,
            {"injectivity": P, "operator-bound": P, "l2-weights": P, "strict-convexity": P},
        ),
        Scenario(
            "finite-group-sup",
            "Attained orbit suprema of strictly convex norms",
            "Orbit supremum over signed coordinate permutations of R^d equals sorted_sc_norm.",
            _finite_group_sup,
            {"invariance": P, "strict-convexity": P, "matches sorted_sc_norm": P},
        ),
    )
}
# endregion


# region running
@typechecked
def run_scenario(cfg: ScenarioConfig, verbose: bool = False) -> ScenarioResult:
    """Run one scenario and compare its verdicts with the expected ones.

    Args:
        cfg (ScenarioConfig): Validated settings.
        verbose (bool): If True, print one line per report.

    Returns:
        ScenarioResult: Reports keyed by check, with the expectations.

    Raises:
        ValueError: If the scenario name is unknown.
        PrecisionExhaustedError: If a check stayed INCONCLUSIVE at the precision cap.
        RuntimeError: If the result cannot be written to `cfg.out`.
    """
    scenario = SCENARIOS.get(cfg.scenario)
    if scenario is None:
        raise ValueError(f"Unknown scenario '{cfg.scenario}'. Available: {', '.join(SCENARIOS)}")
    reports = scenario.runner(cfg)
    for key, report in reports.items():
        report.paper_result = scenario.paper_result
        if verbose:
            print(f"{'✅' if scenario.expected.get(key) is report.verdict else '❌'} {key}: {report.verdict.value}")
    stuck = [
        key
        for key, report in reports.items()
        if report.verdict is Verdict.INCONCLUSIVE and scenario.expected.get(key) is not Verdict.INCONCLUSIVE
    ]
    if stuck:
        raise PrecisionExhaustedError(f"Scenario '{cfg.scenario}': no decision at the precision cap for {', '.join(stuck)}.")
    config = {k: v for k, v in dataclasses.asdict(cfg).items() if k != "out"}
    result = ScenarioResult(scenario.name, scenario.paper_result, reports, scenario.expected, config)
    if cfg.out is not None:
        write_result(result, cfg.out)
    return result


@typechecked
def write_result(result: ScenarioResult, output_path: Path) -> Path:
    """Write a scenario result as JSON.

    Raises:
        RuntimeError: If the file cannot be written.
    """
    try:
        output_path.write_text(result.to_json() + "\n", encoding="utf-8")
    except OSError as e:
        raise RuntimeError(f"Failed to write report to '{output_path}': {e}") from e
    return output_path
# endregion
