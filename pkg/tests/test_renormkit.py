import dataclasses
from fractions import Fraction

import pytest

from renormlab.l1space import StepFn, f2_counterexample, fd_apply, fundamental_domain_action, random_fd_step
from renormlab.numerics import CertReal
from renormlab.renormkit import (
    EquivariantMapDescriptor,
    act_signed_perm,
    act_word_l1,
    c0_sup_oracle,
    c0sum_oracle,
    c_pair_oracle,
    c_renorm_oracle,
    certify_injectivity,
    check_equivalence,
    check_equivariance,
    check_fundamental_domain,
    check_invariance,
    check_obstruction,
    check_orbit_attainment,
    check_strict_convexity,
    epsilon_close_norm,
    euclidean_oracle,
    f2_certificate,
    fundamental_domain_norm,
    hyperoctahedral_group,
    identity_descriptor,
    is_parallel,
    l1_oracle,
    l2_assembly,
    orbit_sup_norm,
    pn_defect_report,
    pn_equivariance_report,
    pushforward_norm,
    sorted_sc_oracle,
    tuple_sup_oracle,
    weighted_sc_oracle,
    weighted_sc_vector_oracle,
)
from renormlab.reports import Verdict
from renormlab.seqspace import CSeq, IsoCElem, act_c, act_c_pair, c_renorm_map, random_cseq, sorting_iso


def projection(index: int) -> EquivariantMapDescriptor:
    """Coordinate projection of (R^2, ‖·‖∞) onto R with witness e_index."""
    return EquivariantMapDescriptor(
        domain="l∞^2",
        codomain="R",
        map=lambda x: (x[index],),
        domain_norm=tuple_sup_oracle(),
        codomain_norm=euclidean_oracle(),
        operator_bound=Fraction(1),
        injectivity_constant=Fraction(1),
        witnesses=(tuple(Fraction(int(i == index)) for i in range(2)),),
        name=f"x{index + 1}",
    )


class TestInvariance:  # noqa: D101
    def test_sorted_norm_is_invariant(self, c0_vectors, c0_elements):
        report = check_invariance(sorted_sc_oracle(), act_c, c0_vectors, c0_elements, paired=True)
        assert report.verdict is Verdict.PASS
        assert report.trials == len(c0_vectors)
        assert report.max_radius == 0

    def test_weighted_norm_is_not_invariant(self):
        g = IsoCElem.from_mapping({1: 2, 2: 1})
        report = check_invariance(weighted_sc_oracle(), act_c, [CSeq.unit(1)], [g])
        assert report.verdict is Verdict.FAIL
        assert report.witnesses[0]["n_gx"] == CertReal.exact(Fraction(5, 4))

    def test_c_renorm_discrepancy(self, one_sequence, discrepancy_iso):
        report = check_invariance(c_renorm_oracle(), act_c, [one_sequence], [discrepancy_iso])
        assert report.verdict is Verdict.FAIL
        witness = report.witnesses[0]
        assert witness["n_x"] == CertReal.exact(2)
        assert witness["n_gx"].lower > 4
        assert report.notes

    def test_paired_needs_equal_lengths(self, c0_vectors, c0_elements):
        with pytest.raises(ValueError, match="Paired sampling"):
            check_invariance(sorted_sc_oracle(), act_c, c0_vectors, c0_elements[:3], paired=True)


class TestEquivariance:  # noqa: D101
    def test_c_renorm_map_is_not_equivariant(self, one_sequence, discrepancy_iso):
        d = EquivariantMapDescriptor(
            domain="c",
            codomain="c0 ⊕ R",
            map=c_renorm_map,
            domain_norm=c0_sup_oracle(),
            codomain_norm=c_pair_oracle(),
            operator_bound=Fraction(2),
        )
        report = check_equivariance(d, act_c, act_c_pair, [one_sequence], [discrepancy_iso])
        assert report.verdict is Verdict.FAIL
        assert report.witnesses[0]["t_of_gx"] == (CSeq((-2,)), Fraction(1))
        assert report.witnesses[0]["g_of_tx"] == (CSeq(), Fraction(1))

    def test_identity_is_equivariant(self, c0_vectors, c0_elements):
        d = identity_descriptor(c0_sup_oracle(), sorted_sc_oracle())
        assert check_equivariance(d, act_c, act_c, c0_vectors[:10], c0_elements[:10]).verdict is Verdict.PASS

    def test_pn_commutes_with_translation(self, rng, int_action):
        functions = [random_fd_step(rng, int_action) for _ in range(5)]
        report = pn_equivariance_report(int_action, 4, functions, int_action.elements(5), int_action.elements(9))
        assert report.verdict is Verdict.PASS
        assert report.trials == 25


class TestStrictConvexity:  # noqa: D101
    def test_l1_fails_on_disjoint_supports(self):
        half = Fraction(1, 2)
        pair = (StepFn.indicator(0, half), StepFn.indicator(half, 1))
        report = check_strict_convexity(l1_oracle(), pairs=[pair])
        assert report.verdict is Verdict.FAIL
        assert report.witnesses[0]["n_sum"] == CertReal.exact(1)

    def test_parallel_pairs_are_skipped(self):
        x = (Fraction(1), Fraction(2))
        report = check_strict_convexity(tuple_sup_oracle(), pairs=[(x, (Fraction(-2), Fraction(-4)))])
        assert report.trials == 0
        assert report.notes == ["Skipped 1 parallel pair(s)."]

    def test_sorted_norm_is_strictly_convex(self):
        report = check_strict_convexity(
            sorted_sc_oracle(),
            lambda r: (random_cseq(r, 6), random_cseq(r, 6)),
            trials=40,
            seed=3,
            pairs=[(CSeq.unit(1), CSeq.unit(2))],
        )
        assert report.verdict is Verdict.PASS
        assert any(note.startswith("Smallest certified gap") for note in report.notes)

    def test_sup_norm_is_not(self):
        pair = ((Fraction(1), Fraction(0)), (Fraction(1), Fraction(1)))
        assert check_strict_convexity(tuple_sup_oracle(), pairs=[pair]).verdict is Verdict.FAIL

    def test_is_parallel(self):
        assert is_parallel(CSeq((1, 2)), CSeq((2, 4)))
        assert not is_parallel(CSeq((1, 2)), CSeq((2, 3)))
        assert is_parallel(CSeq(), CSeq((5,)))


class TestEquivalence:  # noqa: D101
    def test_claimed_bounds_hold(self, c0_vectors):
        N = sorted_sc_oracle()
        assert check_equivalence(N, N.claimed_bounds, c0_vectors).verdict is Verdict.PASS

    def test_tighter_upper_bound_fails(self, c0_vectors):
        report = check_equivalence(sorted_sc_oracle(), (1, Fraction(5, 4)), c0_vectors)
        assert report.verdict is Verdict.FAIL
        assert report.witnesses[0]["vector"] == CSeq.unit(1)

    def test_invalid_bounds(self, c0_vectors):
        with pytest.raises(ValueError, match="0 < c <= C"):
            check_equivalence(sorted_sc_oracle(), (2, 1), c0_vectors)

    def test_missing_reference(self):
        with pytest.raises(ValueError, match="no reference norm"):
            check_equivalence(c0sum_oracle(), (1, 2), [])


class TestConstructions:  # noqa: D101
    def test_pushforward(self):
        N = pushforward_norm(identity_descriptor(c0_sup_oracle(), sorted_sc_oracle()), c0_sup_oracle())
        assert N(CSeq.unit(1)) == CertReal.exact(Fraction(5, 2))
        assert N.parts(CSeq.unit(3)) == N.parts(CSeq.unit(1))

    def test_epsilon_close_example(self, sup_to_euclid):
        N = epsilon_close_norm(sup_to_euclid, Fraction(1, 2))
        assert N((Fraction(1), Fraction(1))) == CertReal.exact(Fraction(3, 2))
        assert N.claimed_bounds == (Fraction(1, 2), Fraction(3, 2))

    def test_epsilon_close_bounds(self, sup_to_euclid, plane_vectors):
        for eps in (Fraction(1, 2), Fraction(1, 10)):
            N = epsilon_close_norm(sup_to_euclid, eps)
            assert check_equivalence(N, N.claimed_bounds, plane_vectors).verdict is Verdict.PASS

    def test_epsilon_close_inexact_path(self, c0_vectors):
        d = identity_descriptor(c0_sup_oracle(), sorted_sc_oracle(), bound=2)
        N = epsilon_close_norm(d, Fraction(1, 4))
        assert check_equivalence(N, N.claimed_bounds, c0_vectors).verdict is Verdict.PASS

    @pytest.mark.parametrize("eps", [0, 1, Fraction(-1, 2)])
    def test_epsilon_range(self, sup_to_euclid, eps):
        with pytest.raises(ValueError, match="epsilon"):
            epsilon_close_norm(sup_to_euclid, eps)

    def test_epsilon_warning(self, sup_to_euclid):
        with pytest.warns(UserWarning, match="codomain"):
            epsilon_close_norm(sup_to_euclid, Fraction(1, 2), warn=True)

    def test_l2_assembly_weights(self, real_identity):
        assembled = l2_assembly([real_identity, real_identity])
        y = assembled.map((Fraction(4),))
        assert y == ((Fraction(2),), (Fraction(1),))
        assert assembled.codomain_norm.square(y) == 5
        bound = assembled.operator_bound
        assert bound**2 >= Fraction(5, 16)
        assert bound**2 - Fraction(5, 16) < Fraction(1, 2**60)

    def test_l2_assembly_errors(self, real_identity):
        with pytest.raises(ValueError, match="at least one map"):
            l2_assembly([])
        with pytest.raises(ValueError, match="operator bound"):
            l2_assembly([dataclasses.replace(real_identity, operator_bound=Fraction(2))])
        with pytest.raises(ValueError, match="domain"):
            l2_assembly([real_identity, dataclasses.replace(real_identity, domain="c0")])

    def test_orbit_sup_norm(self, plane_vectors):
        group = hyperoctahedral_group(2)
        assert len(group) == 8
        N = orbit_sup_norm(weighted_sc_vector_oracle(), group, act_signed_perm)
        assert N((Fraction(0), Fraction(1))) == CertReal.exact(Fraction(3, 2))
        assert check_invariance(N, act_signed_perm, plane_vectors, group).verdict is Verdict.PASS

    def test_orbit_sup_norm_empty(self):
        with pytest.raises(ValueError, match="at least one group element"):
            orbit_sup_norm(weighted_sc_vector_oracle(), [], act_signed_perm)

    def test_orbit_attainment(self, c0_vectors, c0_elements):
        report = check_orbit_attainment(
            sorted_sc_oracle(), weighted_sc_oracle(), act_c, c0_vectors[:20], c0_elements[:10], sorting_iso
        )
        assert report.verdict is Verdict.PASS
        assert report.trials == 20 * 11


class TestInjectivity:  # noqa: D101
    def test_projections_together_are_injective(self, plane_vectors):
        assembled = l2_assembly([projection(0), projection(1)])
        assert certify_injectivity(assembled, plane_vectors).verdict is Verdict.PASS

    def test_single_projection_has_a_kernel(self):
        assembled = l2_assembly([projection(0)])
        report = certify_injectivity(assembled, [(Fraction(0), Fraction(1))])
        assert report.verdict is Verdict.FAIL
        assert report.witnesses[0]["method"] == "direct"


class TestObstruction:  # noqa: D101
    def test_f2_certificate(self):
        assert check_obstruction(f2_certificate()) is Verdict.VALID

    def test_swapped_roles_are_invalid(self):
        cert = dataclasses.replace(f2_certificate(), g_word=f2_certificate().h_word)
        assert check_obstruction(cert) is Verdict.INVALID

    def test_invariant_norm_cannot_be_strictly_convex(self):
        """A valid certificate forces equality in the triangle inequality for (x, y)."""
        cert = f2_certificate()
        N = l1_oracle()
        words = [cert.g_word, cert.h_word]
        assert check_invariance(N, cert.act, [cert.x], words).verdict is Verdict.PASS
        assert check_strict_convexity(N, pairs=[(cert.x, cert.y)]).verdict is Verdict.FAIL

    def test_l2_norm_is_not_invariant(self, l2_step_norm):
        cert = f2_certificate()
        report = check_invariance(l2_step_norm, act_word_l1(*f2_counterexample()), [cert.x], [cert.h_word])
        assert report.verdict is Verdict.FAIL


class TestFundamentalDomainChecks:  # noqa: D101
    @pytest.mark.parametrize("spec", ["INT", "CYCLIC(5)", "FREE(2)"])
    def test_tiling(self, spec):
        report = check_fundamental_domain(fundamental_domain_action(spec))
        assert report.verdict is Verdict.PASS

    def test_pn_defect_report(self, int_action, pn_function):
        report = pn_defect_report(int_action, pn_function, steps=5)
        assert report.verdict is Verdict.PASS
        assert len(report.notes) == 5
        assert report.notes[0] == "n=1 trunc=1 l1=0 tail=0 defect=1/2"


class TestFundamentalDomainNorm:  # noqa: D101
    def test_single_component(self, int_action):
        N = fundamental_domain_norm(int_action, steps=1)
        assert N(StepFn.indicator(0, Fraction(1, 2))) == CertReal.exact(Fraction(3, 4))

    def test_steps_must_be_positive(self, int_action):
        with pytest.raises(ValueError, match="steps"):
            fundamental_domain_norm(int_action, steps=0)

    def test_invariance_is_exact(self, rng, int_action):
        functions = [random_fd_step(rng, int_action, max_index=3) for _ in range(8)]
        report = check_invariance(
            fundamental_domain_norm(int_action),
            lambda g, f: fd_apply(int_action, g, f),
            functions,
            int_action.elements(5),
        )
        assert report.verdict is Verdict.PASS
        assert report.trials == 40
        assert report.max_radius == 0

    def test_strict_where_l1_is_not(self, int_action):
        pair = (StepFn.indicator(0, Fraction(1, 2)), StepFn.indicator(Fraction(1, 2), Fraction(3, 4)))
        assert check_strict_convexity(l1_oracle(), pairs=[pair]).verdict is Verdict.FAIL
        assert check_strict_convexity(fundamental_domain_norm(int_action), pairs=[pair]).verdict is Verdict.PASS

    def test_sampled_strict_convexity(self, int_action):
        report = check_strict_convexity(
            fundamental_domain_norm(int_action),
            lambda r: (random_fd_step(r, int_action, max_index=2), random_fd_step(r, int_action, max_index=2)),
            trials=20,
            seed=3,
        )
        assert report.verdict is Verdict.PASS

    def test_equivalent_to_l1(self, rng, int_action):
        functions = [random_fd_step(rng, int_action, max_index=3) for _ in range(10)]
        report = check_equivalence(fundamental_domain_norm(int_action), (1, 2), functions)
        assert report.verdict is Verdict.PASS
