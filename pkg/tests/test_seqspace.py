from fractions import Fraction

import pytest

from renormlab.numerics import CertReal
from renormlab.seqspace import (
    Ambient,
    BlockIso,
    BlockVec,
    CSeq,
    IsoCElem,
    act_blocks,
    act_c,
    act_c_pair,
    c0sum_sorted_norm,
    c0sum_sorted_parts,
    c_renorm,
    c_renorm_map,
    l1sum_base_norm,
    l1sum_parts,
    l1sum_sc_norm,
    random_block_iso,
    random_block_vec,
    sorted_sc_norm,
    sorted_sc_parts,
    sorting_iso,
    sup_norm,
    weighted_sc_norm,
)


class TestCSeq:  # noqa: D101
    def test_trailing_tail_entries_are_trimmed(self):
        assert CSeq((1, 0, 0)) == CSeq((1,))
        assert CSeq((2, 5, 5), 5) == CSeq((2,), 5)

    def test_unit_and_entry(self):
        e3 = CSeq.unit(3)
        assert e3.entry(3) == 1
        assert e3.entry(1) == 0
        assert e3.entry(100) == 0

    def test_positions_start_at_one(self):
        with pytest.raises(ValueError, match="start at 1"):
            CSeq.unit(0)

    def test_arithmetic(self):
        x = CSeq((1, 2), 3)
        assert x - CSeq.constant(3) == CSeq((-2, -1))
        assert Fraction(1, 2) * x == CSeq((Fraction(1, 2), 1), Fraction(3, 2))

    def test_sup_norm(self):
        assert sup_norm(CSeq((1, -3), 2)) == 3
        assert sup_norm(CSeq()) == 0


class TestIsoCElem:  # noqa: D101
    def test_action_moves_and_signs(self):
        g = IsoCElem.from_mapping({1: 2, 2: 1}, sign_dev=(1,))
        assert act_c(g, CSeq((5, 7))) == CSeq((-7, 5))

    def test_tail_sign(self):
        g = IsoCElem(tail_sign=-1)
        assert act_c(g, CSeq((1,), 2)) == CSeq((-1,), -2)

    def test_compose_applies_other_first(self, rng):
        from renormlab.seqspace import random_cseq, random_iso_c

        for _ in range(30):
            g, h = random_iso_c(rng, 6), random_iso_c(rng, 6)
            x = random_cseq(rng, 8, c0=False)
            assert act_c(g.compose(h), x) == act_c(g, act_c(h, x))

    def test_inverse(self, c0_vectors, c0_elements):
        for g, x in zip(c0_elements, c0_vectors):
            assert act_c(g.inverse(), act_c(g, x)) == x

    def test_invalid_mapping(self):
        with pytest.raises(ValueError, match="bijection"):
            IsoCElem.from_mapping({1: 2})

    def test_invalid_tail_sign(self):
        with pytest.raises(ValueError, match="tail_sign"):
            IsoCElem(tail_sign=2)


class TestSortedNorm:  # noqa: D101
    def test_unit_vector(self):
        assert sorted_sc_norm(CSeq.unit(1)) == CertReal.exact(Fraction(3, 2))
        assert sorted_sc_norm(CSeq.unit(5)) == CertReal.exact(Fraction(3, 2))

    def test_weighted_norm_depends_on_position(self):
        assert weighted_sc_norm(CSeq.unit(1)) == CertReal.exact(Fraction(3, 2))
        assert weighted_sc_norm(CSeq.unit(2)) == CertReal.exact(Fraction(5, 4))

    def test_requires_c0(self):
        with pytest.raises(ValueError, match="Domain error"):
            sorted_sc_norm(CSeq.constant(1))

    def test_invariance_is_exact(self, c0_vectors, c0_elements):
        for g, x in zip(c0_elements, c0_vectors):
            assert sorted_sc_parts(act_c(g, x)) == sorted_sc_parts(x)

    def test_sorting_iso_attains_orbit_supremum(self, c0_vectors):
        for x in c0_vectors:
            h = sorting_iso(x)
            hx = act_c(h, x)
            assert [abs(v) for v in hx.prefix] == sorted((abs(v) for v in x.prefix), reverse=True)[: len(hx.prefix)]
            assert weighted_sc_norm(hx) == sorted_sc_norm(x)

    def test_dominates_every_rearrangement(self, c0_vectors, c0_elements):
        for x in c0_vectors:
            top = sorted_sc_norm(x)
            for g in c0_elements:
                assert weighted_sc_norm(act_c(g, x)).lower <= top.upper

    def test_equivalence_constants(self, c0_vectors):
        for x in c0_vectors:
            value = sorted_sc_norm(x)
            assert value.lower >= sup_norm(x)
            assert value.upper <= 2 * sup_norm(x) or sup_norm(x) == 0


class TestCRenorm:  # noqa: D101
    def test_constant_one(self, one_sequence):
        assert c_renorm(one_sequence) == CertReal.exact(2)

    def test_renorm_map(self):
        assert c_renorm_map(CSeq((3,), 1)) == (CSeq((2,)), Fraction(1))

    def test_equivariance_discrepancy(self, one_sequence, discrepancy_iso):
        """T(g·𝟙) = ((-2, 0, ...), 1) while g·T(𝟙) = (0, 1)."""
        lhs = c_renorm_map(act_c(discrepancy_iso, one_sequence))
        rhs = act_c_pair(discrepancy_iso, c_renorm_map(one_sequence))
        assert lhs == (CSeq((-2,)), Fraction(1))
        assert rhs == (CSeq(), Fraction(1))

    def test_invariance_discrepancy_values(self, one_sequence, discrepancy_iso):
        """c_renorm(g·𝟙) = 1 + √10 against c_renorm(𝟙) = 2."""
        value = c_renorm(act_c(discrepancy_iso, one_sequence))
        assert value.radius <= Fraction(1, 2**64)
        assert (value.lower - 1) ** 2 <= 10 <= (value.upper - 1) ** 2
        assert value.lower > 2


class TestBlocks:  # noqa: D101
    def test_class_dimension_mismatch(self):
        with pytest.raises(ValueError, match="Class-length mismatch"):
            BlockVec(((1, (1, 2)), (1, (1,))))

    def test_block_iso_must_be_orthogonal(self):
        with pytest.raises(ValueError, match="not orthogonal"):
            BlockIso((0,), (((1, 1), (0, 1)),))

    def test_rotation(self):
        q = ((Fraction(3, 5), Fraction(4, 5)), (Fraction(-4, 5), Fraction(3, 5)))
        assert act_blocks(BlockIso((0,), (q,)), BlockVec(((0, (1, 0)),))).blocks == (
            (0, (Fraction(3, 5), Fraction(-4, 5))),
        )

    def test_cannot_change_class(self):
        v = BlockVec(((1, (1,)), (2, (1, 2))))
        g = BlockIso((1, 0), (((1,),), ((1, 0), (0, 1))))
        with pytest.raises(ValueError):
            act_blocks(g, v)

    def test_c0sum_example(self):
        assert c0sum_sorted_norm(BlockVec(((0, (0,)), (1, (3, 4))))) == CertReal.exact(Fraction(25, 4))

    def test_l1sum_example(self):
        assert l1sum_sc_norm(BlockVec.real_blocks([3, 4])) == CertReal.exact(12)
        assert l1sum_base_norm(BlockVec.real_blocks([3, 4])) == CertReal.exact(7)

    @pytest.mark.parametrize("ambient", [Ambient.C0SUM, Ambient.L1SUM])
    def test_block_isometries_preserve_parts(self, rng, ambient):
        parts = c0sum_sorted_parts if ambient is Ambient.C0SUM else l1sum_parts
        for _ in range(50):
            v = random_block_vec(rng, ambient)
            g = random_block_iso(rng, v)
            assert parts(act_blocks(g, v)) == parts(v)

    def test_wrong_ambient(self):
        with pytest.raises(ValueError, match="C0SUM"):
            c0sum_sorted_parts(BlockVec.real_blocks([1]))
