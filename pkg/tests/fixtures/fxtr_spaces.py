# tests/fixtures/fxtr_spaces.py
import random
from fractions import Fraction

import pytest

from renormlab.cantorspace import CylFn, random_cylfn
from renormlab.l1space import StepFn, fundamental_domain_action, random_step
from renormlab.seqspace import CSeq, IsoCElem, random_cseq, random_iso_c


@pytest.fixture
def rng():
    """Seeded generator; every randomized test starts from the same state."""
    return random.Random(20240611)


@pytest.fixture
def c0_vectors(rng):
    """Sixty finitely supported rational sequences plus the first unit vector."""
    return [CSeq.unit(1)] + [random_cseq(rng, max_length=12) for _ in range(60)]


@pytest.fixture
def c0_elements(rng):
    return [random_iso_c(rng) for _ in range(61)]


@pytest.fixture
def one_sequence():
    """The constant sequence 𝟙 in c."""
    return CSeq.constant(1)


@pytest.fixture
def discrepancy_iso():
    """Identity permutation with sign -1 at position 1 and tail sign +1."""
    return IsoCElem.from_mapping({}, sign_dev=(1,), tail_sign=1)


@pytest.fixture
def step_functions(rng):
    return [random_step(rng) for _ in range(20)]


@pytest.fixture
def thirds():
    """Indicators of [0, 1/3), [1/3, 2/3) and [2/3, 1)."""
    third = Fraction(1, 3)
    return (
        StepFn.indicator(0, third),
        StepFn.indicator(third, 2 * third),
        StepFn.indicator(2 * third, 1),
    )


@pytest.fixture
def int_action():
    return fundamental_domain_action("INT")


@pytest.fixture
def pn_function():
    """χ[0,1/4) - χ[1/4,1/2), supported in the fundamental domain."""
    return StepFn.indicator(0, Fraction(1, 4)) - StepFn.indicator(Fraction(1, 4), Fraction(1, 2))


@pytest.fixture
def cylinder_functions(rng):
    """Cylinder indicators of depth 1 to 3 and a few random tables."""
    out = []
    for depth in range(1, 4):
        for k in range(2**depth):
            out.append(CylFn.cylinder(tuple((k >> j) & 1 for j in range(depth))))
    return out + [random_cylfn(rng, max_depth=6) for _ in range(10)]
