# tests/fixtures/fxtr_oracles.py
import dataclasses
from fractions import Fraction

import pytest

from renormlab.numerics import cert_sqrt, random_rational
from renormlab.renormkit import NormOracle, euclidean_oracle, identity_descriptor, tuple_sup_oracle


@pytest.fixture
def sup_to_euclid():
    """Identity of R^2 from ‖·‖∞ to ‖·‖₂, with ‖id‖² = 2."""
    d = identity_descriptor(tuple_sup_oracle(), euclidean_oracle(), bound=2)
    return dataclasses.replace(d, operator_norm_sq=Fraction(2))


@pytest.fixture
def real_identity():
    """Identity of R (as 1-tuples) from |·| to |·|."""
    return identity_descriptor(tuple_sup_oracle(), euclidean_oracle())


@pytest.fixture
def plane_vectors(rng):
    return [(random_rational(rng), random_rational(rng)) for _ in range(50)]


@pytest.fixture
def l2_step_norm():
    """‖f‖₂ on step functions; not invariant under the F2 isometries of L1."""
    square = lambda f: sum(((b - a) * v * v for a, b, v in f.pieces), Fraction(0))
    return NormOracle(
        space="L2[0,1]",
        evaluator=lambda f, p: cert_sqrt(square(f), p),
        parts=square,
        square=square,
        name="‖·‖₂",
    )
