import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import random_E, random_jet_poly, random_quadric, random_weighted
from crext.errors import HypothesisError, NotCRError, OrderOverflow
from crext.fixtures import one_negative_model, parabolic_model, split_model
from crext.formal import (
    chain_identity_check,
    compose,
    extend_homogeneous,
    formal_jet,
    matching_matrix,
    weighted_basis,
)
from crext.poly import CPolynomial, SPolynomial
from crext.quadric import QuadricModel

seeds = st.integers(0, 2**32 - 1)


def test_weighted_basis_sizes():
    # n = 2, d = 4: z^alpha with |alpha| = 4, 2, 0 -> 5 + 3 + 1
    assert len(weighted_basis(2, 4)) == 9
    assert all(sum(k[:-1]) + 2 * k[-1] == 4 for k in weighted_basis(2, 4))


def test_matching_matrix_is_cached_and_full_rank():
    m = one_negative_model()
    M1, rows, basis = matching_matrix(m, 4)
    assert matching_matrix(m, 4)[0] is M1
    assert np.linalg.matrix_rank(M1) == len(basis)


def test_extend_simple_cases():
    m = one_negative_model()
    s = SPolynomial.s(3)
    z3 = SPolynomial.z(3, 2)
    F0 = s * z3 + 2 * s**2
    F = extend_homogeneous(compose(F0, m).homogeneous_part(3), m)
    assert F.distance(s * z3) < 1e-12
    assert extend_homogeneous(compose(F0, m).homogeneous_part(4), m).distance(2 * s**2) < 1e-12


def test_extend_details_reports_uniqueness():
    m = one_negative_model()
    f = compose(SPolynomial.s(3) * SPolynomial.z(3, 0), m)
    sol = extend_homogeneous(f, m, details=True)
    assert sol.unique and sol.residual < 1e-12


def test_not_cr_and_hypotheses():
    m = one_negative_model()
    with pytest.raises(NotCRError):
        extend_homogeneous(CPolynomial.zbar(3, 0), m)
    with pytest.raises(HypothesisError):
        extend_homogeneous(CPolynomial.z(2, 0), split_model())
    with pytest.raises(HypothesisError):
        extend_homogeneous(CPolynomial.z(2, 0), parabolic_model(2))
    with pytest.raises(ValueError):
        extend_homogeneous(CPolynomial.z(3, 0) + CPolynomial.z(3, 0) ** 2, m)


@given(seeds, st.integers(0, 6))
@settings(max_examples=25, deadline=None)
def test_round_trip_property(seed, d):
    rng = np.random.default_rng(seed)
    m = random_quadric(rng, int(rng.integers(2, 4)))
    F0 = random_weighted(rng, m.n, d)
    F = extend_homogeneous(compose(F0, m), m)
    assert F.distance(F0) < 1e-9
    assert chain_identity_check(compose(F0, m), F0, m) < 1e-9


@given(seeds)
@settings(max_examples=10, deadline=None)
def test_formal_jet_with_higher_order_terms(seed):
    rng = np.random.default_rng(seed)
    q = random_quadric(rng, 2)
    m = QuadricModel(q.A, q.B, random_E(rng, 2))
    F0 = random_jet_poly(rng, 2, 4)
    jet = formal_jet(compose(F0, m, max_degree=4), m, 4)
    assert jet.F_truncation.distance(F0) < 1e-9
    assert jet.residual_valuation >= 5
    assert chain_identity_check(jet.f_truncation, jet.F_truncation, m, order=4) < 1e-9


def test_formal_jet_errors():
    m = one_negative_model()
    with pytest.raises(OrderOverflow):
        formal_jet(CPolynomial.z(3, 0), m, 41)
    with pytest.raises(NotCRError) as info:
        formal_jet(CPolynomial.z(3, 0) + CPolynomial.zbar(3, 1) ** 2, m, 3)
    assert info.value.layer == 2 and info.value.witness


def test_jet_is_callable():
    m = one_negative_model()
    f = compose(SPolynomial.s(3) + SPolynomial.z(3, 1), m)
    jet = formal_jet(f, m, 3)
    assert np.isclose(jet(np.array([0.1, 0.2, 0.3]), 0.5), 0.7)
