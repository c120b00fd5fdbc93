import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import point_above, random_E, random_quadric
from crext.discs import (
    disc_through,
    elliptic_direction,
    line_disc,
    neighborhood_radius,
    rational_leaf,
    shrink_family,
    transversal_perturb,
)
from crext.errors import BranchError, EmptyDisc, EmptyLeaf
from crext.fixtures import bishop_model, one_negative_model
from crext.quadric import QuadricModel

seeds = st.integers(0, 2**32 - 1)


@given(st.floats(0, 5), st.floats(0, 5), st.sampled_from([0, 1]))
def test_elliptic_direction_solves_the_constraint(l1, l2, variant):
    c1, c2 = elliptic_direction(l1, l2, variant)
    assert abs(l1 * c1**2 + l2 * c2**2) < 1e-12 * max(1.0, l1 + l2)
    assert np.isclose(abs(c1) ** 2 + abs(c2) ** 2, 1.0)


def test_elliptic_direction_variants_differ():
    assert elliptic_direction(1, 1, 0) != elliptic_direction(1, 1, 1)
    assert elliptic_direction(0, 0, 1) == (0j, 1 + 0j)
    with pytest.raises(ValueError):
        elliptic_direction(-1, 1)


@given(seeds)
@settings(max_examples=30, deadline=None)
def test_disc_direction_is_elliptic(seed):
    rng = np.random.default_rng(seed)
    m = random_quadric(rng, int(rng.integers(2, 5)))
    z, s = point_above(rng, m)
    disc = disc_through((z, s), m)
    d = disc.d
    assert abs(d @ m.B @ d) < 1e-12
    assert np.isclose(np.real(d.conj() @ m.A @ d), 1.0)
    assert disc.exact and disc.boundary_residual < 1e-12
    assert disc.contour().winding_number(0.0) == 1


def test_traced_contour_matches_exact_circle():
    rng = np.random.default_rng(1)
    m = random_quadric(rng, 3)
    z, s = point_above(rng, m)
    exact = disc_through((z, s), m)
    traced = disc_through((z, s), m, trace=True)
    assert not traced.exact
    r_exact = np.sqrt(exact.radius_sq)
    r_traced = np.abs(traced.contour().tau - exact.center)
    assert np.abs(r_traced - r_exact).max() < 1e-10
    assert traced.boundary_residual < 1e-12


def test_higher_order_terms_give_traced_boundary_on_manifold():
    rng = np.random.default_rng(2)
    q = random_quadric(rng, 2)
    m = QuadricModel(q.A, q.B, random_E(rng, 2))
    z, s = point_above(rng, m)
    disc = disc_through((z, s), m)
    assert not disc.exact
    assert disc.boundary_residual < 1e-12
    assert disc.contour().winding_number(0.0) == 1
    assert disc.reentries == 0


def test_empty_disc_below_the_manifold():
    m = bishop_model()
    with pytest.raises(EmptyDisc):
        disc_through((np.array([0.5]), 0.0), m)
    with pytest.raises(EmptyDisc):
        line_disc(QuadricModel(np.eye(1), np.zeros((1, 1))), [1.0], -0.5, [1.0])


def test_transversal_disc_is_returned_unchanged():
    m = QuadricModel(np.eye(2), np.zeros((2, 2)))
    disc = disc_through((np.array([0.1, 0.0]), 0.2), m)
    assert transversal_perturb(disc) is disc


def test_shrink_family_reaches_the_origin_on_the_upper_side():
    m = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    disc = disc_through((np.array([0.6, 0.2]), 0.9), m)
    fam = shrink_family(disc, steps=8)
    assert fam.end == "origin" and fam.ts[-1] == 0.0
    assert all(d.radius_sq > 0 for d in fam.discs)


def test_shrink_family_empties_for_indefinite_quadric():
    # the base (0, 0, 0.8) sits above s = -0.5 only while |z3| is large
    m = one_negative_model()
    disc = disc_through((np.array([0.0, 0.0, 0.8]), -0.5), m)
    fam = shrink_family(disc, steps=16)
    assert fam.end == "empty"
    # radius_sq = s + t^2 |z3|^2 vanishes at t = sqrt(0.5) / 0.8
    assert np.sqrt(0.5) / 0.8 - 1 / 16 <= fam.t_end <= np.sqrt(0.5) / 0.8
    assert len(fam.discs) == len(fam.ts)


def test_rational_leaf_parametrizes_the_conic():
    m = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    leaf = rational_leaf(0.1, (0.25, 0.25), m, 1.0)
    xi = 0.7 * np.exp(1j * np.linspace(0, 6, 50))
    assert leaf.g_residual(xi) < 1e-14
    assert leaf.is_annulus
    outer, inner = leaf.boundaries()
    assert outer.winding_number(0) == 1 and inner.winding_number(0) == 1
    assert np.all(np.abs(inner.tau) < np.abs(outer.tau))
    assert np.abs(m.rho(leaf.phi(outer.tau)) - 1.0).max() < 1e-12
    z = leaf.phi(0.3 + 0.2j)
    assert np.isclose(leaf.inverse(z), 0.3 + 0.2j)


def test_rational_leaf_errors():
    m = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    with pytest.raises(EmptyLeaf):
        rational_leaf(2.0, (0.25, 0.25), m, 0.5)
    with pytest.raises(ValueError):
        rational_leaf(0.0, (0.25, 0.25), m, 0.5)
    with pytest.raises(ValueError):
        rational_leaf(0.1, (0.0, 0.25), m, 0.5)


def test_rational_leaf_cut_by_neighborhood_raises_branch_error():
    rng = np.random.default_rng(4)
    q = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    m = QuadricModel(q.A, q.B, random_E(rng, 2, scale=0.3))
    leaf = rational_leaf(0.01, (0.25, 0.25), m, 5.0)
    assert np.isfinite(leaf.radius)
    with pytest.raises(BranchError):
        leaf.boundaries()


def test_neighborhood_radius():
    assert neighborhood_radius(QuadricModel(np.eye(2), np.zeros((2, 2)))) == 1.0
    rng = np.random.default_rng(0)
    m = QuadricModel(np.eye(2), np.zeros((2, 2)), random_E(rng, 2, scale=5.0))
    r = neighborhood_radius(m)
    assert 0 < r < 1.0
    g = rng.standard_normal((500, 2)) + 1j * rng.standard_normal((500, 2))
    z = r * rng.random((500, 1)) * g / np.linalg.norm(g, axis=1, keepdims=True)
    assert np.all(np.abs(m.E(z).real) <= 0.5 * np.sum(np.abs(z) ** 2, axis=1) + 1e-15)
