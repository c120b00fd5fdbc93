import numpy as np
from hypothesis import given, settings, strategies as st

from strategies import random_quadric, random_weighted
from crext.crfields import cr_basis, is_cr, wirtinger
from crext.formal import compose
from crext.poly import CPolynomial
from crext.quadric import QuadricModel

sphere = QuadricModel(np.eye(2), np.zeros((2, 2)))
z1, z2 = CPolynomial.z(2, 0), CPolynomial.z(2, 1)
zb1, zb2 = CPolynomial.zbar(2, 0), CPolynomial.zbar(2, 1)


def test_basis_size_and_antisymmetry():
    m = QuadricModel(np.eye(3), np.zeros((3, 3)))
    basis = cr_basis(m)
    assert len(basis) == 3
    f = zb1 * zb2
    X = cr_basis(sphere)[0]
    assert X.swapped()(f) == -X(f)


def test_fields_annihilate_the_defining_function():
    rng = np.random.default_rng(3)
    m = random_quadric(rng, 3)
    rho = m.rho_poly()
    for X in cr_basis(m):
        assert X(rho).max_abs_coeff() < 1e-14


def test_holomorphic_is_cr_and_conjugate_coordinate_is_not():
    assert is_cr(z1**2 + 3 * z2, sphere).ok
    check = is_cr(zb1, sphere)
    assert not check.ok
    # X_12 zbar1 = -rho_{zbar2} = -z2 on the sphere model
    ok, witness = check
    assert witness == -z2


def test_function_of_rho_is_cr():
    rho = sphere.rho_poly()
    assert is_cr(rho**2 + z1 * rho, sphere).ok


def test_wirtinger_helper():
    f = z1 * zb1 * zb2
    assert wirtinger(f, 0, conjugate=True) == z1 * zb2
    assert wirtinger(f, 1, conjugate=False) == CPolynomial.zero(2)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
@settings(max_examples=25, deadline=None)
def test_composed_polynomials_are_cr(seed, d):
    rng = np.random.default_rng(seed)
    m = random_quadric(rng, int(rng.integers(2, 4)))
    f = compose(random_weighted(rng, m.n, d), m)
    assert is_cr(f, m).ok
