import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from strategies import point_above, random_quadric, random_weighted
from crext.discs import disc_through
from crext.errors import NodeInsufficient, VerdictForbids
from crext.extend import (
    BoundaryData,
    cauchy_eval,
    cauchy_sum,
    divergence_along,
    extend_at_point,
    leafwise_lewy,
    open_arc_cauchy,
    verify_nonextension,
)
from crext.fixtures import data_for, one_negative_model, split_model
from crext.formal import compose
from crext.poly import SPolynomial
from crext.quadric import QuadricModel


def _circle(K, c=0j, R=1.0):
    from crext.discs import Contour

    e = np.exp(2j * np.pi * np.arange(K) / K)
    return Contour(c + R * e, 1j * R * e)


def test_cauchy_sum_reproduces_holomorphic_functions_and_residues():
    ct = _circle(64)
    xi = 0.3 - 0.2j
    v, floor = cauchy_sum(np.exp(ct.tau), ct, xi)
    assert abs(v - np.exp(xi)) < 1e-14 and floor < 1e-13
    # 1 / (tau - a) with a outside the circle integrates to 1 / (xi - a)
    a = 2.0 + 0.5j
    v, _ = cauchy_sum(1 / (ct.tau - a), ct, xi)
    assert abs(v - 1 / (xi - a)) < 1e-12
    # conj(tau) = 1 / tau on the unit circle: its Cauchy integral vanishes for xi != 0
    v, _ = cauchy_sum(np.conj(ct.tau), ct, xi)
    assert abs(v) < 1e-14


@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
@settings(max_examples=20, deadline=None)
def test_extension_of_holomorphic_data_is_exact(seed, d):
    rng = np.random.default_rng(seed)
    m = random_quadric(rng, int(rng.integers(2, 4)))
    F = random_weighted(rng, m.n, d)
    data = BoundaryData.from_cpolynomial(compose(F, m))
    z, s = point_above(rng, m)
    res = extend_at_point(data, m, (z, s))
    assert abs(res.value - F(z, s)) <= 1e-12 + 10 * res.est_error


def test_leafwise_lewy_respects_the_maximum_principle():
    m = QuadricModel(np.eye(2), np.zeros((2, 2)))
    data = BoundaryData.from_spolynomial(SPolynomial.z(2, 0) ** 3 + SPolynomial.s(2))
    res = leafwise_lewy(data, m, (np.array([0.1, 0.05]), 0.2))
    rec = res.chain[0]
    ref = complex(*rec["reference_value"])
    assert abs(res.value - ref) <= rec["max_principle_bound"] + 1e-14
    assert res.method == "lewy"


def test_node_doubling_detects_slow_convergence():
    # the base point sits 0.05 from a circle of radius 1.24
    m = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    data = BoundaryData.from_spolynomial(SPolynomial.z(2, 0) ** 2 + SPolynomial.s(2) * SPolynomial.z(2, 1))
    disc = disc_through((np.array([1.0, 0.5]), 2.0), m)
    with pytest.raises(NodeInsufficient):
        cauchy_eval(data, disc, 0.0)
    assert cauchy_eval(data, disc, 0.0, K=2048).est_error < 1e-8


def test_cauchy_eval_rejects_points_outside_the_contour():
    m = QuadricModel(np.eye(2), np.zeros((2, 2)))
    disc = disc_through((np.array([0.1, 0.0]), 0.2), m)
    with pytest.raises(ValueError):
        cauchy_eval(BoundaryData.constant(1.0), disc, 5.0)


def test_extension_above_one_negative_quadric():
    m = one_negative_model()
    data = data_for("one_negative")
    z = np.array([0.1, 0.05, 0.8])
    s = -0.5
    a = extend_at_point(data, m, (z, s))
    b = extend_at_point(data, m, (z, s), variant=1)
    exact = np.exp(-1 / s**2) / z[2]
    assert abs(a.value - exact) < 1e-12
    assert abs(a.value - b.value) < 1e-12


def test_verdict_forbids_disallowed_sides():
    m = one_negative_model()
    z = np.array([0.1, 0.05, 0.1])
    with pytest.raises(VerdictForbids):
        extend_at_point(data_for("one_negative"), m, (z, -0.5))
    with pytest.raises(VerdictForbids):
        extend_at_point(data_for("split"), split_model(), (np.array([0.1, 0.0]), 0.5))
    with pytest.raises(ValueError):
        extend_at_point(data_for("one_negative"), m, (z, float(m.rho(z))))


def test_rational_leaf_route_on_the_upper_side():
    m = QuadricModel(np.eye(2), np.diag([0.25, 0.25]))
    F = SPolynomial.z(2, 0) ** 2 + SPolynomial.s(2) * SPolynomial.z(2, 1)
    data = BoundaryData.from_spolynomial(F)
    z = np.array([0.6, 0.2], dtype=complex)
    res = extend_at_point(data, m, (z, 0.9))
    assert res.method == "rational_leaf"
    assert [c["step"] for c in res.chain] == ["disc", "shrink_family", "rational_leaf"]
    assert abs(res.value - F(z, 0.9)) < 1e-12
    assert res.chain[-1]["disc_cross_check"] < 1e-12
    direct = extend_at_point(data, m, (z, 0.9), rational=False)
    assert direct.method == "shrink_family"


def test_result_json_shape():
    m = QuadricModel(np.eye(2), np.zeros((2, 2)))
    res = extend_at_point(BoundaryData.constant(2.0), m, (np.array([0.05, 0.0]), 0.01))
    out = res.to_json()
    assert np.allclose(out["value"], [2.0, 0.0], atol=1e-14)
    assert out["method"] in {"direct", "shrink_family"} and out["chain"][0]["step"] == "disc"


def test_divergence_along_growing_data():
    data = BoundaryData.from_expression("1/z1", 1)
    probes = [(np.array([10.0 ** -k]), 0.1) for k in range(5)]
    rep = divergence_along(data, probes, threshold=1e3)
    assert rep.passed and rep.metric > 1e3
    flat = divergence_along(BoundaryData.constant(1.0), probes)
    assert not flat.passed


def test_open_arc_cauchy_on_a_closed_polyline_matches_the_trapezoid_rule():
    t = np.linspace(0, 2 * np.pi, 4001)
    tau = np.exp(1j * t)
    assert abs(open_arc_cauchy(tau**2, tau, 0.2) - 0.04) < 1e-6


@pytest.mark.parametrize("example", ["2.3", "2.4-lower", "8.2", "8.3"])
def test_nonextension_reports_pass(example):
    rep = verify_nonextension(example)
    assert rep.passed, rep.to_json()
    assert rep.metric > rep.threshold


def test_unknown_nonextension_example():
    with pytest.raises(ValueError):
        verify_nonextension("9.9")
