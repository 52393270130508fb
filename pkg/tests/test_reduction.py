import numpy as np
import pytest
from hypothesis import assume, given

from threewave.errors import (
    GaugeUndefined,
    InconsistentLeafLabel,
    InfeasibleLeafData,
    SingularLeafPoint,
)
from threewave.geometry import KahlerStructure
from threewave.reduction import (
    ReducedPoint,
    casimir_gradients,
    casimirs,
    central_gradient,
    inertia_reduced,
    invariants,
    leaf_point,
    leaf_tangent,
    moduli_from_invariants,
    momentum_on_quotient,
    phi,
    phi_gradient,
    project,
    projection_differential,
    reconstruct_point,
    reduced_bracket_4d,
    reduced_symplectic,
    reduced_vector_field,
    section,
    section_differential,
    z1_from_constraint,
)
from threewave.symmetry import act, generator, inertia, momentum

from .conftest import regular_points, vectors, weights

REF = ReducedPoint(1, 0, 0, 0, (1, 1))


def test_projection_hand_values(unit):
    y = project(unit, [0, 0, 0])
    assert y.coords.tolist() == [0, 0, 0, 0] and y.mu == (0, 0)
    y = project(unit, [1, 1, 1])
    assert y.coords.tolist() == [1, 0, 0, 0] and y.mu == (1, 1)
    np.testing.assert_allclose(project(unit, [-1j, -1j, 1]).coords, [1, 0, 0, 0], atol=1e-15)


def test_projection_differential(unit):
    q = np.ones(3, dtype=complex)
    np.testing.assert_allclose(projection_differential(q, generator((1, 0), q)), 0, atol=1e-15)
    np.testing.assert_allclose(projection_differential(q, [1, 1, 0]), [2, 0, 0, 2])
    q = np.array([0.3 + 1j, -1.2, 0.5 - 0.4j])
    w = np.array([0.1, 1j, -0.3 + 0.2j])
    h = 1e-6
    fd = (invariants(q + h * w) - invariants(q - h * w)) / (2 * h)
    np.testing.assert_allclose(projection_differential(q, w), fd, atol=1e-7)


def test_casimir_hand_values(unit):
    assert casimirs(unit, REF) == (0, 0)
    c = casimirs(unit, ReducedPoint(1.1, 0, 0, 0, (1, 1)))
    assert c.C1 == pytest.approx(0.21) and c.C2 == 0


def test_z1_and_phi_hand_values(unit):
    assert z1_from_constraint(unit, 0, (1, 1)) == 0
    assert z1_from_constraint(unit, 2, (1, 1)) == -2
    assert phi(unit, (1, 0, 0), (1, 1)) == 0
    assert phi_gradient(unit, (1, 0, 0), (1, 1))[2] == pytest.approx(1)
    np.testing.assert_allclose(phi_gradient(unit, (1, 0, 0), (1, 1)), [4, 0, 1])


def test_bracket_and_vector_field_hand_values(unit):
    np.testing.assert_allclose(reduced_vector_field(unit, (1, 0, 0), (1, 1)), [0, 1, 0])
    assert reduced_vector_field(unit, (0.3, 0, 0.2), (1, 1))[2] == 0
    h = [-1, 0, 0, 0]
    assert reduced_bracket_4d(unit, [0, 1, 0, 0], h, REF) == pytest.approx(1)
    assert reduced_bracket_4d(unit, h, h, REF) == 0
    g1, _ = casimir_gradients(unit, REF)
    assert abs(reduced_bracket_4d(unit, [0.3, 1, 2, 0], g1, REF)) < 1e-15


def test_reduced_symplectic_hand_values(unit):
    # the orientation making omega(X_h, .) = dh; value is +4/17 (see notes)
    assert reduced_symplectic(unit, (1, 0, 0), (1, 1), (0, 1, 0), (0, 0, 1)) == pytest.approx(4 / 17)
    assert reduced_symplectic(unit, (1, 0, 0), (1, 1), (0, 1, 2), (0, 2, 4)) == 0
    with pytest.raises(SingularLeafPoint):
        # the collapsed leaf mu = 0 has a vanishing gradient at the origin
        reduced_symplectic(unit, (0, 0, 0), (0.0, 0.0), (1, 0, 0), (0, 1, 0))


def test_reduced_vector_field_is_cross_product(unit):
    for y3 in [(1, 0, 0), (0.3, 0.5, -0.2), (-0.2, 0.1, 0.4)]:
        xh = reduced_vector_field(unit, y3, (1, 1))
        np.testing.assert_allclose(xh, -np.cross(phi_gradient(unit, y3, (1, 1)), [-1, 0, 0]), atol=1e-12)


def test_inertia_reduced(unit):
    np.testing.assert_allclose(inertia_reduced(unit, REF), [[2, 1], [1, 2]])
    from threewave.errors import SingularInertia

    with pytest.raises(SingularInertia):
        inertia_reduced(unit, ReducedPoint(0, 0, 0, 0, (0, 0)))


def test_reconstruct_hand_values(unit):
    np.testing.assert_allclose(reconstruct_point(unit, REF), [1, 1, 1])
    with pytest.raises(InfeasibleLeafData):
        reconstruct_point(unit, ReducedPoint(1, 0, 0, 0, (0, 0)))
    with pytest.raises(GaugeUndefined):
        reconstruct_point(unit, project(unit, [0, 1, 1]))


def test_momentum_on_quotient(unit):
    np.testing.assert_array_equal(momentum_on_quotient(unit, REF), [1, 1])
    with pytest.raises(InconsistentLeafLabel):
        momentum_on_quotient(unit, ReducedPoint(1, 0, 0, 0, (2, 2)))


@given(vectors, weights)
def test_casimirs_vanish_on_image(q, ws):
    K = KahlerStructure.from_weights(ws)
    y = project(K, q)
    s = max(1.0, float(np.sum(np.abs(q) ** 2)) ** 3)
    c = casimirs(K, y)
    assert abs(c.C1) < 1e-12 * s and abs(c.C2) < 1e-12 * s
    assert abs(phi(K, y.leaf, y.mu)) < 1e-12 * s
    assert abs(z1_from_constraint(K, y.Z2, y.mu) - y.Z1) < 1e-12 * s


@given(regular_points(), weights)
def test_section_round_trip(q, ws):
    K = KahlerStructure.from_weights(ws)
    y = project(K, q)
    x = reconstruct_point(K, y)
    np.testing.assert_allclose(project(K, x).coords, y.coords, atol=1e-10)
    np.testing.assert_allclose(momentum(K, x), momentum(K, q), atol=1e-10)
    np.testing.assert_allclose(inertia_reduced(K, y), inertia(K, q), atol=1e-10)
    # same orbit: q and x differ by a torus element
    a, b = np.angle(q[0] / x[0]), np.angle(q[2] / x[2])
    np.testing.assert_allclose(act((-a, -b), x), q, atol=1e-10)
    np.testing.assert_allclose(moduli_from_invariants(y.coords), np.abs(q) ** 2, atol=1e-10)


@given(regular_points())
def test_section_differential_matches_finite_differences(q):
    coords = invariants(q)
    v = np.array([0.3, -0.2, 0.5, 0.1])
    h = 1e-6
    fd = (section(coords + h * v) - section(coords - h * v)) / (2 * h)
    np.testing.assert_allclose(section_differential(coords, v), fd, atol=1e-6)


@given(regular_points(), weights)
def test_reduced_flow_is_projected_flow_and_hamiltonian(q, ws):
    K = KahlerStructure.from_weights(ws)
    from threewave.dynamics import vector_field

    y = project(K, q)
    xh = reduced_vector_field(K, y.leaf, y.mu)
    np.testing.assert_allclose(leaf_tangent(K, xh), projection_differential(q, vector_field(K, q)), atol=1e-10)
    g = phi_gradient(K, y.leaf, y.mu)
    assume(np.linalg.norm(g) > 1e-3)
    t = np.cross(g, [0.3, 1.0, -0.4])
    assert abs(reduced_symplectic(K, y.leaf, y.mu, xh, t) + t[0]) < 1e-9 * max(1, np.abs(t).max())


def test_phi_gradient_matches_finite_differences(unit):
    mu = (0.7, 0.4)
    y3 = np.array([0.2, -0.1, 0.3])
    np.testing.assert_allclose(
        central_gradient(lambda p: phi(unit, p, mu), y3), phi_gradient(unit, y3, mu), atol=1e-8
    )


def test_leaf_point_embedding(unit):
    y = leaf_point(unit, (0.1, 0.2, 0.3), (1, 1))
    assert casimirs(unit, y).C2 == pytest.approx(0, abs=1e-15)
    np.testing.assert_allclose(leaf_tangent(unit, (1, 2, 3)), [1, 2, -3, 3])
