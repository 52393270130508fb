import numpy as np
import pytest
from hypothesis import given

from threewave.curvature import (
    MeshConfig,
    assembled_form,
    assembled_form_matrix,
    cap_mesh,
    curvature,
    exterior_covariant_derivative_omega,
    geometric_phase_surface,
    leaf_mesh,
    leaf_profile,
    small_loop_holonomy,
)
from threewave.dynamics import IntegratorStats, ReducedTrajectory
from threewave.errors import MeshFailure
from threewave.geometry import KahlerStructure
from threewave.phases import compute_phases, transverse_basis
from threewave.reduction import (
    ReducedPoint,
    leaf_tangent,
    phi,
    phi_gradient,
    project,
    reduced_symplectic,
)
from threewave.symmetry import wrap_signed

from .conftest import regular_points, weights

REF = ReducedPoint(1, 0, 0, 0, (1, 1))


def _tangents(K, y):
    g = phi_gradient(K, y.leaf, y.mu)
    t1 = np.cross(g, [0.0, 0.0, 1.0])
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(g / np.linalg.norm(g), t1)
    return t1, t2


def test_assembled_form_at_reference_point(unit):
    # (0, 0, 1) is not tangent at this point; use its tangent-plane part
    n = np.array([4.0, 0.0, 1.0]) / np.sqrt(17.0)
    w3 = np.array([0.0, 0.0, 1.0]) - n[2] * n
    assert reduced_symplectic(unit, (1, 0, 0), (1, 1), (0, 1, 0), w3) == pytest.approx(4 / 17)
    u, v = leaf_tangent(unit, (0, 1, 0)), leaf_tangent(unit, w3)
    assert assembled_form(unit, REF, u, v) == pytest.approx(4 / 17, abs=1e-12)
    assert assembled_form(unit, REF, u, v) == -assembled_form(unit, REF, v, u)
    tb = transverse_basis(unit, REF)
    for d in tb:
        for w in np.eye(4):
            assert abs(assembled_form(unit, REF, d, w)) < 1e-12


@given(regular_points(), weights)
def test_assembled_form_structure(q, ws):
    K = KahlerStructure.from_weights(ws)
    y = project(K, q)
    S = assembled_form_matrix(K, y)
    scale = max(1.0, np.abs(S).max())
    np.testing.assert_allclose(S, -S.T, atol=1e-12 * scale)
    tb = transverse_basis(K, y)
    np.testing.assert_allclose(S @ tb.v1, 0, atol=1e-9 * scale * np.abs(tb.v1).max())
    np.testing.assert_allclose(S @ tb.v2, 0, atol=1e-9 * scale * np.abs(tb.v2).max())
    t1, t2 = _tangents(K, y)
    leaf = leaf_tangent(K, t1) @ S @ leaf_tangent(K, t2)
    assert abs(leaf - reduced_symplectic(K, y.leaf, y.mu, t1, t2)) < 1e-9 * scale


def test_covariant_derivative_linearity_and_antisymmetry(unit):
    y = project(unit, [1.0, 0.5, 0.6 + 0.2j])
    t1, t2 = _tangents(unit, y)
    assert exterior_covariant_derivative_omega(unit, y.leaf, y.mu, t1, t2, (0, 0)) == 0
    a = exterior_covariant_derivative_omega(unit, y.leaf, y.mu, t1, t2, (0.3, -1.2))
    b = exterior_covariant_derivative_omega(unit, y.leaf, y.mu, t2, t1, (0.3, -1.2))
    assert a == pytest.approx(-b, rel=1e-6)
    c = curvature(unit, y.leaf, y.mu, t1, t2)
    assert a == pytest.approx(0.3 * c[0] - 1.2 * c[1], rel=1e-6)


@pytest.mark.parametrize("q", [[1.0, 0.5, 0.6 + 0.2j], [0.4 - 1j, 1.3, 0.8 + 0.5j]])
def test_curvature_matches_small_loop_holonomy(unit, q):
    y = project(unit, q)
    t1, t2 = _tangents(unit, y)
    c = curvature(unit, y.leaf, y.mu, t1, t2)
    for eps in (1e-2, 1e-3):
        hol = small_loop_holonomy(unit, y.leaf, y.mu, t1, t2, eps) / eps**2
        assert np.linalg.norm(hol - c) < 1e-2 * np.linalg.norm(c)


def test_curvature_is_insensitive_to_step(unit):
    y = project(unit, [0.4 - 1j, 1.3, 0.8 + 0.5j])
    t1, t2 = _tangents(unit, y)
    a = curvature(unit, y.leaf, y.mu, t1, t2, h=1e-5)
    b = curvature(unit, y.leaf, y.mu, t1, t2, h=5e-6)
    assert np.linalg.norm(a - b) < 1e-4 * np.linalg.norm(a)


def test_leaf_profile_and_mesh(unit):
    mu = (0.625, 0.325)
    prof = leaf_profile(unit, mu)
    assert prof.z_min < prof.z_peak < prof.z_max
    tris = leaf_mesh(unit, mu, 12, 16)
    assert tris.shape == (2 * 12 * 16, 3, 3)
    assert max(abs(phi(unit, p, mu)) for p in tris.reshape(-1, 3)) < 1e-8
    with pytest.raises(MeshFailure):
        leaf_profile(unit, (-1, -1))


def test_cap_mesh_requires_level_below_extremum(unit):
    mu = (0.625, 0.325)
    with pytest.raises(MeshFailure):
        cap_mesh(unit, mu, 0.0)
    top = np.sqrt(leaf_profile(unit, mu).rho2(leaf_profile(unit, mu).z_peak))
    with pytest.raises(MeshFailure):
        cap_mesh(unit, mu, 1.01 * top)
    assert len(cap_mesh(unit, mu, 0.3, MeshConfig(1))) == 8 * 32 * 2 - 32


def test_single_point_loop_encloses_nothing(unit):
    y = np.array([1.0, 0.0, 0.0])
    rt = ReducedTrajectory(np.array([0.0, 1.0]), np.array([y, y]), (1.0, 1.0), 0.0, unit, IntegratorStats())
    r = geometric_phase_surface(unit, rt)
    np.testing.assert_array_equal(r.flux, 0)


@pytest.mark.parametrize("q0", [[1.0, 0.5, 0.6 + 0.2j], [1.0, -0.5, 0.6 + 0.2j]])
def test_surface_integral_matches_holonomy(unit, q0):
    # second point has X < 0 and uses the opposite cap
    pb = compute_phases(unit, q0)
    r = geometric_phase_surface(unit, pb.orbit, MeshConfig(1))
    geom = wrap_signed(np.asarray(pb.theta_geom.theta))
    diff = wrap_signed(r.flux - geom)
    assert np.max(np.abs(diff)) < 2e-2 * np.max(np.abs(geom))
