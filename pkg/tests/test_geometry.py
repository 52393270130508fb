import numpy as np
import pytest
from hypothesis import given

from threewave.errors import ConfigError, DegenerateWeights
from threewave.geometry import (
    KahlerStructure,
    is_regular,
    jmul,
    metric,
    omega,
    omega_flat,
    omega_sharp,
    pair,
)

from .conftest import vectors, weights


def test_omega_hand_values(unit):
    assert omega(unit, [1, 0, 0], [1, 0, 0]) == 0.0
    assert omega(unit, [1, 0, 0], [1j, 0, 0]) == pytest.approx(1.0, abs=1e-15)
    assert omega(unit, [0, 0, 0], [1, 2j, 3]) == 0.0


def test_metric_hand_values(unit):
    assert metric(unit, [1, 0, 0], [1, 0, 0]) == 1.0
    assert metric(unit, [1, 0, 0], [1j, 0, 0]) == 0.0
    assert metric(unit, [0, 0, 0], [4, 1j, 2]) == 0.0


def test_jmul():
    np.testing.assert_array_equal(jmul([1, 0, 0]), [1j, 0, 0])
    np.testing.assert_array_equal(jmul(jmul([1, 2j, 3])), [-1, -2j, -3])
    np.testing.assert_array_equal(jmul([0, 0, 0]), [0, 0, 0])


def test_sharp_of_momentum_covector_is_generator(unit):
    # alpha = (1, 1, 0) represents dK1 at (1, 1, 1); generator of (1, 0) there is (-i, -i, 0)
    np.testing.assert_allclose(omega_sharp(unit, [1, 1, 0]), [-1j, -1j, 0], atol=1e-15)
    np.testing.assert_array_equal(omega_sharp(unit, [0, 0, 0]), 0)


def test_weights_from_signs_and_gammas():
    K = KahlerStructure((1, -1, 1), (2.0, 0.5, 3.0))
    np.testing.assert_array_equal(K.weights, [2.0, -0.5, 3.0])
    assert not K.definite
    assert KahlerStructure.from_weights([2.0, -0.5, 3.0]) == K


@pytest.mark.parametrize(
    "signs,gammas",
    [((1, 1), (1, 1, 1)), ((1, 2, 1), (1, 1, 1)), ((1, 1, 1), (1, 0, 1)), ((1, 1, 1), (1, np.nan, 1))],
)
def test_invalid_structures_rejected(signs, gammas):
    with pytest.raises(ConfigError):
        KahlerStructure(signs, gammas)


def test_degenerate_pair_sums():
    with pytest.raises(DegenerateWeights):
        KahlerStructure.from_weights([1.0, -1.0, 0.5]).pair_sums()


def test_regularity():
    assert is_regular([1, 1, 0])
    assert not is_regular([1, 0, 0])
    assert not is_regular([0, 0, 0])


@given(vectors, vectors, weights)
def test_compatibility_and_antisymmetry(z, w, ws):
    K = KahlerStructure.from_weights(ws)
    assert abs(omega(K, z, w) - metric(K, jmul(z), w)) < 1e-12
    assert abs(omega(K, z, w) + omega(K, w, z)) < 1e-14
    assert abs(metric(K, z, w) - metric(K, w, z)) < 1e-14


@given(vectors, vectors, weights)
def test_sharp_and_flat_are_inverse(a, w, ws):
    K = KahlerStructure.from_weights(ws)
    v = omega_sharp(K, a)
    assert abs(omega(K, v, w) - pair(a, w)) < 1e-12
    np.testing.assert_allclose(omega_flat(K, v), a, atol=1e-12)


@given(vectors, vectors, weights)
def test_metric_is_complex_structure_invariant(z, w, ws):
    K = KahlerStructure.from_weights(ws)
    assert abs(metric(K, jmul(z), jmul(w)) - metric(K, z, w)) < 1e-12
