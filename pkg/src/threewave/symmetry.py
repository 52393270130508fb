"""T^2 action on C^3, momentum map, locked inertia tensor and mechanical connection.

The torus acts by ``(q1, q2, q3) -> (e^{-i a} q1, e^{-i(a+b)} q2, e^{-i b} q3)``
for ``theta = (a, b)``.  Lie algebra elements, coalgebra elements and momentum
values are real arrays of shape ``(2,)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularInertia
from .geometry import KahlerStructure, metric, omega_sharp

__all__ = [
    "TWO_PI",
    "wrap_angle",
    "wrap_signed",
    "GroupElement",
    "act",
    "act_vector",
    "generator",
    "momentum",
    "momentum_covectors",
    "momentum_differential",
    "inertia",
    "inertia_from_metric",
    "check_invertible",
    "connection",
    "connection_from_metric",
    "horizontal_project",
]

TWO_PI = 2.0 * np.pi

# |det I| < REGULARITY_RTOL * max(1, ||I||^2) marks a non-regular point
REGULARITY_RTOL = 1e-10


def wrap_angle(theta):
    """Reduce angles to [0, 2*pi)."""
    out = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    return np.where(out >= TWO_PI, 0.0, out)


def wrap_signed(theta):
    """Reduce angles to (-pi, pi]."""
    out = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), TWO_PI)
    return out


@dataclass(frozen=True)
class GroupElement:
    """Element of T^2, stored as two angles in [0, 2*pi)."""

    theta: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        t = wrap_angle(np.asarray(self.theta, dtype=float).reshape(2))
        object.__setattr__(self, "theta", (float(t[0]), float(t[1])))

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(np.add(self.theta, other.theta))

    def __neg__(self) -> "GroupElement":
        return GroupElement(-np.asarray(self.theta))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.theta, dtype=dtype)

    def distance(self, other: "GroupElement") -> float:
        """Max componentwise circular distance."""
        d = wrap_signed(np.subtract(self.theta, other.theta))
        return float(np.max(np.abs(d)))


def _angles(g) -> np.ndarray:
    return np.asarray(g.theta if isinstance(g, GroupElement) else g, dtype=float)


def act(g, q) -> np.ndarray:
    a, b = _angles(g)
    q = np.asarray(q, dtype=complex)
    return np.array(
        [np.exp(-1j * a) * q[0], np.exp(-1j * (a + b)) * q[1], np.exp(-1j * b) * q[2]]
    )


# the action is complex-linear, so pushforward of vectors is the same map
act_vector = act


def generator(xi, q) -> np.ndarray:
    """Infinitesimal generator ``d/dt act(t xi, q)`` at ``t = 0``."""
    a, b = np.asarray(xi, dtype=float)
    q = np.asarray(q, dtype=complex)
    return np.array([-1j * a * q[0], -1j * (a + b) * q[1], -1j * b * q[2]])


def momentum(K: KahlerStructure, q) -> np.ndarray:
    m = np.abs(np.asarray(q, dtype=complex)) ** 2 / K.weights
    return 0.5 * np.array([m[0] + m[1], m[1] + m[2]])


def momentum_covectors(K: KahlerStructure, q) -> tuple[np.ndarray, np.ndarray]:
    """``dK1``, ``dK2`` as covectors (pairing ``Re(alpha conj v)``)."""
    c = np.asarray(q, dtype=complex) / K.weights
    return np.array([c[0], c[1], 0.0]), np.array([0.0, c[1], c[2]])


def momentum_differential(K: KahlerStructure, q, w) -> np.ndarray:
    """Tangent map of the momentum map with the base point forgotten."""
    r = np.real(np.conj(q) * np.asarray(w, dtype=complex)) / K.weights
    return np.array([r[0] + r[1], r[1] + r[2]])


def check_invertible(I: np.ndarray) -> np.ndarray:
    det = I[0, 0] * I[1, 1] - I[0, 1] * I[1, 0]
    scale = max(1.0, float(np.sum(I * I)))
    if not np.isfinite(det) or abs(det) < REGULARITY_RTOL * scale:
        raise SingularInertia(f"locked inertia tensor is singular (det={det:.3e})")
    return I


def inertia(K: KahlerStructure, q, check: bool = True) -> np.ndarray:
    """Closed-form locked inertia tensor ``[[2K1, |q2|^2/w2], [., 2K2]]``."""
    K1, K2 = momentum(K, q)
    off = abs(q[1]) ** 2 / K.weights[1]
    I = np.array([[2.0 * K1, off], [off, 2.0 * K2]])
    return check_invertible(I) if check else I


def inertia_from_metric(K: KahlerStructure, q, check: bool = True) -> np.ndarray:
    """Locked inertia tensor as the metric Gram matrix of the generators."""
    gens = [generator(e, q) for e in np.eye(2)]
    I = np.array([[metric(K, a, b) for b in gens] for a in gens])
    return check_invertible(I) if check else I


def connection(K: KahlerStructure, q, w) -> np.ndarray:
    """Mechanical connection one-form evaluated on ``w``.

    Uses ``I^{-1} dJ(i w)``; written out this is
    ``-I^{-1} Im(conj(q1) w1/w_1 + conj(q2) w2/w_2, conj(q2) w2/w_2 + conj(q3) w3/w_3)``.
    """
    I = inertia(K, q)
    c = np.imag(np.conj(q) * np.asarray(w, dtype=complex)) / K.weights
    return -np.linalg.solve(I, np.array([c[0] + c[1], c[1] + c[2]]))


def connection_from_metric(K: KahlerStructure, q, w) -> np.ndarray:
    """Same one-form via ``I^{-1} s(omega_sharp(dJ), w)``; independent route."""
    I = inertia_from_metric(K, q)
    rhs = np.array([metric(K, omega_sharp(K, a), w) for a in momentum_covectors(K, q)])
    return np.linalg.solve(I, rhs)


def horizontal_project(K: KahlerStructure, q, w) -> np.ndarray:
    """Remove the vertical part ``generator(connection(w))`` from ``w``."""
    return np.asarray(w, dtype=complex) - generator(connection(K, q, w), q)
