"""Poisson reduction of C^3 by T^2.

Orbit-space coordinates are the invariants

    X + iY = q1 conj(q2) q3,   Z1 = |q1|^2 - |q2|^2,   Z2 = |q2|^2 - |q3|^2.

A :class:`ReducedPoint` carries its momentum value ``mu = (K1, K2)`` as the
leaf label.  On a leaf the linear Casimir fixes ``Z1`` in terms of ``Z2``, so
leaf points are described by ``y3 = (X, Y, Z2)`` together with ``mu``.

Two normalisation facts are checked by the test suite:

* the leaf function ``phi`` equals ``(w2 + w3) * C1`` once ``Z1`` is eliminated
  through ``C2 = 0``;
* ``det(grad C2, grad C1, grad f, grad k)`` reproduces the projected flow with
  unit factor.

The leaf symplectic form uses the sign for which ``omega_mu(X_h, .) = dh``,
matching the unreduced convention ``omega(X_H, .) = dH``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    GaugeUndefined,
    InconsistentLeafLabel,
    InfeasibleLeafData,
    SingularLeafPoint,
)
from .geometry import KahlerStructure
from .symmetry import check_invertible, momentum

__all__ = [
    "ReducedPoint",
    "CasimirValues",
    "invariants",
    "project",
    "projection_differential",
    "kappa3",
    "kappa4",
    "delta",
    "casimirs",
    "casimir_gradients",
    "z1_from_constraint",
    "leaf_point",
    "leaf_tangent",
    "phi",
    "phi_gradient",
    "reduced_hamiltonian",
    "reduced_bracket_4d",
    "reduced_bracket_3d",
    "reduced_vector_field",
    "reduced_symplectic",
    "inertia_reduced",
    "moduli",
    "moduli_from_invariants",
    "point_from_invariants",
    "reconstruct_point",
    "section",
    "section_differential",
    "momentum_on_quotient",
    "central_gradient",
]


@dataclass(frozen=True)
class ReducedPoint:
    X: float
    Y: float
    Z1: float
    Z2: float
    mu: tuple[float, float]

    def __post_init__(self):
        for name in ("X", "Y", "Z1", "Z2"):
            object.__setattr__(self, name, float(getattr(self, name)))
        m = np.asarray(self.mu, dtype=float).reshape(2)
        object.__setattr__(self, "mu", (float(m[0]), float(m[1])))

    @classmethod
    def from_coords(cls, coords, mu) -> "ReducedPoint":
        X, Y, Z1, Z2 = np.asarray(coords, dtype=float)
        return cls(X, Y, Z1, Z2, mu)

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z1, self.Z2])

    @property
    def leaf(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z2])

    @property
    def mu_array(self) -> np.ndarray:
        return np.array(self.mu)


class CasimirValues(NamedTuple):
    C1: float
    C2: float


def invariants(q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    p = q[0] * np.conj(q[1]) * q[2]
    m = np.abs(q) ** 2
    return np.array([p.real, p.imag, m[0] - m[1], m[1] - m[2]])


def project(K: KahlerStructure, q) -> ReducedPoint:
    return ReducedPoint.from_coords(invariants(q), momentum(K, q))


def projection_differential(q, w) -> np.ndarray:
    """Jacobian of the invariants applied to ``w``."""
    q = np.asarray(q, dtype=complex)
    w = np.asarray(w, dtype=complex)
    dp = (
        w[0] * np.conj(q[1]) * q[2]
        + q[0] * np.conj(w[1]) * q[2]
        + q[0] * np.conj(q[1]) * w[2]
    )
    dm = 2.0 * np.real(np.conj(q) * w)
    return np.array([dp.real, dp.imag, dm[0] - dm[1], dm[1] - dm[2]])


def kappa4(K: KahlerStructure) -> float:
    w1, w2, w3 = K.weights
    a, b = K.pair_sums()
    return w1 * w2 * w3 / (a * b * b)


def kappa3(K: KahlerStructure) -> float:
    w1, w2, w3 = K.weights
    _, b = K.pair_sums()
    return w1 * w2 * w3 / b**3


def delta(K: KahlerStructure, mu) -> float:
    _, w2, w3 = K.weights
    K1, K2 = mu
    return 2.0 * w2 * K1 + 2.0 * w3 * (K1 - K2)


def _c1_factors(K, Z1, Z2, mu):
    _, w2, w3 = K.weights
    K1, K2 = mu
    return 2.0 * w2 * K1 + Z1, 2.0 * w3 * K2 + Z2, 2.0 * w2 * K2 - Z2


def casimirs(K: KahlerStructure, y: ReducedPoint) -> CasimirValues:
    w1, w2, w3 = K.weights
    a, b = K.pair_sums()
    K1, K2 = y.mu
    f1, f2, f3 = _c1_factors(K, y.Z1, y.Z2, y.mu)
    c1 = y.X**2 + y.Y**2 - kappa4(K) * f1 * f2 * f3
    c2 = (y.Z1 - 2.0 * w1 * K1) * b + (y.Z2 + 2.0 * w3 * K2) * a
    return CasimirValues(float(c1), float(c2))


def _casimir_scales(K, y):
    w1, w2, w3 = K.weights
    a, b = K.pair_sums()
    K1, K2 = y.mu
    f1, f2, f3 = _c1_factors(K, y.Z1, y.Z2, y.mu)
    s1 = y.X**2 + y.Y**2 + abs(kappa4(K) * f1 * f2 * f3)
    s2 = abs((y.Z1 - 2.0 * w1 * K1) * b) + abs((y.Z2 + 2.0 * w3 * K2) * a)
    return max(1.0, s1), max(1.0, s2)


def casimir_gradients(K: KahlerStructure, y: ReducedPoint) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of C1 and C2 in (X, Y, Z1, Z2) at fixed momentum label."""
    a, b = K.pair_sums()
    f1, f2, f3 = _c1_factors(K, y.Z1, y.Z2, y.mu)
    k4 = kappa4(K)
    g1 = np.array(
        [2.0 * y.X, 2.0 * y.Y, -k4 * f2 * f3, -k4 * f1 * (f3 - f2)]
    )
    g2 = np.array([0.0, 0.0, b, a])
    return g1, g2


def z1_from_constraint(K: KahlerStructure, z2: float, mu) -> float:
    """Solve ``C2 = 0`` for Z1."""
    w1, _, w3 = K.weights
    a, b = K.pair_sums()
    K1, K2 = mu
    return 2.0 * w1 * K1 - (z2 + 2.0 * w3 * K2) * a / b


def leaf_point(K: KahlerStructure, y3, mu) -> ReducedPoint:
    X, Y, Z2 = np.asarray(y3, dtype=float)
    return ReducedPoint(X, Y, z1_from_constraint(K, Z2, mu), Z2, mu)


def leaf_tangent(K: KahlerStructure, v3) -> np.ndarray:
    """Embed a leaf tangent ``(dX, dY, dZ2)`` into (X, Y, Z1, Z2) coordinates."""
    a, b = K.pair_sums()
    dX, dY, dZ2 = np.asarray(v3, dtype=float)
    return np.array([dX, dY, -a / b * dZ2, dZ2])


def _phi_parts(K, Z2, mu):
    _, w2, w3 = K.weights
    K1, K2 = mu
    d = delta(K, mu)
    return d - Z2, 2.0 * w3 * K2 + Z2, 2.0 * w2 * K2 - Z2


def phi(K: KahlerStructure, y3, mu) -> float:
    """Leaf function whose zero set at fixed ``mu`` is the three-wave surface."""
    X, Y, Z2 = y3
    _, b = K.pair_sums()
    f1, f2, f3 = _phi_parts(K, Z2, mu)
    return float(b * (X * X + Y * Y - kappa3(K) * f1 * f2 * f3))


def phi_gradient(K: KahlerStructure, y3, mu) -> np.ndarray:
    X, Y, Z2 = y3
    _, b = K.pair_sums()
    f1, f2, f3 = _phi_parts(K, Z2, mu)
    dg = -f2 * f3 + f1 * f3 - f1 * f2
    return np.array([2.0 * b * X, 2.0 * b * Y, -b * kappa3(K) * dg])


def reduced_hamiltonian(y: ReducedPoint) -> float:
    return -y.X


def reduced_bracket_4d(K: KahlerStructure, grad_f, grad_k, y: ReducedPoint) -> float:
    """``det(grad C2, grad C1, grad f, grad k)``."""
    g1, g2 = casimir_gradients(K, y)
    M = np.column_stack([g2, g1, np.asarray(grad_f, float), np.asarray(grad_k, float)])
    return float(np.linalg.det(M))


def reduced_bracket_3d(K: KahlerStructure, grad_f, grad_k, y3, mu) -> float:
    return float(phi_gradient(K, y3, mu) @ np.cross(grad_f, grad_k))


def reduced_vector_field(K: KahlerStructure, y3, mu) -> np.ndarray:
    """Flow of ``h = -X`` on the leaf: ``(0, dphi/dZ2, -2 (w2 + w3) Y)``."""
    _, b = K.pair_sums()
    g = phi_gradient(K, y3, mu)
    return np.array([0.0, g[2], -2.0 * b * y3[1]])


def reduced_symplectic(K: KahlerStructure, y3, mu, v, w, tol: float = 1e-12) -> float:
    """Leaf symplectic form ``grad(phi) . (v x w) / |grad(phi)|^2``."""
    g = phi_gradient(K, y3, mu)
    n2 = float(g @ g)
    if n2 < tol**2:
        raise SingularLeafPoint(f"|grad phi| = {np.sqrt(n2):.3e} at {tuple(y3)}")
    return float(g @ np.cross(v, w)) / n2


def inertia_reduced(K: KahlerStructure, y: ReducedPoint, check: bool = True) -> np.ndarray:
    _, _, w3 = K.weights
    _, b = K.pair_sums()
    K1, K2 = y.mu
    off = (2.0 * w3 * K2 + y.Z2) / b
    I = np.array([[2.0 * K1, off], [off, 2.0 * K2]])
    return check_invertible(I) if check else I


def moduli(K: KahlerStructure, y: ReducedPoint) -> np.ndarray:
    """Intensities ``|q_k|^2`` implied by (mu, Z1, Z2)."""
    w1, w2, _ = K.weights
    a, _ = K.pair_sums()
    m2 = (2.0 * w1 * y.mu[0] - y.Z1) * w2 / a
    return np.array([m2 + y.Z1, m2, m2 - y.Z2])


def moduli_from_invariants(coords) -> np.ndarray:
    """Intensities from (X, Y, Z1, Z2) alone.

    ``|q2|^2 = a`` is the unique root of ``(a + Z1) a (a - Z2) = X^2 + Y^2``
    with ``a >= max(0, -Z1, Z2)``; the cubic is increasing there.
    """
    X, Y, Z1, Z2 = np.asarray(coords, dtype=float)
    P = X * X + Y * Y
    lo = max(0.0, -Z1, Z2)

    def f(a):
        return (a + Z1) * a * (a - Z2) - P

    def fp(a):
        return a * (a - Z2) + (a + Z1) * (a - Z2) + (a + Z1) * a

    hi = lo + 1.0
    while f(hi) < 0.0:
        hi = lo + 2.0 * (hi - lo)
    a = 0.5 * (lo + hi)
    # safeguarded Newton; bracket shrinks every iteration
    for _ in range(200):
        fa = f(a)
        if fa > 0.0:
            hi = a
        else:
            lo = a
        d = fp(a)
        step = fa / d if d > 0.0 else np.inf
        cand = a - step
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(cand - a) <= 4e-16 * max(1.0, abs(a)):
            a = cand
            break
        a = cand
    return np.array([a + Z1, a, a - Z2])


def point_from_invariants(K: KahlerStructure, coords) -> ReducedPoint:
    """Attach the momentum value determined by the invariants themselves."""
    m = moduli_from_invariants(coords)
    w = K.weights
    mu = 0.5 * np.array([m[0] / w[0] + m[1] / w[1], m[1] / w[1] + m[2] / w[2]])
    return ReducedPoint.from_coords(coords, mu)


def _gauge_point(m, X, Y) -> np.ndarray:
    r = np.sqrt(np.maximum(m, 0.0))
    alpha = np.arctan2(Y, X)
    return np.array([r[0], r[1] * np.exp(-1j * alpha), r[2]], dtype=complex)


def reconstruct_point(K: KahlerStructure, y: ReducedPoint, tol: float = 1e-9) -> np.ndarray:
    """Fiber point over ``y`` in the gauge q1, q3 real nonnegative."""
    m = moduli(K, y)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.any(m < -tol * scale):
        raise InfeasibleLeafData(f"negative intensities {m} for leaf data {y}")
    m = np.maximum(m, 0.0)
    P = y.X**2 + y.Y**2
    if abs(P - m[0] * m[1] * m[2]) > tol * max(1.0, P, m[0] * m[1] * m[2]):
        raise InfeasibleLeafData(
            f"|X+iY|^2 = {P:.6g} but intensities give {m[0] * m[1] * m[2]:.6g}"
        )
    if m[0] <= tol * scale or m[2] <= tol * scale:
        raise GaugeUndefined("q1 or q3 vanishes; section gauge undefined")
    return _gauge_point(m, y.X, y.Y)


def section(coords) -> np.ndarray:
    """Fiber point over raw invariants (momentum implied), same gauge."""
    X, Y = coords[0], coords[1]
    m = moduli_from_invariants(coords)
    if m[0] <= 0.0 or m[2] <= 0.0:
        raise GaugeUndefined("q1 or q3 vanishes; section gauge undefined")
    return _gauge_point(m, X, Y)


def section_differential(coords, v) -> np.ndarray:
    """Derivative of :func:`section` along the orbit-space vector ``v``."""
    X, Y, Z1, Z2 = np.asarray(coords, dtype=float)
    dX, dY, dZ1, dZ2 = np.asarray(v, dtype=float)
    m = moduli_from_invariants(coords)
    if m[0] <= 0.0 or m[2] <= 0.0:
        raise GaugeUndefined("q1 or q3 vanishes; section gauge undefined")
    a = m[1]
    dP = 2.0 * (X * dX + Y * dY)
    denom = a * (a - Z2) + (a + Z1) * (a - Z2) + (a + Z1) * a
    da = (dP - dZ1 * a * (a - Z2) + dZ2 * (a + Z1) * a) / denom
    dm = np.array([da + dZ1, da, da - dZ2])
    r = np.sqrt(m)
    P = X * X + Y * Y
    alpha = np.arctan2(Y, X)
    dalpha = (X * dY - Y * dX) / P if P > 0.0 else 0.0
    e = np.exp(-1j * alpha)
    dr = np.zeros(3)
    nz = r > 0.0
    dr[nz] = dm[nz] / (2.0 * r[nz])
    return np.array([dr[0], e * (dr[1] - 1j * r[1] * dalpha), dr[2]], dtype=complex)


def momentum_on_quotient(K: KahlerStructure, y: ReducedPoint, tol: float = 1e-9) -> np.ndarray:
    """The leaf label of ``y`` after checking both Casimirs vanish."""
    c = casimirs(K, y)
    s1, s2 = _casimir_scales(K, y)
    if abs(c.C1) > tol * s1 or abs(c.C2) > tol * s2:
        raise InconsistentLeafLabel(
            f"mu={y.mu} does not label the leaf through {y.coords}: C1={c.C1:.3e}, C2={c.C2:.3e}"
        )
    return y.mu_array


def central_gradient(f: Callable[[np.ndarray], float], x, h: float | None = None) -> np.ndarray:
    """Central-difference gradient, step ``1e-6 * max(1, |x|_inf)`` by default."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * max(1.0, float(np.max(np.abs(x))))
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g
