"""Assembled two-form on the orbit space, its covariant derivative, and holonomy by area."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import ReducedTrajectory
from .errors import GaugeUndefined, MeshFailure
from .geometry import KahlerStructure
from .phases import extract_group_element, map_L
from .reduction import (
    ReducedPoint,
    leaf_point,
    leaf_tangent,
    moduli,
    phi,
    phi_gradient,
    projection_differential,
    reconstruct_point,
    reduced_vector_field,
    section,
    section_differential,
)
from .symmetry import act, connection, wrap_signed

__all__ = [
    "MeshConfig",
    "SurfaceResult",
    "LeafProfile",
    "horizontal_lift_vectors",
    "assembled_form_matrix",
    "assembled_form",
    "d_assembled_form",
    "exterior_covariant_derivative_omega",
    "curvature",
    "small_loop_holonomy",
    "leaf_profile",
    "leaf_mesh",
    "cap_mesh",
    "geometric_phase_surface",
]


def _omega_matrix(w) -> np.ndarray:
    """Real 6x6 matrix of the symplectic form in (Re q, Im q) coordinates."""
    D = np.diag(1.0 / np.asarray(w, dtype=float))
    Z = np.zeros((3, 3))
    return np.block([[Z, D], [-D, Z]])


def _lift_system(K: KahlerStructure, q) -> np.ndarray:
    """Rows: the four invariant differentials, then the kernel of the connection."""
    q = np.asarray(q, dtype=complex)
    basis = np.concatenate([np.eye(3), 1j * np.eye(3)])
    dpi = np.array([projection_differential(q, e) for e in basis]).T
    # Im(conj(q_k) v_k) / w_k in (Re v, Im v) coordinates
    w = np.asarray(K.weights, dtype=float)
    im_rows = np.hstack([np.diag(-q.imag / w), np.diag(q.real / w)])
    conn = np.vstack([im_rows[0] + im_rows[1], im_rows[1] + im_rows[2]])
    return np.vstack([dpi, conn])


def horizontal_lift_vectors(K: KahlerStructure, q, vectors) -> np.ndarray:
    """Horizontal lifts at ``q`` of orbit-space vectors, returned as real 6-vectors (columns)."""
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    rhs = np.vstack([V.T, np.zeros((2, V.shape[0]))])
    return np.linalg.solve(_lift_system(K, q), rhs)


def _form_matrix_at(K: KahlerStructure, q) -> np.ndarray:
    L = horizontal_lift_vectors(K, q, np.eye(4))
    return L.T @ _omega_matrix(K.weights) @ L


def assembled_form_matrix(K: KahlerStructure, y: ReducedPoint) -> np.ndarray:
    """Coefficients ``S`` with ``omega'(u, v) = u @ S @ v`` in (X, Y, Z1, Z2)."""
    return _form_matrix_at(K, reconstruct_point(K, y))


def assembled_form(K: KahlerStructure, y: ReducedPoint, u, v) -> float:
    return float(np.asarray(u, float) @ assembled_form_matrix(K, y) @ np.asarray(v, float))


def _form_matrix_raw(K, coords) -> np.ndarray:
    # momentum label implied by the invariants, so nearby off-leaf points are fine
    return _form_matrix_at(K, section(coords))


def _directional(K, coords, a, h):
    a = np.asarray(a, dtype=float)
    na = float(np.max(np.abs(a)))
    if na == 0.0:
        return np.zeros((4, 4))
    step = h * max(1.0, float(np.max(np.abs(coords)))) / na
    return (_form_matrix_raw(K, coords + step * a) - _form_matrix_raw(K, coords - step * a)) / (
        2.0 * step
    )


def d_assembled_form(K: KahlerStructure, coords, a, b, c, h: float = 1e-5) -> float:
    """Exterior derivative of the assembled form on constant vectors, central differences."""
    coords = np.asarray(coords, dtype=float)
    a, b, c = (np.asarray(x, dtype=float) for x in (a, b, c))
    return float(
        b @ _directional(K, coords, a, h) @ c
        + c @ _directional(K, coords, b, h) @ a
        + a @ _directional(K, coords, c, h) @ b
    )


def exterior_covariant_derivative_omega(
    K: KahlerStructure, y3, mu, v1, v2, nu, h: float = 1e-5
) -> float:
    """``<nu, curvature>(v1, v2)`` for leaf tangents ``v1, v2`` given as (dX, dY, dZ2)."""
    y = leaf_point(K, y3, mu)
    return d_assembled_form(
        K, y.coords, map_L(K, y, nu), leaf_tangent(K, v1), leaf_tangent(K, v2), h
    )


def curvature(K: KahlerStructure, y3, mu, v1, v2, h: float = 1e-5) -> np.ndarray:
    """Both components of the Lie-algebra valued curvature on ``(v1, v2)``."""
    y = leaf_point(K, y3, mu)
    coords = y.coords
    t1, t2 = leaf_tangent(K, v1), leaf_tangent(K, v2)
    L1, L2 = map_L(K, y, (1.0, 0.0)), map_L(K, y, (0.0, 1.0))
    D1 = _directional(K, coords, t1, h)
    D2 = _directional(K, coords, t2, h)
    out = np.empty(2)
    for k, L in enumerate((L1, L2)):
        out[k] = t1 @ _directional(K, coords, L, h) @ t2 + t2 @ D1 @ L + L @ D2 @ t1
    return out


# ---------------------------------------------------------------- leaf charts


class _LeafChart:
    """Graph chart of a leaf over its tangent plane at ``y3``, solved by Newton along the normal."""

    def __init__(self, K, y3, mu, t1, t2):
        self.K, self.mu = K, mu
        self.p0 = np.asarray(y3, dtype=float)
        g = phi_gradient(K, self.p0, mu)
        self.n = g / np.linalg.norm(g)
        self.t1 = np.asarray(t1, dtype=float)
        self.t2 = np.asarray(t2, dtype=float)

    def point(self, a, b):
        base = self.p0 + a * self.t1 + b * self.t2
        c = 0.0
        for _ in range(50):
            p = base + c * self.n
            dc = phi(self.K, p, self.mu) / (phi_gradient(self.K, p, self.mu) @ self.n)
            c -= dc
            if abs(dc) < 1e-15 * max(1.0, np.max(np.abs(p))):
                break
        return base + c * self.n

    def tangent(self, p, da, db):
        g = phi_gradient(self.K, p, self.mu)
        dv = da * self.t1 + db * self.t2
        return dv - (g @ dv) / (g @ self.n) * self.n


def small_loop_holonomy(
    K: KahlerStructure, y3, mu, t1, t2, eps: float, nodes: int = 16
) -> np.ndarray:
    """Holonomy of a square leaf loop of side ``eps`` spanned by ``t1`` then ``t2``.

    Parallel transport runs along the section with ``theta' = -A(sec_* y')``;
    the returned angles are signed, so ``holonomy / eps**2`` approaches the curvature.
    """
    chart = _LeafChart(K, y3, mu, t1, t2)
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    corners = 0.5 * eps * np.array([(-1, -1), (1, -1), (1, 1), (-1, 1), (-1, -1)], dtype=float)
    theta = np.zeros(2)
    for (a0, b0), (a1, b1) in zip(corners[:-1], corners[1:]):
        for x, wt in zip(xg, wg):
            s = 0.5 * (x + 1.0)
            p = chart.point(a0 + s * (a1 - a0), b0 + s * (b1 - b0))
            v = chart.tangent(p, a1 - a0, b1 - b0)
            coords = leaf_point(K, p, mu).coords
            q = section(coords)
            theta -= 0.5 * wt * connection(K, q, section_differential(coords, leaf_tangent(K, v)))
    start = section(leaf_point(K, chart.point(*corners[0]), mu).coords)
    g, _ = extract_group_element(start, act(theta, start))
    return wrap_signed(np.asarray(g.theta))


# ---------------------------------------------------------------- meshes


@dataclass(frozen=True)
class LeafProfile:
    """A compact leaf as a surface of revolution ``X^2 + Y^2 = rho2(Z2)`` over ``[z_min, z_max]``."""

    z_min: float
    z_max: float
    z_peak: float
    coeffs: np.ndarray  # intensities m_k(Z2) = coeffs[k, 0] + coeffs[k, 1] * Z2

    def rho2(self, z):
        z = np.asarray(z, dtype=float)
        m = self.coeffs[:, :1] + self.coeffs[:, 1:] * z.reshape(1, -1)
        return np.prod(m, axis=0).reshape(z.shape)


def leaf_profile(K: KahlerStructure, mu) -> LeafProfile:
    mu = np.asarray(mu, dtype=float)
    m0 = moduli(K, leaf_point(K, (0.0, 0.0, 0.0), mu))
    m1 = moduli(K, leaf_point(K, (0.0, 0.0, 1.0), mu))
    coeffs = np.column_stack([m0, m1 - m0])
    lo, hi = -np.inf, np.inf
    for c0, c1 in coeffs:
        if c1 > 0:
            lo = max(lo, -c0 / c1)
        elif c1 < 0:
            hi = min(hi, -c0 / c1)
        elif c0 < 0:
            raise MeshFailure(f"leaf mu={tuple(float(x) for x in mu)} is empty")
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise MeshFailure(f"leaf mu={tuple(float(x) for x in mu)} is not compact")
    if hi < lo:
        raise MeshFailure(f"leaf mu={tuple(float(x) for x in mu)} is empty")
    poly = np.polynomial.Polynomial([1.0])
    for c0, c1 in coeffs:
        poly = poly * np.polynomial.Polynomial([c0, c1])
    cands = [lo, hi] + [r.real for r in poly.deriv().roots() if abs(r.imag) < 1e-12 and lo <= r.real <= hi]
    prof = LeafProfile(float(lo), float(hi), 0.0, coeffs)
    peak = max(cands, key=lambda z: float(prof.rho2(z)))
    return LeafProfile(float(lo), float(hi), float(peak), coeffs)


def leaf_mesh(K: KahlerStructure, mu, n_z: int = 48, n_psi: int = 64) -> np.ndarray:
    """Triangles ``(T, 3, 3)`` in (X, Y, Z2) covering the whole leaf."""
    prof = leaf_profile(K, mu)
    s = np.linspace(0.0, np.pi, n_z + 1)
    z = 0.5 * (prof.z_min + prof.z_max) - 0.5 * (prof.z_max - prof.z_min) * np.cos(s)
    r = np.sqrt(np.maximum(prof.rho2(z), 0.0))
    psi = np.linspace(0.0, 2.0 * np.pi, n_psi + 1)
    P = np.stack(
        [r[:, None] * np.cos(psi)[None, :], r[:, None] * np.sin(psi)[None, :],
         np.broadcast_to(z[:, None], (z.size, psi.size))],
        axis=-1,
    )
    tris = []
    for i in range(n_z):
        for j in range(n_psi):
            tris.append((P[i, j], P[i + 1, j], P[i + 1, j + 1]))
            tris.append((P[i, j], P[i + 1, j + 1], P[i, j + 1]))
    return np.array(tris)


@dataclass(frozen=True)
class MeshConfig:
    """Refinement level ``l`` uses ``4 * 2**l`` bands and ``16 * 2**l`` points per ring."""

    level: int = 2

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("mesh level must be nonnegative")

    @property
    def bands(self) -> int:
        return 4 * 2**self.level

    @property
    def ring(self) -> int:
        return 16 * 2**self.level


def _oval_bounds(K, prof, X, z_lo, z_hi):
    from scipy.optimize import brentq

    def g(z):
        return float(prof.rho2(z)) - X * X

    zp = prof.z_peak
    a = brentq(g, z_lo, zp, xtol=1e-15) if g(z_lo) < 0 else z_lo
    b = brentq(g, zp, z_hi, xtol=1e-15) if g(z_hi) < 0 else z_hi
    return a, b


def cap_mesh(K: KahlerStructure, mu, x0: float, cfg: MeshConfig | None = None) -> np.ndarray:
    """Triangles of the leaf cap ``{sign(x0) X >= |x0|}`` bounded by the level set ``X = x0``.

    Each triangle is ordered so that its orientation agrees with the boundary
    oval traversed with Z2 decreasing where Y > 0.
    """
    cfg = cfg or MeshConfig()
    prof = leaf_profile(K, mu)
    top = np.sqrt(max(float(prof.rho2(prof.z_peak)), 0.0))
    scale = max(1.0, top)
    if abs(x0) <= 1e-9 * scale:
        raise MeshFailure("orbit lies on X = 0; no cap bounded by a level set of X")
    if top <= abs(x0) * (1.0 + 1e-12):
        raise MeshFailure("level set X = x0 does not bound a cap")
    side = np.sign(x0)
    x_apex = side * top
    apex = np.array([x_apex, 0.0, prof.z_peak])
    rings = []
    for i in range(1, cfg.bands + 1):
        u = i / cfg.bands
        X = x_apex - (x_apex - x0) * u * u
        za, zb = _oval_bounds(K, prof, X, prof.z_min, prof.z_max)
        c, hw = 0.5 * (za + zb), 0.5 * (zb - za)
        tau = np.linspace(0.0, 2.0 * np.pi, cfg.ring + 1)
        z = c + hw * np.cos(tau)
        Y = np.sign(np.sin(tau)) * np.sqrt(np.maximum(prof.rho2(z) - X * X, 0.0))
        rings.append(np.column_stack([np.full_like(z, X), Y, z]))
    tris = [(apex, rings[0][j], rings[0][j + 1]) for j in range(cfg.ring)]
    for R0, R1 in zip(rings[:-1], rings[1:]):
        for j in range(cfg.ring):
            tris.append((R0[j], R1[j], R1[j + 1]))
            tris.append((R0[j], R1[j + 1], R0[j + 1]))
    return np.array(tris)


def _project_to_leaf(K, p, mu):
    p = np.asarray(p, dtype=float)
    for _ in range(50):
        g = phi_gradient(K, p, mu)
        dp = phi(K, p, mu) / (g @ g) * g
        p = p - dp
        if np.max(np.abs(dp)) < 1e-15 * max(1.0, np.max(np.abs(p))):
            break
    return p


@dataclass
class SurfaceResult:
    flux: np.ndarray  # signed integral of the curvature over the cap
    phase: np.ndarray  # flux wrapped to (-pi, pi]
    triangles: int
    orientation: int


def geometric_phase_surface(
    K: KahlerStructure, orbit: ReducedTrajectory, cfg: MeshConfig | None = None, h: float = 1e-5
) -> SurfaceResult:
    """Integrate the curvature over the cap bounded by a closed reduced orbit.

    The orbit must be a level set of ``X`` (the reduced energy), which holds for
    every reduced solution of the three-wave flow.
    """
    cfg = cfg or MeshConfig()
    mu = orbit.mu
    spread = float(np.max(np.ptp(orbit.y3, axis=0)))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(orbit.y3)))):
        # a loop that never leaves its start point encloses nothing
        return SurfaceResult(np.zeros(2), np.zeros(2), 0, 1)
    x0 = float(np.mean(orbit.y3[:, 0]))
    tris = cap_mesh(K, mu, x0, cfg)
    # direction of travel against the mesh convention (Z2 decreasing where Y > 0)
    k = int(np.argmax(orbit.y3[:, 1]))
    z_rate = reduced_vector_field(K, orbit.y3[k], mu)[2]
    orient = 1 if z_rate < 0 else -1
    flux = np.zeros(2)
    for tri in tris:
        c = _project_to_leaf(K, tri.mean(axis=0), mu)
        g = phi_gradient(K, c, mu)
        n = g / np.linalg.norm(g)
        e1 = tri[1] - tri[0]
        e2 = tri[2] - tri[0]
        e1 = e1 - (e1 @ n) * n
        e2 = e2 - (e2 @ n) * n
        if np.linalg.norm(np.cross(e1, e2)) == 0.0:
            continue
        try:
            flux += 0.5 * curvature(K, c, mu, e1, e2, h)
        except GaugeUndefined as exc:
            raise MeshFailure(f"cap touches a point where the section is undefined: {exc}") from exc
    flux *= orient
    return SurfaceResult(flux, wrap_signed(flux), len(tris), orient)
