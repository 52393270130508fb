"""Transverse maps, horizontal lifts and the dynamic/geometric/total phase split."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .dynamics import (
    IntegratorConfig,
    IntegratorStats,
    ReducedTrajectory,
    _to_complex,
    _to_real,
    detect_period,
    hamiltonian_covector,
    integrate,
    integrate_reduced,
    solve,
    vector_field,
)
from .errors import AmbiguousPhase, ConfigError
from .geometry import KahlerStructure, as_vector, jmul, pair
from .reduction import (
    ReducedPoint,
    inertia_reduced,
    invariants,
    leaf_point,
    project,
    projection_differential,
    reconstruct_point,
)
from .symmetry import (
    GroupElement,
    connection,
    generator,
    horizontal_project,
    inertia_from_metric,
    momentum,
    wrap_signed,
)

__all__ = [
    "TransverseBasis",
    "LiftedPath",
    "PhaseConfig",
    "PhaseBreakdown",
    "map_N",
    "map_L",
    "transverse_basis",
    "dyn_phase_density",
    "horizontal_lift",
    "reconstruction_equation_phase",
    "reduced_dynamic_phase",
    "extract_group_element",
    "compute_phases",
]


class TransverseBasis(NamedTuple):
    v1: np.ndarray
    v2: np.ndarray


@dataclass
class LiftedPath:
    t: np.ndarray
    d: np.ndarray  # (N, 3)
    stats: IntegratorStats
    dense: object = None

    def __call__(self, t) -> np.ndarray:
        return _to_complex(self.dense(t))


@dataclass(frozen=True)
class PhaseConfig:
    integrator: IntegratorConfig = IntegratorConfig(rtol=1e-12, atol=1e-14)
    t_max: float = 50.0
    period_tol: float = 1e-8
    # Simpson intervals for the phase integrals; None picks from the step count
    quadrature_intervals: int | None = None


@dataclass
class PhaseBreakdown:
    period: float
    xi_dyn_integral: np.ndarray
    xi_dyn_reduced_integral: np.ndarray
    theta_dyn: GroupElement
    theta_geom: GroupElement
    theta_total: GroupElement
    residual_q2: float
    closure_error: float
    decomposition_residual: float
    lift_momentum_drift: float
    orbit: ReducedTrajectory | None = field(default=None, repr=False)


def map_N(K: KahlerStructure, y: ReducedPoint, xi) -> np.ndarray:
    """``xi -> T pi (i xi_P)`` evaluated at the section point over ``y``."""
    q = reconstruct_point(K, y)
    return projection_differential(q, jmul(generator(xi, q)))


def transverse_basis(K: KahlerStructure, y: ReducedPoint) -> TransverseBasis:
    """Closed-form images of the unit algebra basis under :func:`map_N`."""
    w1, w2, w3 = K.weights
    a, b = K.pair_sums()
    K1, K2 = y.mu
    v1 = 2.0 * np.array([y.X, y.Y, y.Z1, w2 / b * (2.0 * w3 * K2 + y.Z2)])
    v2 = 2.0 * np.array([y.X, y.Y, -w2 / a * (2.0 * w1 * K1 - y.Z1), y.Z2])
    return TransverseBasis(v1, v2)


def map_L(K: KahlerStructure, y: ReducedPoint, nu) -> np.ndarray:
    xi = np.linalg.solve(inertia_reduced(K, y), np.asarray(nu, dtype=float))
    return map_N(K, y, xi)


def dyn_phase_density(K: KahlerStructure, y: ReducedPoint, nu, route: str = "closed") -> float:
    """``<nu, xi_dyn>`` at ``y``.

    route ``"closed"``: explicit formula in (K1, K2, Z2, h);
    ``"reduced"``: ``dh(L(nu))`` with ``h = -X``;
    ``"unreduced"``: ``dH(i (I^{-1} nu)_P)`` at a fiber point.
    """
    nu = np.asarray(nu, dtype=float)
    if route == "closed":
        I = inertia_reduced(K, y)
        K1, K2 = y.mu
        h = -y.X
        det = I[0, 0] * I[1, 1] - I[0, 1] ** 2
        return float(
            2.0 * h / det * (2.0 * K1 * nu[1] + 2.0 * K2 * nu[0] - I[0, 1] * (nu[0] + nu[1]))
        )
    if route == "reduced":
        return float(-map_L(K, y, nu)[0])
    if route == "unreduced":
        q = reconstruct_point(K, y)
        xi = np.linalg.solve(inertia_from_metric(K, q), nu)
        return pair(hamiltonian_covector(q), jmul(generator(xi, q)))
    raise ValueError(f"unknown route {route!r}")


def horizontal_lift(
    K: KahlerStructure, x0, t_span, cfg: IntegratorConfig | None = None, t_eval=None
) -> LiftedPath:
    """Horizontal lift of the reduced solution through ``pi(x0)``, starting at ``x0``.

    Integrates ``d' = X_H(d) - (A(d) X_H(d))_P``.
    """
    cfg = cfg or IntegratorConfig()
    x0 = as_vector(x0, "x0")

    def fun(_t, x):
        d = x[:3] + 1j * x[3:]
        v = horizontal_project(K, d, vector_field(K, d))
        return np.concatenate([v.real, v.imag])

    t, y, dense, stats = solve(fun, _to_real(x0), t_span, cfg, t_eval)
    d = y[:, :3] + 1j * y[:, 3:]
    J0 = momentum(K, x0)
    stats.max_drift = {
        "J": float(max(np.max(np.abs(momentum(K, di) - J0)) for di in d)),
    }
    return LiftedPath(t, d, stats, dense)


def _intervals(n_steps: int, requested: int | None) -> int:
    n = requested if requested is not None else max(256, 2 * n_steps)
    return n + (n % 2)


def reconstruction_equation_phase(
    K: KahlerStructure, lift: LiftedPath, n_intervals: int | None = None
) -> np.ndarray:
    """``int A(d_t) X_H(d_t) dt`` over the lift, composite Simpson on its dense output."""
    n = _intervals(len(lift.t) - 1, n_intervals)
    ts = np.linspace(lift.t[0], lift.t[-1], n + 1)
    ds = lift(ts)
    xi = np.array([connection(K, d, vector_field(K, d)) for d in ds])
    return simpson(xi, x=ts, axis=0)


def reduced_dynamic_phase(
    K: KahlerStructure, orbit: ReducedTrajectory, T: float, n_intervals: int = 512,
    route: str = "closed",
) -> np.ndarray:
    """``int D_mu h(y_t) dt`` over ``[0, T]`` along a reduced trajectory."""
    n = n_intervals + (n_intervals % 2)
    ts = np.linspace(orbit.t[0], orbit.t[0] + T, n + 1)
    ys = np.atleast_2d(orbit(ts)).T
    vals = np.empty((ts.size, 2))
    for i, y3 in enumerate(ys):
        y = leaf_point(K, y3, orbit.mu)
        vals[i] = [dyn_phase_density(K, y, e, route) for e in np.eye(2)]
    return simpson(vals, x=ts, axis=0)


def extract_group_element(xa, xb, tol: float = 1e-12, orbit_tol: float = 1e-6):
    """The torus element ``g`` with ``xb = act(g, xa)`` plus the q2 consistency residual.

    Angles come from q1 and q3; q2 supplies a redundant check.  When q1 (or q3)
    vanishes the missing angle is taken from q2 and no residual is available.
    """
    xa = np.asarray(xa, dtype=complex)
    xb = np.asarray(xb, dtype=complex)
    ra, rb = np.abs(xa), np.abs(xb)
    scale = max(1.0, float(np.max(ra)))
    if np.max(np.abs(ra - rb)) > orbit_tol * scale:
        raise ConfigError("points are not on the same torus orbit")
    nz = (ra > tol * scale) & (rb > tol * scale)
    dphase = np.angle(xb * np.conj(xa))
    if nz[0] and nz[2]:
        a, b = -dphase[0], -dphase[2]
        residual = abs(float(wrap_signed(-dphase[1] - a - b))) if nz[1] else 0.0
    elif nz[1] and nz[2]:
        b = -dphase[2]
        a = -dphase[1] - b
        residual = 0.0
    elif nz[0] and nz[1]:
        a = -dphase[0]
        b = -dphase[1] - a
        residual = 0.0
    else:
        raise AmbiguousPhase("too many vanishing amplitudes to determine both angles")
    return GroupElement((a, b)), residual


def compute_phases(
    K: KahlerStructure, q0, cfg: PhaseConfig | None = None
) -> PhaseBreakdown:
    """Dynamic, geometric and total reconstruction phases over one reduced period."""
    cfg = cfg or PhaseConfig()
    q0 = as_vector(q0, "q0")
    y0 = project(K, q0)
    orbit = integrate_reduced(K, y0.leaf, y0.mu, (0.0, cfg.t_max), cfg.integrator)
    T = detect_period(orbit, cfg.period_tol)

    flow = integrate(K, q0, (0.0, T), cfg.integrator)
    lift = horizontal_lift(K, q0, (0.0, T), cfg.integrator)
    xT, dT = flow.q[-1], lift.d[-1]

    theta_geom, res_geom = extract_group_element(q0, dT)
    theta_total, res_total = extract_group_element(q0, xT)
    n = cfg.quadrature_intervals
    xi_dyn = reconstruction_equation_phase(K, lift, n)
    xi_red = reduced_dynamic_phase(K, orbit, T, _intervals(len(lift.t) - 1, n))
    theta_dyn = GroupElement(xi_dyn)

    return PhaseBreakdown(
        period=T,
        xi_dyn_integral=xi_dyn,
        xi_dyn_reduced_integral=xi_red,
        theta_dyn=theta_dyn,
        theta_geom=theta_geom,
        theta_total=theta_total,
        residual_q2=max(res_geom, res_total),
        closure_error=float(np.linalg.norm(invariants(xT) - invariants(q0))),
        decomposition_residual=theta_total.distance(theta_dyn + theta_geom),
        lift_momentum_drift=lift.stats.max_drift["J"],
        orbit=orbit,
    )
