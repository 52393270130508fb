"""Three-wave Hamiltonian flow, its reduced counterpart, and period detection."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import ConfigError, NotPeriodic, OffSurface, StepSizeUnderflow
from .geometry import KahlerStructure, as_vector
from .reduction import (
    phi,
    phi_gradient,
    reduced_vector_field,
    z1_from_constraint,
)
from .symmetry import momentum

__all__ = [
    "IntegratorConfig",
    "IntegratorStats",
    "Trajectory",
    "ReducedTrajectory",
    "hamiltonian",
    "hamiltonian_covector",
    "vector_field",
    "solve",
    "integrate",
    "integrate_reduced",
    "detect_period",
]

METHODS = {"rk45": "RK45", "dop853": "DOP853", "rk4": None}


@dataclass(frozen=True)
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = np.inf
    method: str = "rk45"
    # fixed step used only by the "rk4" method
    step: float = 1e-3

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown integrator method {self.method!r}")
        if not (self.rtol > 0 and self.atol > 0):
            raise ConfigError("integrator tolerances must be positive")
        if not self.max_step > 0 or not self.step > 0:
            raise ConfigError("integrator step sizes must be positive")

    def tightened(self, factor: float) -> "IntegratorConfig":
        return IntegratorConfig(
            self.rtol * factor, self.atol * factor, self.max_step, self.method, self.step
        )


@dataclass
class IntegratorStats:
    steps: int = 0
    rejected: int = 0
    nfev: int = 0
    max_drift: dict[str, float] = field(default_factory=dict)


@dataclass
class Trajectory:
    t: np.ndarray
    q: np.ndarray  # (N, 3) complex
    stats: IntegratorStats
    dense: Callable[[float], np.ndarray] | None = None

    def __call__(self, t) -> np.ndarray:
        return _to_complex(self.dense(t))


@dataclass
class ReducedTrajectory:
    t: np.ndarray
    y3: np.ndarray  # (N, 3): X, Y, Z2
    mu: np.ndarray
    z1: np.ndarray
    K: KahlerStructure
    stats: IntegratorStats
    dense: Callable[[float], np.ndarray] | None = None

    def __call__(self, t) -> np.ndarray:
        return self.dense(t)


def hamiltonian(q) -> float:
    """``H = -Re(conj(q1) q2 conj(q3))``."""
    return float(-np.real(np.conj(q[0]) * q[1] * np.conj(q[2])))


def hamiltonian_covector(q) -> np.ndarray:
    """``dH`` as a covector: ``2 dH/d(conj q_k)``."""
    q = np.asarray(q, dtype=complex)
    return -np.array([q[1] * np.conj(q[2]), q[0] * q[2], np.conj(q[0]) * q[1]])


def vector_field(K: KahlerStructure, q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    return 1j * K.weights * np.array(
        [q[1] * np.conj(q[2]), q[0] * q[2], np.conj(q[0]) * q[1]]
    )


def _to_real(q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    return np.concatenate([q.real, q.imag], axis=-1)


def _to_complex(x) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 1:
        n = x.shape[0] // 2
        return x[:n] + 1j * x[n:]
    n = x.shape[0] // 2
    return (x[:n] + 1j * x[n:]).T


def _rk4(fun, y0, t0, t1, h):
    n = max(1, int(np.ceil(abs(t1 - t0) / h - 1e-12)))
    ts = np.linspace(t0, t1, n + 1)
    ys = np.empty((n + 1, y0.size))
    fs = np.empty_like(ys)
    ys[0] = y0
    fs[0] = fun(t0, y0)
    for i in range(n):
        dt = ts[i + 1] - ts[i]
        y = ys[i]
        k1 = fs[i]
        k2 = fun(ts[i] + dt / 2, y + dt / 2 * k1)
        k3 = fun(ts[i] + dt / 2, y + dt / 2 * k2)
        k4 = fun(ts[i] + dt, y + dt * k3)
        ys[i + 1] = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        fs[i + 1] = fun(ts[i + 1], ys[i + 1])
        if not np.all(np.isfinite(ys[i + 1])):
            raise StepSizeUnderflow(f"solution blew up near t={ts[i + 1]:.6g}")
    spline = CubicHermiteSpline(ts, ys, fs, axis=0)
    stats = IntegratorStats(steps=n, rejected=0, nfev=4 * n + 1)
    return ts, ys, lambda t: spline(t).T, stats


def solve(fun, y0, t_span, cfg: IntegratorConfig, t_eval=None):
    """Integrate a real ODE; returns ``(t, y (N, d), dense, stats)``.

    ``dense(t)`` returns shape ``(d,)`` or ``(d, M)`` like scipy's OdeSolution.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ConfigError(f"empty time span {t_span}")
    y0 = np.asarray(y0, dtype=float)
    if cfg.method == "rk4":
        ts, ys, dense, stats = _rk4(fun, y0, t0, t1, cfg.step)
        if t_eval is not None:
            t_eval = np.asarray(t_eval, dtype=float)
            return t_eval, np.atleast_2d(dense(t_eval)).T, dense, stats
        return ts, ys, dense, stats
    sol = solve_ivp(
        fun,
        (t0, t1),
        y0,
        method=METHODS[cfg.method],
        rtol=cfg.rtol,
        atol=cfg.atol,
        max_step=cfg.max_step,
        dense_output=True,
        t_eval=t_eval,
    )
    if sol.status != 0 or not np.all(np.isfinite(sol.y)):
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    steps = int(len(sol.sol.ts) - 1)
    n_stages = 6 if cfg.method == "rk45" else 12
    # every attempted step costs n_stages evaluations; 2 more are spent on start-up
    attempts = max(steps, (sol.nfev - 2) // n_stages)
    stats = IntegratorStats(steps=steps, rejected=attempts - steps, nfev=int(sol.nfev))
    return sol.t, sol.y.T, sol.sol, stats


def integrate(
    K: KahlerStructure, q0, t_span, cfg: IntegratorConfig | None = None, t_eval=None
) -> Trajectory:
    """Integrate Hamilton's equations; drift of H, K1, K2 is recorded in the stats."""
    cfg = cfg or IntegratorConfig()
    q0 = as_vector(q0, "q0")
    w = K.weights

    def fun(_t, x):
        q1, q2, q3 = x[0] + 1j * x[3], x[1] + 1j * x[4], x[2] + 1j * x[5]
        d1 = 1j * w[0] * q2 * np.conj(q3)
        d2 = 1j * w[1] * q1 * q3
        d3 = 1j * w[2] * np.conj(q1) * q2
        return np.array([d1.real, d2.real, d3.real, d1.imag, d2.imag, d3.imag])

    t, y, dense, stats = solve(fun, _to_real(q0), t_span, cfg, t_eval)
    q = y[:, :3] + 1j * y[:, 3:]
    H = -np.real(np.conj(q[:, 0]) * q[:, 1] * np.conj(q[:, 2]))
    m = np.abs(q) ** 2 / w
    J = 0.5 * np.column_stack([m[:, 0] + m[:, 1], m[:, 1] + m[:, 2]])
    J0 = momentum(K, q0)
    stats.max_drift = {
        "H": float(np.max(np.abs(H - hamiltonian(q0)))),
        "K1": float(np.max(np.abs(J[:, 0] - J0[0]))),
        "K2": float(np.max(np.abs(J[:, 1] - J0[1]))),
    }
    return Trajectory(t, q, stats, dense)


def integrate_reduced(
    K: KahlerStructure,
    y0,
    mu,
    t_span,
    cfg: IntegratorConfig | None = None,
    t_eval=None,
    surface_tol: float = 1e-8,
) -> ReducedTrajectory:
    """Integrate the leaf flow of ``h = -X`` from ``y0 = (X, Y, Z2)``."""
    cfg = cfg or IntegratorConfig()
    y0 = np.asarray(y0, dtype=float)
    mu = np.asarray(mu, dtype=float)
    scale = max(1.0, float(np.linalg.norm(phi_gradient(K, y0, mu)) * max(1.0, np.max(np.abs(y0)))))
    r = phi(K, y0, mu)
    if not abs(r) <= surface_tol * scale:
        raise OffSurface(f"|phi(y0)| = {abs(r):.3e} exceeds {surface_tol:.1e}")

    def fun(_t, y):
        return reduced_vector_field(K, y, mu)

    t, y, dense, stats = solve(fun, y0, t_span, cfg, t_eval)
    z1 = np.array([z1_from_constraint(K, z2, mu) for z2 in y[:, 2]])
    phis = np.array([phi(K, p, mu) for p in y])
    stats.max_drift = {
        "X": float(np.max(np.abs(y[:, 0] - y0[0]))),
        "phi": float(np.max(np.abs(phis))),
    }
    return ReducedTrajectory(t, y, mu, z1, K, stats, dense)


def _section_index(v) -> int:
    # Y or Z2, whichever moves fastest at the start
    return 1 if abs(v[1]) >= abs(v[2]) else 2


def detect_period(rt: ReducedTrajectory, tol: float = 1e-8, min_fraction: float = 1e-3) -> float:
    """First return time to the section through ``y0`` crossed in the same direction.

    The crossing is bracketed on the dense output, bisected, then polished by
    Newton iteration on the return time.  Raises :class:`NotPeriodic` when no
    transversal return exists within the trajectory or closure exceeds ``tol``.
    """
    K, mu = rt.K, rt.mu
    y0 = rt.y3[0]
    v0 = reduced_vector_field(K, y0, mu)
    speed = float(np.linalg.norm(v0))
    if speed < 1e-12 * max(1.0, float(np.linalg.norm(y0))):
        raise NotPeriodic("initial point is an equilibrium of the reduced flow")
    k = _section_index(v0)
    sgn = np.sign(v0[k])
    t0, t1 = rt.t[0], rt.t[-1]
    tmin = t0 + min_fraction * (t1 - t0)
    keep = rt.t > tmin
    grid = rt.t[keep]
    g = sgn * (rt.y3[keep, k] - y0[k])
    # crossing from below to above in the section direction
    hits = np.nonzero((g[:-1] < 0.0) & (g[1:] >= 0.0))[0]
    if hits.size == 0:
        raise NotPeriodic("no return to the Poincare section within the time span")
    a, b = grid[hits[0]], grid[hits[0] + 1]

    def gfun(t):
        return sgn * (rt.dense(t)[k] - y0[k])

    for _ in range(60):
        m = 0.5 * (a + b)
        if gfun(m) < 0.0:
            a = m
        else:
            b = m
        if b - a < 1e-14 * max(1.0, b):
            break
    T = 0.5 * (a + b)
    for _ in range(8):
        y = rt.dense(T)
        v = reduced_vector_field(K, y, mu)
        if v[k] == 0.0:
            break
        dT = (y[k] - y0[k]) / v[k]
        T -= dT
        if abs(dT) < 1e-15 * max(1.0, T):
            break
    err = float(np.linalg.norm(rt.dense(T) - y0))
    if not err < tol:
        raise NotPeriodic(f"section return closes only to {err:.3e} (tol {tol:.1e})")
    return float(T)
