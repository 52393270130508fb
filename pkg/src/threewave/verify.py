"""Invariant suite: each check returns its worst residual over random or configured samples."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.linalg import null_space

from .curvature import (
    assembled_form_matrix,
    curvature,
    horizontal_lift_vectors,
    small_loop_holonomy,
)
from .dynamics import (
    IntegratorConfig,
    detect_period,
    integrate,
    integrate_reduced,
    vector_field,
)
from .errors import ThreeWaveError
from .geometry import KahlerStructure, jmul, metric, omega, omega_sharp, pair
from .phases import (
    PhaseConfig,
    compute_phases,
    dyn_phase_density,
    map_L,
    map_N,
    transverse_basis,
)
from .reduction import (
    casimirs,
    inertia_reduced,
    invariants,
    leaf_tangent,
    phi,
    phi_gradient,
    project,
    projection_differential,
    reconstruct_point,
    reduced_bracket_4d,
    reduced_symplectic,
    reduced_vector_field,
)
from .symmetry import (
    act,
    connection,
    connection_from_metric,
    generator,
    inertia,
    inertia_from_metric,
    momentum_differential,
)

__all__ = ["CheckResult", "random_points", "run_suite", "format_table", "CHECKS"]


@dataclass
class CheckResult:
    name: str
    anchor: str
    residual: float
    threshold: float
    error: str | None = None

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual < self.threshold)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _cvec(rng, n=None):
    shape = (3,) if n is None else (n, 3)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Gaussian points in C^3, normalized to the section gauge (q1, q3 real)."""
    q = _cvec(rng, n)
    a, b = np.angle(q[:, 0]), np.angle(q[:, 2])
    return np.stack([act((a[i], b[i]), q[i]) for i in range(n)])


def _horizontal_kernel_basis(K, q) -> np.ndarray:
    """Real 6-vectors spanning ker(dJ) intersected with the horizontal space."""
    basis = np.concatenate([np.eye(3), 1j * np.eye(3)])
    rows = np.array(
        [np.concatenate([momentum_differential(K, q, e), connection(K, q, e)]) for e in basis]
    ).T
    return null_space(rows)


def _c(v6):
    return v6[:3] + 1j * v6[3:]


def _leaf_tangents(K, y):
    g = phi_gradient(K, y.leaf, y.mu)
    n = g / np.linalg.norm(g)
    t1 = np.cross(n, [0.0, 0.0, 1.0])
    if np.linalg.norm(t1) < 1e-8:
        t1 = np.cross(n, [1.0, 0.0, 0.0])
    t1 /= np.linalg.norm(t1)
    return t1, np.cross(n, t1)


# ------------------------------------------------------------------ checks
# each takes (K, rng, n, ctx) and returns a residual


def _kahler(K, rng, n, ctx):
    z, w = _cvec(rng, 10 * n), _cvec(rng, 10 * n)
    return max(abs(omega(K, a, b) - metric(K, jmul(a), b)) for a, b in zip(z, w))


def _sharp(K, rng, n, ctx):
    a, w = _cvec(rng, n), _cvec(rng, n)
    return max(abs(omega(K, omega_sharp(K, x), y) - pair(x, y)) for x, y in zip(a, w))


def _conn_generators(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        xi = rng.normal(size=2)
        r = max(r, np.max(np.abs(connection(K, q, generator(xi, q)) - xi)))
    return r


def _conn_equivariance(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        g, w = rng.uniform(0, 2 * np.pi, 2), _cvec(rng)
        r = max(r, np.max(np.abs(connection(K, act(g, q), act(g, w)) - connection(K, q, w))))
    return r


def _conn_routes(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        w = _cvec(rng)
        r = max(r, np.max(np.abs(connection(K, q, w) - connection_from_metric(K, q, w))))
    return r


def _inertia_routes(K, rng, n, ctx):
    return max(
        np.max(np.abs(inertia(K, q) - inertia_from_metric(K, q))) for q in ctx["points"]
    )


def _inertia_reduced(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        r = max(r, np.max(np.abs(inertia_reduced(K, y) - inertia(K, reconstruct_point(K, y)))))
    return r


def _casimirs(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        c = casimirs(K, y)
        s = max(1.0, float(np.sum(np.abs(q) ** 2)) ** 3)
        r = max(r, abs(c.C1) / s, abs(c.C2) / s, abs(phi(K, y.leaf, y.mu)) / s)
    return r


def _reduced_flow(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        up = projection_differential(q, vector_field(K, q))
        down = leaf_tangent(K, reduced_vector_field(K, y.leaf, y.mu))
        r = max(r, np.max(np.abs(up - down)) / max(1.0, np.max(np.abs(up))))
    return r


def _bracket(K, rng, n, ctx):
    r = 0.0
    h = np.array([-1.0, 0.0, 0.0, 0.0])
    for q in ctx["points"]:
        y = project(K, q)
        v = leaf_tangent(K, reduced_vector_field(K, y.leaf, y.mu))
        br = np.array([reduced_bracket_4d(K, e, h, y) for e in np.eye(4)])
        r = max(r, np.max(np.abs(br - v)) / max(1.0, np.max(np.abs(v))))
    return r


def _hamiltonian_pairing(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        xh = reduced_vector_field(K, y.leaf, y.mu)
        for v in _leaf_tangents(K, y):
            r = max(r, abs(reduced_symplectic(K, y.leaf, y.mu, xh, v) + v[0]))
    return r


def _marsden_weinstein(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        B = _horizontal_kernel_basis(K, q)
        u, v = _c(B[:, 0]), _c(B[:, 1])
        du, dv = projection_differential(q, u), projection_differential(q, v)
        red = reduced_symplectic(K, y.leaf, y.mu, du[[0, 1, 3]], dv[[0, 1, 3]])
        r = max(r, abs(red - omega(K, u, v)))
    return r


def _density_routes(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        nu = rng.normal(size=2)
        vals = [dyn_phase_density(K, y, nu, route) for route in ("closed", "reduced", "unreduced")]
        r = max(r, (max(vals) - min(vals)) / max(1.0, max(abs(v) for v in vals)))
    return r


def _transverse_closed_form(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        tb = transverse_basis(K, y)
        r = max(
            r,
            np.max(np.abs(map_N(K, y, (1.0, 0.0)) - tb.v1)),
            np.max(np.abs(map_N(K, y, (0.0, 1.0)) - tb.v2)),
        )
    return r


def _mu_differential(K, y, v):
    """Derivative of the momentum value along an orbit-space vector, through a fiber point."""
    q = reconstruct_point(K, y)
    lift = horizontal_lift_vectors(K, q, [v])[:, 0]
    return momentum_differential(K, q, _c(lift))


def _L_inverse(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        nu = rng.normal(size=2)
        r = max(r, np.max(np.abs(_mu_differential(K, y, map_L(K, y, nu)) - nu)))
    return r


def _N_inertia(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        xi = rng.normal(size=2)
        I = inertia_reduced(K, y)
        r = max(r, np.max(np.abs(_mu_differential(K, y, map_N(K, y, xi)) - I @ xi)))
    return r


def _D_orthogonality(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        q = reconstruct_point(K, y)
        tb = transverse_basis(K, y)
        tans = [leaf_tangent(K, t) for t in _leaf_tangents(K, y)]
        lifts = horizontal_lift_vectors(K, q, [tb.v1, tb.v2, *tans])
        for i in (0, 1):
            for j in (2, 3):
                r = max(r, abs(metric(K, _c(lifts[:, i]), _c(lifts[:, j]))))
    return r


def _assembled_structure(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"]:
        y = project(K, q)
        S = assembled_form_matrix(K, y)
        tb = transverse_basis(K, y)
        t1, t2 = _leaf_tangents(K, y)
        r = max(r, np.max(np.abs(S + S.T)))
        r = max(r, np.max(np.abs(S @ tb.v1)), np.max(np.abs(S @ tb.v2)))
        leaf_val = leaf_tangent(K, t1) @ S @ leaf_tangent(K, t2)
        r = max(r, abs(leaf_val - reduced_symplectic(K, y.leaf, y.mu, t1, t2)))
    return r


def _curvature_holonomy(K, rng, n, ctx):
    r = 0.0
    for q in ctx["points"][:3]:
        y = project(K, q)
        t1, t2 = _leaf_tangents(K, y)
        c = curvature(K, y.leaf, y.mu, t1, t2)
        eps = 3e-3
        hol = small_loop_holonomy(K, y.leaf, y.mu, t1, t2, eps) / eps**2
        r = max(r, float(np.max(np.abs(hol - c)) / max(np.max(np.abs(c)), 1e-3)))
    return r


def _conservation(K, rng, n, ctx):
    q0, cfg = ctx["q0"], ctx["integrator"]
    tr = integrate(K, q0, (0.0, ctx["t_max"]), cfg)
    return max(tr.stats.max_drift.values())


def _commutation(K, rng, n, ctx):
    q0 = ctx["q0"]
    cfg = ctx["integrator"].tightened(100.0)
    y0 = project(K, q0)
    rt = integrate_reduced(K, y0.leaf, y0.mu, (0.0, ctx["t_max"]), cfg)
    T = detect_period(rt, ctx["period_tol"])
    ts = np.linspace(0.0, T, 200)
    tr = integrate(K, q0, (0.0, T), cfg, t_eval=ts)
    up = np.array([invariants(q)[[0, 1, 3]] for q in tr.q])
    down = np.atleast_2d(rt(ts)).T
    return float(np.max(np.abs(up - down)))


def _phases(ctx, K):
    if "phases" not in ctx:
        pc = PhaseConfig(t_max=ctx["t_max"], period_tol=ctx["period_tol"])
        ctx["phases"] = compute_phases(K, ctx["q0"], pc)
    return ctx["phases"]


def _decomposition(K, rng, n, ctx):
    return _phases(ctx, K).decomposition_residual


def _dynamic_routes(K, rng, n, ctx):
    pb = _phases(ctx, K)
    return float(np.max(np.abs(pb.xi_dyn_integral - pb.xi_dyn_reduced_integral)))


Check = tuple[str, str, float, Callable]

CHECKS: list[Check] = [
    ("kahler_compatibility", "omega(z,w) = s(Jz,w)", 1e-12, _kahler),
    ("sharp_round_trip", "omega(omega#a, w) = <a, w>", 1e-12, _sharp),
    ("connection_on_generators", "A(xi_P) = xi", 1e-12, _conn_generators),
    ("connection_equivariance", "A(g.q)(g.w) = A(q)(w)", 1e-12, _conn_equivariance),
    ("connection_two_routes", "I^-1 dJ(Jw) = I^-1 s(omega# dJ, w)", 1e-12, _conn_routes),
    ("inertia_two_routes", "s(xi_P, eta_P) = closed form", 1e-12, _inertia_routes),
    ("inertia_through_section", "I(y) = I(sec(y))", 1e-12, _inertia_reduced),
    ("casimirs_on_image", "C1 = C2 = phi = 0 on pi(P)", 1e-12, _casimirs),
    ("reduced_flow_projection", "T pi X_H = X_h", 1e-11, _reduced_flow),
    ("bracket_determinant", "{f,h} = det(dC2, dC1, df, dh)", 1e-10, _bracket),
    ("leaf_form_hamiltonian", "omega_mu(X_h, v) = dh(v)", 1e-10, _hamiltonian_pairing),
    ("marsden_weinstein", "pi* omega_mu = omega on ker TJ", 1e-8, _marsden_weinstein),
    ("transverse_closed_form", "N(e_k) = v_k", 1e-12, _transverse_closed_form),
    ("dynamic_density_routes", "dh(L nu) = dH(J (I^-1 nu)_P) = closed form", 1e-10, _density_routes),
    ("L_inverts_TJ", "TJ L(nu) = nu", 1e-10, _L_inverse),
    ("N_gives_inertia", "TJ N(xi) = I xi", 1e-10, _N_inertia),
    ("D_orthogonality", "s'(D, E) = 0", 1e-9, _D_orthogonality),
    ("assembled_form_structure", "omega'|E = omega_mu, omega'|D = 0", 1e-9, _assembled_structure),
    ("curvature_vs_holonomy", "hol / eps^2 -> D_mu omega'", 1e-2, _curvature_holonomy),
    ("conservation", "H, K1, K2 conserved", 1e-8, _conservation),
    ("reduction_commutes", "pi(flow) = reduced flow", 1e-6, _commutation),
    ("phase_decomposition", "g_total = g_dyn g_geom", 1e-6, _decomposition),
    ("dynamic_phase_routes", "int A(X_H) = int D_mu h", 1e-6, _dynamic_routes),
]


def run_suite(
    K: KahlerStructure,
    q0,
    *,
    samples: int = 200,
    seed: int = 0,
    integrator: IntegratorConfig | None = None,
    t_max: float = 50.0,
    period_tol: float = 1e-8,
    names: list[str] | None = None,
) -> list[CheckResult]:
    """Run the checks (optionally a subset by name) and collect residuals."""
    rng = np.random.default_rng(seed)
    ctx = {
        "q0": np.asarray(q0, dtype=complex),
        "integrator": integrator or IntegratorConfig(),
        "t_max": t_max,
        "period_tol": period_tol,
        "points": random_points(rng, samples),
    }
    out = []
    for name, anchor, thr, fn in CHECKS:
        if names is not None and name not in names:
            continue
        sub = np.random.default_rng([seed, len(out)])
        err = None
        try:
            res = float(fn(K, sub, samples, ctx))
        except ThreeWaveError as exc:  # a failing check is reported, not raised
            res = float("nan")
            err = f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, anchor, res, thr, err))
    return out


def format_table(results: list[CheckResult]) -> str:
    w_name = max(len(r.name) for r in results)
    w_anchor = max(len(r.anchor) for r in results)
    lines = [f"{'identity':<{w_name}}  {'anchor':<{w_anchor}}  {'residual':>10}  {'threshold':>9}  status"]
    for r in results:
        lines.append(
            f"{r.name:<{w_name}}  {r.anchor:<{w_anchor}}  {r.residual:>10.3e}  {r.threshold:>9.1e}  "
            f"{'PASS' if r.passed else 'FAIL'}"
        )
        if r.error:
            lines.append(f"    {r.error}")
    return "\n".join(lines)
