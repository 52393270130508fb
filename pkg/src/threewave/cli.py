"""Command line front-end: ``threewave <simulate|phases|verify|surface>``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import ExperimentConfig, load_config
from .curvature import MeshConfig, geometric_phase_surface, leaf_mesh
from .dynamics import detect_period, hamiltonian, integrate, integrate_reduced
from .errors import ConfigError, MeshFailure, NotPeriodic, NumericalError
from .phases import compute_phases
from .reduction import casimirs, phi, project
from .report import (
    atomic_write,
    dump_json,
    make_report,
    phases_payload,
    surface_payload,
    write_csv,
)
from .symmetry import momentum
from .verify import CheckResult, format_table, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NOT_PERIODIC = 0, 1, 2, 3, 4

SIMULATE_COLUMNS = [
    "t", "re_q1", "im_q1", "re_q2", "im_q2", "re_q3", "im_q3",
    "H", "K1", "K2", "X", "Y", "Z1", "Z2", "C1", "C2", "phi",
]
SURFACE_COLUMNS = ["kind", "index", "vertex", "X", "Y", "Z2"]


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _emit_csv(out: str | None, header, rows) -> None:
    if out is None:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(v if isinstance(v, str) else "%.17g" % v for v in row) + "\n")
    else:
        write_csv(out, header, rows)


def cmd_simulate(cfg: ExperimentConfig, out: str | None) -> int:
    K = cfg.structure
    ts = np.linspace(0.0, cfg.t_max, cfg.output_points)
    tr = integrate(K, cfg.q0_array, (0.0, cfg.t_max), cfg.integrator, t_eval=ts)
    rows = []
    for t, q in zip(tr.t, tr.q):
        y = project(K, q)
        c = casimirs(K, y)
        rows.append([
            t, q[0].real, q[0].imag, q[1].real, q[1].imag, q[2].real, q[2].imag,
            hamiltonian(q), *y.mu, y.X, y.Y, y.Z1, y.Z2, c.C1, c.C2, phi(K, y.leaf, y.mu),
        ])
    _emit_csv(out, SIMULATE_COLUMNS, rows)
    return EXIT_OK


def _orbit_residuals(K, q0, cfg: ExperimentConfig):
    tr = integrate(K, q0, (0.0, cfg.t_max), cfg.integrator)
    cas = np.array([[*casimirs(K, y := project(K, q)), phi(K, y.leaf, y.mu)] for q in tr.q])
    res = np.max(np.abs(cas), axis=0)
    return tr.stats.max_drift, {"C1": res[0], "C2": res[1], "phi": res[2]}


def cmd_phases(cfg: ExperimentConfig, out: str | None) -> int:
    K = cfg.structure
    q0 = cfg.q0_array
    pb = compute_phases(K, q0, cfg.phase_config())
    drift, cas = _orbit_residuals(K, q0, cfg)
    sections = {
        "period": pb.period,
        "phases": phases_payload(pb),
        "conservation": drift,
        "casimir_residuals": cas,
    }
    checks = [
        CheckResult("phase_decomposition", "g_total = g_dyn g_geom", pb.decomposition_residual, 1e-6),
        CheckResult(
            "dynamic_phase_routes", "int A(X_H) = int D_mu h",
            float(np.max(np.abs(pb.xi_dyn_integral - pb.xi_dyn_reduced_integral))), 1e-6,
        ),
        CheckResult("orbit_closure", "pi(x_T) = pi(x_0)", pb.closure_error, 1e-6),
        CheckResult("q2_phase_consistency", "arg q2 follows theta1 + theta2", pb.residual_q2, 1e-8),
    ]
    try:
        sr = geometric_phase_surface(K, pb.orbit, MeshConfig(cfg.mesh))
        surf = surface_payload(cfg.mesh, sr.flux, pb.theta_geom.theta, sr.triangles)
        sections["surface"] = surf
        checks.append(
            CheckResult("surface_vs_holonomy", "g_geom = exp int D_mu omega'",
                        surf["relative_discrepancy"], 1e-2)
        )
    except MeshFailure as exc:
        sections["surface_error"] = str(exc)
    sections["checks"] = [c.as_dict() for c in checks]
    _emit_text(dump_json(make_report("phases", cfg.to_dict(), **sections)), out)
    return EXIT_OK


def cmd_verify(cfg: ExperimentConfig, out: str | None) -> int:
    results = run_suite(
        cfg.structure,
        cfg.q0_array,
        samples=cfg.samples,
        seed=cfg.seed,
        integrator=cfg.integrator,
        t_max=cfg.t_max,
        period_tol=cfg.period_tol,
    )
    print(format_table(results))
    if out is not None:
        report = make_report("verify", cfg.to_dict(), checks=[r.as_dict() for r in results])
        atomic_write(out, dump_json(report))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def cmd_surface(cfg: ExperimentConfig, out: str | None) -> int:
    K = cfg.structure
    q0 = cfg.q0_array
    mu = np.array(cfg.mu_override) if cfg.mu_override is not None else momentum(K, q0)
    scale = 2**cfg.mesh
    tris = leaf_mesh(K, mu, n_z=12 * scale, n_psi=16 * scale)
    rows = []
    for i, tri in enumerate(tris):
        for k, p in enumerate(tri):
            rows.append(["triangle", i, k, *p])
    if cfg.mu_override is None:
        y0 = project(K, q0)
        rt = integrate_reduced(K, y0.leaf, y0.mu, (0.0, cfg.t_max), cfg.integrator)
        try:
            t_end = detect_period(rt, cfg.period_tol)
        except NotPeriodic:
            t_end = cfg.t_max
        ts = np.linspace(0.0, t_end, cfg.output_points)
        for k, p in enumerate(np.atleast_2d(rt(ts)).T):
            rows.append(["orbit", 0, k, *p])
    _emit_csv(out, SURFACE_COLUMNS, rows)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "phases": cmd_phases,
    "verify": cmd_verify,
    "surface": cmd_surface,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="threewave", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON experiment config (defaults apply when omitted)")
    p.add_argument("--out", help="output file; stdout when omitted")
    p.add_argument("--samples", type=int, help="random points per invariant check")
    p.add_argument("--mesh", type=int, help="mesh refinement level")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        if args.samples is not None:
            if args.samples < 1:
                raise ConfigError("--samples: must be positive")
            cfg = replace(cfg, samples=args.samples)
        if args.mesh is not None:
            if args.mesh < 0:
                raise ConfigError("--mesh: must be nonnegative")
            cfg = replace(cfg, mesh=args.mesh)
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotPeriodic as exc:
        print(f"not periodic: {exc}", file=sys.stderr)
        return EXIT_NOT_PERIODIC
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
