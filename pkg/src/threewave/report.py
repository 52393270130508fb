"""Serialization: CSV tables, schema-versioned JSON reports, atomic writes."""

from __future__ import annotations

import json
import math
import os
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .phases import PhaseBreakdown
from .symmetry import wrap_angle

__all__ = [
    "SCHEMA_ID",
    "SCHEMA_VERSION",
    "atomic_write",
    "write_csv",
    "phases_payload",
    "make_report",
    "dump_json",
    "load_schema",
]

SCHEMA_ID = "threewave.run_report"
SCHEMA_VERSION = "1.0"


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x) -> str:
    return "%.17g" % x if not isinstance(x, str) else x


def write_csv(path: str | Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    atomic_write(path, "\n".join(lines) + "\n")


def _clean(obj):
    """JSON-safe copy: arrays to lists, non-finite floats to None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def phases_payload(pb: PhaseBreakdown) -> dict:
    return {
        "theta_dyn": list(pb.theta_dyn.theta),
        "theta_geom": list(pb.theta_geom.theta),
        "theta_total": list(pb.theta_total.theta),
        "xi_dyn_integral": pb.xi_dyn_integral,
        "xi_dyn_reduced_integral": pb.xi_dyn_reduced_integral,
        "dynamic_route_difference": float(
            np.max(np.abs(pb.xi_dyn_integral - pb.xi_dyn_reduced_integral))
        ),
        "residual_q2": pb.residual_q2,
        "closure_error": pb.closure_error,
        "decomposition_residual": pb.decomposition_residual,
        "lift_momentum_drift": pb.lift_momentum_drift,
    }


def surface_payload(level: int, flux, theta_geom, triangles: int) -> dict:
    flux = np.asarray(flux, dtype=float)
    geom = np.asarray(theta_geom, dtype=float)
    diff = np.angle(np.exp(1j * (flux - geom)))
    ref = np.angle(np.exp(1j * geom))
    return {
        "mesh_level": level,
        "triangles": triangles,
        "flux": flux,
        "phase": wrap_angle(flux),
        "difference": diff,
        "relative_discrepancy": float(np.max(np.abs(diff)) / max(float(np.max(np.abs(ref))), 1e-300)),
    }


def make_report(command: str, config: dict, **sections) -> dict:
    report = {"schema": SCHEMA_ID, "schema_version": SCHEMA_VERSION, "command": command, "config": config}
    report.update(sections)
    return _clean(report)


def dump_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_schema() -> dict:
    text = resources.files("threewave").joinpath("schema/run_report.schema.json").read_text("utf-8")
    return json.loads(text)
