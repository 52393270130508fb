"""Experiment configuration: flat JSON with explicit real/imaginary parts."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .dynamics import IntegratorConfig
from .errors import ConfigError
from .geometry import KahlerStructure
from .phases import PhaseConfig

__all__ = ["ExperimentConfig", "load_config"]


def _real(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{name}: must be finite")
    return float(value)


def _int(value, name: str, lo: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    if value < lo:
        raise ConfigError(f"{name}: must be >= {lo}")
    return value


def _triple(value, name: str) -> list:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{name}: expected a list of 3 entries")
    return value


def _complex(entry, name: str) -> complex:
    if not isinstance(entry, dict) or set(entry) - {"re", "im"} or "re" not in entry:
        raise ConfigError(f"{name}: expected {{\"re\": x, \"im\": y}}")
    return complex(_real(entry["re"], f"{name}.re"), _real(entry.get("im", 0.0), f"{name}.im"))


@dataclass(frozen=True)
class ExperimentConfig:
    s: tuple[int, int, int] = (1, 1, 1)
    gamma: tuple[float, float, float] = (1.0, 1.0, 1.0)
    q0: tuple[complex, complex, complex] = (1.0 + 0j, 0.5 + 0j, 0.6 + 0.2j)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    t_max: float = 50.0
    period_tol: float = 1e-8
    mesh: int = 2
    seed: int = 0
    samples: int = 200
    output_points: int = 1001
    # leaf label used by `surface` instead of the one implied by q0
    mu_override: tuple[float, float] | None = None

    def __post_init__(self):
        if self.t_max <= 0:
            raise ConfigError("t_max: must be positive")
        if self.period_tol <= 0:
            raise ConfigError("period_tol: must be positive")
        if self.output_points < 2:
            raise ConfigError("output_points: must be at least 2")
        self.structure.pair_sums()  # validates s and gamma, rejects w1+w2 = 0 or w2+w3 = 0

    @property
    def structure(self) -> KahlerStructure:
        try:
            return KahlerStructure(tuple(self.s), tuple(self.gamma))
        except ConfigError as exc:
            raise ConfigError(f"s/gamma: {exc}") from exc

    @property
    def q0_array(self) -> np.ndarray:
        return np.array(self.q0, dtype=complex)

    def phase_config(self) -> PhaseConfig:
        fine = IntegratorConfig(
            rtol=min(self.integrator.rtol, 1e-12),
            atol=min(self.integrator.atol, 1e-14),
            max_step=self.integrator.max_step,
            method=self.integrator.method,
            step=self.integrator.step,
        )
        return PhaseConfig(integrator=fine, t_max=self.t_max, period_tol=self.period_tol)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config: top level must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = sorted(set(raw) - known)
        if extra:
            raise ConfigError(f"{extra[0]}: unknown field")
        kw = {}
        if "s" in raw:
            s = _triple(raw["s"], "s")
            for i, x in enumerate(s):
                if x not in (1, -1) or isinstance(x, bool):
                    raise ConfigError(f"s[{i}]: must be +1 or -1")
            kw["s"] = tuple(int(x) for x in s)
        if "gamma" in raw:
            g = [_real(x, f"gamma[{i}]") for i, x in enumerate(_triple(raw["gamma"], "gamma"))]
            for i, x in enumerate(g):
                if x <= 0:
                    raise ConfigError(f"gamma[{i}]: must be positive")
            kw["gamma"] = tuple(g)
        if "q0" in raw:
            kw["q0"] = tuple(_complex(e, f"q0[{i}]") for i, e in enumerate(_triple(raw["q0"], "q0")))
        if "integrator" in raw:
            ic = raw["integrator"]
            if not isinstance(ic, dict):
                raise ConfigError("integrator: expected an object")
            names = {f.name for f in fields(IntegratorConfig)}
            bad = sorted(set(ic) - names)
            if bad:
                raise ConfigError(f"integrator.{bad[0]}: unknown field")
            vals = {}
            for k, v in ic.items():
                if k == "method":
                    vals[k] = v
                elif k == "max_step" and v is None:
                    vals[k] = math.inf
                else:
                    vals[k] = _real(v, f"integrator.{k}")
            try:
                kw["integrator"] = IntegratorConfig(**vals)
            except (ConfigError, ValueError) as exc:
                raise ConfigError(f"integrator: {exc}") from exc
        for name in ("t_max", "period_tol"):
            if name in raw:
                kw[name] = _real(raw[name], name)
        for name, lo in (("mesh", 0), ("seed", 0), ("samples", 1), ("output_points", 2)):
            if name in raw:
                kw[name] = _int(raw[name], name, lo)
        if raw.get("mu_override") is not None:
            mo = raw["mu_override"]
            if not isinstance(mo, list) or len(mo) != 2:
                raise ConfigError("mu_override: expected a list of 2 numbers")
            kw["mu_override"] = tuple(_real(x, f"mu_override[{i}]") for i, x in enumerate(mo))
        return cls(**kw)

    def to_dict(self) -> dict:
        ic = asdict(self.integrator)
        if math.isinf(ic["max_step"]):
            ic["max_step"] = None
        return {
            "s": list(self.s),
            "gamma": list(self.gamma),
            "q0": [{"re": z.real, "im": z.imag} for z in self.q0],
            "integrator": ic,
            "t_max": self.t_max,
            "period_tol": self.period_tol,
            "mesh": self.mesh,
            "seed": self.seed,
            "samples": self.samples,
            "output_points": self.output_points,
            "mu_override": list(self.mu_override) if self.mu_override is not None else None,
        }


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return ExperimentConfig.from_dict(raw)
