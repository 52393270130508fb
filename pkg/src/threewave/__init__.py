"""Three-wave interaction: Kahler geometry, torus reduction and reconstruction phases."""

from .curvature import MeshConfig, geometric_phase_surface
from .dynamics import IntegratorConfig, detect_period, integrate, integrate_reduced
from .errors import *  # noqa: F401,F403
from .geometry import KahlerStructure
from .phases import PhaseConfig, compute_phases
from .reduction import ReducedPoint, project, reconstruct_point
from .symmetry import GroupElement, act, connection, generator, inertia, momentum

__all__ = [
    "KahlerStructure",
    "GroupElement",
    "act",
    "connection",
    "generator",
    "inertia",
    "momentum",
    "IntegratorConfig",
    "integrate",
    "integrate_reduced",
    "detect_period",
    "ReducedPoint",
    "project",
    "reconstruct_point",
    "PhaseConfig",
    "compute_phases",
    "MeshConfig",
    "geometric_phase_surface",
]
