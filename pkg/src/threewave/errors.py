"""Exception hierarchy for threewave.

Every numerical failure the library can signal derives from
:class:`ThreeWaveError` so callers (notably the CLI) can map families of
failures onto exit codes.
"""


class ThreeWaveError(Exception):
    """Base class for all library errors."""


class ConfigError(ThreeWaveError, ValueError):
    """Invalid structure weights, initial data or experiment configuration."""


class NumericalError(ThreeWaveError):
    """A computation could not be carried out at the requested accuracy."""


class SingularInertia(NumericalError):
    """The locked inertia tensor is (numerically) singular: non-regular point."""


class StepSizeUnderflow(NumericalError):
    """Adaptive step control stalled or the solution left the finite range."""


class OffSurface(NumericalError):
    """Reduced initial data does not lie on its three-wave surface."""


class NotPeriodic(NumericalError):
    """No return to the Poincare section was found within the time span."""


class InfeasibleLeafData(NumericalError):
    """Invariants and momentum imply a negative wave intensity."""


class GaugeUndefined(NumericalError):
    """The section gauge (q1, q3 real) is undefined because q1 or q3 vanishes."""


class InconsistentLeafLabel(NumericalError):
    """The carried momentum value does not label the leaf through the point."""


class SingularLeafPoint(NumericalError):
    """The gradient of the leaf function vanishes at the point."""


class AmbiguousPhase(NumericalError):
    """A torus angle cannot be read off because the relevant amplitudes vanish."""


class MeshFailure(NumericalError):
    """Cap triangulation degenerated or the cap does not exist."""


class DegenerateWeights(ConfigError):
    """Weight combination makes a reduced-space formula singular."""
