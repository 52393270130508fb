"""Weighted Kähler structure on C^3.

Tangent vectors and points are complex arrays of shape ``(3,)``.  One-forms are
also stored as complex 3-arrays; the real-valued pairing with a vector is
``pair(alpha, v) = sum Re(alpha_k * conj(v_k))``.  This keeps differentials of
non-holomorphic functions such as the momentum map in closed form.

Weights are ``w_k = s_k * gamma_k`` with ``s_k`` in {-1, +1} and ``gamma_k > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DegenerateWeights

__all__ = [
    "KahlerStructure",
    "as_vector",
    "is_regular",
    "pair",
    "omega",
    "metric",
    "jmul",
    "omega_flat",
    "omega_sharp",
]


@dataclass(frozen=True)
class KahlerStructure:
    """Signs and magnitudes of the three wave weights."""

    signs: tuple[int, int, int] = (1, 1, 1)
    gammas: tuple[float, float, float] = (1.0, 1.0, 1.0)

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        gammas = tuple(float(g) for g in self.gammas)
        if len(signs) != 3 or len(gammas) != 3:
            raise ConfigError("signs and gammas must have exactly three entries")
        if any(s not in (-1, 1) for s in signs):
            raise ConfigError(f"signs must be +1 or -1, got {signs}")
        if any(not np.isfinite(g) or g <= 0.0 for g in gammas):
            raise ConfigError(f"gammas must be finite and positive, got {gammas}")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "gammas", gammas)

    @classmethod
    def unit(cls) -> "KahlerStructure":
        return cls((1, 1, 1), (1.0, 1.0, 1.0))

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "KahlerStructure":
        w = [float(x) for x in weights]
        if any(x == 0.0 for x in w):
            raise ConfigError(f"weights must be nonzero, got {w}")
        return cls(tuple(1 if x > 0 else -1 for x in w), tuple(abs(x) for x in w))

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.signs, dtype=float) * np.array(self.gammas)

    @property
    def definite(self) -> bool:
        """True when all signs are +1 (metric positive definite)."""
        return all(s == 1 for s in self.signs)

    def pair_sums(self) -> tuple[float, float]:
        """``(w1 + w2, w2 + w3)``; both must be nonzero for the reduced formulas."""
        w1, w2, w3 = self.weights
        a, b = w1 + w2, w2 + w3
        if a == 0.0 or b == 0.0:
            raise DegenerateWeights(
                f"reduced-space formulas need w1+w2 != 0 and w2+w3 != 0 (got {a}, {b})"
            )
        return a, b


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a finite complex array of shape (3,)."""
    arr = np.asarray(v, dtype=complex)
    if arr.shape != (3,):
        raise ConfigError(f"{name} must have shape (3,), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"{name} has non-finite entries")
    return arr


def is_regular(q, atol: float = 0.0) -> bool:
    """A point is regular (free T^2 action) iff at least two amplitudes are nonzero."""
    q = np.asarray(q, dtype=complex)
    return int(np.count_nonzero(np.abs(q) > atol)) >= 2


def pair(alpha, v) -> float:
    return float(np.sum(np.real(np.asarray(alpha) * np.conj(v))))


def omega(K: KahlerStructure, z, w) -> float:
    """Symplectic form ``-sum Im(z_k conj(w_k)) / w_k``."""
    return float(-np.sum(np.imag(np.asarray(z) * np.conj(w)) / K.weights))


def metric(K: KahlerStructure, z, w) -> float:
    """Weighted metric ``sum Re(z_k conj(w_k)) / w_k``."""
    return float(np.sum(np.real(np.asarray(z) * np.conj(w)) / K.weights))


def jmul(v) -> np.ndarray:
    """Standard complex structure, multiplication by i."""
    return 1j * np.asarray(v, dtype=complex)


def omega_flat(K: KahlerStructure, v) -> np.ndarray:
    """The one-form ``omega(v, .)`` in the covector representation."""
    # -Im(v conj(u))/w = Re(i v conj(u))/w
    return 1j * np.asarray(v, dtype=complex) / K.weights


def omega_sharp(K: KahlerStructure, alpha) -> np.ndarray:
    """Inverse of :func:`omega_flat`: the vector ``v`` with ``omega(v, .) = alpha``.

    With this convention ``omega_sharp(dH)`` is the Hamiltonian vector field
    ``-2i w_k dH/d(conj q_k)`` and ``omega_sharp(dJ_xi)`` is the generator
    ``xi_P``.
    """
    return -1j * K.weights * np.asarray(alpha, dtype=complex)
