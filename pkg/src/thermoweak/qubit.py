"""Bloch-sphere qubit states, the measured observable and the AAV weak value.

Basis convention, used everywhere in the package: state vectors are ordered
``(|1>, |0>)`` and ``sigma_z |1> = +|1>``, ``sigma_z |0> = -|0>``. Index 0 is
the excited state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OrthogonalSelection

#: Squared-overlap floor below which a weak value is treated as divergent.
ORTHOGONALITY_THRESHOLD = 1e-14

EXCITED = 0
GROUND = 1

SIGMA_Z = np.diag([1.0 + 0j, -1.0 + 0j])
IDENTITY = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class QubitState:
    """Pure qubit ``cos(theta/2)|1> + exp(i phi) sin(theta/2)|0>``."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not np.isfinite(theta) or theta < -1e-12 or theta > np.pi + 1e-12:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta!r}")
        phi = float(self.phi)
        if not np.isfinite(phi):
            raise ValueError(f"phi must be finite, got {self.phi!r}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), np.pi))
        phi = phi % (2 * np.pi)
        # tiny negative angles wrap to exactly 2 pi in floating point
        object.__setattr__(self, "phi", 0.0 if phi >= 2 * np.pi else phi)

    @property
    def vector(self) -> np.ndarray:
        return state_vector(self)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())


@dataclass(frozen=True)
class Observable:
    """Hermitian two-level observable squaring to the identity."""

    matrix: np.ndarray = field(default_factory=lambda: SIGMA_Z.copy())

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("observable must be a 2x2 matrix")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValueError("observable must be Hermitian")
        if not np.allclose(m @ m, IDENTITY, atol=1e-12, rtol=0):
            raise ValueError("observable must satisfy A^2 = 1")
        object.__setattr__(self, "matrix", m)


SIGMA_Z_OBSERVABLE = Observable(SIGMA_Z)


def state_vector(q: QubitState) -> np.ndarray:
    """Return ``(cos(theta/2), exp(i phi) sin(theta/2))`` in the ``(|1>, |0>)`` basis."""
    return np.array(
        [np.cos(q.theta / 2), np.exp(1j * q.phi) * np.sin(q.theta / 2)], dtype=complex
    )


def aav_weak_value(
    pre: QubitState, post: QubitState, obs: Observable = SIGMA_Z_OBSERVABLE
) -> complex:
    """Standard weak value ``<f|A|i> / <f|i>`` for pure pre/post-selection.

    Raises
    ------
    OrthogonalSelection
        If ``|<f|i>|^2`` falls below :data:`ORTHOGONALITY_THRESHOLD`.
    """
    vi, vf = state_vector(pre), state_vector(post)
    overlap = np.vdot(vf, vi)
    if abs(overlap) ** 2 < ORTHOGONALITY_THRESHOLD:
        raise OrthogonalSelection(f"|<f|i>|^2 = {abs(overlap) ** 2:.3e}")
    return complex(np.vdot(vf, obs.matrix @ vi) / overlap)
