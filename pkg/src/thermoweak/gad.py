"""Generalized amplitude damping (GAD) channel on a single qubit.

Matrices use the ``(|1>, |0>)`` ordering of :mod:`thermoweak.qubit`, so
``|1><1| = [[1, 0], [0, 0]]`` and the decay jump ``|0><1|`` is ``[[0, 0], [1, 0]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidKraus, InvalidState

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10
COMPLETENESS_TOL = 1e-10

_P1 = np.array([[1, 0], [0, 0]], dtype=complex)  # |1><1|
_P0 = np.array([[0, 0], [0, 1]], dtype=complex)  # |0><0|
_LOWER = np.array([[0, 0], [1, 0]], dtype=complex)  # |0><1|
_RAISE = np.array([[0, 1], [0, 0]], dtype=complex)  # |1><0|


@dataclass(frozen=True)
class GadChannel:
    """GAD channel with exchange probability ``gamma`` and bath population ``p``."""

    gamma: float
    p: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if not 0.0 <= self.p <= 0.5:
            raise ValueError(f"p must lie in [0, 1/2], got {self.p!r}")
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "p", float(self.p))

    @classmethod
    def from_bath(cls, gamma: float, bath: "BathSpec") -> "GadChannel":
        return cls(gamma, p_from_bath(bath))

    @property
    def kraus(self) -> list[np.ndarray]:
        return kraus_ops(self)


@dataclass(frozen=True)
class BathSpec:
    """Reservoir described either by its mean photon number or by (omega, T).

    With ``hbar = 1`` the occupation is ``1 / (exp(omega / (k_B T)) - 1)``.
    """

    q_bar: float | None = None
    omega: float | None = None
    temperature: float | None = None
    k_b: float = 1.0

    def __post_init__(self):
        if self.q_bar is None:
            if self.omega is None or self.temperature is None:
                raise ValueError("give q_bar or both omega and temperature")
            if self.omega <= 0 or self.temperature <= 0:
                raise ValueError("omega and temperature must be positive")
        elif self.q_bar < 0:
            raise ValueError(f"q_bar must be non-negative, got {self.q_bar!r}")

    @property
    def occupation(self) -> float:
        if self.q_bar is not None:
            return float(self.q_bar)
        return float(1.0 / np.expm1(self.omega / (self.k_b * self.temperature)))


def kraus_ops(ch: GadChannel) -> list[np.ndarray]:
    """The four GAD Kraus matrices ``K0..K3``."""
    g, p = ch.gamma, ch.p
    return [
        np.sqrt(1 - p) * (_P0 + np.sqrt(1 - g) * _P1),
        np.sqrt((1 - p) * g) * _LOWER,
        np.sqrt(p) * (np.sqrt(1 - g) * _P0 + _P1),
        np.sqrt(p * g) * _RAISE,
    ]


def check_kraus(kraus: Sequence[np.ndarray], tol: float = COMPLETENESS_TOL) -> None:
    total = sum(k.conj().T @ k for k in kraus)
    if not np.allclose(total, np.eye(2), atol=tol, rtol=0):
        raise InvalidKraus(f"sum K^dag K deviates from identity by {np.abs(total - np.eye(2)).max():.2e}")


def check_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidState("expected a 2x2 density matrix")
    if not np.allclose(rho, rho.conj().T, atol=HERMITICITY_TOL, rtol=0):
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise InvalidState(f"trace is {np.trace(rho).real:.15g}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -POSITIVITY_TOL:
        raise InvalidState("density matrix has a negative eigenvalue")
    return rho


def apply_kraus(kraus: Sequence[np.ndarray], op: np.ndarray) -> np.ndarray:
    return sum(k @ op @ k.conj().T for k in kraus)


def apply(ch: GadChannel, rho: np.ndarray) -> np.ndarray:
    """Forward channel ``sum_j K_j rho K_j^dag`` on a validated density matrix."""
    return apply_kraus(kraus_ops(ch), check_density(rho))


def adjoint_apply(ch: GadChannel, op: np.ndarray) -> np.ndarray:
    """Heisenberg-picture map ``sum_j K_j^dag op K_j`` (unital)."""
    op = np.asarray(op, dtype=complex)
    if not np.allclose(op, op.conj().T, atol=HERMITICITY_TOL, rtol=0):
        raise InvalidState("adjoint channel expects a Hermitian operator")
    return sum(k.conj().T @ op @ k for k in kraus_ops(ch))


def choi_matrix(ch: GadChannel) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)``, ordered system-input outer."""
    choi = np.zeros((4, 4), dtype=complex)
    kraus = kraus_ops(ch)
    for i in range(2):
        for j in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[i, j] = 1
            choi[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = apply_kraus(kraus, unit)
    return choi


def p_from_bath(bath: BathSpec) -> float:
    """Excited-state bath population ``q / (2q + 1)``."""
    q = bath.occupation
    if np.isinf(q):
        return 0.5
    return q / (2 * q + 1)


def p_equilibrium(n_bar: float) -> float:
    """Bath population at which the bath and an ``n_bar`` pointer share a temperature."""
    if n_bar < 0:
        raise ValueError("n_bar must be non-negative")
    if np.isinf(n_bar):
        return 0.5
    return n_bar / (2 * n_bar + 1)
