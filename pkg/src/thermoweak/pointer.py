"""Displaced squeezed thermal pointer: decay rates, purity, Gaussian identities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conventions import Convention, resolve


@dataclass(frozen=True)
class PointerState:
    """Gaussian probe ``D(alpha) S(zeta) rho_th(n_bar) S^dag D^dag``.

    ``alpha = a + i b`` and ``zeta = r exp(2 i chi)``. Positions are measured
    in units of ``sigma``; ``X = sigma (a^dag + a)``, ``P = i (a^dag - a) / (2 sigma)``.
    """

    a: float = 0.0
    b: float = 0.0
    r: float = 0.0
    chi: float = 0.0
    n_bar: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        for name in ("a", "b", "r", "chi", "n_bar", "sigma"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.r < 0:
            raise ValueError("squeezing amplitude r must be non-negative")
        if self.n_bar < 0:
            raise ValueError("n_bar must be non-negative")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        chi = self.chi % np.pi
        object.__setattr__(self, "chi", 0.0 if chi >= np.pi else chi)

    @property
    def alpha(self) -> complex:
        return complex(self.a, self.b)

    @property
    def zeta(self) -> complex:
        return self.r * np.exp(2j * self.chi)


@dataclass(frozen=True)
class DecayRates:
    gamma_big: float
    gamma_tilde: float
    kappa: float


def _squeeze_factor(pt: PointerState, phase_offset: float) -> float:
    chi = pt.chi + phase_offset
    return np.cosh(2 * pt.r) - np.cos(2 * chi) * np.sinh(2 * pt.r)


def rate_gamma(pt: PointerState, phase_offset: float = 0.0) -> float:
    """Interference suppression rate ``(2n+1)(cosh 2r - cos 2chi sinh 2r)``."""
    return (2 * pt.n_bar + 1) * _squeeze_factor(pt, phase_offset)


def rate_gamma_tilde(pt: PointerState, phase_offset: float = 0.0) -> float:
    """Envelope rate ``(cosh 2r - cos 2chi sinh 2r) / (2n+1)``."""
    return _squeeze_factor(pt, phase_offset) / (2 * pt.n_bar + 1)


def decay_rates(pt: PointerState, convention: Convention | str | None = None) -> DecayRates:
    conv = resolve(convention)
    off = conv.squeeze_phase_offset
    return DecayRates(rate_gamma(pt, off), rate_gamma_tilde(pt, off), conv.kappa)


def purity(pt: PointerState) -> float:
    return 1.0 / (2 * pt.n_bar + 1)


def correlation_rate(pt: PointerState, convention: Convention | str | None = None) -> float:
    """Coefficient ``C`` of the ``u v`` cross term in ``-log chi(u + i v)``.

    Zero when the squeezing axis is aligned with a quadrature. Only the
    calibrated convention uses it (position shift of correlated probes).
    """
    conv = resolve(convention)
    chi = pt.chi + conv.squeeze_phase_offset
    return -conv.kappa * (2 * pt.n_bar + 1) * np.sin(2 * chi) * np.sinh(2 * pt.r)


def char_fn(pt: PointerState, s, convention: Convention | str | None = None):
    """Characteristic function ``Tr[rho_0 D(s)] = exp(-kappa Gamma s^2)`` for real ``s``."""
    conv = resolve(convention)
    s = np.asarray(s, dtype=float)
    return np.exp(-conv.kappa * rate_gamma(pt, conv.squeeze_phase_offset) * s**2)


def overlap_identity(pt: PointerState, s, convention: Convention | str | None = None):
    """``Tr[rho_0 D(s) rho_0 D(s)^dag] = P0 exp(-2 kappa~ Gamma~ s^2)``."""
    conv = resolve(convention)
    s = np.asarray(s, dtype=float)
    rate = rate_gamma_tilde(pt, conv.squeeze_phase_offset)
    return purity(pt) * np.exp(-2 * conv.kappa_tilde * rate * s**2)


def coherence_identity(pt: PointerState, s, convention: Convention | str | None = None):
    """``Tr[rho_0 D(s) rho_0 D(s)]``.

    The printed form shares the envelope decay of :func:`overlap_identity`.
    For mixed probes the trace actually decays with the characteristic rate,
    ``P0 exp(-2 kappa Gamma s^2)``; the two agree only for pure probes.
    """
    conv = resolve(convention)
    if conv.coherence_rate == "envelope":
        return overlap_identity(pt, s, conv)
    s = np.asarray(s, dtype=float)
    rate = rate_gamma(pt, conv.squeeze_phase_offset)
    return purity(pt) * np.exp(-2 * conv.kappa * rate * s**2)
