"""Closed-form post-selected measurement quantities under a GAD channel.

Everything here is analytic: branch coefficients, the generalized weak value,
the success probability, the overlap between the initial and conditioned
pointer, and the mean pointer shifts. Gaussian exponents and interference
phases are normalised by a :class:`~thermoweak.conventions.Convention`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import pointer as _pointer
from .conventions import Convention, resolve
from .errors import OrthogonalSelection, ZeroPostSelection
from .gad import GadChannel, apply_kraus, check_kraus, kraus_ops
from .pointer import PointerState
from .qubit import (
    IDENTITY,
    ORTHOGONALITY_THRESHOLD,
    SIGMA_Z_OBSERVABLE,
    Observable,
    QubitState,
    state_vector,
)

#: Success probabilities below this raise :class:`ZeroPostSelection`.
ZERO_POSTSELECTION = 1e-14
#: Success probabilities below this flag a result as near-orthogonal.
ANOMALOUS_POSTSELECTION = 1e-6


@dataclass(frozen=True)
class MeasurementSetup:
    pre: QubitState
    post: QubitState
    channel: GadChannel
    pointer: PointerState = field(default_factory=PointerState)
    s: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.s) or self.s < 0:
            raise ValueError(f"measurement strength must be >= 0, got {self.s!r}")
        object.__setattr__(self, "s", float(self.s))

    @property
    def coupling(self) -> float:
        """Bare coupling ``g = s sigma``."""
        return self.s * self.pointer.sigma


@dataclass(frozen=True)
class BranchCoefficients:
    c_plus: np.ndarray
    c_minus: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray


@dataclass(frozen=True)
class BranchWeights:
    w_pp: float
    w_mm: float
    w_pm: complex

    @property
    def w_mp(self) -> complex:
        return self.w_pm.conjugate()


@dataclass(frozen=True)
class ProtocolResult:
    p_succ: float
    weak_value: complex
    overlap: float
    delta_x: float
    delta_p: float
    amp_x: float
    amp_p: float
    eta: float
    psi: float
    anomalous: bool = False


def _half_angles(q: QubitState):
    return np.cos(q.theta / 2), np.sin(q.theta / 2)


def unnormalized_coefficients(
    pre: QubitState, post: QubitState, ch: GadChannel
) -> tuple[np.ndarray, np.ndarray]:
    """GAD branch amplitudes ``mu_j^{+/-}`` for ``j = 0..3``."""
    ci, si = _half_angles(pre)
    cf, sf = _half_angles(post)
    g, p = ch.gamma, ch.p
    rel = np.exp(1j * (pre.phi - post.phi))
    mu_plus = np.array(
        [
            np.sqrt((1 - p) * (1 - g)) * cf * ci,
            np.sqrt((1 - p) * g) * np.exp(-1j * post.phi) * sf * ci,
            np.sqrt(p) * cf * ci,
            0.0,
        ],
        dtype=complex,
    )
    mu_minus = np.array(
        [
            np.sqrt(1 - p) * rel * sf * si,
            0.0,
            np.sqrt(p * (1 - g)) * rel * sf * si,
            np.sqrt(p * g) * np.exp(1j * pre.phi) * cf * si,
        ],
        dtype=complex,
    )
    return mu_plus, mu_minus


def eta(pre: QubitState, post: QubitState, ch: GadChannel) -> float:
    """Background term ``1 + gamma(2p-1) cos tf + (1-gamma) cos ti cos tf``."""
    g, p = ch.gamma, ch.p
    return (
        1
        + g * (2 * p - 1) * np.cos(post.theta)
        + (1 - g) * np.cos(pre.theta) * np.cos(post.theta)
    )


def psi(setup: MeasurementSetup) -> float:
    """Interference term ``sqrt(1-gamma) sin ti sin tf cos(2 b s + phi_i - phi_f)``."""
    pre, post, ch = setup.pre, setup.post, setup.channel
    phase = 2 * setup.pointer.b * setup.s + pre.phi - post.phi
    return np.sqrt(1 - ch.gamma) * np.sin(pre.theta) * np.sin(post.theta) * np.cos(phase)


def _visibility(setup: MeasurementSetup, conv: Convention) -> float:
    return float(_pointer.char_fn(setup.pointer, setup.s, conv))


def p_succ(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Post-selection probability ``[eta + exp(-kappa Gamma s^2) Psi] / 2``."""
    conv = resolve(convention)
    value = 0.5 * (
        eta(setup.pre, setup.post, setup.channel) + _visibility(setup, conv) * psi(setup)
    )
    assert -1e-12 <= value <= 1 + 1e-12, value
    return float(min(max(value, 0.0), 1.0))


def p_succ_from_coefficients(
    setup: MeasurementSetup, convention: Convention | str | None = None
) -> float:
    """Success probability rebuilt from the branch amplitudes.

    ``sum_j |mu+|^2 + |mu-|^2 + 2 Re[mu+ mu-^* exp(-2 i b s)] chi_0(s)``.
    """
    conv = resolve(convention)
    mp, mm = unnormalized_coefficients(setup.pre, setup.post, setup.channel)
    phase = np.exp(-2j * setup.pointer.b * setup.s)
    cross = np.sum(mp * mm.conj()) * phase
    total = np.sum(abs(mp) ** 2 + abs(mm) ** 2) + 2 * cross.real * _visibility(setup, conv)
    return float(total)


def _require_postselection(prob: float) -> None:
    if prob < ZERO_POSTSELECTION:
        raise ZeroPostSelection(f"P_succ = {prob:.3e}")


def branch_coefficients(
    setup: MeasurementSetup, convention: Convention | str | None = None
) -> BranchCoefficients:
    prob = p_succ(setup, convention)
    _require_postselection(prob)
    mp, mm = unnormalized_coefficients(setup.pre, setup.post, setup.channel)
    norm = np.sqrt(prob)
    return BranchCoefficients(mp / norm, mm / norm, mp, mm)


def branch_weights(
    setup: MeasurementSetup, convention: Convention | str | None = None
) -> BranchWeights:
    c = branch_coefficients(setup, convention)
    return BranchWeights(
        float(np.sum(abs(c.c_plus) ** 2)),
        float(np.sum(abs(c.c_minus) ** 2)),
        complex(np.sum(c.c_plus * c.c_minus.conj())),
    )


def weight_normalization(
    setup: MeasurementSetup, convention: Convention | str | None = None
) -> float:
    """Trace of the conditioned pointer state expressed through the weights; equals 1."""
    conv = resolve(convention)
    w = branch_weights(setup, conv)
    phase = np.exp(-2j * setup.pointer.b * setup.s)
    return w.w_pp + w.w_mm + 2 * (w.w_pm * phase).real * _visibility(setup, conv)


def weak_value_gad(pre: QubitState, post: QubitState, ch: GadChannel) -> complex:
    """Generalized weak value of sigma_z after a GAD channel.

    Assembled from half-angle populations and coherences, which keeps full
    relative precision even when the selections are nearly orthogonal.
    """
    g, p = ch.gamma, ch.p
    ci, si = _half_angles(pre)
    cf, sf = _half_angles(post)
    dphi = pre.phi - post.phi
    up = ci**2 * (1 - (1 - p) * g)
    down = ci**2 * (1 - p) * g
    coh = 2 * ci * si * cf * sf * np.sqrt(1 - g)
    den = (
        cf**2 * (up + si**2 * g * p)
        + sf**2 * (si**2 * (1 - g * p) + down)
        + np.cos(dphi) * coh
    )
    num = (
        cf**2 * (up - si**2 * g * p)
        + sf**2 * (down - si**2 * (1 - g * p))
        - 1j * np.sin(dphi) * coh
    )
    if abs(den) < ORTHOGONALITY_THRESHOLD:
        raise OrthogonalSelection(f"denominator {den:.3e}")
    return complex(num / den)


def weak_value_gad_double_angle(pre: QubitState, post: QubitState, ch: GadChannel) -> complex:
    """The same weak value written with ``cos theta`` and ``sin theta``.

    Mathematically identical to :func:`weak_value_gad` but the denominator
    ``1 + cos ti cos tf + ...`` cancels badly for nearly orthogonal selections,
    costing roughly ``|WV|^2`` ulps. Kept as an independent cross-check.
    """
    g, p = ch.gamma, ch.p
    ti, tf = pre.theta, post.theta
    dphi = pre.phi - post.phi
    coh = np.sin(ti) * np.sin(tf) * np.sqrt(1 - g)
    num = (
        np.cos(ti)
        + np.cos(tf) * (1 - g + g * (2 * p - 1) * np.cos(ti))
        - 1j * np.sin(dphi) * coh
    )
    den = (
        1
        + np.cos(ti) * np.cos(tf) * (1 - g)
        + g * (2 * p - 1) * np.cos(tf)
        + np.cos(dphi) * coh
    )
    if abs(den / 2) < ORTHOGONALITY_THRESHOLD:
        raise OrthogonalSelection(f"denominator {den:.3e}")
    return complex(num / den)


def weak_value_general(
    pre: QubitState,
    post: QubitState,
    kraus: Sequence[np.ndarray] | None = None,
    obs: Observable = SIGMA_Z_OBSERVABLE,
) -> complex:
    """``<f|E(A|i><i|)|f> / <f|E(|i><i|)|f>`` for an arbitrary Kraus list."""
    kraus = [IDENTITY] if kraus is None else [np.asarray(k, dtype=complex) for k in kraus]
    check_kraus(kraus)
    vi, vf = state_vector(pre), state_vector(post)
    rho_i = np.outer(vi, vi.conj())
    den = np.vdot(vf, apply_kraus(kraus, rho_i) @ vf)
    if abs(den) < ORTHOGONALITY_THRESHOLD:
        raise OrthogonalSelection(f"denominator {abs(den):.3e}")
    num = np.vdot(vf, apply_kraus(kraus, obs.matrix @ rho_i) @ vf)
    return complex(num / den)


def overlap(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """``Tr(rho_M rho_M^ps)`` between the initial and the conditioned pointer."""
    conv = resolve(convention)
    w = branch_weights(setup, conv)
    pt, s = setup.pointer, setup.s
    # population sum and phase-shifted coherence sum of the conditioned state
    omega_1 = w.w_pp + w.w_mm
    omega_2 = 2 * (w.w_pm * np.exp(-2j * pt.b * s)).real
    population = _pointer.overlap_identity(pt, s / 2, conv)
    coherence = _pointer.coherence_identity(pt, s / 2, conv)
    return float(omega_1 * population + omega_2 * coherence)


def overlap_ratio(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Overlap written through ``eta`` and ``Psi`` instead of the branch weights."""
    conv = resolve(convention)
    pt, s = setup.pointer, setup.s
    e = eta(setup.pre, setup.post, setup.channel)
    ps = psi(setup)
    den = (2 * pt.n_bar + 1) * (e + _visibility(setup, conv) * ps)
    if den / (2 * (2 * pt.n_bar + 1)) < ZERO_POSTSELECTION:
        raise ZeroPostSelection(f"P_succ = {den / (2 * (2 * pt.n_bar + 1)):.3e}")
    p0 = _pointer.purity(pt)
    envelope = float(_pointer.overlap_identity(pt, s / 2, conv)) / p0
    coherence = float(_pointer.coherence_identity(pt, s / 2, conv)) / p0
    return float((e * envelope + ps * coherence) / den)


def _shift_terms(setup: MeasurementSetup, conv: Convention):
    w = branch_weights(setup, conv)
    pt, s = setup.pointer, setup.s
    rate = conv.kappa * _pointer.rate_gamma(pt, conv.squeeze_phase_offset)
    vis = np.exp(-rate * s**2)
    amp_x = w.w_pp - w.w_mm
    if conv.correlation_shift:
        cross = (w.w_pm * np.exp(-2j * pt.b * s)).imag
        amp_x -= 4 * _pointer.correlation_rate(pt, conv) * vis * cross
    m = conv.phase_multiplicity
    amp_p = 2 * rate * vis * (w.w_pm * np.exp(-1j * m * pt.b * s)).imag
    return float(amp_x), float(amp_p)


def amp_x(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Position amplification ``Delta X / (sigma s)``."""
    return _shift_terms(setup, resolve(convention))[0]


def amp_p(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Momentum amplification ``Delta P / (s / sigma)``."""
    return _shift_terms(setup, resolve(convention))[1]


def mean_shifts(
    setup: MeasurementSetup, convention: Convention | str | None = None
) -> tuple[float, float]:
    """Mean position and momentum shifts ``(Delta X, Delta P)`` of the pointer."""
    ax, ap = _shift_terms(setup, resolve(convention))
    sigma, s = setup.pointer.sigma, setup.s
    return sigma * s * ax, s / sigma * ap


def amp_x_explicit(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Position amplification from the explicit GAD expression (quadrature-aligned probes)."""
    pre, post, ch = setup.pre, setup.post, setup.channel
    prob = p_succ(setup, convention)
    _require_postselection(prob)
    g, p = ch.gamma, ch.p
    num = np.cos(pre.theta) + np.cos(post.theta) * (1 - g + g * (2 * p - 1) * np.cos(pre.theta))
    return float(num / (2 * prob))


def amp_p_explicit(setup: MeasurementSetup, convention: Convention | str | None = None) -> float:
    """Momentum amplification from the explicit GAD expression."""
    conv = resolve(convention)
    pre, post, ch = setup.pre, setup.post, setup.channel
    prob = p_succ(setup, conv)
    _require_postselection(prob)
    rate = conv.kappa * _pointer.rate_gamma(setup.pointer, conv.squeeze_phase_offset)
    phase = conv.phase_multiplicity * setup.pointer.b * setup.s + pre.phi - post.phi
    value = (
        -rate
        * np.exp(-rate * setup.s**2)
        * np.sqrt(1 - ch.gamma)
        * np.sin(pre.theta)
        * np.sin(post.theta)
        * np.sin(phase)
    )
    return float(value / (2 * prob))


def evaluate(setup: MeasurementSetup, convention: Convention | str | None = None) -> ProtocolResult:
    """All closed-form quantities for one setup.

    Raises :class:`ZeroPostSelection` when the post-selection cannot succeed.
    A weak value whose denominator vanishes is reported as ``nan``.
    """
    conv = resolve(convention)
    prob = p_succ(setup, conv)
    _require_postselection(prob)
    try:
        wv = weak_value_gad(setup.pre, setup.post, setup.channel)
    except OrthogonalSelection:
        wv = complex(np.nan, np.nan)
    ax, ap = _shift_terms(setup, conv)
    sigma, s = setup.pointer.sigma, setup.s
    return ProtocolResult(
        p_succ=prob,
        weak_value=wv,
        overlap=overlap(setup, conv),
        delta_x=sigma * s * ax,
        delta_p=s / sigma * ap,
        amp_x=ax,
        amp_p=ap,
        eta=float(eta(setup.pre, setup.post, setup.channel)),
        psi=float(psi(setup)),
        anomalous=prob < ANOMALOUS_POSTSELECTION,
    )


__all__ = [
    "MeasurementSetup",
    "BranchCoefficients",
    "BranchWeights",
    "ProtocolResult",
    "unnormalized_coefficients",
    "branch_coefficients",
    "branch_weights",
    "weight_normalization",
    "eta",
    "psi",
    "p_succ",
    "p_succ_from_coefficients",
    "weak_value_gad",
    "weak_value_gad_double_angle",
    "weak_value_general",
    "overlap",
    "overlap_ratio",
    "mean_shifts",
    "amp_x",
    "amp_p",
    "amp_x_explicit",
    "amp_p_explicit",
    "evaluate",
    "kraus_ops",
]
