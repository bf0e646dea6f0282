"""Measure the convention constants of the closed forms with the Fock oracle.

Every free normalisation of the closed forms is decided by fitting or
comparing against brute-force traces:

* ``kappa`` from a quadratic fit of ``-log Tr[rho0 D(s)]`` in ``s``,
  divided by the printed rate ``Gamma``;
* the squeezing-phase offset (``0`` or ``pi/2``) as the one that makes
  ``kappa`` identical for every probe;
* ``kappa~`` from ``-log(Tr[rho0 D rho0 D^dag] / P0) = 2 kappa~ Gamma~ s^2``;
* the decay of ``Tr[rho0 D rho0 D]`` (envelope or characteristic rate);
* the interference phase multiplicity ``m`` and the correlation term of the
  position shift, by comparing full protocol runs against each candidate.

Any decision with zero or several consistent candidates raises
:class:`CalibrationAmbiguous`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .closed_form import MeasurementSetup, evaluate
from .conventions import COHERENCE_RATES, Convention
from .errors import CalibrationAmbiguous
from .fock import probe_traces, run_protocol
from .gad import GadChannel
from .pointer import PointerState, coherence_identity, purity, rate_gamma, rate_gamma_tilde
from .qubit import QubitState

PROBE_N_BAR = (0.0, 0.5, 2.0)
PROBE_R = (0.0, 0.5, 1.2)
PROBE_CHI = (0.0, np.pi / 3)
PHASE_OFFSETS = (0.0, np.pi / 2)
CONSTANT_SPREAD_TOL = 1e-6
FIT_RESIDUAL_TOL = 1e-8
IDENTITY_TOL = 1e-8
PROTOCOL_TOL = 1e-6
GRID_POINTS = 9


@dataclass
class ProbeFit:
    pointer: PointerState
    s_grid: np.ndarray
    char_coeffs: np.ndarray
    char_residual: float
    overlap_coeffs: np.ndarray
    overlap_residual: float
    traces: dict = field(repr=False)


@dataclass
class CalibrationResult:
    convention: Convention
    kappa_estimates: np.ndarray
    kappa_tilde_estimates: np.ndarray
    fit_residual: float
    offset_spreads: dict
    coherence_deviation: dict
    protocol_deviation: dict
    probes: list = field(repr=False)

    @property
    def kappa(self) -> float:
        return self.convention.kappa

    @property
    def kappa_tilde(self) -> float:
        return self.convention.kappa_tilde

    @property
    def m(self) -> int:
        return self.convention.phase_multiplicity

    def constants(self) -> tuple[float, float, int]:
        return self.kappa, self.kappa_tilde, self.m


def default_probes() -> list[PointerState]:
    probes = []
    for n_bar, r in itertools.product(PROBE_N_BAR, PROBE_R):
        chis = PROBE_CHI if r > 0 else (0.0,)
        probes.extend(PointerState(r=r, chi=chi, n_bar=n_bar) for chi in chis)
    return probes


def _s_grid(pt: PointerState) -> np.ndarray:
    # keep exp(-Gamma s^2) above e^{-2} for either sign of the squeezing term
    worst = (2 * pt.n_bar + 1) * np.exp(2 * pt.r)
    return np.linspace(0.0, np.sqrt(2.0 / worst), GRID_POINTS)


def _quadratic(s: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coeffs = np.polyfit(s, y, 2)
    residual = float(np.abs(np.polyval(coeffs, s) - y).max())
    return coeffs, residual


def fit_probe(pt: PointerState) -> ProbeFit:
    s = _s_grid(pt)
    tr = probe_traces(pt, s)
    char = tr["char"]
    if np.abs(char.imag).max() > IDENTITY_TOL:
        raise CalibrationAmbiguous("characteristic function of a centred probe is not real")
    char_coeffs, char_res = _quadratic(s, -np.log(char.real))
    ov_coeffs, ov_res = _quadratic(s, -np.log(tr["overlap"].real / tr["purity"]))
    return ProbeFit(pt, s, char_coeffs, char_res, ov_coeffs, ov_res, tr)


def _unique(candidates: dict, tol: float, what: str):
    ok = [key for key, dev in candidates.items() if dev < tol]
    if len(ok) != 1:
        raise CalibrationAmbiguous(f"{what}: {len(ok)} consistent candidates {candidates}")
    return ok[0]


def _protocol_setups() -> list[MeasurementSetup]:
    pre, post = QubitState(2.1, 0.4), QubitState(0.8, 2.3)
    ch = GadChannel(0.35, 0.2)
    plain = PointerState(a=0.3, b=1.5, n_bar=0.5, sigma=0.8)
    correlated = PointerState(a=-0.2, b=1.0, r=0.5, chi=np.pi / 4, n_bar=0.5, sigma=1.3)
    return [MeasurementSetup(pre, post, ch, pt, s) for pt in (plain, correlated) for s in (0.35, 0.9)]


def _protocol_deviation(conv: Convention, runs) -> float:
    dev = 0.0
    for setup, rep in runs:
        res = evaluate(setup, conv)
        for key in ("p_succ", "overlap", "delta_x", "delta_p"):
            dev = max(dev, abs(getattr(res, key) - rep.scalars()[key]))
    return dev


def calibrate_convention(probes: list[PointerState] | None = None) -> CalibrationResult:
    """Fit every convention constant against the oracle and return the result."""
    fits = [fit_probe(pt) for pt in (probes or default_probes())]
    residual = max(max(f.char_residual, f.overlap_residual) for f in fits)

    kappas, spreads = {}, {}
    for off in PHASE_OFFSETS:
        est = np.array([f.char_coeffs[0] / rate_gamma(f.pointer, off) for f in fits])
        kappas[off] = est
        spreads[off] = float(est.max() - est.min())
    offset = _unique(spreads, CONSTANT_SPREAD_TOL, "squeezing phase offset")
    kappa_est = kappas[offset]
    kappa_tilde_est = np.array(
        [f.overlap_coeffs[0] / (2 * rate_gamma_tilde(f.pointer, offset)) for f in fits]
    )
    if np.ptp(kappa_tilde_est) > CONSTANT_SPREAD_TOL:
        raise CalibrationAmbiguous(f"kappa~ varies across probes by {np.ptp(kappa_tilde_est):.2e}")
    kappa, kappa_tilde = float(kappa_est.mean()), float(kappa_tilde_est.mean())

    coherence = {}
    for rate in COHERENCE_RATES:
        trial = Convention(kappa, kappa_tilde, 1, offset, rate)
        coherence[rate] = max(
            float(np.abs(coherence_identity(f.pointer, f.s_grid, trial) - f.traces["coherence"]).max())
            for f in fits
        )
    rate = _unique(coherence, IDENTITY_TOL, "coherence decay rate")

    runs = [(setup, run_protocol(setup)) for setup in _protocol_setups()]
    protocol = {}
    for m, corr in itertools.product((1, 2), (False, True)):
        trial = Convention(kappa, kappa_tilde, m, offset, rate, corr)
        protocol[(m, corr)] = _protocol_deviation(trial, runs)
    m, corr = _unique(protocol, PROTOCOL_TOL, "phase multiplicity / correlation term")

    conv = Convention(kappa, kappa_tilde, m, offset, rate, corr, name="calibrated")
    return CalibrationResult(conv, kappa_est, kappa_tilde_est, residual, spreads, coherence, protocol, fits)


def matches(result: CalibrationResult, reference: Convention, tol: float = CONSTANT_SPREAD_TOL) -> bool:
    """True when a calibration reproduces ``reference`` (constants within ``tol``)."""
    c = result.convention
    return (
        abs(c.kappa - reference.kappa) < tol
        and abs(c.kappa_tilde - reference.kappa_tilde) < tol
        and c.phase_multiplicity == reference.phase_multiplicity
        and abs(c.squeeze_phase_offset - reference.squeeze_phase_offset) < tol
        and c.coherence_rate == reference.coherence_rate
        and c.correlation_shift == reference.correlation_shift
    )


def purity_check(result: CalibrationResult) -> float:
    """Largest gap between the oracle purity and ``1 / (2n + 1)`` over the probes."""
    return max(abs(f.traces["purity"] - purity(f.pointer)) for f in result.probes)
