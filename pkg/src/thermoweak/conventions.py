"""Convention constants shared by the closed forms and the Fock oracle.

The printed closed forms leave several normalisations open: the constant in
front of the Gaussian exponents, the multiplicity of the ``b s`` interference
phase in the momentum shift, the sign convention of the squeezing phase, the
decay rate of the coherence trace in the overlap, and whether position/momentum
correlations of the probe feed the position shift. A :class:`Convention`
pins all of them.

``PAPER`` reproduces the printed formulas verbatim and is used for figure
curves. ``CALIBRATED`` holds the values measured against the brute-force Fock
oracle (see :func:`thermoweak.calibration.calibrate_convention`; a test re-runs the
calibration and checks that it still returns exactly these values).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

COHERENCE_RATES = ("envelope", "characteristic")


@dataclass(frozen=True)
class Convention:
    """Normalisation choices applied by every closed form.

    Attributes
    ----------
    kappa
        Multiplier of ``Gamma s^2`` in the characteristic-function exponent.
    kappa_tilde
        Multiplier of ``2 Gamma~ s^2`` in the displaced-overlap exponent.
    phase_multiplicity
        ``m`` in the momentum-shift phase ``exp(-i m b s)``.
    squeeze_phase_offset
        Added to the squeezing phase ``chi`` before it enters the printed rate
        expressions. ``pi/2`` flips the sign of the ``cos 2chi sinh 2r`` term.
    coherence_rate
        ``"envelope"`` lets the cross (coherence) trace of the overlap decay
        at the envelope rate, ``"characteristic"`` at the characteristic rate.
    correlation_shift
        Include the position shift carried by x-p correlations of the probe.
    """

    kappa: float
    kappa_tilde: float
    phase_multiplicity: int
    squeeze_phase_offset: float = 0.0
    coherence_rate: str = "envelope"
    correlation_shift: bool = False
    name: str = "custom"

    def __post_init__(self):
        if self.kappa <= 0 or self.kappa_tilde <= 0:
            raise ValueError("convention constants must be positive")
        if self.phase_multiplicity not in (1, 2):
            raise ValueError("phase multiplicity must be 1 or 2")
        if self.coherence_rate not in COHERENCE_RATES:
            raise ValueError(f"coherence_rate must be one of {COHERENCE_RATES}")

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "kappa": self.kappa,
            "kappa_tilde": self.kappa_tilde,
            "phase_multiplicity": self.phase_multiplicity,
            "squeeze_phase_offset": self.squeeze_phase_offset,
            "coherence_rate": self.coherence_rate,
            "correlation_shift": self.correlation_shift,
        }


PAPER = Convention(
    kappa=1.0,
    kappa_tilde=1.0,
    phase_multiplicity=1,
    squeeze_phase_offset=0.0,
    coherence_rate="envelope",
    correlation_shift=False,
    name="paper",
)

CALIBRATED = Convention(
    kappa=0.5,
    kappa_tilde=0.5,
    phase_multiplicity=2,
    squeeze_phase_offset=np.pi / 2,
    coherence_rate="characteristic",
    correlation_shift=True,
    name="calibrated",
)

DEFAULT = CALIBRATED


def resolve(convention: Convention | str | None) -> Convention:
    if convention is None:
        return DEFAULT
    if isinstance(convention, Convention):
        return convention
    try:
        return {"paper": PAPER, "calibrated": CALIBRATED}[convention]
    except KeyError:
        raise ValueError(f"unknown convention {convention!r}") from None
