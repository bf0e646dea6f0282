"""Post-selected qubit measurements with a thermal Gaussian pointer under GAD noise.

Two engines compute the same quantities: closed forms (:mod:`thermoweak.closed_form`)
and a brute-force simulation on a truncated Fock space (:mod:`thermoweak.fock`).
"""

from .calibration import CalibrationResult, calibrate_convention
from .closed_form import (
    BranchCoefficients,
    BranchWeights,
    MeasurementSetup,
    ProtocolResult,
    amp_p,
    amp_x,
    branch_coefficients,
    branch_weights,
    evaluate,
    overlap,
    p_succ,
    weak_value_gad,
    weak_value_general,
)
from .conventions import CALIBRATED, DEFAULT, PAPER, Convention
from .errors import (
    CalibrationAmbiguous,
    CutoffTooSmall,
    InvalidConfiguration,
    InvalidKraus,
    InvalidState,
    NoConvergence,
    OrthogonalSelection,
    ThermoWeakError,
    ZeroPostSelection,
)
from .fock import FockDensity, JointState, OracleReport, run_protocol
from .gad import BathSpec, GadChannel, kraus_ops
from .pointer import PointerState
from .qubit import Observable, QubitState, aav_weak_value, state_vector

__version__ = "0.1.0"

__all__ = [
    "BathSpec", "BranchCoefficients", "BranchWeights", "CALIBRATED", "CalibrationAmbiguous",
    "CalibrationResult", "Convention", "CutoffTooSmall", "DEFAULT", "FockDensity", "GadChannel",
    "InvalidConfiguration", "InvalidKraus", "InvalidState", "JointState", "MeasurementSetup",
    "NoConvergence", "Observable", "OracleReport", "OrthogonalSelection", "PAPER", "PointerState",
    "ProtocolResult", "QubitState", "ThermoWeakError", "ZeroPostSelection", "aav_weak_value",
    "amp_p", "amp_x", "branch_coefficients", "branch_weights", "calibrate_convention", "evaluate",
    "kraus_ops", "overlap", "p_succ", "run_protocol", "state_vector", "weak_value_gad",
    "weak_value_general",
]
