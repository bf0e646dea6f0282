import numpy as np
import pytest
from scipy.optimize import brentq

from thermoweak.calibration import (
    CalibrationResult,
    calibrate_convention,
    default_probes,
    fit_probe,
    matches,
    purity_check,
)
from thermoweak.closed_form import MeasurementSetup, evaluate
from thermoweak.conventions import CALIBRATED, PAPER
from thermoweak.errors import CalibrationAmbiguous
from thermoweak.fock import run_protocol
from thermoweak.gad import GadChannel
from thermoweak.pointer import PointerState
from thermoweak.qubit import QubitState


@pytest.fixture(scope="module")
def result() -> CalibrationResult:
    return calibrate_convention()


def test_calibration_reproduces_stored_convention(result):
    assert matches(result, CALIBRATED)
    assert not matches(result, PAPER)
    kappa, kappa_tilde, m = result.constants()
    assert (round(kappa, 6), round(kappa_tilde, 6), m) == (0.5, 0.5, 2)


def test_constants_are_probe_independent(result):
    assert np.ptp(result.kappa_estimates) < 1e-6
    assert np.ptp(result.kappa_tilde_estimates) < 1e-6
    assert result.fit_residual < 1e-8
    assert purity_check(result) < 1e-10


def test_decisions_are_unique(result):
    assert sum(v < 1e-6 for v in result.offset_spreads.values()) == 1
    assert sum(v < 1e-8 for v in result.coherence_deviation.values()) == 1
    assert sum(v < 1e-6 for v in result.protocol_deviation.values()) == 1


def test_probe_grid_covers_required_parameters():
    probes = default_probes()
    assert {p.n_bar for p in probes} == {0.0, 0.5, 2.0}
    assert {p.r for p in probes} == {0.0, 0.5, 1.2}


def test_exponent_is_quadratic():
    fit = fit_probe(PointerState(n_bar=0.5, r=0.5, chi=0.2))
    assert fit.char_residual < 1e-8
    assert abs(fit.char_coeffs[1]) < 1e-7
    assert abs(fit.char_coeffs[2]) < 1e-9


def test_single_unsqueezed_probe_cannot_fix_squeezing_phase():
    with pytest.raises(CalibrationAmbiguous):
        calibrate_convention([PointerState(), PointerState(n_bar=0.5)])


def test_momentum_shift_period_matches_multiplicity():
    # zeros of the oracle momentum shift in s are spaced by pi / (m b)
    b = 1.5
    pt = PointerState(b=b, n_bar=0.2)
    base = dict(pre=QubitState(2.1, 0.4), post=QubitState(0.8, 2.3), channel=GadChannel(0.35, 0.2))

    def dp(s):
        return run_protocol(MeasurementSetup(pointer=pt, s=s, **base)).delta_p

    grid = np.linspace(0.05, 3.3, 50)
    vals = [dp(s) for s in grid]
    roots = [brentq(dp, grid[i], grid[i + 1], xtol=1e-10) for i in range(len(grid) - 1) if vals[i] * vals[i + 1] < 0]
    spacing = np.diff(roots)
    assert len(roots) >= 3
    assert np.allclose(spacing, np.pi / (CALIBRATED.phase_multiplicity * b), atol=1e-6)
    # and the closed form in the calibrated convention reproduces the values
    for s in grid[::8]:
        assert evaluate(MeasurementSetup(pointer=pt, s=s, **base)).delta_p == pytest.approx(dp(s), abs=1e-8)
