"""Exception hierarchy shared by the analytic and oracle engines."""


class ThermoWeakError(Exception):
    """Base class for every error raised by the package."""


class InvalidState(ThermoWeakError, ValueError):
    """A density matrix is not Hermitian, unit-trace and positive."""


class InvalidKraus(ThermoWeakError, ValueError):
    """A Kraus list does not satisfy the completeness relation."""


class OrthogonalSelection(ThermoWeakError, ZeroDivisionError):
    """Pre- and post-selection are orthogonal, so a weak value diverges."""


class ZeroPostSelection(ThermoWeakError, ZeroDivisionError):
    """The post-selection succeeds with (numerically) zero probability."""


class CutoffTooSmall(ThermoWeakError):
    """A truncated Fock-space operator lost unitarity on its interior block."""


class NoConvergence(ThermoWeakError):
    """The oracle did not converge before reaching the maximum cutoff."""


class CalibrationAmbiguous(ThermoWeakError):
    """No candidate convention (or more than one) reproduces the oracle."""


class InvalidConfiguration(ThermoWeakError, ValueError):
    """A sweep configuration or figure preset is malformed."""
