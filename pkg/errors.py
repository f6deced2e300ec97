# errors.py

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class RabiError(Exception):
    """Base class for every error raised by the solvers and the command line."""

    exit_code = EXIT_NUMERICAL


class ConfigError(RabiError, ValueError):
    """Invalid parameters or rejected inputs."""

    exit_code = EXIT_USAGE


class NumericalError(RabiError, RuntimeError):
    exit_code = EXIT_NUMERICAL


class DegenerateDenominatorError(NumericalError):
    """A coefficient ratio hit a vanishing Omega_m(E) denominator."""


class EigensolverError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ParityMixingError(NumericalError):
    """An eigenvector could not be made a parity eigenstate."""


class SpectrumError(NumericalError):
    pass


class ValidationFailure(NumericalError):
    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)
