# -*- coding: utf-8 -*-

"""Exceptions and warnings raised by waveguide_metamaterial."""


class WaveguideError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(WaveguideError, ValueError):
    """An input is non-finite or violates a precondition."""


class SingularityError(ParameterError):
    """A denominator or matrix is singular."""


class SingularTransferError(SingularityError):
    """A transfer matrix (or one of its entries) is singular.

    Parameters
    ----------
    message: str
    omega: float, optional
        Angular frequency (rad/s) at which the singularity occurred.
    """

    def __init__(self, message, omega=None):
        if omega is not None:
            message = "{} (omega = {:.9g} rad/s)".format(message, omega)
        super().__init__(message)
        self.omega = omega


class SingularSystemError(SingularityError):
    """The input-output linear system cannot be solved at omega."""

    def __init__(self, message, omega=None):
        if omega is not None:
            message = "{} (omega = {:.9g} rad/s)".format(message, omega)
        super().__init__(message)
        self.omega = omega


class EigenSolverError(WaveguideError, RuntimeError):
    """Eigen-decomposition failed. Carries the matrix condition number."""

    def __init__(self, message, condition=None):
        if condition is not None:
            message = "{} (condition number {:.3e})".format(
                message, condition)
        super().__init__(message)
        self.condition = condition


class CalibrationError(ParameterError):
    pass


class InfiniteCrosstalkError(CalibrationError):
    """A zero trace slope implies an infinite mutual-inductance ratio."""


class IncompleteCalibrationError(CalibrationError):
    """Some coil pairs have no slope measurement."""

    def __init__(self, missing):
        self.missing = sorted(missing)
        super().__init__(
            "missing slope measurements for coil pairs: {}".format(
                ", ".join("({}, {})".format(x, y) for x, y in self.missing)))


class ZeroReferenceError(CalibrationError):
    def __init__(self, message, omega=None):
        if omega is not None:
            message = "{} (omega = {:.9g} rad/s)".format(message, omega)
        super().__init__(message)
        self.omega = omega


class FitError(WaveguideError):
    pass


class AmbiguousWindowError(FitError, ValueError):
    """The fit window holds zero or several extrema."""


class NoCrossingError(FitError, ValueError):
    """The saturation curve never crosses 0.5."""


class ConfigError(WaveguideError):
    """Configuration problems, collected before any computation."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(
            "  - {}".format(p) for p in self.problems))


class OutputError(WaveguideError, OSError):
    def __init__(self, message, path=None):
        if path is not None:
            message = "{}: {}".format(path, message)
        super().__init__(message)
        self.path = path


class ValidityWarning(UserWarning):
    """An approximation is evaluated outside its stated validity range."""
