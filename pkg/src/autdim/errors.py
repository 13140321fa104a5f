"""Exception hierarchy shared by all autdim modules."""


class AutDimError(Exception):
    """Base class for every error raised by the package."""


class DimensionError(AutDimError, ValueError):
    pass


class OutsideDomainError(AutDimError, ValueError):
    pass


class UnboundedDomainError(AutDimError, ValueError):
    pass


class NoClosedFormError(AutDimError):
    pass


class DegenerateInputError(AutDimError, ValueError):
    pass


class PreconditionError(AutDimError, ValueError):
    pass


class InfeasibleError(AutDimError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DisconnectedError(AutDimError):
    pass


class RankError(AutDimError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class UnderdeterminedError(AutDimError, ValueError):
    pass


class AmbiguousDimError(AutDimError):
    def __init__(self, message, spectrum):
        super().__init__(message)
        self.spectrum = spectrum


class EscapeError(AutDimError):
    """Trajectory left its domain; ``t_exit`` is the bracketed exit time."""

    def __init__(self, t_exit, point=None):
        super().__init__(f"trajectory left the domain at t={t_exit:.9g}")
        self.t_exit = t_exit
        self.point = point


class StiffnessError(AutDimError):
    pass


class PoleError(AutDimError, ZeroDivisionError):
    pass


class DiagonalError(AutDimError):
    pass


class TangencyError(AutDimError, ValueError):
    pass
