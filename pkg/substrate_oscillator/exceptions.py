"""Workbench exceptions."""


class OscillatorError(Exception):
    """Base exception for workbench errors."""

    exit_code = 1

    def __init__(self, message: str, exit_code: int | None = None):
        self.message = message
        if exit_code is not None:
            self.exit_code = exit_code
        super().__init__(self.message)

    def to_record(self) -> dict:
        """Machine-readable form used by the CLI error report."""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }


class ConfigError(OscillatorError):
    """Exception raised for invalid configuration or parameter files."""

    exit_code = 3

    def __init__(self, message: str = "Invalid configuration"):
        super().__init__(message)


class ParameterError(ConfigError):
    """Exception raised when parameters violate an operation's precondition."""

    def __init__(self, message: str = "Parameters outside the supported range"):
        super().__init__(message)


class NumericalError(OscillatorError):
    """Base exception for numerical failures."""

    exit_code = 2

    def __init__(self, message: str = "Numerical computation failed"):
        super().__init__(message)


class SigmoidDomainError(NumericalError):
    """Exception raised when a sigmoid formula is undefined at the argument."""

    def __init__(self, message: str = "Sigmoid evaluated outside its domain"):
        super().__init__(message)


class UnsupportedSpecError(NumericalError):
    """Exception raised when a sigmoid family lacks the requested structure."""

    def __init__(self, message: str = "Sigmoid family has no registered tails"):
        super().__init__(message)


class InvalidChartError(NumericalError):
    """Exception raised for an illegal chart or a wrong blow-up stage."""

    def __init__(self, message: str = "Invalid chart"):
        super().__init__(message)


class OutOfOverlapError(NumericalError):
    """Exception raised when a chart change leaves the overlap domain."""

    def __init__(self, message: str = "Point outside the chart overlap"):
        super().__init__(message)


class IntegrationError(NumericalError):
    """Exception raised when the integrator fails."""

    def __init__(self, message: str = "Integration failed (consider enabling stiff_switch)"):
        super().__init__(message)


class NoReturnError(NumericalError):
    """Exception raised when an orbit does not return to a section."""

    def __init__(self, message: str = "No return to the section within t_max"):
        super().__init__(message)


class ConvergenceError(NumericalError):
    """Exception raised when an iteration fails to converge."""

    def __init__(self, message: str = "Iteration did not converge"):
        super().__init__(message)


class BracketError(NumericalError):
    """Exception raised when a root bracket shows no sign change."""

    def __init__(self, message: str = "No sign change in bracket"):
        super().__init__(message)


class BranchFoldError(NumericalError):
    """Exception raised when equilibrium continuation is lost."""

    def __init__(self, message: str = "Equilibrium branch continuation failed"):
        super().__init__(message)


class ClassificationMismatchError(NumericalError):
    """Exception raised when eigenvalues contradict an expected equilibrium type."""

    def __init__(self, message: str = "Equilibrium classification mismatch"):
        super().__init__(message)


class NonMonotoneOrbitError(NumericalError):
    """Exception raised when a heteroclinic sample is not monotone."""

    def __init__(self, message: str = "Heteroclinic orbit is not monotone"):
        super().__init__(message)


class SeedCutoffError(NumericalError):
    """Exception raised when a manifold seed offset exceeds its cutoff."""

    def __init__(self, message: str = "Seed offset beyond the expansion cutoff"):
        super().__init__(message)
