"""Exception hierarchy shared by the diagnosis engine and the CLI."""


class DiagnosisError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 1


class ValidationError(DiagnosisError, ValueError):
    """Malformed input: bad permutation, vertex out of range, partial syndrome, failed precondition."""

    exit_code = 1


class ConfigurationError(ValidationError):
    """Invalid engine configuration (environment, JSON file or flags)."""


class BudgetExceededError(DiagnosisError):
    """A size guard or search budget was exceeded."""

    exit_code = 2


class VerificationError(DiagnosisError):
    """A verified structural or diagnosability fact did not hold."""

    exit_code = 3
