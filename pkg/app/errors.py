"""Exception hierarchy shared by all ExplainHub components."""

from typing import Optional

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MODEL_FAILURE = 3


class ExplainHubError(Exception):
    """Base exception; carries the CLI exit code it maps to."""

    def __init__(self, message: str, exit_code: int = 1):
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationError(ExplainHubError):
    """Exception raised when input data, flags or configuration are invalid."""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message, EXIT_USAGE)


class ModelError(ExplainHubError):
    """Base exception for model scoring and training failures."""

    kind = "model failure"

    def __init__(self, message: str, model: str = "", diagnostics: str = ""):
        self.model = model
        self.diagnostics = diagnostics
        super().__init__(message, EXIT_MODEL_FAILURE)


class ProcessFailureError(ModelError):
    """External model process exited with a nonzero status or could not start."""

    kind = "process failure"


class ShortResponseError(ModelError):
    """External model returned fewer score lines than rows sent."""

    kind = "short response"


class MalformedResponseError(ModelError):
    """External model returned a line that is not a decimal number."""

    kind = "malformed response"


class ModelTimeoutError(ModelError):
    """External model did not answer within its time budget."""

    kind = "timeout"


class SingularDesignError(ModelError):
    """Least-squares design matrix is rank deficient."""

    kind = "singular design"

    def __init__(self, message: str, condition_number: float, model: str = "linear"):
        self.condition_number = condition_number
        super().__init__(f"{message} (condition number {condition_number:.3e})", model)


class TrainingError(ModelError):
    """Training inputs are unusable (empty or non-finite targets)."""

    kind = "training failure"


class ModelFormatError(ExplainHubError):
    """Model file is corrupted or has an unknown format version."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(message, EXIT_USAGE)


class UnsupportedModelError(ExplainHubError):
    """Operation is not available for this model family."""

    def __init__(self, message: str, family: str = ""):
        self.family = family
        super().__init__(message, EXIT_USAGE)


class ExplanationError(ExplainHubError):
    """An explanation violates its construction invariants."""

    def __init__(self, message: str):
        super().__init__(message, EXIT_MODEL_FAILURE)


class BenchmarkError(ExplainHubError):
    """Benchmark inputs or results are unusable."""

    def __init__(self, message: str):
        super().__init__(message, EXIT_USAGE)
