import logging
from typing import Tuple

from pydantic import ValidationError as PydanticValidationError

from app.errors import EXIT_USAGE, ExplainHubError, ModelError

logger = logging.getLogger(__name__)

EXIT_UNEXPECTED = 1


def handle_exception(exc: BaseException) -> Tuple[int, str]:
    """
    Map an exception to the CLI exit code and the message printed on stderr.

    ExplainHub errors carry their own exit code; model errors also name the
    failure kind and any diagnostics captured from the model process.
    """
    if isinstance(exc, ModelError):
        message = f"model error ({exc.kind}): {exc.message}"
        if exc.diagnostics:
            message += f"\n{exc.diagnostics.rstrip()}"
        return exc.exit_code, message

    if isinstance(exc, ExplainHubError):
        return exc.exit_code, f"error: {exc.message}"

    if isinstance(exc, PydanticValidationError):
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ())) or "input"
        return EXIT_USAGE, f"error: {field}: {first.get('msg')}"

    logger.exception("Unexpected error")
    return EXIT_UNEXPECTED, f"unexpected error: {exc}"
