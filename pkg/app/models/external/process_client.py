"""Process client: one child process per request-response exchange."""

import logging
import subprocess
from dataclasses import dataclass

from .config import ExternalModelConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProcessResponse:
    returncode: int
    stdout: str
    stderr: str


class ProcessClient:
    """Runs the configured command, writes the request to stdin and collects stdout.

    Every exchange uses a fresh child, so concurrent workers never share a
    process. End of input delimits the request.
    """

    def __init__(self, config: ExternalModelConfig):
        self.config = config

    def exchange(self, request: str) -> ProcessResponse:
        """
        Send one request and wait for the child to finish.

        Args:
            request: UTF-8 CSV payload (header + rows, LF line endings)

        Returns:
            ProcessResponse: Exit status and decoded output streams

        Raises:
            OSError: If the command cannot be launched
            subprocess.TimeoutExpired: If the child exceeds the batch timeout
        """
        logger.debug(f"Launching {self.config.command} with {len(request)} bytes of input")

        completed = subprocess.run(
            self.config.command,
            input=request.encode("utf-8"),
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=self.config.batch_timeout,
            check=False,
        )

        logger.debug(f"External model exited with {completed.returncode}")
        return ProcessResponse(
            returncode=completed.returncode,
            stdout=completed.stdout.decode("utf-8", errors="replace"),
            stderr=completed.stderr.decode("utf-8", errors="replace"),
        )
