"""Configuration of the external black-box model bridge."""

import shlex
from typing import List, Union

from pydantic import BaseModel, Field, field_validator


class ExternalModelConfig(BaseModel):
    """How to launch and talk to an external scoring process."""

    command: List[str]
    batch_size: int = Field(default=1000, ge=1)
    startup_timeout: float = Field(default=10.0, gt=0)
    response_timeout: float = Field(default=30.0, gt=0)
    name: str = "external"

    @field_validator("command", mode="before")
    @classmethod
    def split_command(cls, value: Union[str, List[str]]) -> List[str]:
        if isinstance(value, str):
            value = shlex.split(value)
        if not value:
            raise ValueError("command must not be empty")
        return list(value)

    @property
    def batch_timeout(self) -> float:
        """Time budget of one request-response exchange (process start included)."""
        return self.startup_timeout + self.response_timeout
