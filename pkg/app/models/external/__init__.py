"""External model bridge module."""

from .config import ExternalModelConfig
from .process_client import ProcessClient, ProcessResponse
from .provider import ExternalModel, external_model
from .wire import decode_response, encode_request

__all__ = [
    "ExternalModelConfig",
    "ProcessClient",
    "ProcessResponse",
    "ExternalModel",
    "external_model",
    "decode_response",
    "encode_request",
]
