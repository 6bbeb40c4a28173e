from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from app.config import Settings

_COLOR = r"^#[0-9a-fA-F]{6}$"


class RenderSpec(BaseModel):
    """Output kind, colors, canvas size and label precision of a rendered artifact."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["json", "text", "svg"] = "json"
    positive_color: str = Field(default="#4a9b5b", pattern=_COLOR)
    negative_color: str = Field(default="#c7473f", pattern=_COLOR)
    intercept_color: str = Field(default="#5b7fb5", pattern=_COLOR)
    width: int = Field(default=720, gt=0)
    height: int = Field(default=0, ge=0)  # 0 = derived from the number of bars
    precision: int = Field(default=4, ge=0, le=10)

    @classmethod
    def from_settings(cls, settings: Settings, kind: str = "json") -> "RenderSpec":
        return cls(
            kind=kind,
            positive_color=settings.svg_positive_color,
            negative_color=settings.svg_negative_color,
            intercept_color=settings.svg_intercept_color,
            width=settings.svg_width,
            height=settings.svg_height,
            precision=settings.text_precision,
        )
