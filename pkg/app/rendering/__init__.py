from .spec import RenderSpec
from .svg import render_uncertainty, render_waterfall
from .text import render_text

__all__ = ["RenderSpec", "render_uncertainty", "render_waterfall", "render_text"]
