"""
Static SVG waterfall and uncertainty plots.

Output is a pure function of its inputs: coordinates are printed with fixed
precision and elements are emitted in path order, so identical inputs give
identical bytes.
"""

import logging
from typing import List, Optional, Sequence, Tuple

from app.core.types import Explanation, UncertaintyReport
from app.errors import ValidationError
from app.rendering.spec import RenderSpec

logger = logging.getLogger(__name__)

ROW_HEIGHT = 28
BAR_HEIGHT = 18
TOP = 44
BOTTOM = 36
LABEL_WIDTH = 220
RIGHT_PAD = 90
FONT = "font-family=\"sans-serif\" font-size=\"12\""


def _esc(text: str) -> str:
    return (
        (text or "")
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


class _Axis:
    """Linear map from values to x pixels over the plot area."""

    def __init__(self, values: Sequence[float], width: int):
        lo, hi = min(values), max(values)
        if hi - lo < 1e-12:
            lo, hi = lo - 0.5, hi + 0.5
        margin = (hi - lo) * 0.05
        self.lo, self.hi = lo - margin, hi + margin
        self.left = LABEL_WIDTH
        self.right = max(LABEL_WIDTH + 1, width - RIGHT_PAD)

    def __call__(self, value: float) -> float:
        return self.left + (value - self.lo) / (self.hi - self.lo) * (self.right - self.left)


def _bar(axis: _Axis, start: float, end: float, y: float, color: str) -> str:
    x0, x1 = sorted((axis(start), axis(end)))
    width = max(x1 - x0, 1.0)
    return (
        f'<rect class="bar" x="{x0:.2f}" y="{y:.2f}" width="{width:.2f}" '
        f'height="{BAR_HEIGHT}" fill="{color}"/>'
    )


def _text(x: float, y: float, text: str, anchor: str = "start", css: str = "label") -> str:
    return f'<text class="{css}" x="{x:.2f}" y="{y:.2f}" text-anchor="{anchor}" {FONT}>{_esc(text)}</text>'


def _document(title: str, width: int, height: int, body: List[str]) -> bytes:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" role="img" aria-label="{_esc(title)}">',
        f"<title>{_esc(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        _text(width / 2, 24, title, anchor="middle", css="title"),
        *body,
        "</svg>",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def _height(spec: RenderSpec, rows: int) -> int:
    return spec.height or TOP + rows * ROW_HEIGHT + BOTTOM


def _signed(value: float, precision: int) -> str:
    return f"{value:+.{precision}f}"


def render_waterfall(explanation: Explanation, spec: Optional[RenderSpec] = None) -> bytes:
    """
    Waterfall plot of an explanation.

    One intercept bar spanning zero to the baseline, then one bar per step
    stacked cumulatively and colored by sign, then a prediction marker.

    Args:
        explanation: Explanation to draw
        spec: Colors, size and label precision

    Returns:
        bytes: UTF-8 SVG document

    Raises:
        ValidationError: If the explanation has no steps
    """
    spec = spec or RenderSpec(kind="svg")
    if not explanation.steps:
        raise ValidationError("cannot render an explanation with zero steps", "explanation")

    bars = explanation.cumulative()
    rows = len(bars) + 2
    height = _height(spec, rows)
    values = [0.0, explanation.baseline, explanation.prediction] + [end for _, end in bars]
    axis = _Axis(values, spec.width)
    value_x = spec.width - RIGHT_PAD + 8

    def row_y(k: int) -> float:
        return TOP + k * ROW_HEIGHT

    body = [
        f'<line class="baseline" x1="{axis(explanation.baseline):.2f}" y1="{TOP - 4}" '
        f'x2="{axis(explanation.baseline):.2f}" y2="{row_y(rows) - 4:.2f}" stroke="#999" stroke-dasharray="4 3"/>',
        _bar(axis, 0.0, explanation.baseline, row_y(0), spec.intercept_color),
        _text(8, row_y(0) + 13, "intercept"),
        _text(value_x, row_y(0) + 13, f"{explanation.baseline:.{spec.precision}f}", css="value"),
    ]
    for k, (step, (start, end)) in enumerate(zip(explanation.steps, bars), start=1):
        color = spec.positive_color if step.attribution >= 0 else spec.negative_color
        body.append(_bar(axis, start, end, row_y(k), color))
        body.append(_text(8, row_y(k) + 13, explanation.step_label(step)))
        body.append(_text(value_x, row_y(k) + 13, _signed(step.attribution, spec.precision), css="value"))

    marker_x = axis(explanation.prediction)
    last = row_y(rows - 1)
    body += [
        f'<line class="prediction-marker" x1="{marker_x:.2f}" y1="{TOP - 4}" x2="{marker_x:.2f}" '
        f'y2="{last + BAR_HEIGHT:.2f}" stroke="#222" stroke-width="2"/>',
        _text(8, last + 13, "prediction"),
        _text(value_x, last + 13, f"{explanation.prediction:.{spec.precision}f}", css="value"),
    ]
    title = f"Explanation of {explanation.meta.model}"
    logger.debug(f"Rendered waterfall with {len(bars)} steps ({spec.width}x{height})")
    return _document(title, spec.width, height, body)


def _whisker(axis: _Axis, lo: float, hi: float, y: float, css: str, stroke_width: int) -> str:
    return (
        f'<line class="{css}" x1="{axis(lo):.2f}" y1="{y:.2f}" x2="{axis(hi):.2f}" y2="{y:.2f}" '
        f'stroke="#1f3a68" stroke-width="{stroke_width}"/>'
    )


def _uncertainty_rows(report: UncertaintyReport) -> List[Tuple[int, str, float]]:
    """(feature, label, bar value) in baseline-explanation order, or by feature index without one."""
    explanation = report.baseline_explanation
    if explanation is None or any(step.group.is_pair for step in explanation.steps):
        return [(i, name, float(report.means[i])) for i, name in enumerate(report.feature_names)]
    return [
        (step.group.features[0], explanation.step_label(step), step.attribution)
        for step in explanation.steps
    ]


def render_uncertainty(report: UncertaintyReport, spec: Optional[RenderSpec] = None) -> bytes:
    """
    Contribution bars of the baseline explanation with order-uncertainty whiskers.

    Every feature gets its baseline contribution as a bar, a thin whisker over
    the (min, max) range across sampled orders, a thick whisker over (q1, q3)
    and a tick at the mean.
    """
    spec = spec or RenderSpec(kind="svg")
    rows = _uncertainty_rows(report)
    if not rows:
        raise ValidationError("cannot render a report without features", "report")

    height = _height(spec, len(rows))
    values = [0.0] + [value for _, _, value in rows]
    values += [float(v) for v in report.minimum] + [float(v) for v in report.maximum]
    axis = _Axis(values, spec.width)
    value_x = spec.width - RIGHT_PAD + 8
    zero = axis(0.0)

    body = [
        f'<line class="zero" x1="{zero:.2f}" y1="{TOP - 4}" x2="{zero:.2f}" '
        f'y2="{TOP + len(rows) * ROW_HEIGHT - 4:.2f}" stroke="#999"/>'
    ]
    for k, (feature, label, value) in enumerate(rows):
        y = TOP + k * ROW_HEIGHT
        middle = y + BAR_HEIGHT / 2
        color = spec.positive_color if value >= 0 else spec.negative_color
        mean_x = axis(float(report.means[feature]))
        body += [
            _bar(axis, 0.0, value, y, color),
            _whisker(axis, float(report.minimum[feature]), float(report.maximum[feature]), middle, "range", 1),
            _whisker(axis, float(report.q1[feature]), float(report.q3[feature]), middle, "iqr", 4),
            f'<line class="mean" x1="{mean_x:.2f}" y1="{y:.2f}" x2="{mean_x:.2f}" '
            f'y2="{y + BAR_HEIGHT:.2f}" stroke="#1f3a68" stroke-width="2"/>',
            _text(8, y + 13, label),
            _text(value_x, y + 13, f"IQR {float(report.iqr[feature]):.{spec.precision}f}", css="value"),
        ]
    title = f"Order uncertainty over {report.K} orders"
    return _document(title, spec.width, height, body)
