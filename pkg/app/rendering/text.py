"""Plain-text tables for explanations and uncertainty reports."""

from typing import Union

import pandas as pd

from app.core.types import Explanation, UncertaintyReport

DEFAULT_PRECISION = 4


def explanation_text(explanation: Explanation, precision: int = DEFAULT_PRECISION) -> str:
    baseline = f"{explanation.baseline:.{precision}f}"
    rows = [("intercept", baseline, baseline)]
    for step, (_, end) in zip(explanation.steps, explanation.cumulative()):
        rows.append((explanation.step_label(step), f"{step.attribution:+.{precision}f}", f"{end:.{precision}f}"))
    rows.append(("prediction", "", f"{explanation.prediction:.{precision}f}"))
    frame = pd.DataFrame(rows, columns=["step", "contribution", "cumulative"])

    header = (
        f"model: {explanation.meta.model}  seed: {explanation.meta.seed}  "
        f"background rows: {explanation.meta.background_rows}\n"
    )
    return header + frame.to_string(index=False, justify="left") + "\n"


def uncertainty_text(report: UncertaintyReport, precision: int = DEFAULT_PRECISION) -> str:
    frame = pd.DataFrame(
        {
            "feature": list(report.feature_names),
            "mean": report.means,
            "q1": report.q1,
            "q3": report.q3,
            "iqr": report.iqr,
            "min": report.minimum,
            "max": report.maximum,
        }
    )
    table = frame.to_string(index=False, justify="left", float_format=lambda value: f"{value:.{precision}f}")
    return f"orders: {report.K}  seed: {report.seed}\n" + table + "\n"


def render_text(item: Union[Explanation, UncertaintyReport], precision: int = DEFAULT_PRECISION) -> str:
    """Numbers rounded to ``precision`` decimals (4 by default)."""
    if isinstance(item, UncertaintyReport):
        return uncertainty_text(item, precision)
    return explanation_text(item, precision)
