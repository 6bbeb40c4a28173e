"""SVG waterfalls, uncertainty plots and text tables."""

import re

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from app.core.types import UncertaintyReport
from app.rendering import RenderSpec, render_text, render_uncertainty, render_waterfall
from app.services.explainer import sequential_explain, uncertainty_profile
from tests.conftest import add_model, prod_model, xor_model


def test_waterfall_has_one_bar_per_step_plus_intercept(grid4, corner):
    explanation = sequential_explain(add_model(), grid4, corner)

    svg = render_waterfall(explanation).decode("utf-8")

    assert len(explanation.steps) == 2
    assert svg.count('class="bar"') == 3
    assert svg.count('class="prediction-marker"') == 1
    assert svg.startswith("<svg") or svg.startswith("<?xml")
    assert svg.endswith("</svg>\n")


def test_waterfall_is_deterministic(grid4, corner):
    explanation = sequential_explain(prod_model(), grid4, corner)

    assert render_waterfall(explanation) == render_waterfall(explanation)


def test_pair_step_label_names_both_features(grid4, corner):
    explanation = sequential_explain(xor_model(), grid4, corner)

    svg = render_waterfall(explanation).decode("utf-8")

    labels = re.findall(r'<text class="label"[^>]*>([^<]*)</text>', svg)
    assert any("x1" in label and "x2" in label for label in labels)
    assert svg.count('class="bar"') == 2


def test_waterfall_colors_follow_sign(grid4, corner):
    spec = RenderSpec(kind="svg", positive_color="#00ff00", negative_color="#ff0000")
    explanation = sequential_explain(xor_model(), grid4, corner)

    svg = render_waterfall(explanation, spec).decode("utf-8")

    assert explanation.steps[0].attribution < 0
    assert "#ff0000" in svg
    assert "#00ff00" not in svg


def test_explicit_height_is_used(grid4, corner):
    explanation = sequential_explain(add_model(), grid4, corner)

    svg = render_waterfall(explanation, RenderSpec(kind="svg", width=400, height=300)).decode("utf-8")

    assert 'width="400"' in svg and 'height="300"' in svg


def test_render_spec_rejects_bad_colors():
    with pytest.raises(PydanticValidationError):
        RenderSpec(positive_color="green")


def test_uncertainty_plot_has_whiskers(grid4, corner):
    report = uncertainty_profile(prod_model(), grid4, corner, K=20, seed=1)

    svg = render_uncertainty(report).decode("utf-8")

    assert svg.count('class="iqr"') == 2
    assert svg.count('class="range"') == 2
    assert svg.count('class="mean"') == 2


def test_explanation_text_precision(grid4, corner):
    explanation = sequential_explain(prod_model(), grid4, corner)

    text = render_text(explanation)

    assert "0.2500" in text
    assert "prediction" in text
    assert "1.0000" in text
    assert "0.25000" not in render_text(explanation, precision=2)


def test_uncertainty_text_lists_every_feature():
    samples = np.array([[0.0, 0.5, 1.0, 1.5], [2.0, 2.0, 2.0, 2.0]])
    report = UncertaintyReport.from_samples(samples, seed=3, feature_names=("a", "b"))

    lines = render_text(report).splitlines()

    assert lines[0] == "orders: 4  seed: 3"
    assert lines[2].split() == ["a", "0.7500", "0.3750", "1.1250", "0.7500", "0.0000", "1.5000"]
    assert lines[3].split()[0] == "b"


def test_explanation_text_is_an_aligned_table(grid4, corner):
    explanation = sequential_explain(prod_model(), grid4, corner)

    lines = render_text(explanation).splitlines()

    assert lines[1].split() == ["step", "contribution", "cumulative"]
    assert lines[2].split() == ["intercept", "0.2500", "0.2500"]
    assert lines[-1].split()[0] == "prediction"
    assert len({len(line) for line in lines[1:]}) == 1
    assert len(lines) == 2 + len(explanation.steps) + 2


def test_uncertainty_text_header_names_columns():
    report = UncertaintyReport.from_samples(np.array([[1.0, 3.0]]), seed=0, feature_names=("long_feature_name",))

    lines = render_text(report, precision=2).splitlines()

    assert lines[1].split() == ["feature", "mean", "q1", "q3", "iqr", "min", "max"]
    assert lines[2].split()[:2] == ["long_feature_name", "2.00"]
