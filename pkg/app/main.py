"""ExplainHub command line: train, explain, uncertainty, shapley, benchmark.

Run as ``python -m app.main <command> [flags]``. Exit codes: 0 success,
2 invalid input or flags, 3 model failure.
"""

import argparse
import csv
import logging
import math
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from app.config import Settings, settings
from app.core.types import Dataset, FeatureOrder, Observation
from app.data import load_csv, load_manifest, synth
from app.errors import EXIT_OK, ValidationError
from app.exception_handlers import handle_exception
from app.logging_config import configure_logging
from app.models import BaseModelHandle, parse_model_spec, save_model
from app.rendering import RenderSpec, render_text, render_uncertainty, render_waterfall
from app.schemas.explanation import FeatureValueDocument, ShapleyDocument
from app.services import (
    FAMILIES,
    ExplainConfig,
    bundled_suite,
    explain_with_order,
    render_bucket_table,
    run_benchmark,
    sequential_explain,
    shapley_estimate,
    uncertainty_profile,
)
from app.utils.validators import bind_observation, observation_from_row, validate_feature_index

logger = logging.getLogger(__name__)

_ROW_INDEX = re.compile(r"^-?\d+$")


def trainer_defaults(config: Settings) -> Dict[str, Dict[str, Any]]:
    return {
        "gbm": {
            "max_depth": config.gbm_max_depth,
            "n_trees": config.gbm_n_trees,
            "learning_rate": config.gbm_learning_rate,
            "min_leaf": config.min_leaf_size,
        },
        "rf": {
            "max_depth": config.rf_max_depth,
            "n_trees": config.rf_n_trees,
            "min_leaf": config.min_leaf_size,
        },
    }


def external_defaults(config: Settings) -> Dict[str, Any]:
    return {
        "batch_size": config.external_batch_size,
        "startup_timeout": config.external_startup_timeout,
        "response_timeout": config.external_response_timeout,
    }


def write_artifact(out: Optional[str], payload: Union[str, bytes]) -> None:
    """Write UTF-8 with LF line endings to ``out``, or to stdout when omitted."""
    data = payload.encode("utf-8") if isinstance(payload, str) else payload
    if out is None:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Wrote {len(data)} bytes to {path}")


def load_data(args: argparse.Namespace) -> Tuple[Dataset, np.ndarray]:
    if args.data is not None and args.generator is not None:
        raise ValidationError("use either --data or --generator, not both", "--data")
    if args.data is not None:
        return load_csv(args.data, args.target, args.positive_label)
    if args.generator is not None:
        return synth(args.generator, args.rows, args.seed)
    raise ValidationError("one of --data or --generator is required", "--data")


def load_model_from_flags(args: argparse.Namespace, dataset: Dataset, targets: np.ndarray) -> BaseModelHandle:
    recipe = parse_model_spec(args.model)
    return recipe.build(
        dataset,
        targets,
        seed=args.seed,
        defaults=trainer_defaults(settings),
        external_defaults=external_defaults(settings),
    )


def parse_observation(dataset: Dataset, text: str) -> Observation:
    """``--observation`` is a 0-based row index or an inline CSV row."""
    text = text.strip()
    if _ROW_INDEX.match(text):
        try:
            return observation_from_row(dataset, int(text))
        except ValidationError as e:
            raise ValidationError(e.message.split(": ", 1)[-1], "--observation")
    values = next(csv.reader([text]))
    try:
        return bind_observation(dataset, values)
    except ValidationError as e:
        raise ValidationError(e.message.split(": ", 1)[-1], "--observation")


def parse_order(dataset: Dataset, text: Optional[str]) -> Optional[FeatureOrder]:
    """``--order`` lists feature names (or 0-based indices) separated by commas."""
    if text is None:
        return None
    permutation: List[int] = []
    for token in (part.strip() for part in text.split(",")):
        if token in dataset.feature_names:
            permutation.append(dataset.feature_names.index(token))
        elif token.isdigit():
            permutation.append(validate_feature_index(dataset, int(token), "--order"))
        else:
            raise ValidationError(f"unknown feature '{token}'", "--order")
    if len(permutation) != dataset.n_features:
        raise ValidationError(
            f"invalid permutation: expected {dataset.n_features} features, got {len(permutation)}", "--order"
        )
    try:
        return FeatureOrder(tuple(permutation))
    except ValidationError as e:
        raise ValidationError(e.message.split(": ", 1)[-1], "--order")


def explain_config(args: argparse.Namespace) -> ExplainConfig:
    return ExplainConfig(
        interaction_preference=args.interaction_preference,
        max_rows=args.max_rows,
        seed=args.seed,
        workers=args.workers,
    )


def render_spec(args: argparse.Namespace) -> RenderSpec:
    return RenderSpec.from_settings(settings, kind=args.format)


def _prepare(args: argparse.Namespace):
    dataset, targets = load_data(args)
    model = load_model_from_flags(args, dataset, targets)
    observation = parse_observation(dataset, args.observation)
    return dataset, model, observation


def cmd_explain(args: argparse.Namespace) -> int:
    dataset, model, observation = _prepare(args)
    order = parse_order(dataset, args.order)
    config = explain_config(args)
    if order is None:
        explanation = sequential_explain(model, dataset, observation, config)
    else:
        explanation = explain_with_order(model, dataset, observation, order, config)

    spec = render_spec(args)
    if spec.kind == "svg":
        payload: Union[str, bytes] = render_waterfall(explanation, spec)
    elif spec.kind == "text":
        payload = render_text(explanation, spec.precision)
    else:
        payload = explanation.to_document().to_json()
    write_artifact(args.out, payload)
    return EXIT_OK


def cmd_uncertainty(args: argparse.Namespace) -> int:
    dataset, model, observation = _prepare(args)
    config = explain_config(args)
    report = uncertainty_profile(model, dataset, observation, K=args.permutations, seed=args.seed, config=config)

    spec = render_spec(args)
    if spec.kind == "svg":
        payload: Union[str, bytes] = render_uncertainty(report, spec)
    elif spec.kind == "text":
        payload = render_text(report, spec.precision)
    else:
        payload = report.to_document().to_json()
    write_artifact(args.out, payload)
    return EXIT_OK


def cmd_shapley(args: argparse.Namespace) -> int:
    dataset, model, observation = _prepare(args)
    config = explain_config(args)
    values = shapley_estimate(
        model,
        dataset,
        observation,
        K=args.permutations,
        exhaustive=args.exhaustive,
        seed=args.seed,
        config=config,
        max_exhaustive_features=settings.exhaustive_shapley_max_features,
    )
    document = ShapleyDocument(
        method="exhaustive" if args.exhaustive else "sampled",
        K=math.factorial(dataset.n_features) if args.exhaustive else args.permutations,
        seed=args.seed,
        features=[FeatureValueDocument(name=name, value=float(v)) for name, v in zip(dataset.feature_names, values)],
    )
    if args.format == "text":
        frame = pd.DataFrame(
            {"feature": [f.name for f in document.features], "value": [f.value for f in document.features]}
        )
        table = frame.to_string(
            index=False, justify="left", formatters={"value": lambda v: f"{v:+.{settings.text_precision}f}"}
        )
        payload = f"{document.method} Shapley values (seed {args.seed})\n" + table + "\n"
    elif args.format == "svg":
        raise ValidationError("svg output is not available for shapley", "--format")
    else:
        payload = document.to_json()
    write_artifact(args.out, payload)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    if args.out is None:
        raise ValidationError("a model file path is required", "--out")
    dataset, targets = load_data(args)
    model = load_model_from_flags(args, dataset, targets)
    path = save_model(model, args.out)
    sys.stderr.write(f"saved {model.family} model '{model.name}' to {path}\n")
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace) -> int:
    n_obs = args.observations
    if args.manifest is not None:
        tasks = load_manifest(args.manifest)
    else:
        tasks = bundled_suite(
            n_obs=n_obs or settings.bench_observations,
            seed=args.seed,
            split_fraction=settings.bench_split_fraction,
        )
    families = [family.strip() for family in args.families.split(",") if family.strip()]

    result = run_benchmark(
        tasks,
        families,
        n_obs=n_obs,
        seed=args.seed,
        workers=args.workers,
        max_rows=args.max_rows,
        defaults=trainer_defaults(settings),
    )
    text, table_csv = render_bucket_table(result)
    for row in result.failed:
        sys.stderr.write(f"warning: task '{row.task}' ({row.family}) failed: {row.error_message}\n")

    write_artifact(args.out, text)
    if args.csv is not None:
        write_artifact(args.csv, table_csv)
    if args.json is not None:
        write_artifact(args.json, result.to_document().to_json())
    return EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.default_seed)
    common.add_argument("--workers", type=_positive_int, default=settings.explain_workers,
                        help="parallel workers (default: EXPLAIN_WORKERS)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--max-rows", type=int, default=settings.max_background_rows,
                        help="background row cap for expectations")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", default=None, help="CSV file with a header row")
    data.add_argument("--generator", default=None, help="synthetic dataset: xor, additive, grid4, product-noise")
    data.add_argument("--rows", type=_positive_int, default=500, help="rows drawn by --generator")
    data.add_argument("--target", default="target")
    data.add_argument("--positive-label", default=None)
    data.add_argument("--model", required=True,
                      help="linear | gbm[:depth=2,trees=200,rate=0.1] | rf[:trees=100,depth=4] | external:<command> | model file")

    explain = argparse.ArgumentParser(add_help=False)
    explain.add_argument("--observation", required=True, help="0-based row index or inline CSV row")
    explain.add_argument("--interaction-preference", type=float, default=settings.interaction_preference)
    explain.add_argument("--format", choices=("json", "text", "svg"), default="json")

    parser = argparse.ArgumentParser(prog="explainhub", description="Explain single predictions of tabular models")
    parser.add_argument("--log-level", default=settings.log_level)
    parser.add_argument("--log-format", choices=("console", "json"), default=settings.log_format)
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", parents=[common, data], help="train a model and save it")
    train.set_defaults(handler=cmd_train)

    explain_cmd = commands.add_parser("explain", parents=[common, data, explain], help="explain one observation")
    explain_cmd.add_argument("--order", default=None, help="comma-separated feature order (additive mode)")
    explain_cmd.set_defaults(handler=cmd_explain)

    uncertainty = commands.add_parser("uncertainty", parents=[common, data, explain],
                                      help="order-dependence of additive explanations")
    uncertainty.add_argument("--permutations", type=int, default=settings.uncertainty_permutations)
    uncertainty.set_defaults(handler=cmd_uncertainty)

    shapley = commands.add_parser("shapley", parents=[common, data, explain], help="Shapley values")
    shapley.add_argument("--permutations", type=int, default=settings.uncertainty_permutations)
    shapley.add_argument("--exhaustive", action="store_true", help="average over all p! orders")
    shapley.set_defaults(handler=cmd_shapley)

    benchmark = commands.add_parser("benchmark", parents=[common], help="interaction counts across model families")
    benchmark.add_argument("--manifest", default=None, help="JSON task list (default: bundled synthetic suite)")
    benchmark.add_argument("--families", default=",".join(FAMILIES))
    benchmark.add_argument("--observations", type=_positive_int, default=None,
                           help="observations per task (default: per task)")
    benchmark.add_argument("--csv", default=None, help="CSV bucket table")
    benchmark.add_argument("--json", default=None, help="result document")
    benchmark.set_defaults(handler=cmd_benchmark)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level, args.log_format)
        return args.handler(args)
    except Exception as e:
        code, message = handle_exception(e)
        sys.stderr.write(message + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
