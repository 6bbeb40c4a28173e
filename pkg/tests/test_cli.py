"""End-to-end command runs through ``main``."""

import json
import sys

import pytest

from app.errors import EXIT_MODEL_FAILURE, EXIT_OK, EXIT_USAGE
from app.main import main
from app.services.explainer import _sample_orders

GRID4_GBM = ["--generator", "grid4", "--model", "gbm:depth=2,min_leaf=1"]


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_explain_json(capsys):
    code, out, _ = _run(capsys, "explain", *GRID4_GBM, "--observation", "3")

    document = json.loads(out)
    assert code == EXIT_OK
    assert document["baseline"] == pytest.approx(0.25)
    assert document["prediction"] == pytest.approx(1.0, abs=1e-6)
    assert document["meta"]["background_rows"] == 4
    total = document["baseline"] + sum(step["attribution"] for step in document["steps"])
    assert total == pytest.approx(document["prediction"], abs=1e-8)


def test_explain_with_order(capsys):
    code, out, _ = _run(capsys, "explain", *GRID4_GBM, "--observation", "3", "--order", "x2,x1")

    steps = json.loads(out)["steps"]
    assert code == EXIT_OK
    assert [step["features"] for step in steps] == [["x2"], ["x1"]]


def test_explain_inline_observation(capsys):
    code, out, _ = _run(capsys, "explain", *GRID4_GBM, "--observation", "1,1", "--format", "text")

    assert code == EXIT_OK
    assert "intercept" in out
    assert "prediction" in out


def test_explain_svg_to_file(tmp_path, capsys):
    target = tmp_path / "plots" / "waterfall.svg"

    code, out, _ = _run(capsys, "explain", *GRID4_GBM, "--observation", "0", "--format", "svg", "--out", str(target))

    assert code == EXIT_OK
    assert out == ""
    assert target.read_bytes().endswith(b"</svg>\n")


def test_row_out_of_range(capsys):
    code, _, err = _run(capsys, "explain", *GRID4_GBM, "--observation", "9999")

    assert code == EXIT_USAGE
    assert "--observation" in err
    assert "row out of range" in err


def test_invalid_order(capsys):
    code, _, err = _run(capsys, "explain", *GRID4_GBM, "--observation", "0", "--order", "x1,x1")

    assert code == EXIT_USAGE
    assert "invalid permutation" in err


def test_order_index_out_of_range(capsys):
    code, _, err = _run(capsys, "explain", *GRID4_GBM, "--observation", "0", "--order", "0,5")

    assert code == EXIT_USAGE
    assert "feature index 5 out of range [0, 2)" in err


def test_zero_permutations(capsys):
    code, _, err = _run(capsys, "uncertainty", *GRID4_GBM, "--observation", "3", "--permutations", "0")

    assert code == EXIT_USAGE
    assert "K must be >= 1" in err


def test_uncertainty_json(capsys):
    code, out, _ = _run(capsys, "uncertainty", *GRID4_GBM, "--observation", "3", "--permutations", "10")

    document = json.loads(out)
    assert code == EXIT_OK
    assert document["K"] == 10
    assert [feature["name"] for feature in document["features"]] == ["x1", "x2"]


def _seed_with_both_orders() -> int:
    return next(seed for seed in range(100) if len(set(_sample_orders(2, 2, seed))) == 2)


def test_uncertainty_of_xor_over_both_orders(tmp_path, capsys):
    script = tmp_path / "xor_model.py"
    script.write_text(
        "import sys\n"
        "for line in sys.stdin.read().splitlines()[1:]:\n"
        "    a, b = (float(v) for v in line.split(','))\n"
        "    print(float(a != b))\n"
    )
    seed = _seed_with_both_orders()

    code, out, _ = _run(
        capsys, "uncertainty", "--generator", "grid4", "--model", f"external:{sys.executable} {script}",
        "--observation", "3", "--permutations", "2", "--seed", str(seed),
    )

    features = json.loads(out)["features"]
    assert code == EXIT_OK
    assert [feature["mean"] for feature in features] == pytest.approx([-0.25, -0.25])
    assert features[0]["q1"] == pytest.approx(-0.375)
    assert features[0]["q3"] == pytest.approx(-0.125)
    assert sorted(features[0]["samples"]) == pytest.approx([-0.5, 0.0])


def test_exhaustive_shapley(capsys):
    code, out, _ = _run(
        capsys, "shapley", "--generator", "grid4", "--model", "linear", "--observation", "3", "--exhaustive"
    )

    document = json.loads(out)
    assert code == EXIT_OK
    assert document["method"] == "exhaustive"
    assert document["K"] == 2
    assert [feature["value"] for feature in document["features"]] == pytest.approx([0.25, 0.25], abs=1e-9)


def test_shapley_text_table(capsys):
    code, out, _ = _run(
        capsys, "shapley", "--generator", "grid4", "--model", "linear", "--observation", "3", "--exhaustive",
        "--format", "text",
    )

    lines = out.splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith("exhaustive Shapley values")
    assert lines[1].split() == ["feature", "value"]
    assert lines[2].split() == ["x1", "+0.2500"]
    assert lines[3].split() == ["x2", "+0.2500"]


def test_train_then_explain_saved_model(tmp_path, capsys):
    model_path = tmp_path / "gbm1.json"

    code, _, err = _run(
        capsys, "train", "--generator", "grid4", "--model", "gbm:depth=1,min_leaf=1", "--out", str(model_path)
    )
    assert code == EXIT_OK
    assert "saved gbm model" in err

    code, out, _ = _run(capsys, "explain", "--generator", "grid4", "--model", str(model_path), "--observation", "3")
    assert code == EXIT_OK
    assert all(len(step["features"]) == 1 for step in json.loads(out)["steps"])


def test_train_requires_out(capsys):
    code, _, err = _run(capsys, "train", "--generator", "grid4", "--model", "linear")

    assert code == EXIT_USAGE
    assert "--out" in err


def test_failing_external_model(tmp_path, capsys):
    script = tmp_path / "broken.sh"
    script.write_text("#!/bin/sh\ncat > /dev/null\necho boom >&2\nexit 4\n")
    script.chmod(0o755)

    code, _, err = _run(
        capsys, "explain", "--generator", "grid4", "--model", f"external:{script}", "--observation", "0"
    )

    assert code == EXIT_MODEL_FAILURE
    assert "process failure" in err
    assert "boom" in err


def test_benchmark_skips_failed_tasks(tmp_path, capsys):
    manifest = tmp_path / "tasks.json"
    manifest.write_text(
        json.dumps(
            [
                {"name": "missing", "path": "absent.csv"},
                {"name": "xor", "generator": "xor", "n_rows": 80},
            ]
        )
    )
    table = tmp_path / "table.csv"

    code, out, err = _run(
        capsys, "benchmark", "--manifest", str(manifest), "--families", "gbm1",
        "--observations", "3", "--csv", str(table),
    )

    assert code == EXIT_OK
    assert "warning: task 'missing'" in err
    assert "xor" in out
    rows = table.read_text().splitlines()
    assert rows[1].startswith("missing,gbm1,0,0,0,0,0,,failed,")
    assert rows[2].startswith("xor,gbm1,3,0,0,0,0,")


def test_runs_are_deterministic(capsys):
    argv = ["uncertainty", *GRID4_GBM, "--observation", "3", "--permutations", "20", "--seed", "5"]

    _, first, _ = _run(capsys, *argv)
    _, second, _ = _run(capsys, *argv, "--workers", "4")

    assert first == second
