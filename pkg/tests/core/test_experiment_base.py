"""Test the experiment base class: config handling, metadata and output."""

import json
import logging
import os
from pathlib import Path
from unittest import mock

import pytest

from rough_harmonics.exceptions import ConfigValidationError
from rough_harmonics.experiment_base import ExperimentBase, ExperimentResult
from rough_harmonics.typing import (
    BooleanType,
    DyadicIntegerType,
    PropertiesList,
    Property,
    StringType,
)


class ExperimentTest(ExperimentBase):
    """Example experiment for tests."""

    name = "experiment-test"
    config_jsonschema = PropertiesList(
        Property("label", StringType, required=True),
        Property("k", DyadicIntegerType, default=16),
        Property("default_true", BooleanType, default=True),
        Property("default_false", BooleanType, default=False),
    ).to_dict()

    def run(self) -> ExperimentResult:
        """Echo the config as one row."""
        return ExperimentResult(rows=[{"label": self.config["label"], "k": self.config["k"]}])


def test_config_defaults():
    experiment = ExperimentTest(config={"label": "a"})
    assert experiment.config["default_true"] is True
    assert experiment.config["default_false"] is False
    assert experiment.config["k"] == 16
    assert experiment.config["format"] == "csv"
    assert experiment.config["n_jobs"] == 1
    with pytest.raises(TypeError):
        experiment.config["k"] = 2  # type: ignore[index]


def test_config_from_files(tmpdir):
    first = tmpdir.join("first.env")
    first.write("LABEL=from-file\nK=2^5\n")
    second = tmpdir.join("second.json")
    second.write(json.dumps({"k": 8}))
    experiment = ExperimentTest(config=[str(first), str(second)])
    assert experiment.config["label"] == "from-file"
    assert experiment.config["k"] == 8


def test_config_validation_collects_every_error():
    with pytest.raises(ConfigValidationError) as info:
        ExperimentTest(config={"k": 1.5, "format": "xml"})
    message = str(info.value)
    assert "label" in message
    assert "format" in message


def test_unknown_settings_are_warned_about(caplog):
    with caplog.at_level(logging.WARNING):
        ExperimentTest(config={"label": "a", "colour": "red"})
    assert "Unknown setting 'colour'" in caplog.text


def test_invalid_config_without_raising(caplog):
    with caplog.at_level(logging.WARNING):
        experiment = ExperimentTest(config={"k": 4}, validate_config=False)
    assert experiment.config["k"] == 4
    assert "Config validation failed" in caplog.text


def test_logger_level_from_environment():
    with mock.patch.dict(os.environ, {"EXPERIMENT_TEST_LOGLEVEL": "debug"}):
        assert ExperimentTest.logger.level == logging.DEBUG
    with mock.patch.dict(os.environ, {"LOGLEVEL": "WARNING"}, clear=True):
        assert ExperimentTest.logger.level == logging.WARNING


def test_full_config_jsonschema_appends_output_settings():
    schema = ExperimentTest.full_config_jsonschema()
    assert list(schema["properties"])[:4] == ["label", "k", "default_true", "default_false"]
    assert {"format", "output", "output_dir", "n_jobs"} <= set(schema["properties"])
    # The class attribute is not modified.
    assert "format" not in ExperimentTest.config_jsonschema["properties"]


def test_about(capsys):
    ExperimentTest.print_about(format="json")
    info = json.loads(capsys.readouterr().out)
    assert info["name"] == "experiment-test"
    assert info["description"] == "Example experiment for tests."
    assert "label" in info["settings"]["properties"]

    ExperimentTest.print_about(format="markdown")
    markdown = capsys.readouterr().out
    assert markdown.startswith("## `experiment-test`")
    assert "| label " in markdown

    ExperimentTest.print_about()
    assert "Name: experiment-test" in capsys.readouterr().out


def test_write_result(tmpdir, capsys):
    experiment = ExperimentTest(config={"label": "a"})
    experiment.write_result(experiment.run())
    assert capsys.readouterr().out == "label,k\na,16\n"

    experiment = ExperimentTest(config={"label": "a", "output_dir": str(tmpdir), "format": "json"})
    experiment.write_result(experiment.run())
    written = json.loads((Path(tmpdir) / "experiment-test.json").read_text())
    assert written == {"rows": [{"label": "a", "k": 16}]}


def test_failed_result_writes_witnesses(tmpdir):
    output = Path(tmpdir) / "out.csv"
    experiment = ExperimentTest(config={"label": "a", "output": str(output)})
    experiment.write_result(ExperimentResult(rows=[{"x": 1}], passed=False, witnesses=[[0.5]]))
    assert output.read_text() == "x\n1\n"
    assert json.loads((Path(tmpdir) / "out.witnesses.json").read_text()) == {
        "witnesses": [[0.5]]
    }
