"""CSV and JSON result writers."""

import io
import json
import logging
import math
from pathlib import Path

import numpy as np
import pytest

from rough_harmonics.experiment_base import ExperimentResult
from rough_harmonics.writers import (
    CSVWriter,
    JSONWriter,
    format_cell,
    get_writer,
    resolve_output_path,
    witnesses_path,
    write_witnesses,
)


def test_format_cell():
    assert format_cell(True) == "true"
    assert format_cell(np.bool_(False)) == "false"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell(0.1) == "0.10000000000000001"
    assert format_cell(math.inf) == "inf"
    assert format_cell(None) == ""
    assert format_cell(np.array([1.0, 2.5])) == "[1.0,2.5]"
    assert format_cell("convergent") == "convergent"


def test_csv_header_is_the_union_of_keys():
    result = ExperimentResult(rows=[{"k": 0, "d_k": 1}, {"k": 1, "d_k": 3, "mu_k": 2.0}])
    assert CSVWriter().render(result) == "k,d_k,mu_k\n0,1,\n1,3,2\n"
    assert CSVWriter().render(ExperimentResult()) == ""


def test_json_document():
    result = ExperimentResult(rows=[{"k": 1}], document={"pass": True, "bound": math.inf})
    text = JSONWriter().render(result)
    assert json.loads(text) == {"pass": True, "bound": math.inf}
    assert "Infinity" in text
    assert json.loads(JSONWriter().render(ExperimentResult(rows=[{"k": 1}]))) == {
        "rows": [{"k": 1}]
    }


def test_get_writer():
    assert isinstance(get_writer("CSV"), CSVWriter)
    assert isinstance(get_writer("json"), JSONWriter)
    with pytest.raises(ValueError):
        get_writer("parquet")


def test_resolve_output_path():
    assert resolve_output_path("dims", "csv", "out.csv", "results") == Path("out.csv")
    assert resolve_output_path("dims", "json", None, "results") == Path("results/dims.json")
    assert resolve_output_path("dims", "csv", None, None) is None
    assert witnesses_path(Path("results/verify.json")) == Path("results/verify.witnesses.json")


def test_write_path_creates_directories(tmpdir):
    path = Path(tmpdir) / "nested" / "dims.csv"
    CSVWriter().write_path(ExperimentResult(rows=[{"k": 0}]), path)
    assert path.read_text() == "k\n0\n"


def test_write_witnesses(tmpdir, caplog):
    stream = io.StringIO()
    write_witnesses([{"theta": np.array([1.0, 0.0])}], None, stream)
    assert json.loads(stream.getvalue()) == {"witnesses": [{"theta": [1.0, 0.0]}]}

    path = Path(tmpdir) / "verify.json"
    with caplog.at_level(logging.WARNING):
        write_witnesses([1], path, stream)
    assert json.loads(witnesses_path(path).read_text()) == {"witnesses": [1]}
    assert "witnesses written" in caplog.text
