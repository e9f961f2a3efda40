"""Literal parsers and config file readers."""

import json

import pytest

from rough_harmonics.helpers._util import (
    format_float,
    normalize_key,
    parse_dyadic,
    parse_float_list,
    parse_int_list,
    read_flat_config_file,
    read_json_file,
)


@pytest.mark.parametrize(
    "value,expected",
    [(7, 7), ("12", 12), ("2^10", 1024), ("2**20", 2**20), (" 4 ^ 3 ", 64)],
)
def test_parse_dyadic(value, expected):
    assert parse_dyadic(value) == expected


@pytest.mark.parametrize("value", ["two", "2^", "1.5", True])
def test_parse_dyadic_rejects(value):
    with pytest.raises(ValueError):
        parse_dyadic(value)


def test_parse_int_list():
    assert parse_int_list("0..8") == list(range(9))
    assert parse_int_list("1,2,2^4") == [1, 2, 16]
    assert parse_int_list("0..2, 2^3..2^3") == [0, 1, 2, 8]
    assert parse_int_list(["2^2", 5]) == [4, 5]
    with pytest.raises(ValueError):
        parse_int_list("8..2")


def test_parse_float_list():
    assert parse_float_list("0.1,0.25,0.35") == [0.1, 0.25, 0.35]
    assert parse_float_list(0.5) == [0.5]
    assert parse_float_list(["1e-3", 2]) == [1e-3, 2.0]


def test_normalize_key():
    assert normalize_key("--sigma-grid") == "sigma_grid"
    assert normalize_key("SIGMA_GRID") == "sigma_grid"
    assert normalize_key(" K ") == "k"


def test_format_float():
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(1 / 3)) == 1 / 3
    assert format_float(float("nan")) == "nan"
    assert format_float(float("-inf")) == "-inf"


def test_read_flat_config_file(tmpdir):
    env_file = tmpdir.join("run.env")
    env_file.write("# comment\nVARIANT=notHs\nK='2^12'\nTOL=\n")
    assert read_flat_config_file(str(env_file)) == {"variant": "notHs", "k": "2^12", "tol": ""}

    json_file = tmpdir.join("run.json")
    json_file.write(json.dumps({"Variant": "zonal", "n": 3}))
    assert read_flat_config_file(str(json_file)) == {"variant": "zonal", "n": 3}

    with pytest.raises(FileNotFoundError):
        read_flat_config_file(str(tmpdir.join("missing.env")))


def test_read_json_file_errors():
    with pytest.raises(RuntimeError):
        read_json_file("")
    with pytest.raises(FileNotFoundError):
        read_json_file("does-not-exist.json")
