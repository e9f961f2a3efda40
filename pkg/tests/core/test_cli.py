"""Test the command line: subcommand wiring, config precedence and exit codes."""

import json
import math
import os
from pathlib import Path
from unittest import mock

import pytest
from click.testing import CliRunner

from rough_harmonics.cli.main import (
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VERIFICATION_FAILED,
    cli,
    run,
)


@pytest.fixture
def cli_runner():
    """Returns a click CLI runner."""
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_cwd(tmpdir, monkeypatch: pytest.MonkeyPatch):
    """Keep .env lookups and relative outputs inside a temporary directory."""
    monkeypatch.chdir(tmpdir)
    monkeypatch.delenv("ROUGH_HARMONICS_OUTPUT_DIR", raising=False)
    return Path(tmpdir)


def test_help_lists_every_subcommand(cli_runner: CliRunner):
    result = cli_runner.invoke(cli, ["--help"])
    assert result.exit_code == 0
    for name in ("dims", "sobolev", "neuheisel-sample", "transmission-verify"):
        assert name in result.output


def test_dims(capsys):
    assert run(["dims", "--n", "3", "--k", "0..8"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "k,d_k,mu_k"
    assert lines[3] == "2,5,6"
    assert len(lines) == 10


def test_energy_json(capsys):
    argv = ["energy", "--variant", "hadamard", "--terms", "6", "--no-quadrature"]
    assert run([*argv, "--format", "json"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["formula"] == pytest.approx(6 * math.pi, rel=1e-12)
    assert document["terms"] == 6


def test_sobolev_limit(capsys):
    argv = ["sobolev", "--variant", "notHs", "--n", "2", "--seed", "7", "--sigma", "0"]
    assert run([*argv, "--K", "2^20", "--format", "json"]) == EXIT_OK
    scan = json.loads(capsys.readouterr().out)["scans"][0]
    assert scan["limit_estimate"] == pytest.approx(math.pi**4 / 90, abs=1e-6)


def test_flags_override_config_files(isolated_cwd: Path, capsys):
    config = isolated_cwd / "dims.env"
    config.write_text("N=4\nK=0..2\n")
    assert run(["dims", "--config", str(config)]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1:] == ["0,1,0", "1,4,3", "2,9,8"]

    assert run(["dims", "--config", str(config), "--n", "2"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1:] == ["0,1,0", "1,2,1", "2,2,4"]


def test_output_directory_from_environment(isolated_cwd: Path):
    with mock.patch.dict(os.environ, {"ROUGH_HARMONICS_OUTPUT_DIR": "results"}):
        assert run(["dims", "--n", "3", "--k", "0..1", "--format", "json"]) == EXIT_OK
    written = json.loads((isolated_cwd / "results" / "dims.json").read_text())
    assert written["n"] == 3


def test_about(capsys):
    assert run(["eval", "--about", "--format", "json"]) == EXIT_OK
    info = json.loads(capsys.readouterr().out)
    assert info["name"] == "eval"
    assert "point" in info["settings"]["required"]


@pytest.mark.parametrize(
    "argv",
    [
        ["dims", "--n", "3", "--unknown-flag", "1"],
        ["no-such-subcommand"],
        ["dims", "--k", "0..3"],
        ["dims", "--n", "3", "--k", "8..0"],
        ["eval", "--variant", "notCbeta", "--n", "3", "--point", "0.1,0.2"],
        ["transmission-verify", "--variant", "example", "--n", "4", "--K", "16"],
        ["dims", "--n", "3", "--config", "missing.env"],
    ],
)
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_failed_verification_writes_witnesses(isolated_cwd: Path):
    output = isolated_cwd / "verify.json"
    argv = ["transmission-verify", "--variant", "tilde", "--n", "3", "--K", "2^6"]
    argv += ["--bumps", "1", "--rho", "1", "--format", "json", "--output", str(output)]
    assert run(argv) == EXIT_VERIFICATION_FAILED

    report = json.loads(output.read_text())
    assert report["pass"] is False
    witnesses = json.loads((isolated_cwd / "verify.witnesses.json").read_text())["witnesses"]
    assert witnesses
    assert witnesses[0]["condition"] == "interface_trace"
